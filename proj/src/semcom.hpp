#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "config.hpp"
#include "neural.hpp"

namespace semnet::semcom {

// Uniform scalar quantizer mapping a closed value range onto byte codes.
struct QuantSpec {
    double lo = -4.0;
    double hi = 4.0;

    double step() const { return (hi - lo) / 255.0; }
};

uint8_t quantize(double value, const QuantSpec& spec = {});
double dequantize(uint8_t code, const QuantSpec& spec = {});

std::vector<uint8_t> quantize_all(std::span<const double> values, const QuantSpec& spec = {});
std::vector<double> dequantize_all(std::span<const uint8_t> codes, const QuantSpec& spec = {});

// One sensor report in transit. SemCom payloads carry the 20 quantized
// latent bytes; Raw payloads carry all 784 pixels as bytes.
struct Payload {
    Branch branch = Branch::SemCom;
    uint32_t device_id = 0;
    uint32_t robot_id = 0;
    std::vector<uint8_t> data;

    size_t bits_on_wire() const { return data.size() * 8; }
};

size_t expected_payload_bytes(Branch branch);

// Compress an image into a payload for the given branch. SemCom runs the
// encoder and quantizes the latent mean; Raw snaps pixels to bytes.
Payload make_payload(Branch branch, uint32_t device_id, uint32_t robot_id,
                     std::span<const double> image, const neural::VaeModel& vae,
                     const QuantSpec& spec = {});

// Reconstruct the 784-pixel image a payload encodes. SemCom payloads are
// dequantized and run through the decoder; Raw payloads map bytes back to
// [0, 1] directly.
std::vector<double> decode_payload(const Payload& payload, const neural::VaeModel& vae,
                                   const QuantSpec& spec = {});

// Wire layout (little-endian): u8 branch, u32 device_id, u32 robot_id,
// u16 byte count, then the payload bytes.
std::vector<uint8_t> serialize_payload(const Payload& payload);
Payload parse_payload(std::span<const uint8_t> wire);

}  // namespace semnet::semcom
