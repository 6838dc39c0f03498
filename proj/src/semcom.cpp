#include "semcom.hpp"

#include <algorithm>
#include <cmath>

#include "dataset.hpp"
#include "error.hpp"

namespace semnet::semcom {

namespace {

void check_spec(const QuantSpec& spec) {
    if (!(spec.hi > spec.lo)) {
        fail(Errc::invalid_args, "quantizer range must have hi > lo");
    }
}

void check_payload_shape(const Payload& payload) {
    size_t want = expected_payload_bytes(payload.branch);
    if (payload.data.size() != want) {
        fail(Errc::malformed_payload,
             std::string(branch_name(payload.branch)) + " payload must carry " +
                 std::to_string(want) + " bytes, got " + std::to_string(payload.data.size()));
    }
}

}  // namespace

uint8_t quantize(double value, const QuantSpec& spec) {
    check_spec(spec);
    double clamped = std::clamp(value, spec.lo, spec.hi);
    double scaled = (clamped - spec.lo) / (spec.hi - spec.lo) * 255.0;
    // round() rounds halves away from zero, matching the codec contract.
    return static_cast<uint8_t>(std::lround(scaled));
}

double dequantize(uint8_t code, const QuantSpec& spec) {
    check_spec(spec);
    return spec.lo + static_cast<double>(code) / 255.0 * (spec.hi - spec.lo);
}

std::vector<uint8_t> quantize_all(std::span<const double> values, const QuantSpec& spec) {
    std::vector<uint8_t> out(values.size());
    for (size_t i = 0; i < values.size(); ++i) out[i] = quantize(values[i], spec);
    return out;
}

std::vector<double> dequantize_all(std::span<const uint8_t> codes, const QuantSpec& spec) {
    std::vector<double> out(codes.size());
    for (size_t i = 0; i < codes.size(); ++i) out[i] = dequantize(codes[i], spec);
    return out;
}

size_t expected_payload_bytes(Branch branch) {
    return branch == Branch::SemCom ? neural::kLatentDim : kImagePixels;
}

Payload make_payload(Branch branch, uint32_t device_id, uint32_t robot_id,
                     std::span<const double> image, const neural::VaeModel& vae,
                     const QuantSpec& spec) {
    if (image.size() != kImagePixels) {
        fail(Errc::dim_mismatch, "payload source must be a 784-pixel image");
    }
    Payload payload;
    payload.branch = branch;
    payload.device_id = device_id;
    payload.robot_id = robot_id;
    if (branch == Branch::SemCom) {
        std::vector<double> latent = neural::vae_encode_mu(vae, image);
        payload.data = quantize_all(latent, spec);
    } else {
        payload.data.resize(image.size());
        for (size_t i = 0; i < image.size(); ++i) {
            double p = std::clamp(image[i], 0.0, 1.0);
            payload.data[i] = static_cast<uint8_t>(std::lround(p * 255.0));
        }
    }
    check_payload_shape(payload);
    return payload;
}

std::vector<double> decode_payload(const Payload& payload, const neural::VaeModel& vae,
                                   const QuantSpec& spec) {
    check_payload_shape(payload);
    if (payload.branch == Branch::SemCom) {
        std::vector<double> latent = dequantize_all(payload.data, spec);
        return neural::vae_decode(vae, latent);
    }
    std::vector<double> image(payload.data.size());
    for (size_t i = 0; i < payload.data.size(); ++i) {
        image[i] = static_cast<double>(payload.data[i]) / 255.0;
    }
    return image;
}

std::vector<uint8_t> serialize_payload(const Payload& payload) {
    check_payload_shape(payload);
    std::vector<uint8_t> wire;
    wire.reserve(11 + payload.data.size());
    wire.push_back(payload.branch == Branch::SemCom ? 0 : 1);
    auto push_u32 = [&](uint32_t v) {
        wire.push_back(static_cast<uint8_t>(v));
        wire.push_back(static_cast<uint8_t>(v >> 8));
        wire.push_back(static_cast<uint8_t>(v >> 16));
        wire.push_back(static_cast<uint8_t>(v >> 24));
    };
    push_u32(payload.device_id);
    push_u32(payload.robot_id);
    uint16_t len = static_cast<uint16_t>(payload.data.size());
    wire.push_back(static_cast<uint8_t>(len));
    wire.push_back(static_cast<uint8_t>(len >> 8));
    wire.insert(wire.end(), payload.data.begin(), payload.data.end());
    return wire;
}

Payload parse_payload(std::span<const uint8_t> wire) {
    if (wire.size() < 11) {
        fail(Errc::malformed_payload, "payload frame is shorter than its 11-byte header");
    }
    Payload payload;
    if (wire[0] == 0) {
        payload.branch = Branch::SemCom;
    } else if (wire[0] == 1) {
        payload.branch = Branch::Raw;
    } else {
        fail(Errc::malformed_payload, "unknown branch code " + std::to_string(wire[0]));
    }
    auto read_u32 = [&](size_t at) {
        return uint32_t(wire[at]) | (uint32_t(wire[at + 1]) << 8) | (uint32_t(wire[at + 2]) << 16) |
               (uint32_t(wire[at + 3]) << 24);
    };
    payload.device_id = read_u32(1);
    payload.robot_id = read_u32(5);
    uint16_t len = static_cast<uint16_t>(wire[9] | (wire[10] << 8));
    if (wire.size() != 11u + len) {
        fail(Errc::malformed_payload, "payload frame length does not match its header");
    }
    payload.data.assign(wire.begin() + 11, wire.end());
    check_payload_shape(payload);
    return payload;
}

}  // namespace semnet::semcom
