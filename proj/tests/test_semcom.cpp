#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "dataset.hpp"
#include "error.hpp"
#include "neural.hpp"
#include "rng.hpp"
#include "semcom.hpp"

using namespace semnet;
using semcom::Payload;
using semcom::QuantSpec;

TEST_CASE("quantizer endpoints and midpoint") {
    CHECK(semcom::quantize(-4.0) == 0);
    CHECK(semcom::quantize(4.0) == 255);
    CHECK(semcom::quantize(0.0) == 128);
    CHECK(semcom::quantize(10.0) == 255);   // clamped high
    CHECK(semcom::quantize(-10.0) == 0);    // clamped low
    CHECK(semcom::dequantize(0) == -4.0);
    CHECK(semcom::dequantize(255) == 4.0);
    CHECK(semcom::dequantize(128) == doctest::Approx(0.01568627450980338).epsilon(1e-12));
}

TEST_CASE("round-trip error is bounded by half a quantization step") {
    QuantSpec spec;
    const double bound = spec.step() / 2.0 + 1e-9;
    Rng rng(31);
    for (int i = 0; i < 10000; ++i) {
        double x = rng.uniform(-4.0, 4.0);
        double back = semcom::dequantize(semcom::quantize(x));
        CHECK(std::abs(back - x) <= bound);
    }
    // out-of-range values clamp to the nearest endpoint
    CHECK(semcom::dequantize(semcom::quantize(7.3)) == 4.0);
    CHECK(semcom::dequantize(semcom::quantize(-123.0)) == -4.0);
}

TEST_CASE("quantize_all and dequantize_all match elementwise application") {
    std::vector<double> xs = {-4.0, -1.0, 0.0, 2.5, 4.0};
    std::vector<uint8_t> codes = semcom::quantize_all(xs);
    REQUIRE(codes.size() == xs.size());
    for (size_t i = 0; i < xs.size(); ++i) CHECK(codes[i] == semcom::quantize(xs[i]));
    std::vector<double> back = semcom::dequantize_all(codes);
    for (size_t i = 0; i < xs.size(); ++i) CHECK(back[i] == semcom::dequantize(codes[i]));
}

TEST_CASE("payload sizes fix the per-transmission bit budget") {
    CHECK(semcom::expected_payload_bytes(Branch::SemCom) == 20);
    CHECK(semcom::expected_payload_bytes(Branch::Raw) == 784);

    neural::VaeModel vae = neural::make_vae(3);
    LabeledImageSet set = generate_digits(7, 1);
    Payload latent = semcom::make_payload(Branch::SemCom, 4, 1, set.image(0), vae);
    CHECK(latent.data.size() == 20);
    CHECK(latent.bits_on_wire() == 160);
    CHECK(latent.device_id == 4);
    CHECK(latent.robot_id == 1);

    Payload raw = semcom::make_payload(Branch::Raw, 4, 1, set.image(0), vae);
    CHECK(raw.data.size() == 784);
    CHECK(raw.bits_on_wire() == 6272);
    CHECK(6272.0 / 160.0 == 39.2);
}

TEST_CASE("raw payload bytes are the u8 image and decode back to pixels") {
    neural::VaeModel vae = neural::make_vae(3);
    LabeledImageSet set = generate_digits(7, 1);
    auto image = set.image(0);
    Payload raw = semcom::make_payload(Branch::Raw, 0, 0, image, vae);
    for (size_t i = 0; i < kImagePixels; ++i) {
        CHECK(raw.data[i] == static_cast<uint8_t>(std::lround(image[i] * 255.0)));
    }
    std::vector<double> decoded = semcom::decode_payload(raw, vae);
    REQUIRE(decoded.size() == kImagePixels);
    for (size_t i = 0; i < kImagePixels; ++i) {
        CHECK(decoded[i] == doctest::Approx(image[i]).epsilon(1e-12));
    }
}

TEST_CASE("semcom payload decodes through the decoder to an image-shaped output") {
    neural::VaeModel vae = neural::make_vae(3);
    LabeledImageSet set = generate_digits(7, 1);
    Payload latent = semcom::make_payload(Branch::SemCom, 0, 0, set.image(0), vae);
    std::vector<double> decoded = semcom::decode_payload(latent, vae);
    REQUIRE(decoded.size() == kImagePixels);
    for (double p : decoded) {
        CHECK(p > 0.0);
        CHECK(p < 1.0);  // sigmoid output
    }
}

TEST_CASE("wire format is the 11-byte little-endian header plus data") {
    Payload p;
    p.branch = Branch::SemCom;
    p.device_id = 0x01020304;
    p.robot_id = 0x0A0B0C0D;
    p.data.assign(20, 0xEE);
    std::vector<uint8_t> wire = semcom::serialize_payload(p);
    REQUIRE(wire.size() == 11 + 20);
    CHECK(wire[0] == 0);  // SemCom branch code
    CHECK(wire[1] == 0x04);
    CHECK(wire[2] == 0x03);
    CHECK(wire[3] == 0x02);
    CHECK(wire[4] == 0x01);
    CHECK(wire[5] == 0x0D);
    CHECK(wire[6] == 0x0C);
    CHECK(wire[7] == 0x0B);
    CHECK(wire[8] == 0x0A);
    CHECK(wire[9] == 20);   // length low byte
    CHECK(wire[10] == 0);   // length high byte
    CHECK(wire[11] == 0xEE);

    Payload back = semcom::parse_payload(wire);
    CHECK(back.branch == p.branch);
    CHECK(back.device_id == p.device_id);
    CHECK(back.robot_id == p.robot_id);
    CHECK(back.data == p.data);
}

TEST_CASE("malformed wire payloads are rejected") {
    auto code_of = [](const std::vector<uint8_t>& wire) {
        try {
            (void)semcom::parse_payload(wire);
        } catch (const Error& e) {
            return e.code();
        }
        return Errc::internal;
    };

    Payload p;
    p.branch = Branch::SemCom;
    p.data.assign(20, 1);
    std::vector<uint8_t> wire = semcom::serialize_payload(p);

    CHECK(code_of({}) == Errc::malformed_payload);
    CHECK(code_of({0, 1, 2}) == Errc::malformed_payload);

    std::vector<uint8_t> bad_branch = wire;
    bad_branch[0] = 9;
    CHECK(code_of(bad_branch) == Errc::malformed_payload);

    std::vector<uint8_t> short_data = wire;
    short_data.pop_back();
    CHECK(code_of(short_data) == Errc::malformed_payload);

    std::vector<uint8_t> extra_data = wire;
    extra_data.push_back(0);
    CHECK(code_of(extra_data) == Errc::malformed_payload);

    // declared length disagreeing with the branch contract (19 instead of 20)
    Payload wrong_len;
    wrong_len.branch = Branch::SemCom;
    wrong_len.data.assign(19, 1);
    CHECK_THROWS_AS((void)semcom::serialize_payload(wrong_len), Error);
    std::vector<uint8_t> crafted = wire;
    crafted[9] = 19;
    crafted.resize(11 + 19);
    CHECK(code_of(crafted) == Errc::malformed_payload);
}
