#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "error.hpp"

using namespace semnet;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

void write_bytes(const std::filesystem::path& path, const std::vector<uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

std::vector<uint8_t> be32(uint32_t v) {
    return {static_cast<uint8_t>(v >> 24), static_cast<uint8_t>(v >> 16),
            static_cast<uint8_t>(v >> 8), static_cast<uint8_t>(v)};
}

void append(std::vector<uint8_t>& dst, const std::vector<uint8_t>& src) {
    dst.insert(dst.end(), src.begin(), src.end());
}

Errc load_code(const std::string& images, const std::string& labels) {
    try {
        (void)load_idx(images, labels);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return Errc::internal;
}

}  // namespace

TEST_CASE("generated digits are deterministic and well-formed") {
    LabeledImageSet a = generate_digits(5, 200);
    LabeledImageSet b = generate_digits(5, 200);
    CHECK(a.size() == 200);
    CHECK(a.pixels == b.pixels);
    CHECK(a.labels == b.labels);
    CHECK(a.pixels.size() == 200 * kImagePixels);

    std::set<uint8_t> classes;
    for (uint8_t l : a.labels) {
        CHECK(l <= 9);
        classes.insert(l);
    }
    CHECK(classes.size() == 10);

    for (double p : a.pixels) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }

    LabeledImageSet c = generate_digits(6, 200);
    CHECK(a.pixels != c.pixels);
}

TEST_CASE("images of the same class differ between samples") {
    LabeledImageSet set = generate_digits(3, 100);
    // find two samples with the same label and confirm the renderings differ
    for (size_t i = 0; i < set.size(); ++i) {
        for (size_t j = i + 1; j < set.size(); ++j) {
            if (set.labels[i] == set.labels[j]) {
                auto a = set.image(i);
                auto bimg = set.image(j);
                bool differ = false;
                for (size_t k = 0; k < kImagePixels; ++k) {
                    if (a[k] != bimg[k]) {
                        differ = true;
                        break;
                    }
                }
                CHECK(differ);
                return;
            }
        }
    }
    FAIL("no label collision in 100 samples");
}

TEST_CASE("idx round trip preserves the set exactly") {
    auto images = temp_file("ds_rt_images.idx");
    auto labels = temp_file("ds_rt_labels.idx");
    LabeledImageSet set = generate_digits(11, 64);
    save_idx(set, images.string(), labels.string());
    LabeledImageSet back = load_idx(images.string(), labels.string());
    CHECK(back.labels == set.labels);
    CHECK(back.pixels == set.pixels);  // generated pixels already sit on the u8 grid
    std::filesystem::remove(images);
    std::filesystem::remove(labels);
}

TEST_CASE("idx loader rejects malformed files with specific codes") {
    auto images = temp_file("ds_bad_images.idx");
    auto labels = temp_file("ds_bad_labels.idx");

    // a valid 2-image pair to mutate
    std::vector<uint8_t> img_bytes;
    append(img_bytes, be32(0x00000803));
    append(img_bytes, be32(2));
    append(img_bytes, be32(28));
    append(img_bytes, be32(28));
    img_bytes.insert(img_bytes.end(), 2 * 28 * 28, 0x40);
    std::vector<uint8_t> lab_bytes;
    append(lab_bytes, be32(0x00000801));
    append(lab_bytes, be32(2));
    lab_bytes.push_back(3);
    lab_bytes.push_back(7);

    SUBCASE("valid pair loads") {
        write_bytes(images, img_bytes);
        write_bytes(labels, lab_bytes);
        LabeledImageSet set = load_idx(images.string(), labels.string());
        CHECK(set.size() == 2);
        CHECK(set.labels == std::vector<uint8_t>{3, 7});
        CHECK(set.pixels[0] == doctest::Approx(0x40 / 255.0));
    }
    SUBCASE("wrong image magic") {
        img_bytes[3] = 0x99;
        write_bytes(images, img_bytes);
        write_bytes(labels, lab_bytes);
        CHECK(load_code(images.string(), labels.string()) == Errc::bad_magic);
    }
    SUBCASE("wrong label magic") {
        lab_bytes[3] = 0x99;
        write_bytes(images, img_bytes);
        write_bytes(labels, lab_bytes);
        CHECK(load_code(images.string(), labels.string()) == Errc::bad_magic);
    }
    SUBCASE("count mismatch between files") {
        lab_bytes[7] = 3;
        lab_bytes.push_back(1);
        write_bytes(images, img_bytes);
        write_bytes(labels, lab_bytes);
        CHECK(load_code(images.string(), labels.string()) == Errc::count_mismatch);
    }
    SUBCASE("truncated pixel data") {
        img_bytes.resize(img_bytes.size() - 100);
        write_bytes(images, img_bytes);
        write_bytes(labels, lab_bytes);
        CHECK(load_code(images.string(), labels.string()) == Errc::truncated_file);
    }
    SUBCASE("wrong image dimensions") {
        std::vector<uint8_t> small;
        append(small, be32(0x00000803));
        append(small, be32(2));
        append(small, be32(14));
        append(small, be32(14));
        small.insert(small.end(), 2 * 14 * 14, 0x40);
        write_bytes(images, small);
        write_bytes(labels, lab_bytes);
        CHECK(load_code(images.string(), labels.string()) == Errc::dim_mismatch);
    }
    SUBCASE("label out of range") {
        lab_bytes[8] = 12;
        write_bytes(images, img_bytes);
        write_bytes(labels, lab_bytes);
        CHECK(load_code(images.string(), labels.string()) == Errc::parse_error);
    }
    SUBCASE("missing file") {
        CHECK(load_code("/no/such/images.idx", "/no/such/labels.idx") == Errc::io_error);
    }

    std::filesystem::remove(images);
    std::filesystem::remove(labels);
}
