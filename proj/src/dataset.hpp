#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace semnet {

inline constexpr size_t kImageSide = 28;
inline constexpr size_t kImagePixels = kImageSide * kImageSide;

struct LabeledImageSet {
    std::vector<double> pixels;  // size() * 784, row-major, values in [0,1]
    std::vector<uint8_t> labels;

    size_t size() const { return labels.size(); }
    std::span<const double> image(size_t i) const {
        return {pixels.data() + i * kImagePixels, kImagePixels};
    }
};

// IDX container (magic 0x00000803 for images, 0x00000801 for labels,
// big-endian dimensions, unsigned bytes). Pixels are scaled to [0,1].
LabeledImageSet load_idx(const std::string& images_path, const std::string& labels_path);
void save_idx(const LabeledImageSet& set, const std::string& images_path,
              const std::string& labels_path);

// Procedural 28x28 digit images: per-digit stroke skeletons drawn under a
// seeded random affine warp. Labels cycle 0..9 so classes stay balanced.
// Pixels are already quantized to 8-bit levels, so a save/load round trip
// through IDX files reproduces the set exactly.
LabeledImageSet generate_digits(uint64_t seed, size_t count);

}  // namespace semnet
