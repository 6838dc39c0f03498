#include "dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>

#include "error.hpp"
#include "rng.hpp"

namespace semnet {

namespace {

constexpr uint32_t kImagesMagic = 0x00000803;
constexpr uint32_t kLabelsMagic = 0x00000801;

uint32_t read_be32(std::istream& in, const std::string& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) {
        fail(Errc::truncated_file, "unexpected end of file in '" + path + "'");
    }
    return (uint32_t(b[0]) << 24) | (uint32_t(b[1]) << 16) | (uint32_t(b[2]) << 8) | uint32_t(b[3]);
}

void write_be32(std::ostream& out, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<char*>(b), 4);
}

std::vector<uint8_t> read_exact(std::istream& in, size_t n, const std::string& path) {
    std::vector<uint8_t> buf(n);
    if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n))) {
        fail(Errc::truncated_file, "'" + path + "' is shorter than its header declares");
    }
    return buf;
}

}  // namespace

LabeledImageSet load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) fail(Errc::io_error, "cannot open '" + images_path + "'");
    uint32_t magic = read_be32(img, images_path);
    if (magic != kImagesMagic) {
        fail(Errc::bad_magic, "'" + images_path + "' is not an IDX image file");
    }
    uint32_t count = read_be32(img, images_path);
    uint32_t rows = read_be32(img, images_path);
    uint32_t cols = read_be32(img, images_path);
    if (rows != kImageSide || cols != kImageSide) {
        fail(Errc::dim_mismatch, "expected 28x28 images in '" + images_path + "'");
    }

    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) fail(Errc::io_error, "cannot open '" + labels_path + "'");
    uint32_t lmagic = read_be32(lab, labels_path);
    if (lmagic != kLabelsMagic) {
        fail(Errc::bad_magic, "'" + labels_path + "' is not an IDX label file");
    }
    uint32_t lcount = read_be32(lab, labels_path);
    if (lcount != count) {
        fail(Errc::count_mismatch, "image/label counts differ between the two files");
    }

    auto raw = read_exact(img, size_t(count) * kImagePixels, images_path);
    auto raw_labels = read_exact(lab, count, labels_path);
    for (uint8_t l : raw_labels) {
        if (l > 9) fail(Errc::parse_error, "label outside 0..9 in '" + labels_path + "'");
    }

    LabeledImageSet set;
    set.pixels.resize(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) {
        set.pixels[i] = raw[i] / 255.0;
    }
    set.labels = std::move(raw_labels);
    return set;
}

void save_idx(const LabeledImageSet& set, const std::string& images_path,
              const std::string& labels_path) {
    std::ofstream img(images_path, std::ios::binary);
    if (!img) fail(Errc::io_error, "cannot write '" + images_path + "'");
    write_be32(img, kImagesMagic);
    write_be32(img, static_cast<uint32_t>(set.size()));
    write_be32(img, kImageSide);
    write_be32(img, kImageSide);
    std::vector<uint8_t> raw(set.pixels.size());
    for (size_t i = 0; i < set.pixels.size(); ++i) {
        raw[i] = static_cast<uint8_t>(std::lround(std::clamp(set.pixels[i], 0.0, 1.0) * 255.0));
    }
    img.write(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!img) fail(Errc::io_error, "failed writing '" + images_path + "'");

    std::ofstream lab(labels_path, std::ios::binary);
    if (!lab) fail(Errc::io_error, "cannot write '" + labels_path + "'");
    write_be32(lab, kLabelsMagic);
    write_be32(lab, static_cast<uint32_t>(set.size()));
    lab.write(reinterpret_cast<const char*>(set.labels.data()),
              static_cast<std::streamsize>(set.labels.size()));
    if (!lab) fail(Errc::io_error, "failed writing '" + labels_path + "'");
}

namespace {

using Stroke = std::vector<std::array<double, 2>>;

Stroke ring(double cx, double cy, double rx, double ry, int segments = 12) {
    Stroke s;
    for (int k = 0; k <= segments; ++k) {
        double a = 2.0 * std::numbers::pi * k / segments;
        s.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
    }
    return s;
}

// Stroke skeletons per digit in a unit design box, y pointing down.
const std::vector<Stroke>& glyph_strokes(uint8_t digit) {
    static const std::array<std::vector<Stroke>, 10> glyphs = [] {
        std::array<std::vector<Stroke>, 10> g;
        g[0] = {ring(0.50, 0.50, 0.26, 0.38)};
        g[1] = {{{0.34, 0.28}, {0.52, 0.12}, {0.52, 0.88}}};
        g[2] = {{{0.25, 0.30},
                 {0.30, 0.16},
                 {0.50, 0.10},
                 {0.70, 0.16},
                 {0.75, 0.30},
                 {0.70, 0.45},
                 {0.30, 0.72},
                 {0.25, 0.88},
                 {0.78, 0.88}}};
        g[3] = {{{0.26, 0.18},
                 {0.46, 0.10},
                 {0.68, 0.16},
                 {0.72, 0.32},
                 {0.54, 0.46},
                 {0.72, 0.60},
                 {0.75, 0.76},
                 {0.54, 0.90},
                 {0.27, 0.83}}};
        g[4] = {{{0.62, 0.12}, {0.22, 0.62}, {0.80, 0.62}}, {{0.62, 0.12}, {0.62, 0.90}}};
        g[5] = {{{0.72, 0.12},
                 {0.28, 0.12},
                 {0.26, 0.46},
                 {0.55, 0.40},
                 {0.74, 0.52},
                 {0.74, 0.72},
                 {0.55, 0.88},
                 {0.28, 0.82}}};
        g[6] = {{{0.66, 0.10},
                 {0.44, 0.20},
                 {0.30, 0.42},
                 {0.26, 0.64},
                 {0.34, 0.84},
                 {0.56, 0.90},
                 {0.72, 0.78},
                 {0.72, 0.62},
                 {0.56, 0.52},
                 {0.38, 0.56},
                 {0.28, 0.68}}};
        g[7] = {{{0.22, 0.12}, {0.78, 0.12}, {0.48, 0.88}}, {{0.38, 0.50}, {0.66, 0.50}}};
        g[8] = {ring(0.50, 0.30, 0.18, 0.19, 10), ring(0.50, 0.68, 0.22, 0.21, 10)};
        g[9] = {{{0.34, 0.90},
                 {0.56, 0.80},
                 {0.70, 0.58},
                 {0.74, 0.36},
                 {0.66, 0.16},
                 {0.44, 0.10},
                 {0.28, 0.22},
                 {0.28, 0.38},
                 {0.44, 0.48},
                 {0.62, 0.44},
                 {0.72, 0.32}}};
        return g;
    }();
    return glyphs[digit];
}

double point_segment_distance(double px, double py, const std::array<double, 2>& a,
                              const std::array<double, 2>& b) {
    double vx = b[0] - a[0];
    double vy = b[1] - a[1];
    double wx = px - a[0];
    double wy = py - a[1];
    double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0 ? std::clamp((wx * vx + wy * vy) / len2, 0.0, 1.0) : 0.0;
    double dx = px - (a[0] + t * vx);
    double dy = py - (a[1] + t * vy);
    return std::hypot(dx, dy);
}

void draw_digit(uint8_t digit, Rng& rng, std::span<double> out) {
    // Per-sample style parameters, drawn in a fixed order.
    double rot = rng.uniform(-0.22, 0.22);
    double sx = rng.uniform(0.75, 1.05);
    double sy = rng.uniform(0.75, 1.05);
    double shear = rng.uniform(-0.18, 0.18);
    double tx = rng.uniform(-1.5, 1.5);
    double ty = rng.uniform(-1.5, 1.5);
    double thickness = rng.uniform(0.8, 1.5);
    constexpr double kEdge = 0.7;  // antialias ramp width in pixels

    double cos_r = std::cos(rot);
    double sin_r = std::sin(rot);
    auto to_pixels = [&](std::array<double, 2> p) {
        double u = p[0] - 0.5 + rng.uniform(-0.02, 0.02);
        double v = p[1] - 0.5 + rng.uniform(-0.02, 0.02);
        u += shear * v;
        double x = u * 20.0 * sx;
        double y = v * 20.0 * sy;
        return std::array<double, 2>{14.0 + tx + x * cos_r - y * sin_r,
                                     14.0 + ty + x * sin_r + y * cos_r};
    };

    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& stroke : glyph_strokes(digit)) {
        std::vector<std::array<double, 2>> pts;
        pts.reserve(stroke.size());
        for (const auto& p : stroke) {
            pts.push_back(to_pixels(p));
        }
        for (size_t i = 0; i + 1 < pts.size(); ++i) {
            const auto& a = pts[i];
            const auto& b = pts[i + 1];
            double pad = thickness + kEdge + 0.5;
            int x0 = std::max(0, static_cast<int>(std::floor(std::min(a[0], b[0]) - pad)));
            int x1 = std::min<int>(kImageSide - 1, static_cast<int>(std::ceil(std::max(a[0], b[0]) + pad)));
            int y0 = std::max(0, static_cast<int>(std::floor(std::min(a[1], b[1]) - pad)));
            int y1 = std::min<int>(kImageSide - 1, static_cast<int>(std::ceil(std::max(a[1], b[1]) + pad)));
            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) {
                    double d = point_segment_distance(x + 0.5, y + 0.5, a, b);
                    double v = std::clamp((thickness + kEdge - d) / kEdge, 0.0, 1.0);
                    double& px = out[static_cast<size_t>(y) * kImageSide + x];
                    px = std::max(px, v);
                }
            }
        }
    }
    // Snap to the 8-bit grid so files and memory agree.
    for (double& p : out) {
        p = std::lround(p * 255.0) / 255.0;
    }
}

}  // namespace

LabeledImageSet generate_digits(uint64_t seed, size_t count) {
    if (count == 0) fail(Errc::invalid_args, "cannot generate an empty image set");
    Rng rng = Rng::substream(seed, 0xD1617D5ULL);
    LabeledImageSet set;
    set.pixels.resize(count * kImagePixels);
    set.labels.resize(count);
    for (size_t i = 0; i < count; ++i) {
        uint8_t digit = static_cast<uint8_t>(i % 10);
        set.labels[i] = digit;
        draw_digit(digit, rng, {set.pixels.data() + i * kImagePixels, kImagePixels});
    }
    return set;
}

}  // namespace semnet
