#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dataset.hpp"
#include "rng.hpp"

namespace semnet::neural {

struct Matrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(size_t r, size_t c) { return data[r * cols + c]; }
    double at(size_t r, size_t c) const { return data[r * cols + c]; }
    double* row(size_t r) { return data.data() + r * cols; }
    const double* row(size_t r) const { return data.data() + r * cols; }

    bool operator==(const Matrix&) const = default;
};

enum class Activation : uint8_t { Sigmoid = 0, ReLU = 1, Identity = 2 };

struct DenseLayer {
    Matrix weights;             // out_dim x in_dim
    std::vector<double> bias;   // out_dim
    Activation activation = Activation::Identity;

    size_t in_dim() const { return weights.cols; }
    size_t out_dim() const { return weights.rows; }

    bool operator==(const DenseLayer&) const = default;
};

struct MlpModel {
    std::vector<DenseLayer> layers;

    size_t input_dim() const { return layers.front().in_dim(); }
    size_t output_dim() const { return layers.back().out_dim(); }

    bool operator==(const MlpModel&) const = default;
};

inline constexpr size_t kLatentDim = 20;
inline constexpr size_t kVaeHidden = 400;
inline constexpr size_t kClassifierHidden = 128;
inline constexpr size_t kNumClasses = 10;

struct VaeModel {
    MlpModel encoder_trunk;   // 784 -> 400, ReLU
    DenseLayer mu_head;       // 400 -> 20, Identity
    DenseLayer logvar_head;   // 400 -> 20, Identity
    MlpModel decoder;         // 20 -> 400 ReLU -> 784 Sigmoid

    bool operator==(const VaeModel&) const = default;
};

// He-style seeded initialization: W ~ U(-sqrt(6/fan_in), +sqrt(6/fan_in)),
// biases zero, drawn layer by layer from one substream in listed order.
MlpModel make_classifier(uint64_t seed);
VaeModel make_vae(uint64_t seed);
DenseLayer make_layer(size_t out_dim, size_t in_dim, Activation act, Rng& rng);

// ---- forward / loss ----

struct MlpCache {
    Matrix input;
    std::vector<Matrix> post;  // activation outputs per layer
};

Matrix forward_mlp(const MlpModel& model, const Matrix& x, MlpCache* cache = nullptr);

// Mean cross-entropy of softmax(logits) against the labels.
double classifier_loss(const MlpModel& model, const Matrix& x, std::span<const uint8_t> labels);

// Predicted digit: argmax over outputs, ties broken toward the smaller digit.
uint8_t argmax_digit(std::span<const double> outputs);
double classifier_accuracy(const MlpModel& model, const LabeledImageSet& data);

struct VaeLossValue {
    double total = 0.0;
    double recon_bce = 0.0;
    double kl = 0.0;
};

// ELBO pieces as batch means; recon is the pixel-summed Bernoulli BCE with
// the reconstruction clamped to [1e-7, 1-1e-7], kl the standard Gaussian
// term -0.5*sum(1 + logvar - mu^2 - exp(logvar)). eps is the B x 20 matrix
// of reparameterization draws, passed explicitly so the loss is a pure
// function of (model, batch, eps).
VaeLossValue vae_loss(const VaeModel& model, const Matrix& x, const Matrix& eps, double beta = 1.0);

// Deterministic inference paths: the latent is the mu head output.
std::vector<double> vae_encode_mu(const VaeModel& model, std::span<const double> image);
std::vector<double> vae_decode(const VaeModel& model, std::span<const double> latent);

// ---- training ----

struct TrainOptions {
    uint32_t epochs = 5;
    double lr = 0.05;
    uint32_t batch_size = 64;
    uint64_t seed = 1;
    double momentum = 0.9;
    double beta = 1.0;  // KL weight, VAE only
};

struct TrainResult {
    std::vector<double> epoch_loss;  // per-epoch mean over samples
};

TrainResult train_classifier(MlpModel& model, const LabeledImageSet& data, const TrainOptions& opts);
TrainResult train_vae(VaeModel& model, const LabeledImageSet& data, const TrainOptions& opts);

// ---- gradient verification ----

// Compares analytic gradients with central finite differences on a seeded
// sample of at least 200 parameters (all of them for smaller models) and
// returns the max relative error |ga-gn| / max(1e-8, |ga|+|gn|).
double grad_check_classifier(const MlpModel& model, const Matrix& x,
                             std::span<const uint8_t> labels, double epsilon = 1e-4,
                             uint64_t seed = 0);
double grad_check_vae(const VaeModel& model, const Matrix& x, const Matrix& eps_repar,
                      double epsilon = 1e-4, uint64_t seed = 0);

// ---- serialization ----

enum class ModelKind : uint8_t { Mlp = 1, Vae = 2 };

using AnyModel = std::variant<MlpModel, VaeModel>;

// "SEMW" container, version 1: weights stored as row-major little-endian
// 32-bit floats, biases after each weight block. A VAE stores trunk, mu
// head, logvar head, decoder in that order.
void save_weights(const MlpModel& model, const std::string& path);
void save_weights(const VaeModel& model, const std::string& path);
void save_weights(const AnyModel& model, const std::string& path);
AnyModel load_weights(const std::string& path);

}  // namespace semnet::neural
