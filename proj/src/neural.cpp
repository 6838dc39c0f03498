#include "neural.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <set>

#include "error.hpp"

namespace semnet::neural {

namespace {

constexpr uint64_t kInitStream = 0x1217;
constexpr uint64_t kShuffleStream = 0x5407;
constexpr uint64_t kEpsStream = 0xE650;

// C (m x n) = A (m x k) * B (k x n)
void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c) {
    c = Matrix(a.rows, b.cols);
    for (size_t i = 0; i < a.rows; ++i) {
        const double* __restrict arow = a.row(i);
        double* __restrict crow = c.row(i);
        for (size_t k = 0; k < a.cols; ++k) {
            double aik = arow[k];
            const double* __restrict brow = b.row(k);
            for (size_t j = 0; j < b.cols; ++j) {
                crow[j] += aik * brow[j];
            }
        }
    }
}

// C (m x n) = A (m x k) * B^T, with B stored (n x k)
void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c) {
    c = Matrix(a.rows, b.rows);
    for (size_t i = 0; i < a.rows; ++i) {
        const double* __restrict arow = a.row(i);
        double* __restrict crow = c.row(i);
        for (size_t j = 0; j < b.rows; ++j) {
            const double* __restrict brow = b.row(j);
            double acc = 0.0;
            for (size_t k = 0; k < a.cols; ++k) {
                acc += arow[k] * brow[k];
            }
            crow[j] = acc;
        }
    }
}

// C (m x n) = A^T * B, with A stored (k x m), B stored (k x n)
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c) {
    c = Matrix(a.cols, b.cols);
    for (size_t k = 0; k < a.rows; ++k) {
        const double* __restrict arow = a.row(k);
        const double* __restrict brow = b.row(k);
        for (size_t i = 0; i < a.cols; ++i) {
            double aki = arow[i];
            double* __restrict crow = c.row(i);
            for (size_t j = 0; j < b.cols; ++j) {
                crow[j] += aki * brow[j];
            }
        }
    }
}

void apply_activation(Activation act, Matrix& m) {
    switch (act) {
        case Activation::Identity:
            return;
        case Activation::ReLU:
            for (double& v : m.data) v = v > 0.0 ? v : 0.0;
            return;
        case Activation::Sigmoid:
            for (double& v : m.data) v = 1.0 / (1.0 + std::exp(-v));
            return;
    }
}

// Derivative expressed through the activation output.
double activation_grad_from_post(Activation act, double post) {
    switch (act) {
        case Activation::Identity: return 1.0;
        case Activation::ReLU: return post > 0.0 ? 1.0 : 0.0;
        case Activation::Sigmoid: return post * (1.0 - post);
    }
    return 1.0;
}

Matrix dense_forward(const DenseLayer& layer, const Matrix& x) {
    if (x.cols != layer.in_dim()) {
        fail(Errc::dim_mismatch, "layer expects input width " + std::to_string(layer.in_dim()) +
                                     ", got " + std::to_string(x.cols));
    }
    Matrix z;
    gemm_nt(x, layer.weights, z);
    for (size_t i = 0; i < z.rows; ++i) {
        double* row = z.row(i);
        for (size_t j = 0; j < z.cols; ++j) {
            row[j] += layer.bias[j];
        }
    }
    apply_activation(layer.activation, z);
    return z;
}

void colsum(const Matrix& m, std::vector<double>& out) {
    out.assign(m.cols, 0.0);
    for (size_t i = 0; i < m.rows; ++i) {
        const double* row = m.row(i);
        for (size_t j = 0; j < m.cols; ++j) {
            out[j] += row[j];
        }
    }
}

struct MlpGrads {
    std::vector<Matrix> dw;
    std::vector<std::vector<double>> db;

    explicit MlpGrads(const MlpModel& m) : dw(m.layers.size()), db(m.layers.size()) {}
};

// dOut is the gradient wrt the last layer's pre-activation when wrt_preact
// is set (fused softmax/sigmoid losses), otherwise wrt its output.
Matrix backward_mlp(const MlpModel& model, const MlpCache& cache, Matrix d_out, bool wrt_preact,
                    MlpGrads& grads) {
    for (size_t li = model.layers.size(); li-- > 0;) {
        const DenseLayer& layer = model.layers[li];
        const Matrix& post = cache.post[li];
        Matrix dz = std::move(d_out);
        if (!(li == model.layers.size() - 1 && wrt_preact)) {
            for (size_t i = 0; i < dz.data.size(); ++i) {
                dz.data[i] *= activation_grad_from_post(layer.activation, post.data[i]);
            }
        }
        const Matrix& input = li == 0 ? cache.input : cache.post[li - 1];
        gemm_tn(dz, input, grads.dw[li]);
        colsum(dz, grads.db[li]);
        gemm_nn(dz, layer.weights, d_out);
    }
    return d_out;
}

// ---- flat parameter access ----

struct ParamView {
    double* data;
    size_t n;
};

void append_views(MlpModel& m, std::vector<ParamView>& out) {
    for (auto& layer : m.layers) {
        out.push_back({layer.weights.data.data(), layer.weights.data.size()});
        out.push_back({layer.bias.data(), layer.bias.size()});
    }
}

void append_views(MlpGrads& g, std::vector<ParamView>& out) {
    for (size_t i = 0; i < g.dw.size(); ++i) {
        out.push_back({g.dw[i].data.data(), g.dw[i].data.size()});
        out.push_back({g.db[i].data(), g.db[i].size()});
    }
}

std::vector<ParamView> views(MlpModel& m) {
    std::vector<ParamView> v;
    append_views(m, v);
    return v;
}

struct VaeGrads {
    MlpGrads trunk;
    Matrix dw_mu;
    std::vector<double> db_mu;
    Matrix dw_logvar;
    std::vector<double> db_logvar;
    MlpGrads decoder;

    explicit VaeGrads(const VaeModel& m) : trunk(m.encoder_trunk), decoder(m.decoder) {}
};

std::vector<ParamView> views(VaeModel& m) {
    std::vector<ParamView> v;
    append_views(m.encoder_trunk, v);
    v.push_back({m.mu_head.weights.data.data(), m.mu_head.weights.data.size()});
    v.push_back({m.mu_head.bias.data(), m.mu_head.bias.size()});
    v.push_back({m.logvar_head.weights.data.data(), m.logvar_head.weights.data.size()});
    v.push_back({m.logvar_head.bias.data(), m.logvar_head.bias.size()});
    append_views(m.decoder, v);
    return v;
}

std::vector<ParamView> views(VaeGrads& g) {
    std::vector<ParamView> v;
    append_views(g.trunk, v);
    v.push_back({g.dw_mu.data.data(), g.dw_mu.data.size()});
    v.push_back({g.db_mu.data(), g.db_mu.size()});
    v.push_back({g.dw_logvar.data.data(), g.dw_logvar.data.size()});
    v.push_back({g.db_logvar.data(), g.db_logvar.size()});
    append_views(g.decoder, v);
    return v;
}

struct SgdState {
    std::vector<std::vector<double>> velocity;

    explicit SgdState(const std::vector<ParamView>& v) {
        velocity.reserve(v.size());
        for (const auto& p : v) velocity.emplace_back(p.n, 0.0);
    }

    void step(const std::vector<ParamView>& params, const std::vector<ParamView>& grads,
              double lr, double momentum) {
        for (size_t i = 0; i < params.size(); ++i) {
            double* w = params[i].data;
            const double* g = grads[i].data;
            double* vel = velocity[i].data();
            for (size_t j = 0; j < params[i].n; ++j) {
                vel[j] = momentum * vel[j] - lr * g[j];
                w[j] += vel[j];
            }
        }
    }
};

}  // namespace

DenseLayer make_layer(size_t out_dim, size_t in_dim, Activation act, Rng& rng) {
    DenseLayer layer;
    layer.weights = Matrix(out_dim, in_dim);
    double limit = std::sqrt(6.0 / static_cast<double>(in_dim));
    for (double& w : layer.weights.data) {
        w = rng.uniform(-limit, limit);
    }
    layer.bias.assign(out_dim, 0.0);
    layer.activation = act;
    return layer;
}

MlpModel make_classifier(uint64_t seed) {
    Rng rng = Rng::substream(seed, kInitStream);
    MlpModel m;
    m.layers.push_back(make_layer(kClassifierHidden, kImagePixels, Activation::ReLU, rng));
    m.layers.push_back(make_layer(kNumClasses, kClassifierHidden, Activation::Identity, rng));
    return m;
}

VaeModel make_vae(uint64_t seed) {
    Rng rng = Rng::substream(seed, kInitStream);
    VaeModel m;
    m.encoder_trunk.layers.push_back(make_layer(kVaeHidden, kImagePixels, Activation::ReLU, rng));
    m.mu_head = make_layer(kLatentDim, kVaeHidden, Activation::Identity, rng);
    m.logvar_head = make_layer(kLatentDim, kVaeHidden, Activation::Identity, rng);
    m.decoder.layers.push_back(make_layer(kVaeHidden, kLatentDim, Activation::ReLU, rng));
    m.decoder.layers.push_back(make_layer(kImagePixels, kVaeHidden, Activation::Sigmoid, rng));
    return m;
}

Matrix forward_mlp(const MlpModel& model, const Matrix& x, MlpCache* cache) {
    if (cache) {
        cache->input = x;
        cache->post.clear();
    }
    Matrix cur = x;
    for (const auto& layer : model.layers) {
        cur = dense_forward(layer, cur);
        if (cache) cache->post.push_back(cur);
    }
    return cur;
}

namespace {

// Returns the mean cross-entropy; when d_logits is non-null it receives
// (softmax - onehot) / batch, the gradient wrt the logits.
double softmax_ce(const Matrix& logits, std::span<const uint8_t> labels, Matrix* d_logits) {
    if (labels.size() != logits.rows) {
        fail(Errc::dim_mismatch, "label count does not match batch size");
    }
    if (d_logits) *d_logits = Matrix(logits.rows, logits.cols);
    double total = 0.0;
    for (size_t i = 0; i < logits.rows; ++i) {
        const double* row = logits.row(i);
        double mx = row[0];
        for (size_t j = 1; j < logits.cols; ++j) mx = std::max(mx, row[j]);
        double sum = 0.0;
        for (size_t j = 0; j < logits.cols; ++j) sum += std::exp(row[j] - mx);
        uint8_t y = labels[i];
        total += std::log(sum) + mx - row[y];
        if (d_logits) {
            double* drow = d_logits->row(i);
            double inv_b = 1.0 / static_cast<double>(logits.rows);
            for (size_t j = 0; j < logits.cols; ++j) {
                double p = std::exp(row[j] - mx) / sum;
                drow[j] = (p - (j == y ? 1.0 : 0.0)) * inv_b;
            }
        }
    }
    return total / static_cast<double>(logits.rows);
}

struct VaeForward {
    MlpCache trunk_cache;
    Matrix h;
    Matrix mu;
    Matrix logvar;
    Matrix sigma;
    Matrix z;
    MlpCache decoder_cache;
    Matrix xhat;
};

VaeForward vae_forward(const VaeModel& model, const Matrix& x, const Matrix& eps) {
    if (eps.rows != x.rows || eps.cols != model.mu_head.out_dim()) {
        fail(Errc::dim_mismatch, "eps must be batch x latent_dim");
    }
    VaeForward f;
    f.h = forward_mlp(model.encoder_trunk, x, &f.trunk_cache);
    f.mu = dense_forward(model.mu_head, f.h);
    f.logvar = dense_forward(model.logvar_head, f.h);
    f.sigma = Matrix(f.logvar.rows, f.logvar.cols);
    f.z = Matrix(f.logvar.rows, f.logvar.cols);
    for (size_t i = 0; i < f.logvar.data.size(); ++i) {
        f.sigma.data[i] = std::exp(0.5 * f.logvar.data[i]);
        f.z.data[i] = f.mu.data[i] + f.sigma.data[i] * eps.data[i];
    }
    f.xhat = forward_mlp(model.decoder, f.z, &f.decoder_cache);
    return f;
}

VaeLossValue vae_loss_from_forward(const VaeForward& f, const Matrix& x, double beta) {
    constexpr double kClamp = 1e-7;
    double bce = 0.0;
    for (size_t i = 0; i < x.data.size(); ++i) {
        double xi = x.data[i];
        double xhat = std::clamp(f.xhat.data[i], kClamp, 1.0 - kClamp);
        bce -= xi * std::log(xhat) + (1.0 - xi) * std::log(1.0 - xhat);
    }
    double kl = 0.0;
    for (size_t i = 0; i < f.mu.data.size(); ++i) {
        double mu = f.mu.data[i];
        double lv = f.logvar.data[i];
        kl += -0.5 * (1.0 + lv - mu * mu - std::exp(lv));
    }
    double inv_b = 1.0 / static_cast<double>(x.rows);
    VaeLossValue loss;
    loss.recon_bce = bce * inv_b;
    loss.kl = kl * inv_b;
    loss.total = loss.recon_bce + beta * loss.kl;
    return loss;
}

VaeLossValue vae_backward(const VaeModel& model, const VaeForward& f, const Matrix& x,
                          const Matrix& eps, double beta, VaeGrads& grads) {
    VaeLossValue loss = vae_loss_from_forward(f, x, beta);
    double inv_b = 1.0 / static_cast<double>(x.rows);

    // Sigmoid + Bernoulli BCE fuse to (xhat - x) wrt the decoder logits.
    Matrix d_dec_pre(x.rows, x.cols);
    for (size_t i = 0; i < x.data.size(); ++i) {
        d_dec_pre.data[i] = (f.xhat.data[i] - x.data[i]) * inv_b;
    }
    Matrix dz = backward_mlp(model.decoder, f.decoder_cache, std::move(d_dec_pre), true,
                             grads.decoder);

    Matrix dmu(dz.rows, dz.cols);
    Matrix dlogvar(dz.rows, dz.cols);
    for (size_t i = 0; i < dz.data.size(); ++i) {
        double sigma = f.sigma.data[i];
        dmu.data[i] = dz.data[i] + beta * f.mu.data[i] * inv_b;
        dlogvar.data[i] =
            dz.data[i] * eps.data[i] * 0.5 * sigma + beta * 0.5 * (sigma * sigma - 1.0) * inv_b;
    }

    gemm_tn(dmu, f.h, grads.dw_mu);
    colsum(dmu, grads.db_mu);
    gemm_tn(dlogvar, f.h, grads.dw_logvar);
    colsum(dlogvar, grads.db_logvar);

    Matrix dh;
    gemm_nn(dmu, model.mu_head.weights, dh);
    Matrix dh2;
    gemm_nn(dlogvar, model.logvar_head.weights, dh2);
    for (size_t i = 0; i < dh.data.size(); ++i) dh.data[i] += dh2.data[i];

    backward_mlp(model.encoder_trunk, f.trunk_cache, std::move(dh), false, grads.trunk);
    return loss;
}

Matrix gather_batch(const LabeledImageSet& data, std::span<const size_t> idx) {
    Matrix x(idx.size(), kImagePixels);
    for (size_t i = 0; i < idx.size(); ++i) {
        auto img = data.image(idx[i]);
        std::copy(img.begin(), img.end(), x.row(i));
    }
    return x;
}

void check_finite(double loss) {
    if (!std::isfinite(loss)) {
        fail(Errc::training_diverged, "loss became non-finite during training");
    }
}

void check_train_inputs(const LabeledImageSet& data, const TrainOptions& opts) {
    if (data.size() == 0) fail(Errc::invalid_args, "training data is empty");
    if (opts.epochs == 0) fail(Errc::invalid_args, "epochs must be at least 1");
    if (opts.batch_size == 0) fail(Errc::invalid_args, "batch_size must be at least 1");
    if (!(opts.lr > 0.0)) fail(Errc::invalid_args, "learning rate must be positive");
}

}  // namespace

double classifier_loss(const MlpModel& model, const Matrix& x, std::span<const uint8_t> labels) {
    Matrix logits = forward_mlp(model, x);
    return softmax_ce(logits, labels, nullptr);
}

uint8_t argmax_digit(std::span<const double> outputs) {
    size_t best = 0;
    for (size_t j = 1; j < outputs.size(); ++j) {
        if (outputs[j] > outputs[best]) best = j;
    }
    return static_cast<uint8_t>(best);
}

double classifier_accuracy(const MlpModel& model, const LabeledImageSet& data) {
    if (data.size() == 0) fail(Errc::invalid_args, "empty evaluation set");
    size_t correct = 0;
    for (size_t i = 0; i < data.size(); ++i) {
        Matrix x(1, kImagePixels);
        auto img = data.image(i);
        std::copy(img.begin(), img.end(), x.row(0));
        Matrix out = forward_mlp(model, x);
        if (argmax_digit({out.row(0), out.cols}) == data.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

VaeLossValue vae_loss(const VaeModel& model, const Matrix& x, const Matrix& eps, double beta) {
    VaeForward f = vae_forward(model, x, eps);
    VaeLossValue loss = vae_loss_from_forward(f, x, beta);
    check_finite(loss.total);
    return loss;
}

std::vector<double> vae_encode_mu(const VaeModel& model, std::span<const double> image) {
    if (image.size() != model.encoder_trunk.input_dim()) {
        fail(Errc::dim_mismatch, "encoder input width mismatch");
    }
    Matrix x(1, image.size());
    std::copy(image.begin(), image.end(), x.row(0));
    Matrix h = forward_mlp(model.encoder_trunk, x);
    Matrix mu = dense_forward(model.mu_head, h);
    return mu.data;
}

std::vector<double> vae_decode(const VaeModel& model, std::span<const double> latent) {
    if (latent.size() != model.decoder.input_dim()) {
        fail(Errc::dim_mismatch, "decoder input width mismatch");
    }
    Matrix z(1, latent.size());
    std::copy(latent.begin(), latent.end(), z.row(0));
    Matrix xhat = forward_mlp(model.decoder, z);
    return xhat.data;
}

TrainResult train_classifier(MlpModel& model, const LabeledImageSet& data,
                             const TrainOptions& opts) {
    check_train_inputs(data, opts);
    Rng shuffle_rng = Rng::substream(opts.seed, kShuffleStream);
    auto params = views(model);
    SgdState sgd(params);

    std::vector<size_t> order(data.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    TrainResult result;
    for (uint32_t epoch = 0; epoch < opts.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_total = 0.0;
        for (size_t start = 0; start < order.size(); start += opts.batch_size) {
            size_t b = std::min<size_t>(opts.batch_size, order.size() - start);
            std::span<const size_t> idx(order.data() + start, b);
            Matrix x = gather_batch(data, idx);
            std::vector<uint8_t> y(b);
            for (size_t i = 0; i < b; ++i) y[i] = data.labels[idx[i]];

            MlpCache cache;
            Matrix logits = forward_mlp(model, x, &cache);
            Matrix d_logits;
            double loss = softmax_ce(logits, y, &d_logits);
            check_finite(loss);
            epoch_total += loss * static_cast<double>(b);

            MlpGrads grads(model);
            backward_mlp(model, cache, std::move(d_logits), true, grads);
            auto gviews = [&] {
                std::vector<ParamView> v;
                append_views(grads, v);
                return v;
            }();
            sgd.step(params, gviews, opts.lr, opts.momentum);
        }
        result.epoch_loss.push_back(epoch_total / static_cast<double>(data.size()));
    }
    return result;
}

TrainResult train_vae(VaeModel& model, const LabeledImageSet& data, const TrainOptions& opts) {
    check_train_inputs(data, opts);
    Rng shuffle_rng = Rng::substream(opts.seed, kShuffleStream);
    Rng eps_rng = Rng::substream(opts.seed, kEpsStream);
    auto params = views(model);
    SgdState sgd(params);

    std::vector<size_t> order(data.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    TrainResult result;
    for (uint32_t epoch = 0; epoch < opts.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_total = 0.0;
        for (size_t start = 0; start < order.size(); start += opts.batch_size) {
            size_t b = std::min<size_t>(opts.batch_size, order.size() - start);
            std::span<const size_t> idx(order.data() + start, b);
            Matrix x = gather_batch(data, idx);
            Matrix eps(b, kLatentDim);
            for (double& e : eps.data) e = eps_rng.normal();

            VaeForward f = vae_forward(model, x, eps);
            VaeGrads grads(model);
            VaeLossValue loss = vae_backward(model, f, x, eps, opts.beta, grads);
            check_finite(loss.total);
            epoch_total += loss.total * static_cast<double>(b);

            auto gviews = views(grads);
            sgd.step(params, gviews, opts.lr, opts.momentum);
        }
        result.epoch_loss.push_back(epoch_total / static_cast<double>(data.size()));
    }
    return result;
}

namespace {

std::vector<size_t> sample_param_indices(size_t total, size_t want, uint64_t seed) {
    if (total <= want) {
        std::vector<size_t> all(total);
        for (size_t i = 0; i < total; ++i) all[i] = i;
        return all;
    }
    Rng rng = Rng::substream(seed, 0x6C);
    std::set<size_t> chosen;
    while (chosen.size() < want) {
        chosen.insert(static_cast<size_t>(rng.uniform_index(total)));
    }
    return {chosen.begin(), chosen.end()};
}

double max_rel_error(const std::vector<ParamView>& params, const std::vector<ParamView>& grads,
                     const std::vector<size_t>& indices, double epsilon,
                     const std::function<double()>& eval) {
    // Map a flat index into (view, offset) space on the fly.
    auto locate = [&](size_t flat) {
        for (const auto& p : params) {
            if (flat < p.n) return std::pair<double*, size_t>(p.data, flat);
            flat -= p.n;
        }
        fail(Errc::internal, "parameter index out of range");
    };
    auto grad_at = [&](size_t flat) {
        for (const auto& g : grads) {
            if (flat < g.n) return g.data[flat];
            flat -= g.n;
        }
        fail(Errc::internal, "gradient index out of range");
    };

    double worst = 0.0;
    for (size_t flat : indices) {
        auto [base, off] = locate(flat);
        double saved = base[off];
        base[off] = saved + epsilon;
        double f_plus = eval();
        base[off] = saved - epsilon;
        double f_minus = eval();
        base[off] = saved;
        double gn = (f_plus - f_minus) / (2.0 * epsilon);
        double ga = grad_at(flat);
        double diff = std::abs(ga - gn);
        // When both gradients vanish, the central difference is pure rounding
        // noise (loss deltas near machine epsilon); absolute agreement at that
        // scale is a match, not an error.
        if (diff < 1e-7) continue;
        double rel = diff / std::max(1e-8, std::abs(ga) + std::abs(gn));
        worst = std::max(worst, rel);
    }
    return worst;
}

}  // namespace

double grad_check_classifier(const MlpModel& model, const Matrix& x,
                             std::span<const uint8_t> labels, double epsilon, uint64_t seed) {
    MlpModel probe = model;
    MlpCache cache;
    Matrix logits = forward_mlp(probe, x, &cache);
    Matrix d_logits;
    softmax_ce(logits, labels, &d_logits);
    MlpGrads grads(probe);
    backward_mlp(probe, cache, std::move(d_logits), true, grads);

    auto params = views(probe);
    std::vector<ParamView> gviews;
    append_views(grads, gviews);
    size_t total = 0;
    for (const auto& p : params) total += p.n;
    auto indices = sample_param_indices(total, 200, seed);
    return max_rel_error(params, gviews, indices, epsilon,
                         [&] { return classifier_loss(probe, x, labels); });
}

double grad_check_vae(const VaeModel& model, const Matrix& x, const Matrix& eps_repar,
                      double epsilon, uint64_t seed) {
    VaeModel probe = model;
    VaeForward f = vae_forward(probe, x, eps_repar);
    VaeGrads grads(probe);
    vae_backward(probe, f, x, eps_repar, 1.0, grads);

    auto params = views(probe);
    auto gviews = views(grads);
    size_t total = 0;
    for (const auto& p : params) total += p.n;
    auto indices = sample_param_indices(total, 200, seed);
    return max_rel_error(params, gviews, indices, epsilon, [&] {
        return vae_loss(probe, x, eps_repar, 1.0).total;
    });
}

// ---- SEMW serialization ----

namespace {

constexpr char kMagic[4] = {'S', 'E', 'M', 'W'};
constexpr uint16_t kVersion = 1;

void write_u16(std::ostream& out, uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<char*>(b), 2);
}

void write_u32(std::ostream& out, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<char*>(b), 4);
}

void write_f32(std::ostream& out, double v) {
    float f = static_cast<float>(v);
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    write_u32(out, bits);
}

uint16_t read_u16(std::istream& in, const std::string& path) {
    unsigned char b[2];
    if (!in.read(reinterpret_cast<char*>(b), 2)) {
        fail(Errc::truncated_file, "'" + path + "' ends mid-header");
    }
    return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

uint32_t read_u32(std::istream& in, const std::string& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) {
        fail(Errc::truncated_file, "'" + path + "' ends mid-record");
    }
    return uint32_t(b[0]) | (uint32_t(b[1]) << 8) | (uint32_t(b[2]) << 16) | (uint32_t(b[3]) << 24);
}

double read_f32(std::istream& in, const std::string& path) {
    uint32_t bits = read_u32(in, path);
    float f;
    std::memcpy(&f, &bits, 4);
    return static_cast<double>(f);
}

void write_layer(std::ostream& out, const DenseLayer& layer) {
    write_u32(out, static_cast<uint32_t>(layer.out_dim()));
    write_u32(out, static_cast<uint32_t>(layer.in_dim()));
    out.put(static_cast<char>(layer.activation));
    for (double w : layer.weights.data) write_f32(out, w);
    for (double b : layer.bias) write_f32(out, b);
}

DenseLayer read_layer(std::istream& in, const std::string& path) {
    DenseLayer layer;
    uint32_t rows = read_u32(in, path);
    uint32_t cols = read_u32(in, path);
    int act = in.get();
    if (act == EOF) fail(Errc::truncated_file, "'" + path + "' ends mid-record");
    if (act != 0 && act != 1 && act != 2) {
        fail(Errc::parse_error, "'" + path + "' has an unknown activation code");
    }
    layer.activation = static_cast<Activation>(act);
    layer.weights = Matrix(rows, cols);
    for (double& w : layer.weights.data) w = read_f32(in, path);
    layer.bias.resize(rows);
    for (double& b : layer.bias) b = read_f32(in, path);
    return layer;
}

void write_header(std::ostream& out, ModelKind kind, uint16_t layer_count) {
    out.write(kMagic, 4);
    write_u16(out, kVersion);
    out.put(static_cast<char>(kind));
    write_u16(out, layer_count);
}

void expect_shape(const DenseLayer& layer, size_t out_dim, size_t in_dim, Activation act,
                  const std::string& path) {
    if (layer.out_dim() != out_dim || layer.in_dim() != in_dim || layer.activation != act) {
        fail(Errc::dim_mismatch, "'" + path + "' does not hold the expected VAE layer shapes");
    }
}

}  // namespace

void save_weights(const MlpModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io_error, "cannot write '" + path + "'");
    write_header(out, ModelKind::Mlp, static_cast<uint16_t>(model.layers.size()));
    for (const auto& layer : model.layers) write_layer(out, layer);
    if (!out) fail(Errc::io_error, "failed writing '" + path + "'");
}

void save_weights(const VaeModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io_error, "cannot write '" + path + "'");
    uint16_t count = static_cast<uint16_t>(model.encoder_trunk.layers.size() + 2 +
                                           model.decoder.layers.size());
    write_header(out, ModelKind::Vae, count);
    for (const auto& layer : model.encoder_trunk.layers) write_layer(out, layer);
    write_layer(out, model.mu_head);
    write_layer(out, model.logvar_head);
    for (const auto& layer : model.decoder.layers) write_layer(out, layer);
    if (!out) fail(Errc::io_error, "failed writing '" + path + "'");
}

void save_weights(const AnyModel& model, const std::string& path) {
    std::visit([&](const auto& m) { save_weights(m, path); }, model);
}

AnyModel load_weights(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io_error, "cannot open '" + path + "'");
    char magic[4];
    if (!in.read(magic, 4)) fail(Errc::truncated_file, "'" + path + "' is shorter than its header");
    if (std::memcmp(magic, kMagic, 4) != 0) {
        fail(Errc::bad_magic, "'" + path + "' is not a SEMW weights file");
    }
    uint16_t version = read_u16(in, path);
    if (version != kVersion) {
        fail(Errc::version_mismatch,
             "'" + path + "' has version " + std::to_string(version) + ", expected 1");
    }
    int kind = in.get();
    if (kind == EOF) fail(Errc::truncated_file, "'" + path + "' ends mid-header");
    uint16_t count = read_u16(in, path);
    if (count == 0) fail(Errc::dim_mismatch, "'" + path + "' declares zero layers");

    std::vector<DenseLayer> layers;
    layers.reserve(count);
    for (uint16_t i = 0; i < count; ++i) {
        layers.push_back(read_layer(in, path));
    }
    if (in.peek() != EOF) fail(Errc::parse_error, "'" + path + "' has trailing bytes");

    if (kind == static_cast<int>(ModelKind::Mlp)) {
        for (size_t i = 1; i < layers.size(); ++i) {
            if (layers[i].in_dim() != layers[i - 1].out_dim()) {
                fail(Errc::dim_mismatch, "'" + path + "' has inconsistent layer dimensions");
            }
        }
        MlpModel m;
        m.layers = std::move(layers);
        return m;
    }
    if (kind == static_cast<int>(ModelKind::Vae)) {
        if (count != 5) fail(Errc::dim_mismatch, "'" + path + "' must hold exactly 5 VAE layers");
        expect_shape(layers[0], kVaeHidden, kImagePixels, Activation::ReLU, path);
        expect_shape(layers[1], kLatentDim, kVaeHidden, Activation::Identity, path);
        expect_shape(layers[2], kLatentDim, kVaeHidden, Activation::Identity, path);
        expect_shape(layers[3], kVaeHidden, kLatentDim, Activation::ReLU, path);
        expect_shape(layers[4], kImagePixels, kVaeHidden, Activation::Sigmoid, path);
        VaeModel m;
        m.encoder_trunk.layers.push_back(std::move(layers[0]));
        m.mu_head = std::move(layers[1]);
        m.logvar_head = std::move(layers[2]);
        m.decoder.layers.push_back(std::move(layers[3]));
        m.decoder.layers.push_back(std::move(layers[4]));
        return m;
    }
    fail(Errc::parse_error, "'" + path + "' has an unknown model kind");
}

}  // namespace semnet::neural
