// Command-line front end for the semnetsim shared library. Everything goes
// through the public C API; artifacts (CSV, JSON, SVG) are written here.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "semnetsim.h"

namespace {

namespace fs = std::filesystem;

// ---- handle + error plumbing ----

struct ConfigDeleter {
    void operator()(sns_config* p) const { sns_config_free(p); }
};
struct DatasetDeleter {
    void operator()(sns_dataset* p) const { sns_dataset_free(p); }
};
struct ModelDeleter {
    void operator()(sns_model* p) const { sns_model_free(p); }
};
struct MetricsDeleter {
    void operator()(sns_metrics* p) const { sns_metrics_free(p); }
};

using ConfigPtr = std::unique_ptr<sns_config, ConfigDeleter>;
using DatasetPtr = std::unique_ptr<sns_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<sns_model, ModelDeleter>;
using MetricsPtr = std::unique_ptr<sns_metrics, MetricsDeleter>;

std::string take_string(char* s) {
    std::string out = s ? s : "";
    sns_string_free(s);
    return out;
}

int exit_code_for(sns_status status) {
    switch (status) {
        case SNS_E_INTERNAL:
        case SNS_E_PLACEMENT_FAILURE:
        case SNS_E_NO_PATH:
        case SNS_E_TRAINING_DIVERGED:
        case SNS_E_TIMEOUT:
            return 1;
        default:
            return 2;
    }
}

// Nonzero exit codes propagate through main via this exception.
struct CliFailure {
    int code;
};

void check(sns_status status) {
    if (status == SNS_OK) return;
    std::cerr << "error (" << sns_status_name(status) << "): " << sns_last_error() << "\n";
    throw CliFailure{exit_code_for(status)};
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << content)) {
        std::cerr << "error: cannot write " << path << "\n";
        throw CliFailure{2};
    }
}

// ---- run manifest ----

uint64_t fnv1a64_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot read " << path << " for hashing\n";
        throw CliFailure{2};
    }
    uint64_t hash = 0xCBF29CE484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001B3ULL;
        }
    }
    return hash;
}

std::string hex64(uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

// The manifest pins every input by content hash; it is written into the
// output directory before any run artifact.
void write_manifest(const fs::path& out_dir, const std::string& command, uint64_t seed,
                    const std::vector<std::pair<std::string, std::string>>& inputs,
                    const std::vector<std::pair<std::string, std::string>>& settings) {
    nlohmann::ordered_json j;
    j["tool_version"] = sns_version();
    j["command"] = command;
    j["seed"] = seed;
    for (const auto& [key, value] : settings) j[key] = value;
    nlohmann::ordered_json in_j = nlohmann::ordered_json::object();
    for (const auto& [path, hash] : inputs) in_j[path] = hash;
    j["input_hashes"] = in_j;
    write_file(out_dir / "manifest.json", j.dump(2) + "\n");
}

// ---- SVG plotting ----

struct Series {
    std::string label;
    std::string color;
    std::vector<std::pair<double, double>> points;
    bool markers = false;
};

std::string fmt_tick(double v) {
    char buf[32];
    if (std::abs(v) >= 1.0 || v == 0.0) {
        if (std::abs(v - std::llround(v)) < 1e-9) {
            std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(std::llround(v)));
            return buf;
        }
    }
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string render_line_plot(const std::string& title, const std::string& x_label,
                             const std::string& y_label, const std::vector<Series>& series) {
    constexpr double kW = 640, kH = 420, kL = 85, kR = 25, kT = 45, kB = 55;
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
    bool first = true;
    for (const Series& s : series) {
        for (auto [x, y] : s.points) {
            if (first) {
                x_min = x_max = x;
                y_min = y_max = y;
                first = false;
            }
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    }
    y_min = std::min(y_min, 0.0);
    if (x_max == x_min) x_max = x_min + 1;
    if (y_max == y_min) y_max = y_min + 1;
    y_max *= 1.05;

    auto px = [&](double x) { return kL + (x - x_min) / (x_max - x_min) * (kW - kL - kR); };
    auto py = [&](double y) { return kH - kB - (y - y_min) / (y_max - y_min) * (kH - kT - kB); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
        << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n"
        << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n"
        << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\""
        << " font-size=\"15\">" << title << "</text>\n";

    // axes + grid with 5 divisions per axis
    for (int i = 0; i <= 5; ++i) {
        double fx = x_min + (x_max - x_min) * i / 5.0;
        double fy = y_min + (y_max - y_min) * i / 5.0;
        svg << "<line x1=\"" << px(fx) << "\" y1=\"" << py(y_min) << "\" x2=\"" << px(fx)
            << "\" y2=\"" << py(y_max) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
            << "<line x1=\"" << px(x_min) << "\" y1=\"" << py(fy) << "\" x2=\"" << px(x_max)
            << "\" y2=\"" << py(fy) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
            << "<text x=\"" << px(fx) << "\" y=\"" << kH - kB + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt_tick(fx) << "</text>\n"
            << "<text x=\"" << kL - 8 << "\" y=\"" << py(fy) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt_tick(fy)
            << "</text>\n";
    }
    svg << "<line x1=\"" << kL << "\" y1=\"" << kT << "\" x2=\"" << kL << "\" y2=\"" << kH - kB
        << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << kL << "\" y1=\"" << kH - kB << "\" x2=\"" << kW - kR << "\" y2=\""
        << kH - kB << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << (kL + kW - kR) / 2 << "\" y=\"" << kH - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
        << "</text>\n"
        << "<text x=\"18\" y=\"" << (kT + kH - kB) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\""
        << " transform=\"rotate(-90 18 " << (kT + kH - kB) / 2 << ")\">" << y_label << "</text>\n";

    for (const Series& s : series) {
        if (s.points.empty()) continue;
        svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
        for (auto [x, y] : s.points) svg << px(x) << ',' << py(y) << ' ';
        svg << "\"/>\n";
        if (s.markers) {
            for (auto [x, y] : s.points) {
                svg << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3.5\" fill=\""
                    << s.color << "\"/>\n";
            }
        }
    }

    double ly = kT + 10;
    for (const Series& s : series) {
        svg << "<line x1=\"" << kW - kR - 150 << "\" y1=\"" << ly << "\" x2=\"" << kW - kR - 120
            << "\" y2=\"" << ly << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << kW - kR - 112 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
        ly += 18;
    }
    svg << "</svg>\n";
    return svg.str();
}

// Cumulative delivered bits after each step 1..n_steps, carried forward
// over steps without transmissions.
std::vector<std::pair<double, double>> cumulative_series(const sns_metrics* metrics) {
    std::vector<std::pair<double, double>> points;
    std::string summary = [&] {
        char* raw = nullptr;
        check(sns_metrics_summary_json(metrics, &raw));
        return take_string(raw);
    }();
    uint64_t steps = nlohmann::json::parse(summary).at("steps_executed").get<uint64_t>();
    size_t n = sns_metrics_record_count(metrics);
    size_t ri = 0;
    uint64_t cumulative = 0;
    points.emplace_back(0.0, 0.0);
    for (uint64_t s = 1; s <= steps; ++s) {
        sns_step_record rec;
        while (ri < n) {
            check(sns_metrics_record(metrics, ri, &rec));
            if (rec.step > s) break;
            cumulative = rec.cumulative_bits;
            ++ri;
        }
        points.emplace_back(static_cast<double>(s), static_cast<double>(cumulative));
    }
    return points;
}

// ---- shared option helpers ----

struct IoOptions {
    std::string config_path;
    std::string vae_path;
    std::string classifier_path;
    std::string images_path;
    std::string labels_path;
    std::string out_dir = "out";
    std::optional<uint64_t> seed;
    std::string branch;
};

void add_io_options(CLI::App* cmd, IoOptions& io, bool with_branch) {
    cmd->add_option("--config", io.config_path, "scenario JSON path")->required();
    cmd->add_option("--weights-vae", io.vae_path, "VAE weights (SEMW)")->required();
    cmd->add_option("--weights-classifier", io.classifier_path, "classifier weights (SEMW)")
        ->required();
    cmd->add_option("--images", io.images_path, "IDX image file for device imagery");
    cmd->add_option("--labels", io.labels_path, "IDX label file for device imagery");
    cmd->add_option("--out", io.out_dir, "output directory");
    cmd->add_option("--seed", io.seed, "override the scenario seed");
    if (with_branch) {
        cmd->add_option("--branch", io.branch, "override the branch (SemCom|Raw)");
    }
}

struct LoadedInputs {
    ConfigPtr config;
    ModelPtr vae;
    ModelPtr classifier;
    DatasetPtr images;  // may stay null: engine generates synthetic data
    std::vector<std::pair<std::string, std::string>> hashes;
};

LoadedInputs load_inputs(const IoOptions& io) {
    if (io.images_path.empty() != io.labels_path.empty()) {
        std::cerr << "error: --images and --labels must be given together\n";
        throw CliFailure{2};
    }
    LoadedInputs in;
    sns_config* cfg = nullptr;
    check(sns_config_load(io.config_path.c_str(), &cfg));
    in.config.reset(cfg);
    if (io.seed) check(sns_config_set_seed(in.config.get(), *io.seed));
    if (!io.branch.empty()) check(sns_config_set_branch(in.config.get(), io.branch.c_str()));

    sns_model* vae = nullptr;
    check(sns_model_load(io.vae_path.c_str(), &vae));
    in.vae.reset(vae);
    sns_model* cls = nullptr;
    check(sns_model_load(io.classifier_path.c_str(), &cls));
    in.classifier.reset(cls);
    if (std::string(sns_model_kind(in.vae.get())) != "vae") {
        std::cerr << "error: " << io.vae_path << " does not hold VAE weights\n";
        throw CliFailure{2};
    }
    if (std::string(sns_model_kind(in.classifier.get())) != "classifier") {
        std::cerr << "error: " << io.classifier_path << " does not hold classifier weights\n";
        throw CliFailure{2};
    }
    if (!io.images_path.empty()) {
        sns_dataset* data = nullptr;
        check(sns_dataset_load_idx(io.images_path.c_str(), io.labels_path.c_str(), &data));
        in.images.reset(data);
    }

    in.hashes.emplace_back(io.config_path, hex64(fnv1a64_file(io.config_path)));
    in.hashes.emplace_back(io.vae_path, hex64(fnv1a64_file(io.vae_path)));
    in.hashes.emplace_back(io.classifier_path, hex64(fnv1a64_file(io.classifier_path)));
    if (!io.images_path.empty()) {
        in.hashes.emplace_back(io.images_path, hex64(fnv1a64_file(io.images_path)));
        in.hashes.emplace_back(io.labels_path, hex64(fnv1a64_file(io.labels_path)));
    }
    return in;
}

std::string metrics_branch(const sns_metrics* metrics) {
    char* raw = nullptr;
    check(sns_metrics_summary_json(metrics, &raw));
    return nlohmann::json::parse(take_string(raw)).at("branch").get<std::string>();
}

void write_metrics_files(const fs::path& out_dir, uint64_t seed, const sns_metrics* metrics) {
    std::string branch = metrics_branch(metrics);
    char* csv = nullptr;
    check(sns_metrics_csv(metrics, &csv));
    write_file(out_dir / ("metrics_seed" + std::to_string(seed) + "_" + branch + ".csv"),
               take_string(csv));
    char* summary = nullptr;
    check(sns_metrics_summary_json(metrics, &summary));
    write_file(out_dir / ("summary_seed" + std::to_string(seed) + "_" + branch + ".json"),
               take_string(summary));
}

// ---- subcommands ----

int cmd_gen_data(uint64_t seed, size_t count, const std::string& images_path,
                 const std::string& labels_path) {
    sns_dataset* data = nullptr;
    check(sns_dataset_generate(seed, count, &data));
    DatasetPtr holder(data);
    check(sns_dataset_save_idx(data, images_path.c_str(), labels_path.c_str()));
    std::cout << "wrote " << sns_dataset_size(data) << " images to " << images_path << " / "
              << labels_path << "\n";
    return 0;
}

struct TrainOptions {
    std::string kind;
    std::string images_path;
    std::string labels_path;
    std::string test_images_path;
    std::string test_labels_path;
    uint64_t synthetic_count = 0;
    uint64_t data_seed = 11;
    uint32_t epochs = 5;
    double lr = 0.05;
    uint32_t batch_size = 64;
    uint64_t seed = 1;
    std::string out_path;
    std::string loss_csv_path;
};

int cmd_train(const TrainOptions& opt) {
    DatasetPtr data;
    if (!opt.images_path.empty()) {
        sns_dataset* d = nullptr;
        check(sns_dataset_load_idx(opt.images_path.c_str(), opt.labels_path.c_str(), &d));
        data.reset(d);
    } else if (opt.synthetic_count > 0) {
        sns_dataset* d = nullptr;
        check(sns_dataset_generate(opt.data_seed, opt.synthetic_count, &d));
        data.reset(d);
    } else {
        std::cerr << "error: provide --images/--labels or --synthetic-count\n";
        throw CliFailure{2};
    }

    sns_model* model = nullptr;
    check(sns_model_init(opt.kind.c_str(), opt.seed, &model));
    ModelPtr holder(model);
    char* loss_csv = nullptr;
    check(sns_model_train(model, data.get(), opt.epochs, opt.lr, opt.batch_size, opt.seed,
                          &loss_csv));
    std::string losses = take_string(loss_csv);
    if (!opt.loss_csv_path.empty()) write_file(opt.loss_csv_path, losses);
    check(sns_model_save(model, opt.out_path.c_str()));
    std::cout << "saved " << opt.kind << " weights to " << opt.out_path << "\n" << losses;

    DatasetPtr test;
    if (!opt.test_images_path.empty()) {
        sns_dataset* d = nullptr;
        check(sns_dataset_load_idx(opt.test_images_path.c_str(), opt.test_labels_path.c_str(), &d));
        test.reset(d);
    } else if (opt.synthetic_count > 0) {
        // held-out synthetic set from a shifted seed
        sns_dataset* d = nullptr;
        check(sns_dataset_generate(opt.data_seed + 1, std::max<uint64_t>(opt.synthetic_count / 4, 200), &d));
        test.reset(d);
    }
    if (test && opt.kind == "classifier") {
        double acc = 0.0;
        check(sns_eval_classifier_accuracy(model, test.get(), &acc));
        std::cout << "test_accuracy=" << acc << "\n";
    }
    return 0;
}

int cmd_run(const IoOptions& io) {
    LoadedInputs in = load_inputs(io);
    fs::create_directories(io.out_dir);
    uint64_t seed = sns_config_seed(in.config.get());
    write_manifest(io.out_dir, "run", seed, in.hashes,
                   {{"config", io.config_path},
                    {"weights_vae", io.vae_path},
                    {"weights_classifier", io.classifier_path},
                    {"out_dir", io.out_dir}});

    sns_metrics* metrics = nullptr;
    check(sns_run(in.config.get(), in.vae.get(), in.classifier.get(), in.images.get(), &metrics));
    MetricsPtr holder(metrics);
    write_metrics_files(io.out_dir, seed, metrics);

    std::string branch = metrics_branch(metrics);
    Series series{branch, branch == "Raw" ? "#d62728" : "#1f77b4", cumulative_series(metrics),
                  false};
    write_file(fs::path(io.out_dir) / ("plot_cumulative_seed" + std::to_string(seed) + ".svg"),
               render_line_plot("Cumulative transmitted bits", "step (s)", "bits", {series}));

    char* summary = nullptr;
    check(sns_metrics_summary_json(metrics, &summary));
    std::cout << take_string(summary);
    return 0;
}

int cmd_compare(const IoOptions& io, const std::vector<uint32_t>& sweep_counts) {
    LoadedInputs in = load_inputs(io);
    fs::create_directories(io.out_dir);
    uint64_t seed = sns_config_seed(in.config.get());
    write_manifest(io.out_dir, "compare", seed, in.hashes,
                   {{"config", io.config_path},
                    {"weights_vae", io.vae_path},
                    {"weights_classifier", io.classifier_path},
                    {"out_dir", io.out_dir}});

    sns_metrics* semcom = nullptr;
    sns_metrics* raw = nullptr;
    double ratio = 0.0;
    check(sns_compare(in.config.get(), in.vae.get(), in.classifier.get(), in.images.get(), &semcom,
                      &raw, &ratio));
    MetricsPtr semcom_holder(semcom), raw_holder(raw);
    write_metrics_files(io.out_dir, seed, semcom);
    write_metrics_files(io.out_dir, seed, raw);

    uint64_t bits_semcom = 0, bits_raw = 0;
    check(sns_metrics_total_bits(semcom, &bits_semcom));
    check(sns_metrics_total_bits(raw, &bits_raw));
    char* semcom_summary = nullptr;
    char* raw_summary = nullptr;
    check(sns_metrics_summary_json(semcom, &semcom_summary));
    check(sns_metrics_summary_json(raw, &raw_summary));
    nlohmann::ordered_json report;
    report["semcom"] = nlohmann::json::parse(take_string(semcom_summary));
    report["raw"] = nlohmann::json::parse(take_string(raw_summary));
    report["ratio_raw_over_semcom"] = ratio;
    std::string report_text = report.dump(2) + "\n";
    write_file(fs::path(io.out_dir) / ("ratio_report_seed" + std::to_string(seed) + ".json"),
               report_text);

    write_file(fs::path(io.out_dir) / ("plot_cumulative_seed" + std::to_string(seed) + ".svg"),
               render_line_plot("Cumulative transmitted bits", "step (s)", "bits",
                                {{"SemCom", "#1f77b4", cumulative_series(semcom), false},
                                 {"Raw", "#d62728", cumulative_series(raw), false}}));

    if (!sweep_counts.empty()) {
        char* sweep = nullptr;
        check(sns_sweep_csv(in.config.get(), in.vae.get(), in.classifier.get(), in.images.get(),
                            sweep_counts.data(), sweep_counts.size(), &sweep));
        std::string sweep_text = take_string(sweep);
        write_file(fs::path(io.out_dir) / ("sweep_seed" + std::to_string(seed) + ".csv"),
                   sweep_text);

        Series a{"SemCom", "#1f77b4", {}, true};
        Series b{"Raw", "#d62728", {}, true};
        std::istringstream lines(sweep_text);
        std::string line;
        std::getline(lines, line);  // header
        while (std::getline(lines, line)) {
            uint32_t n;
            uint64_t bits_a, bits_b;
            double r;
            if (std::sscanf(line.c_str(), "%u,%" SCNu64 ",%" SCNu64 ",%lf", &n, &bits_a, &bits_b,
                            &r) == 4) {
                a.points.emplace_back(n, static_cast<double>(bits_a));
                b.points.emplace_back(n, static_cast<double>(bits_b));
            }
        }
        write_file(fs::path(io.out_dir) / ("plot_sweep_seed" + std::to_string(seed) + ".svg"),
                   render_line_plot("Total transmitted bits vs device count", "devices", "bits",
                                    {a, b}));
    }

    std::cout << report_text;
    return 0;
}

int cmd_agent_plan(const std::string& config_path, const std::string& backend,
                   const std::string& apply_path) {
    sns_config* cfg = nullptr;
    check(sns_config_load(config_path.c_str(), &cfg));
    ConfigPtr config(cfg);

    char* plan = nullptr;
    check(sns_agent_plan(config.get(), backend.c_str(), &plan));
    std::string plan_text = take_string(plan);
    std::cout << plan_text;

    nlohmann::json plan_json = nlohmann::json::parse(plan_text);
    if (plan_json.at("used_fallback").get<bool>()) {
        std::cerr << "warning: planner fell back to the rule backend\n";
        for (const auto& line : plan_json.at("log")) {
            std::cerr << "  " << line.get<std::string>() << "\n";
        }
    }

    if (!apply_path.empty()) {
        sns_config* updated = nullptr;
        check(sns_agent_apply(config.get(), plan_text.c_str(), &updated));
        ConfigPtr holder(updated);
        char* json = nullptr;
        check(sns_config_to_json(updated, &json));
        write_file(apply_path, take_string(json));
        std::cerr << "wrote updated config to " << apply_path << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semnetsim: task-oriented connectivity simulator"};
    app.require_subcommand(1);

    uint64_t gen_seed = 1;
    size_t gen_count = 1000;
    std::string gen_images = "images.idx";
    std::string gen_labels = "labels.idx";
    auto* gen = app.add_subcommand("gen-data", "generate a synthetic labeled digit set");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--count", gen_count, "number of images");
    gen->add_option("--images", gen_images, "IDX image output path");
    gen->add_option("--labels", gen_labels, "IDX label output path");

    TrainOptions train_opt;
    auto* train = app.add_subcommand("train", "train a model and save SEMW weights");
    train->add_option("--kind", train_opt.kind, "vae or classifier")->required();
    train->add_option("--images", train_opt.images_path, "IDX training images");
    train->add_option("--labels", train_opt.labels_path, "IDX training labels");
    train->add_option("--test-images", train_opt.test_images_path, "IDX evaluation images");
    train->add_option("--test-labels", train_opt.test_labels_path, "IDX evaluation labels");
    train->add_option("--synthetic-count", train_opt.synthetic_count,
                      "train on generated data instead of files");
    train->add_option("--data-seed", train_opt.data_seed, "seed for generated data");
    train->add_option("--epochs", train_opt.epochs, "training epochs");
    train->add_option("--lr", train_opt.lr, "learning rate");
    train->add_option("--batch", train_opt.batch_size, "batch size");
    train->add_option("--seed", train_opt.seed, "training seed");
    train->add_option("--out", train_opt.out_path, "weights output path")->required();
    train->add_option("--loss-csv", train_opt.loss_csv_path, "loss history CSV path");

    IoOptions run_io;
    auto* run = app.add_subcommand("run", "run one branch and write metrics");
    add_io_options(run, run_io, true);

    IoOptions cmp_io;
    std::vector<uint32_t> sweep_counts;
    auto* cmp = app.add_subcommand("compare", "run both branches on one world");
    add_io_options(cmp, cmp_io, false);
    cmp->add_option("--sweep", sweep_counts, "device counts for a bits-vs-devices sweep")
        ->delimiter(',');

    std::string plan_config, plan_backend = "rule", plan_apply;
    auto* plan = app.add_subcommand("agent-plan", "ask the planner for a deployment");
    plan->add_option("--config", plan_config, "scenario JSON path")->required();
    plan->add_option("--backend", plan_backend, "rule or llm");
    plan->add_option("--apply", plan_apply, "write the updated scenario here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) return cmd_gen_data(gen_seed, gen_count, gen_images, gen_labels);
        if (train->parsed()) return cmd_train(train_opt);
        if (run->parsed()) return cmd_run(run_io);
        if (cmp->parsed()) return cmd_compare(cmp_io, sweep_counts);
        if (plan->parsed()) return cmd_agent_plan(plan_config, plan_backend, plan_apply);
    } catch (const CliFailure& f) {
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
