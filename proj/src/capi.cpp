#include "semnetsim.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include <json.hpp>

#include "agent.hpp"
#include "config.hpp"
#include "dataset.hpp"
#include "error.hpp"
#include "neural.hpp"
#include "semcom.hpp"
#include "sim.hpp"

using namespace semnet;

struct sns_config {
    ScenarioConfig cfg;
};

struct sns_dataset {
    LabeledImageSet set;
};

struct sns_model {
    neural::AnyModel model;
};

struct sns_metrics {
    sim::MetricsLog log;
};

namespace {

thread_local std::string g_last_error;

void set_last_error(const std::string& message) {
    g_last_error = message;
}

sns_status map_errc(Errc code) {
    switch (code) {
        case Errc::invalid_args: return SNS_E_INVALID_ARGS;
        case Errc::invalid_config: return SNS_E_INVALID_CONFIG;
        case Errc::placement_failure: return SNS_E_PLACEMENT_FAILURE;
        case Errc::unknown_robot: return SNS_E_UNKNOWN_ROBOT;
        case Errc::unknown_device: return SNS_E_UNKNOWN_DEVICE;
        case Errc::out_of_bounds: return SNS_E_OUT_OF_BOUNDS;
        case Errc::blocked_endpoint: return SNS_E_BLOCKED_ENDPOINT;
        case Errc::no_path: return SNS_E_NO_PATH;
        case Errc::empty_path: return SNS_E_EMPTY_PATH;
        case Errc::non_positive_distance: return SNS_E_NON_POSITIVE_DISTANCE;
        case Errc::bad_table: return SNS_E_BAD_TABLE;
        case Errc::bad_magic: return SNS_E_BAD_MAGIC;
        case Errc::count_mismatch: return SNS_E_COUNT_MISMATCH;
        case Errc::truncated_file: return SNS_E_TRUNCATED_FILE;
        case Errc::version_mismatch: return SNS_E_VERSION_MISMATCH;
        case Errc::dim_mismatch: return SNS_E_DIM_MISMATCH;
        case Errc::training_diverged: return SNS_E_TRAINING_DIVERGED;
        case Errc::malformed_payload: return SNS_E_MALFORMED_PAYLOAD;
        case Errc::io_error: return SNS_E_IO;
        case Errc::parse_error: return SNS_E_PARSE;
        case Errc::endpoint_unreachable: return SNS_E_ENDPOINT_UNREACHABLE;
        case Errc::malformed_response: return SNS_E_MALFORMED_RESPONSE;
        case Errc::timeout: return SNS_E_TIMEOUT;
        case Errc::internal: return SNS_E_INTERNAL;
    }
    return SNS_E_INTERNAL;
}

template <typename F>
sns_status guarded(F&& body) noexcept {
    try {
        body();
        return SNS_OK;
    } catch (const Error& e) {
        set_last_error(e.what());
        return map_errc(e.code());
    } catch (const std::exception& e) {
        set_last_error(e.what());
        return SNS_E_INTERNAL;
    } catch (...) {
        set_last_error("unknown failure");
        return SNS_E_INTERNAL;
    }
}

void require(bool ok, const char* what) {
    if (!ok) fail(Errc::invalid_args, what);
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) fail(Errc::internal, "out of memory");
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

const neural::VaeModel& as_vae(const sns_model* model) {
    require(model != nullptr, "model handle is null");
    const auto* vae = std::get_if<neural::VaeModel>(&model->model);
    if (!vae) fail(Errc::invalid_args, "model is not a VAE");
    return *vae;
}

const neural::MlpModel& as_classifier(const sns_model* model) {
    require(model != nullptr, "model handle is null");
    const auto* mlp = std::get_if<neural::MlpModel>(&model->model);
    if (!mlp) fail(Errc::invalid_args, "model is not a classifier");
    return *mlp;
}

sim::Models make_models(const sns_model* vae, const sns_model* classifier) {
    return sim::Models{as_vae(vae), as_classifier(classifier)};
}

LabeledImageSet images_or_synthetic(const sns_dataset* images, const ScenarioConfig& cfg) {
    if (images) return images->set;
    size_t count = std::max<size_t>(cfg.n_devices, 10);
    return generate_digits(cfg.seed, count);
}

nlohmann::ordered_json recommendation_json(const agent::Recommendation& rec) {
    nlohmann::ordered_json j;
    j["num_robots"] = rec.num_robots;
    j["search_strategy"] = agent::search_strategy_name(rec.search_strategy);
    j["transmission_scheme"] = branch_name(rec.transmission_scheme);
    j["rationale"] = rec.rationale;
    return j;
}

}  // namespace

extern "C" {

const char* sns_status_name(sns_status status) {
    switch (status) {
        case SNS_OK: return "ok";
        case SNS_E_INVALID_ARGS: return "invalid_args";
        case SNS_E_INVALID_CONFIG: return "invalid_config";
        case SNS_E_PLACEMENT_FAILURE: return "placement_failure";
        case SNS_E_UNKNOWN_ROBOT: return "unknown_robot";
        case SNS_E_UNKNOWN_DEVICE: return "unknown_device";
        case SNS_E_OUT_OF_BOUNDS: return "out_of_bounds";
        case SNS_E_BLOCKED_ENDPOINT: return "blocked_endpoint";
        case SNS_E_NO_PATH: return "no_path";
        case SNS_E_EMPTY_PATH: return "empty_path";
        case SNS_E_NON_POSITIVE_DISTANCE: return "non_positive_distance";
        case SNS_E_BAD_TABLE: return "bad_table";
        case SNS_E_BAD_MAGIC: return "bad_magic";
        case SNS_E_COUNT_MISMATCH: return "count_mismatch";
        case SNS_E_TRUNCATED_FILE: return "truncated_file";
        case SNS_E_VERSION_MISMATCH: return "version_mismatch";
        case SNS_E_DIM_MISMATCH: return "dim_mismatch";
        case SNS_E_TRAINING_DIVERGED: return "training_diverged";
        case SNS_E_MALFORMED_PAYLOAD: return "malformed_payload";
        case SNS_E_IO: return "io_error";
        case SNS_E_PARSE: return "parse_error";
        case SNS_E_ENDPOINT_UNREACHABLE: return "endpoint_unreachable";
        case SNS_E_MALFORMED_RESPONSE: return "malformed_response";
        case SNS_E_TIMEOUT: return "timeout";
        case SNS_E_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* sns_last_error(void) {
    return g_last_error.c_str();
}

void sns_string_free(char* s) {
    std::free(s);
}

const char* sns_version(void) {
    return "0.1.0";
}

/* ---- config ---- */

sns_status sns_config_default(sns_config** out) {
    return guarded([&] {
        require(out != nullptr, "out pointer is null");
        *out = new sns_config{};
    });
}

sns_status sns_config_load(const char* path, sns_config** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "path/out must not be null");
        *out = new sns_config{load_scenario(path)};
    });
}

sns_status sns_config_parse(const char* json_text, sns_config** out) {
    return guarded([&] {
        require(json_text != nullptr && out != nullptr, "json_text/out must not be null");
        *out = new sns_config{parse_scenario_text(json_text)};
    });
}

sns_status sns_config_to_json(const sns_config* config, char** out_json) {
    return guarded([&] {
        require(config != nullptr && out_json != nullptr, "config/out must not be null");
        *out_json = dup_string(scenario_to_json(config->cfg).dump(2) + "\n");
    });
}

sns_status sns_config_set_seed(sns_config* config, uint64_t seed) {
    return guarded([&] {
        require(config != nullptr, "config handle is null");
        config->cfg.seed = seed;
    });
}

sns_status sns_config_set_branch(sns_config* config, const char* branch) {
    return guarded([&] {
        require(config != nullptr && branch != nullptr, "config/branch must not be null");
        config->cfg.branch = branch_from_name(branch);
    });
}

sns_status sns_config_set_counts(sns_config* config, uint32_t n_robots, uint32_t n_devices) {
    return guarded([&] {
        require(config != nullptr, "config handle is null");
        ScenarioConfig candidate = config->cfg;
        candidate.n_robots = n_robots;
        candidate.n_devices = n_devices;
        validate(candidate);
        config->cfg = candidate;
    });
}

uint64_t sns_config_seed(const sns_config* config) {
    return config ? config->cfg.seed : 0;
}

void sns_config_free(sns_config* config) {
    delete config;
}

/* ---- dataset ---- */

sns_status sns_dataset_load_idx(const char* images_path, const char* labels_path,
                                sns_dataset** out) {
    return guarded([&] {
        require(images_path && labels_path && out, "paths/out must not be null");
        *out = new sns_dataset{load_idx(images_path, labels_path)};
    });
}

sns_status sns_dataset_generate(uint64_t seed, size_t count, sns_dataset** out) {
    return guarded([&] {
        require(out != nullptr, "out pointer is null");
        *out = new sns_dataset{generate_digits(seed, count)};
    });
}

sns_status sns_dataset_save_idx(const sns_dataset* dataset, const char* images_path,
                                const char* labels_path) {
    return guarded([&] {
        require(dataset && images_path && labels_path, "dataset/paths must not be null");
        save_idx(dataset->set, images_path, labels_path);
    });
}

size_t sns_dataset_size(const sns_dataset* dataset) {
    return dataset ? dataset->set.size() : 0;
}

void sns_dataset_free(sns_dataset* dataset) {
    delete dataset;
}

/* ---- models ---- */

sns_status sns_model_init(const char* kind, uint64_t seed, sns_model** out) {
    return guarded([&] {
        require(kind != nullptr && out != nullptr, "kind/out must not be null");
        std::string k = kind;
        if (k == "vae") {
            *out = new sns_model{neural::make_vae(seed)};
        } else if (k == "classifier") {
            *out = new sns_model{neural::make_classifier(seed)};
        } else {
            fail(Errc::invalid_args, "kind must be 'vae' or 'classifier', got '" + k + "'");
        }
    });
}

sns_status sns_model_load(const char* path, sns_model** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "path/out must not be null");
        *out = new sns_model{neural::load_weights(path)};
    });
}

sns_status sns_model_save(const sns_model* model, const char* path) {
    return guarded([&] {
        require(model != nullptr && path != nullptr, "model/path must not be null");
        neural::save_weights(model->model, path);
    });
}

const char* sns_model_kind(const sns_model* model) {
    if (!model) return nullptr;
    return std::holds_alternative<neural::VaeModel>(model->model) ? "vae" : "classifier";
}

sns_status sns_model_train(sns_model* model, const sns_dataset* data, uint32_t epochs, double lr,
                           uint32_t batch_size, uint64_t seed, char** out_loss_csv) {
    return guarded([&] {
        require(model != nullptr && data != nullptr, "model/data must not be null");
        neural::TrainOptions opts;
        opts.epochs = epochs;
        opts.lr = lr;
        opts.batch_size = batch_size;
        opts.seed = seed;
        neural::TrainResult result;
        if (auto* vae = std::get_if<neural::VaeModel>(&model->model)) {
            result = neural::train_vae(*vae, data->set, opts);
        } else {
            result = neural::train_classifier(std::get<neural::MlpModel>(model->model), data->set,
                                              opts);
        }
        if (out_loss_csv) {
            std::ostringstream os;
            os << "epoch,mean_loss\n";
            for (size_t i = 0; i < result.epoch_loss.size(); ++i) {
                os << (i + 1) << ',' << result.epoch_loss[i] << '\n';
            }
            *out_loss_csv = dup_string(os.str());
        }
    });
}

sns_status sns_eval_classifier_accuracy(const sns_model* classifier, const sns_dataset* data,
                                        double* out_accuracy) {
    return guarded([&] {
        require(data != nullptr && out_accuracy != nullptr, "data/out must not be null");
        *out_accuracy = neural::classifier_accuracy(as_classifier(classifier), data->set);
    });
}

sns_status sns_eval_semcom_accuracy(const sns_model* vae, const sns_model* classifier,
                                    const sns_dataset* data, double* out_accuracy) {
    return guarded([&] {
        require(data != nullptr && out_accuracy != nullptr, "data/out must not be null");
        const auto& v = as_vae(vae);
        const auto& c = as_classifier(classifier);
        require(data->set.size() > 0, "dataset is empty");
        semcom::QuantSpec spec;
        size_t correct = 0;
        for (size_t i = 0; i < data->set.size(); ++i) {
            auto latent = neural::vae_encode_mu(v, data->set.image(i));
            auto codes = semcom::quantize_all(latent, spec);
            auto recovered = semcom::dequantize_all(codes, spec);
            auto image = neural::vae_decode(v, recovered);
            neural::Matrix x(1, kImagePixels);
            std::copy(image.begin(), image.end(), x.row(0));
            neural::Matrix logits = neural::forward_mlp(c, x);
            if (neural::argmax_digit({logits.row(0), logits.cols}) == data->set.labels[i]) {
                ++correct;
            }
        }
        *out_accuracy = static_cast<double>(correct) / static_cast<double>(data->set.size());
    });
}

void sns_model_free(sns_model* model) {
    delete model;
}

/* ---- simulation ---- */

sns_status sns_run(const sns_config* config, const sns_model* vae, const sns_model* classifier,
                   const sns_dataset* images, sns_metrics** out) {
    return guarded([&] {
        require(config != nullptr && out != nullptr, "config/out must not be null");
        sim::Models models = make_models(vae, classifier);
        LabeledImageSet set = images_or_synthetic(images, config->cfg);
        *out = new sns_metrics{sim::run(config->cfg, models, set)};
    });
}

sns_status sns_compare(const sns_config* config, const sns_model* vae,
                       const sns_model* classifier, const sns_dataset* images,
                       sns_metrics** out_semcom, sns_metrics** out_raw, double* out_ratio) {
    return guarded([&] {
        require(config != nullptr, "config handle is null");
        sim::Models models = make_models(vae, classifier);
        LabeledImageSet set = images_or_synthetic(images, config->cfg);
        sim::CompareResult result = sim::compare(config->cfg, models, set);
        if (out_ratio) *out_ratio = result.ratio_raw_over_semcom;
        if (out_semcom) *out_semcom = new sns_metrics{std::move(result.semcom)};
        if (out_raw) *out_raw = new sns_metrics{std::move(result.raw)};
    });
}

sns_status sns_sweep_csv(const sns_config* config, const sns_model* vae,
                         const sns_model* classifier, const sns_dataset* images,
                         const uint32_t* device_counts, size_t n_counts, char** out_csv) {
    return guarded([&] {
        require(config != nullptr && out_csv != nullptr, "config/out must not be null");
        require(device_counts != nullptr && n_counts > 0, "device_counts must not be empty");
        sim::Models models = make_models(vae, classifier);
        uint32_t max_count = 0;
        for (size_t i = 0; i < n_counts; ++i) max_count = std::max(max_count, device_counts[i]);
        LabeledImageSet set;
        if (images) {
            set = images->set;
        } else {
            ScenarioConfig c = config->cfg;
            c.n_devices = std::max(c.n_devices, max_count);
            set = images_or_synthetic(nullptr, c);
        }
        auto points = sim::sweep_device_counts(config->cfg, models, set,
                                               {device_counts, n_counts});
        *out_csv = dup_string(sim::sweep_csv(points));
    });
}

sns_status sns_metrics_csv(const sns_metrics* metrics, char** out_csv) {
    return guarded([&] {
        require(metrics != nullptr && out_csv != nullptr, "metrics/out must not be null");
        *out_csv = dup_string(sim::metrics_csv(metrics->log));
    });
}

sns_status sns_metrics_summary_json(const sns_metrics* metrics, char** out_json) {
    return guarded([&] {
        require(metrics != nullptr && out_json != nullptr, "metrics/out must not be null");
        *out_json = dup_string(sim::summary_json(metrics->log));
    });
}

size_t sns_metrics_record_count(const sns_metrics* metrics) {
    return metrics ? metrics->log.records.size() : 0;
}

sns_status sns_metrics_record(const sns_metrics* metrics, size_t index, sns_step_record* out) {
    return guarded([&] {
        require(metrics != nullptr && out != nullptr, "metrics/out must not be null");
        require(index < metrics->log.records.size(), "record index out of range");
        const sim::StepRecord& r = metrics->log.records[index];
        out->step = r.step;
        out->robot_id = r.robot_id;
        out->device_id = r.device_id;
        out->payload_bits = r.payload_bits;
        out->delivered = r.delivered ? 1 : 0;
        out->cqi = r.cqi;
        out->cumulative_bits = r.cumulative_bits;
        std::string name = branch_name(r.branch);
        std::snprintf(out->branch, sizeof(out->branch), "%s", name.c_str());
    });
}

sns_status sns_metrics_total_bits(const sns_metrics* metrics, uint64_t* out) {
    return guarded([&] {
        require(metrics != nullptr && out != nullptr, "metrics/out must not be null");
        *out = metrics->log.summary.total_bits;
    });
}

sns_status sns_metrics_devices_classified(const sns_metrics* metrics, uint32_t* out) {
    return guarded([&] {
        require(metrics != nullptr && out != nullptr, "metrics/out must not be null");
        *out = metrics->log.summary.devices_classified;
    });
}

sns_status sns_metrics_accuracy(const sns_metrics* metrics, double* out) {
    return guarded([&] {
        require(metrics != nullptr && out != nullptr, "metrics/out must not be null");
        *out = metrics->log.summary.classification_accuracy;
    });
}

sns_status sns_metrics_completion_step(const sns_metrics* metrics, int64_t* out) {
    return guarded([&] {
        require(metrics != nullptr && out != nullptr, "metrics/out must not be null");
        *out = metrics->log.summary.completion_step
                   ? static_cast<int64_t>(*metrics->log.summary.completion_step)
                   : -1;
    });
}

void sns_metrics_free(sns_metrics* metrics) {
    delete metrics;
}

/* ---- planner ---- */

sns_status sns_agent_brief_prompt(const sns_config* config, char** out_prompt) {
    return guarded([&] {
        require(config != nullptr && out_prompt != nullptr, "config/out must not be null");
        *out_prompt = dup_string(agent::render_prompt(agent::brief(config->cfg)));
    });
}

sns_status sns_agent_plan(const sns_config* config, const char* backend, char** out_plan_json) {
    return guarded([&] {
        require(config != nullptr && backend != nullptr && out_plan_json != nullptr,
                "config/backend/out must not be null");
        agent::ScenarioBrief b = agent::brief(config->cfg);
        std::string back = backend;
        agent::Recommendation rec;
        bool used_fallback = false;
        std::vector<std::string> log;
        if (back == "rule") {
            rec = agent::plan_rule_based(b);
        } else if (back == "llm") {
            auto endpoint = agent::endpoint_from_env();
            if (!endpoint) {
                log.push_back("AGENT_LLM_BASE_URL not set; using the rule backend");
                rec = agent::plan_rule_based(b);
                used_fallback = true;
            } else {
                agent::PlanOutcome outcome = agent::plan_llm(b, *endpoint);
                rec = outcome.rec;
                used_fallback = outcome.used_fallback;
                log = std::move(outcome.log);
            }
        } else {
            fail(Errc::invalid_args, "backend must be 'rule' or 'llm', got '" + back + "'");
        }
        agent::CommandSet commands = agent::emit_commands(rec);
        nlohmann::ordered_json j;
        j["recommendation"] = recommendation_json(rec);
        j["used_fallback"] = used_fallback;
        j["task_commands"] = commands.task_commands;
        j["connectivity_commands"] = commands.connectivity_commands;
        j["log"] = log;
        *out_plan_json = dup_string(j.dump(2) + "\n");
    });
}

sns_status sns_agent_apply(const sns_config* config, const char* plan_json, sns_config** out) {
    return guarded([&] {
        require(config != nullptr && plan_json != nullptr && out != nullptr,
                "config/plan/out must not be null");
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(plan_json);
        } catch (const nlohmann::json::parse_error& e) {
            fail(Errc::parse_error, std::string("plan JSON: ") + e.what());
        }
        const nlohmann::json& rec_j = j.contains("recommendation") ? j.at("recommendation") : j;
        agent::Recommendation rec;
        try {
            rec.num_robots = rec_j.at("num_robots").get<uint32_t>();
            rec.search_strategy =
                agent::search_strategy_from_name(rec_j.at("search_strategy").get<std::string>());
            rec.transmission_scheme =
                branch_from_name(rec_j.at("transmission_scheme").get<std::string>());
            if (rec_j.contains("rationale")) rec.rationale = rec_j.at("rationale").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            fail(Errc::parse_error, std::string("plan JSON: ") + e.what());
        }
        agent::ScenarioBrief b = agent::brief(config->cfg);
        agent::validate_recommendation(rec, b);
        *out = new sns_config{agent::apply_commands(rec, config->cfg)};
    });
}

} /* extern "C" */
