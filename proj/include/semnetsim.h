#ifndef SEMNETSIM_H
#define SEMNETSIM_H

/*
 * C interface to the semnetsim engine: scenario configs, datasets, model
 * training, the discrete-time network simulation, and the deployment
 * planner. All objects are opaque handles; every fallible call returns an
 * sns_status and leaves a message for sns_last_error() on failure. Strings
 * returned through char** out-parameters are malloc'd and must be released
 * with sns_string_free().
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SNS_API __declspec(dllexport)
#else
#define SNS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sns_status {
    SNS_OK = 0,
    SNS_E_INVALID_ARGS = 1,
    SNS_E_INVALID_CONFIG = 2,
    SNS_E_PLACEMENT_FAILURE = 3,
    SNS_E_UNKNOWN_ROBOT = 4,
    SNS_E_UNKNOWN_DEVICE = 5,
    SNS_E_OUT_OF_BOUNDS = 6,
    SNS_E_BLOCKED_ENDPOINT = 7,
    SNS_E_NO_PATH = 8,
    SNS_E_EMPTY_PATH = 9,
    SNS_E_NON_POSITIVE_DISTANCE = 10,
    SNS_E_BAD_TABLE = 11,
    SNS_E_BAD_MAGIC = 12,
    SNS_E_COUNT_MISMATCH = 13,
    SNS_E_TRUNCATED_FILE = 14,
    SNS_E_VERSION_MISMATCH = 15,
    SNS_E_DIM_MISMATCH = 16,
    SNS_E_TRAINING_DIVERGED = 17,
    SNS_E_MALFORMED_PAYLOAD = 18,
    SNS_E_IO = 19,
    SNS_E_PARSE = 20,
    SNS_E_ENDPOINT_UNREACHABLE = 21,
    SNS_E_MALFORMED_RESPONSE = 22,
    SNS_E_TIMEOUT = 23,
    SNS_E_INTERNAL = 24
} sns_status;

SNS_API const char* sns_status_name(sns_status status);

/* Message describing this thread's most recent failure; never NULL. */
SNS_API const char* sns_last_error(void);

SNS_API void sns_string_free(char* s);

SNS_API const char* sns_version(void);

/* ---- scenario configuration ---- */

typedef struct sns_config sns_config;

SNS_API sns_status sns_config_default(sns_config** out);
SNS_API sns_status sns_config_load(const char* path, sns_config** out);
SNS_API sns_status sns_config_parse(const char* json_text, sns_config** out);
SNS_API sns_status sns_config_to_json(const sns_config* config, char** out_json);
SNS_API sns_status sns_config_set_seed(sns_config* config, uint64_t seed);
/* branch is "SemCom", "Raw" or "Both". */
SNS_API sns_status sns_config_set_branch(sns_config* config, const char* branch);
SNS_API sns_status sns_config_set_counts(sns_config* config, uint32_t n_robots,
                                         uint32_t n_devices);
SNS_API uint64_t sns_config_seed(const sns_config* config);
SNS_API void sns_config_free(sns_config* config);

/* ---- labeled image datasets ---- */

typedef struct sns_dataset sns_dataset;

SNS_API sns_status sns_dataset_load_idx(const char* images_path, const char* labels_path,
                                        sns_dataset** out);
SNS_API sns_status sns_dataset_generate(uint64_t seed, size_t count, sns_dataset** out);
SNS_API sns_status sns_dataset_save_idx(const sns_dataset* dataset, const char* images_path,
                                        const char* labels_path);
SNS_API size_t sns_dataset_size(const sns_dataset* dataset);
SNS_API void sns_dataset_free(sns_dataset* dataset);

/* ---- models ---- */

typedef struct sns_model sns_model;

/* kind is "vae" or "classifier"; the seed drives initialization. */
SNS_API sns_status sns_model_init(const char* kind, uint64_t seed, sns_model** out);
SNS_API sns_status sns_model_load(const char* path, sns_model** out);
SNS_API sns_status sns_model_save(const sns_model* model, const char* path);
/* "vae" or "classifier"; NULL on a null handle. */
SNS_API const char* sns_model_kind(const sns_model* model);
/* Deterministic SGD-with-momentum training. The optional out parameter
 * receives a loss-history CSV (epoch,mean_loss). */
SNS_API sns_status sns_model_train(sns_model* model, const sns_dataset* data, uint32_t epochs,
                                   double lr, uint32_t batch_size, uint64_t seed,
                                   char** out_loss_csv);
SNS_API sns_status sns_eval_classifier_accuracy(const sns_model* classifier,
                                                const sns_dataset* data, double* out_accuracy);
/* Accuracy of classify(decode(dequantize(quantize(encode(x))))) over data. */
SNS_API sns_status sns_eval_semcom_accuracy(const sns_model* vae, const sns_model* classifier,
                                            const sns_dataset* data, double* out_accuracy);
SNS_API void sns_model_free(sns_model* model);

/* ---- simulation ---- */

typedef struct sns_metrics sns_metrics;

typedef struct sns_step_record {
    uint64_t step;
    uint32_t robot_id;
    uint32_t device_id;
    uint64_t payload_bits;
    int delivered;
    int cqi;
    uint64_t cumulative_bits;
    char branch[8]; /* "SemCom" or "Raw" */
} sns_step_record;

/* Runs config.branch (SemCom or Raw). images may be NULL: a deterministic
 * synthetic set derived from the config seed is used instead. */
SNS_API sns_status sns_run(const sns_config* config, const sns_model* vae,
                           const sns_model* classifier, const sns_dataset* images,
                           sns_metrics** out);
/* Runs both branches over one identical world; ratio = raw bits / semcom
 * bits. Any output pointer may be NULL when the caller does not need it. */
SNS_API sns_status sns_compare(const sns_config* config, const sns_model* vae,
                               const sns_model* classifier, const sns_dataset* images,
                               sns_metrics** out_semcom, sns_metrics** out_raw,
                               double* out_ratio);
/* Re-runs compare for each device count; emits CSV
 * n_devices,bits_semcom,bits_raw,ratio. */
SNS_API sns_status sns_sweep_csv(const sns_config* config, const sns_model* vae,
                                 const sns_model* classifier, const sns_dataset* images,
                                 const uint32_t* device_counts, size_t n_counts, char** out_csv);

SNS_API sns_status sns_metrics_csv(const sns_metrics* metrics, char** out_csv);
SNS_API sns_status sns_metrics_summary_json(const sns_metrics* metrics, char** out_json);
SNS_API size_t sns_metrics_record_count(const sns_metrics* metrics);
SNS_API sns_status sns_metrics_record(const sns_metrics* metrics, size_t index,
                                      sns_step_record* out);
SNS_API sns_status sns_metrics_total_bits(const sns_metrics* metrics, uint64_t* out);
SNS_API sns_status sns_metrics_devices_classified(const sns_metrics* metrics, uint32_t* out);
SNS_API sns_status sns_metrics_accuracy(const sns_metrics* metrics, double* out);
/* -1 when the run never classified every device. */
SNS_API sns_status sns_metrics_completion_step(const sns_metrics* metrics, int64_t* out);
SNS_API void sns_metrics_free(sns_metrics* metrics);

/* ---- deployment planner ---- */

/* The prompt text the planner sends for this scenario. */
SNS_API sns_status sns_agent_brief_prompt(const sns_config* config, char** out_prompt);
/* backend is "rule" or "llm" (llm falls back to rule on any failure; the
 * endpoint comes from AGENT_LLM_BASE_URL / AGENT_LLM_API_KEY). The result
 * JSON carries recommendation, used_fallback, task_commands,
 * connectivity_commands and a log array. */
SNS_API sns_status sns_agent_plan(const sns_config* config, const char* backend,
                                  char** out_plan_json);
/* Applies a plan's robot count and branch to a copy of the config. */
SNS_API sns_status sns_agent_apply(const sns_config* config, const char* plan_json,
                                   sns_config** out);

#ifdef __cplusplus
}
#endif

#endif /* SEMNETSIM_H */
