#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "config.hpp"
#include "dataset.hpp"
#include "neural.hpp"
#include "pathplan.hpp"
#include "semcom.hpp"
#include "world.hpp"

namespace semnet::sim {

struct Models {
    neural::VaeModel vae;
    neural::MlpModel classifier;
};

struct StepRecord {
    uint64_t step = 0;  // 1-based step index
    Branch branch = Branch::SemCom;
    uint32_t robot_id = 0;
    uint32_t device_id = 0;
    uint64_t payload_bits = 0;
    bool delivered = false;
    int cqi = 0;
    uint64_t cumulative_bits = 0;

    bool operator==(const StepRecord&) const = default;
};

struct MetricsSummary {
    Branch branch = Branch::SemCom;
    uint64_t total_bits = 0;
    uint32_t devices_classified = 0;
    double classification_accuracy = 0.0;  // correct digits / classified
    double status_accuracy = 0.0;          // correct normal-abnormal calls / classified
    std::optional<uint64_t> completion_step;
    double total_distance_m = 0.0;
    uint64_t steps_executed = 0;
};

struct MetricsLog {
    std::vector<StepRecord> records;
    MetricsSummary summary;
};

// Drives one branch over one world. Each step runs the fixed phase order:
// allocate, advance robots (id order), sense/capture/transmit, ingest
// deliveries, bookkeeping.
class Engine {
  public:
    Engine(world::World world, const Models& models, Branch branch);

    bool done() const;
    void step();
    MetricsLog finish() const;

    const world::World& current() const { return world_; }
    const std::vector<StepRecord>& records() const { return records_; }

  private:
    bool all_classified() const;

    world::World world_;
    const Models& models_;
    Branch branch_;
    pathplan::OccupancyGrid grid_;
    semcom::QuantSpec quant_;
    std::vector<StepRecord> records_;
    std::vector<std::optional<semcom::Payload>> pending_;  // per robot slot
    uint64_t step_index_ = 0;
    uint64_t max_steps_ = 0;
    uint64_t cumulative_bits_ = 0;
    std::optional<uint64_t> completion_step_;
};

// Builds the world from (config, images) and runs config.branch, which must
// be SemCom or Raw.
MetricsLog run(const ScenarioConfig& config, const Models& models, const LabeledImageSet& images);

struct CompareResult {
    MetricsLog semcom;
    MetricsLog raw;
    double ratio_raw_over_semcom = 0.0;
};

// Runs both branches from one identical built world (same placements and
// images), so only the payload sizes differ.
CompareResult compare(const ScenarioConfig& config, const Models& models,
                      const LabeledImageSet& images);

struct SweepPoint {
    uint32_t n_devices = 0;
    uint64_t bits_semcom = 0;
    uint64_t bits_raw = 0;
    double ratio = 0.0;
};

std::vector<SweepPoint> sweep_device_counts(const ScenarioConfig& config, const Models& models,
                                            const LabeledImageSet& images,
                                            std::span<const uint32_t> device_counts);

// CSV with header step,branch,robot_id,device_id,payload_bits,delivered,
// cqi,cumulative_bits. Integer-only fields, so output is byte-stable.
std::string metrics_csv(const MetricsLog& log);
std::string summary_json(const MetricsLog& log);
std::string ratio_report_json(const CompareResult& result);
std::string sweep_csv(std::span<const SweepPoint> points);

}  // namespace semnet::sim
