#include "sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "channel.hpp"
#include "error.hpp"
#include "server.hpp"

namespace semnet::sim {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json summary_to_json(const MetricsSummary& s) {
    ordered_json j;
    j["branch"] = branch_name(s.branch);
    j["total_bits"] = s.total_bits;
    j["devices_classified"] = s.devices_classified;
    j["classification_accuracy"] = s.classification_accuracy;
    j["status_accuracy"] = s.status_accuracy;
    if (s.completion_step) {
        j["completion_step"] = *s.completion_step;
    } else {
        j["completion_step"] = nullptr;
    }
    j["total_distance_m"] = s.total_distance_m;
    j["steps_executed"] = s.steps_executed;
    return j;
}

}  // namespace

Engine::Engine(world::World world, const Models& models, Branch branch)
    : world_(std::move(world)), models_(models), branch_(branch) {
    if (branch_ == Branch::Both) {
        fail(Errc::invalid_args, "an engine drives one branch; use compare() for Both");
    }
    grid_ = pathplan::rasterize(world_.config);
    pending_.resize(world_.robots.size());
    max_steps_ =
        static_cast<uint64_t>(std::llround(world_.config.sim_duration_s / world_.config.step_s));
}

bool Engine::all_classified() const {
    return std::all_of(world_.devices.begin(), world_.devices.end(), [](const world::Device& d) {
        return d.state == world::DeviceState::Classified;
    });
}

bool Engine::done() const {
    return step_index_ >= max_steps_ || all_classified();
}

void Engine::step() {
    if (done()) fail(Errc::invalid_args, "step() called on a finished run");
    ++step_index_;

    // (1) pair idle robots with undetected devices and plan their paths.
    for (const server::Assignment& a : server::allocate(world_, grid_)) {
        server::apply_assignment(world_, grid_, a);
    }

    // (2) advance robots in id order.
    for (const world::Robot& r : world_.robots) {
        world::advance_robot(world_, r.id, world_.config.step_s);
    }

    // (3) capture/transmit. A robot captures its assigned device once when
    // it first senses it; an undelivered payload is retransmitted each step.
    std::vector<std::pair<size_t, semcom::Payload>> delivered;
    for (size_t i = 0; i < world_.robots.size(); ++i) {
        world::Robot& robot = world_.robots[i];
        if (!robot.assigned_device) continue;
        uint32_t device_id = *robot.assigned_device;
        if (!pending_[i]) {
            std::vector<uint32_t> sensed = world::sense(world_, robot.id);
            if (std::find(sensed.begin(), sensed.end(), device_id) == sensed.end()) continue;
            const world::Device& device = world::device_by_id(world_, device_id);
            pending_[i] = semcom::make_payload(branch_, device_id, robot.id, device.image,
                                               models_.vae, quant_);
        }

        channel::LinkReport report = channel::link_report(world_.config.radio, robot.position);
        uint64_t wire_bits =
            pending_[i]->bits_on_wire() + world_.config.radio.header_overhead_bits;
        channel::TxOutcome tx = channel::transmit(report, wire_bits, world_.config.step_s);

        StepRecord rec;
        rec.step = step_index_;
        rec.branch = branch_;
        rec.robot_id = robot.id;
        rec.device_id = device_id;
        rec.payload_bits = pending_[i]->bits_on_wire();
        rec.delivered = tx.delivered;
        rec.cqi = report.cqi;
        if (tx.delivered) {
            cumulative_bits_ += tx.bits_counted;
            delivered.emplace_back(i, std::move(*pending_[i]));
            pending_[i].reset();
        }
        rec.cumulative_bits = cumulative_bits_;
        records_.push_back(rec);
    }

    // (4) server side: decode, classify, release the robot.
    for (auto& [robot_idx, payload] : delivered) {
        server::ingest(payload, models_.vae, quant_, models_.classifier, world_);
        world_.robots[robot_idx].assigned_device.reset();
        world_.robots[robot_idx].path.clear();
    }

    // (5) bookkeeping.
    world_.clock_s += world_.config.step_s;
    if (!completion_step_ && all_classified()) completion_step_ = step_index_;
}

MetricsLog Engine::finish() const {
    MetricsLog log;
    log.records = records_;
    MetricsSummary& s = log.summary;
    s.branch = branch_;
    s.total_bits = cumulative_bits_;
    uint32_t correct_digit = 0;
    uint32_t correct_status = 0;
    for (const world::Device& d : world_.devices) {
        if (d.state != world::DeviceState::Classified) continue;
        ++s.devices_classified;
        if (d.predicted_digit == d.true_digit) ++correct_digit;
        if (d.predicted_status == d.true_status) ++correct_status;
    }
    if (s.devices_classified > 0) {
        s.classification_accuracy =
            static_cast<double>(correct_digit) / static_cast<double>(s.devices_classified);
        s.status_accuracy =
            static_cast<double>(correct_status) / static_cast<double>(s.devices_classified);
    }
    s.completion_step = completion_step_;
    for (const world::Robot& r : world_.robots) s.total_distance_m += r.distance_traveled_m;
    s.steps_executed = step_index_;
    return log;
}

MetricsLog run(const ScenarioConfig& config, const Models& models,
               const LabeledImageSet& images) {
    if (config.branch == Branch::Both) {
        fail(Errc::invalid_args, "run() drives one branch; use compare() for Both");
    }
    world::World w = world::build_world(config, images);
    Engine engine(std::move(w), models, config.branch);
    while (!engine.done()) engine.step();
    return engine.finish();
}

CompareResult compare(const ScenarioConfig& config, const Models& models,
                      const LabeledImageSet& images) {
    world::World base = world::build_world(config, images);
    CompareResult result;
    {
        Engine engine(base, models, Branch::SemCom);
        while (!engine.done()) engine.step();
        result.semcom = engine.finish();
    }
    {
        Engine engine(std::move(base), models, Branch::Raw);
        while (!engine.done()) engine.step();
        result.raw = engine.finish();
    }
    if (result.semcom.summary.total_bits > 0) {
        result.ratio_raw_over_semcom = static_cast<double>(result.raw.summary.total_bits) /
                                       static_cast<double>(result.semcom.summary.total_bits);
    }
    return result;
}

std::vector<SweepPoint> sweep_device_counts(const ScenarioConfig& config, const Models& models,
                                            const LabeledImageSet& images,
                                            std::span<const uint32_t> device_counts) {
    std::vector<SweepPoint> points;
    points.reserve(device_counts.size());
    for (uint32_t n : device_counts) {
        ScenarioConfig c = config;
        c.n_devices = n;
        CompareResult r = compare(c, models, images);
        points.push_back(
            {n, r.semcom.summary.total_bits, r.raw.summary.total_bits, r.ratio_raw_over_semcom});
    }
    return points;
}

std::string metrics_csv(const MetricsLog& log) {
    std::ostringstream os;
    os << "step,branch,robot_id,device_id,payload_bits,delivered,cqi,cumulative_bits\n";
    for (const StepRecord& r : log.records) {
        os << r.step << ',' << branch_name(r.branch) << ',' << r.robot_id << ',' << r.device_id
           << ',' << r.payload_bits << ',' << (r.delivered ? 1 : 0) << ',' << r.cqi << ','
           << r.cumulative_bits << '\n';
    }
    return os.str();
}

std::string summary_json(const MetricsLog& log) {
    return summary_to_json(log.summary).dump(2) + "\n";
}

std::string ratio_report_json(const CompareResult& result) {
    ordered_json j;
    j["semcom"] = summary_to_json(result.semcom.summary);
    j["raw"] = summary_to_json(result.raw.summary);
    j["ratio_raw_over_semcom"] = result.ratio_raw_over_semcom;
    return j.dump(2) + "\n";
}

std::string sweep_csv(std::span<const SweepPoint> points) {
    std::ostringstream os;
    os << "n_devices,bits_semcom,bits_raw,ratio\n";
    for (const SweepPoint& p : points) {
        os << p.n_devices << ',' << p.bits_semcom << ',' << p.bits_raw << ',' << p.ratio << '\n';
    }
    return os.str();
}

}  // namespace semnet::sim
