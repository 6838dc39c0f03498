#include "server.hpp"

#include <algorithm>
#include <limits>

#include "error.hpp"

namespace semnet::server {

namespace {

struct PairCost {
    size_t robot_idx;
    size_t device_idx;
    double cost;
};

}  // namespace

DigitVerdict classify(const neural::MlpModel& classifier, std::span<const double> image) {
    if (image.size() != kImagePixels) {
        fail(Errc::dim_mismatch, "classifier expects a 784-pixel image");
    }
    neural::Matrix x(1, kImagePixels);
    std::copy(image.begin(), image.end(), x.row(0));
    neural::Matrix logits = neural::forward_mlp(classifier, x);
    DigitVerdict verdict;
    verdict.digit = neural::argmax_digit({logits.row(0), logits.cols});
    verdict.status = world::status_of_digit(verdict.digit);
    return verdict;
}

std::vector<Assignment> allocate(const world::World& world, const pathplan::OccupancyGrid& grid,
                                 std::vector<uint32_t>* unreachable) {
    std::vector<size_t> robots;
    for (size_t i = 0; i < world.robots.size(); ++i) {
        if (!world.robots[i].assigned_device) robots.push_back(i);
    }
    std::vector<size_t> devices;
    for (size_t i = 0; i < world.devices.size(); ++i) {
        if (world.devices[i].state == world::DeviceState::Undetected) devices.push_back(i);
    }
    if (robots.empty() || devices.empty()) return {};

    // Path costs are fixed for the duration of one allocation round, so
    // compute the whole matrix once. No path -> unset entry.
    std::vector<std::optional<double>> cost(robots.size() * devices.size());
    std::vector<bool> device_reachable(devices.size(), false);
    for (size_t ri = 0; ri < robots.size(); ++ri) {
        pathplan::Cell from = grid.cell_of(world.robots[robots[ri]].position);
        for (size_t di = 0; di < devices.size(); ++di) {
            pathplan::Cell to = grid.cell_of(world.devices[devices[di]].position);
            if (auto path = pathplan::astar(grid, from, to)) {
                cost[ri * devices.size() + di] = path->cost;
                device_reachable[di] = true;
            }
        }
    }

    std::vector<bool> robot_used(robots.size(), false);
    std::vector<bool> device_used(devices.size(), false);
    std::vector<Assignment> out;
    for (;;) {
        std::optional<PairCost> best;
        for (size_t ri = 0; ri < robots.size(); ++ri) {
            if (robot_used[ri]) continue;
            for (size_t di = 0; di < devices.size(); ++di) {
                if (device_used[di]) continue;
                const auto& c = cost[ri * devices.size() + di];
                if (!c) continue;
                // Scan order is (robot id, device id) ascending, so a strict
                // `<` keeps the first (lowest-id) pair on ties.
                if (!best || *c < best->cost) {
                    best = PairCost{ri, di, *c};
                }
            }
        }
        if (!best) break;
        robot_used[best->robot_idx] = true;
        device_used[best->device_idx] = true;
        out.push_back({world.robots[robots[best->robot_idx]].id,
                       world.devices[devices[best->device_idx]].id, best->cost});
    }

    if (unreachable) {
        for (size_t di = 0; di < devices.size(); ++di) {
            if (!device_reachable[di]) unreachable->push_back(world.devices[devices[di]].id);
        }
    }
    return out;
}

void apply_assignment(world::World& world, const pathplan::OccupancyGrid& grid,
                      const Assignment& assignment) {
    world::Robot& robot = world::robot_by_id(world, assignment.robot_id);
    world::Device& device = world::device_by_id(world, assignment.device_id);
    auto path = pathplan::astar(grid, grid.cell_of(robot.position), grid.cell_of(device.position));
    if (!path) fail(Errc::no_path, "assigned device became unreachable");
    auto waypoints = pathplan::path_to_waypoints(path->cells, grid);
    robot.path.assign(waypoints.begin(), waypoints.end());
    robot.assigned_device = assignment.device_id;
    device.state = world::DeviceState::Assigned;
}

std::optional<ClassificationResult> ingest(const semcom::Payload& payload,
                                           const neural::VaeModel& vae,
                                           const semcom::QuantSpec& spec,
                                           const neural::MlpModel& classifier,
                                           world::World& world) {
    world::Device& device = world::device_by_id(world, payload.device_id);
    if (device.state == world::DeviceState::Classified) {
        return std::nullopt;  // duplicate delivery, ignore
    }
    std::vector<double> image = semcom::decode_payload(payload, vae, spec);
    DigitVerdict verdict = classify(classifier, image);
    device.state = world::DeviceState::Classified;
    device.predicted_digit = verdict.digit;
    device.predicted_status = verdict.status;

    ClassificationResult result;
    result.device_id = device.id;
    result.predicted_digit = verdict.digit;
    result.predicted_status = verdict.status;
    result.correct = verdict.digit == device.true_digit;
    return result;
}

}  // namespace semnet::server
