#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "neural.hpp"
#include "pathplan.hpp"
#include "semcom.hpp"
#include "world.hpp"

namespace semnet::server {

struct ClassificationResult {
    uint32_t device_id = 0;
    uint8_t predicted_digit = 0;
    world::DeviceStatus predicted_status = world::DeviceStatus::Normal;
    bool correct = false;  // predicted digit matches the device's true digit
};

struct Assignment {
    uint32_t robot_id = 0;
    uint32_t device_id = 0;
    double planned_path_cost_m = 0.0;
};

struct DigitVerdict {
    uint8_t digit = 0;
    world::DeviceStatus status = world::DeviceStatus::Normal;
};

// Argmax over the classifier logits (ties toward the smaller digit); the
// normal/abnormal status follows digit parity.
DigitVerdict classify(const neural::MlpModel& classifier, std::span<const double> image);

// Greedy pairing: repeatedly take the (idle robot, undetected device) pair
// with the cheapest A* path, ties toward the lower robot id then device id.
// Unreachable devices are skipped; their ids go to `unreachable` when given.
std::vector<Assignment> allocate(const world::World& world, const pathplan::OccupancyGrid& grid,
                                 std::vector<uint32_t>* unreachable = nullptr);

// Materializes an assignment: plans the robot's waypoint path to the
// device's cell and marks the device Assigned.
void apply_assignment(world::World& world, const pathplan::OccupancyGrid& grid,
                      const Assignment& assignment);

// Decodes a delivered payload, classifies it, and marks the device
// Classified. A payload for an already-classified device is ignored
// (returns nullopt).
std::optional<ClassificationResult> ingest(const semcom::Payload& payload,
                                           const neural::VaeModel& vae,
                                           const semcom::QuantSpec& spec,
                                           const neural::MlpModel& classifier,
                                           world::World& world);

}  // namespace semnet::server
