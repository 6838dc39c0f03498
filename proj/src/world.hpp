#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "config.hpp"
#include "dataset.hpp"
#include "geometry.hpp"
#include "rng.hpp"

namespace semnet::world {

enum class DeviceState : uint8_t { Undetected = 0, Assigned = 1, Classified = 2 };
enum class DeviceStatus : uint8_t { Normal = 0, Abnormal = 1 };

// Even digits mark abnormal devices.
DeviceStatus status_of_digit(uint8_t digit);

struct Device {
    uint32_t id = 0;
    Vec2 position;
    std::vector<double> image;  // 784 pixels in [0,1]
    uint8_t true_digit = 0;
    DeviceStatus true_status = DeviceStatus::Normal;
    DeviceState state = DeviceState::Undetected;
    // Valid only once state == Classified.
    uint8_t predicted_digit = 0;
    DeviceStatus predicted_status = DeviceStatus::Normal;

    bool operator==(const Device&) const = default;
};

struct Robot {
    uint32_t id = 0;
    Vec2 position;
    std::deque<Vec2> path;  // waypoints still to visit, front first
    std::optional<uint32_t> assigned_device;
    double distance_traveled_m = 0.0;

    bool operator==(const Robot&) const = default;
};

struct World {
    ScenarioConfig config;
    std::vector<Device> devices;  // sorted by id
    std::vector<Robot> robots;    // sorted by id
    Rng rng;
    double clock_s = 0.0;
};

// Places devices, assigns their images (drawn without replacement), then
// places robots, all by seeded rejection sampling. Devices keep >= 1 m wall
// clearance and >= 2 m mutual spacing; every entity lands on an unblocked
// grid cell so it stays reachable by the planner.
World build_world(const ScenarioConfig& config, const LabeledImageSet& image_source);

Device& device_by_id(World& world, uint32_t device_id);
const Device& device_by_id(const World& world, uint32_t device_id);
Robot& robot_by_id(World& world, uint32_t robot_id);
const Robot& robot_by_id(const World& world, uint32_t robot_id);

// Ids of not-yet-classified devices within sense_radius_m (inclusive) of the
// robot, in ascending id order.
std::vector<uint32_t> sense(const World& world, uint32_t robot_id);

// Moves the robot along its waypoint queue by min(speed*dt, remaining path
// length) meters and returns the new position.
Vec2 advance_robot(World& world, uint32_t robot_id, double dt_s);

}  // namespace semnet::world
