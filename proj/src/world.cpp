#include "world.hpp"

#include <algorithm>
#include <string>

#include "error.hpp"
#include "pathplan.hpp"

namespace semnet::world {

namespace {

constexpr uint64_t kPlacementStream = 0x3D0;
constexpr int kMaxPlacementAttempts = 10000;

bool cell_free(const pathplan::OccupancyGrid& grid, Vec2 p) {
    return !grid.is_blocked(grid.cell_of(p));
}

[[noreturn]] void placement_failure(const char* what) {
    fail(Errc::placement_failure,
         std::string("could not place ") + what + " after " +
             std::to_string(kMaxPlacementAttempts) + " attempts; environment too crowded");
}

}  // namespace

DeviceStatus status_of_digit(uint8_t digit) {
    return digit % 2 == 0 ? DeviceStatus::Abnormal : DeviceStatus::Normal;
}

World build_world(const ScenarioConfig& config, const LabeledImageSet& image_source) {
    validate(config);
    if (image_source.size() < config.n_devices) {
        fail(Errc::invalid_args, "image source holds " + std::to_string(image_source.size()) +
                                     " images but the scenario needs " +
                                     std::to_string(config.n_devices));
    }

    pathplan::OccupancyGrid grid = pathplan::rasterize(config);

    World world;
    world.config = config;
    world.rng = Rng::substream(config.seed, kPlacementStream);

    // Devices first: uniform rejection sampling with wall clearance, mutual
    // spacing, and a free grid cell (keeps every device plannable).
    world.devices.reserve(config.n_devices);
    for (uint32_t id = 0; id < config.n_devices; ++id) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
            Vec2 p{world.rng.uniform(0.0, config.width_m), world.rng.uniform(0.0, config.height_m)};
            bool ok = cell_free(grid, p);
            for (const Rect& wall : config.walls) {
                if (!ok) break;
                ok = wall.distance_to(p) >= 1.0;
            }
            for (const Device& other : world.devices) {
                if (!ok) break;
                ok = distance(p, other.position) >= 2.0;
            }
            if (ok) {
                Device d;
                d.id = id;
                d.position = p;
                world.devices.push_back(std::move(d));
                placed = true;
            }
        }
        if (!placed) placement_failure("a device");
    }

    // Images drawn without replacement via a partial Fisher-Yates pass.
    std::vector<size_t> pool(image_source.size());
    for (size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    for (uint32_t id = 0; id < config.n_devices; ++id) {
        size_t j = id + static_cast<size_t>(world.rng.uniform_index(pool.size() - id));
        std::swap(pool[id], pool[j]);
        Device& d = world.devices[id];
        auto img = image_source.image(pool[id]);
        d.image.assign(img.begin(), img.end());
        d.true_digit = image_source.labels[pool[id]];
        d.true_status = status_of_digit(d.true_digit);
    }

    // Robots: anywhere outside walls on a free cell.
    world.robots.reserve(config.n_robots);
    for (uint32_t id = 0; id < config.n_robots; ++id) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
            Vec2 p{world.rng.uniform(0.0, config.width_m), world.rng.uniform(0.0, config.height_m)};
            bool ok = cell_free(grid, p);
            for (const Rect& wall : config.walls) {
                if (!ok) break;
                ok = !wall.contains(p);
            }
            if (ok) {
                Robot r;
                r.id = id;
                r.position = p;
                world.robots.push_back(std::move(r));
                placed = true;
            }
        }
        if (!placed) placement_failure("a robot");
    }

    return world;
}

Device& device_by_id(World& world, uint32_t device_id) {
    if (device_id < world.devices.size() && world.devices[device_id].id == device_id) {
        return world.devices[device_id];
    }
    for (Device& d : world.devices) {
        if (d.id == device_id) return d;
    }
    fail(Errc::unknown_device, "no device with id " + std::to_string(device_id));
}

const Device& device_by_id(const World& world, uint32_t device_id) {
    return device_by_id(const_cast<World&>(world), device_id);
}

Robot& robot_by_id(World& world, uint32_t robot_id) {
    if (robot_id < world.robots.size() && world.robots[robot_id].id == robot_id) {
        return world.robots[robot_id];
    }
    for (Robot& r : world.robots) {
        if (r.id == robot_id) return r;
    }
    fail(Errc::unknown_robot, "no robot with id " + std::to_string(robot_id));
}

const Robot& robot_by_id(const World& world, uint32_t robot_id) {
    return robot_by_id(const_cast<World&>(world), robot_id);
}

std::vector<uint32_t> sense(const World& world, uint32_t robot_id) {
    const Robot& robot = robot_by_id(world, robot_id);
    std::vector<uint32_t> hits;
    for (const Device& d : world.devices) {
        if (d.state == DeviceState::Classified) continue;
        if (distance(d.position, robot.position) <= world.config.sense_radius_m) {
            hits.push_back(d.id);
        }
    }
    return hits;
}

Vec2 advance_robot(World& world, uint32_t robot_id, double dt_s) {
    if (!(dt_s > 0.0)) fail(Errc::invalid_args, "dt_s must be positive");
    Robot& robot = robot_by_id(world, robot_id);
    double budget = world.config.robot_speed_mps * dt_s;
    while (budget > 0.0 && !robot.path.empty()) {
        Vec2 to_next = robot.path.front() - robot.position;
        double seg = to_next.norm();
        if (seg <= budget) {
            robot.position = robot.path.front();
            robot.path.pop_front();
            robot.distance_traveled_m += seg;
            budget -= seg;
        } else {
            robot.position = robot.position + to_next * (budget / seg);
            robot.distance_traveled_m += budget;
            budget = 0.0;
        }
    }
    return robot.position;
}

}  // namespace semnet::world
