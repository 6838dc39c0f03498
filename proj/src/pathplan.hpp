#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "config.hpp"
#include "geometry.hpp"

namespace semnet::pathplan {

struct Cell {
    int row = 0;
    int col = 0;

    bool operator==(const Cell&) const = default;
};

struct OccupancyGrid {
    double cell_size_m = 1.0;
    int cols = 0;
    int rows = 0;
    std::vector<uint8_t> blocked;  // row-major

    bool in_bounds(Cell c) const {
        return c.row >= 0 && c.row < rows && c.col >= 0 && c.col < cols;
    }
    bool is_blocked(Cell c) const { return blocked[static_cast<size_t>(c.row) * cols + c.col] != 0; }

    Cell cell_of(Vec2 p) const;
    Vec2 center_of(Cell c) const;
    size_t blocked_count() const;
};

// Grid covering the whole environment; a cell is blocked when its area
// overlaps a wall's interior.
OccupancyGrid rasterize(const ScenarioConfig& config);

// Path cost is carried as (orthogonal, diagonal) step counts and always
// recomputed as orth + diag*sqrt(2) from them, so equal-cost paths produce
// bit-identical doubles regardless of visit order.
struct Path {
    std::vector<Cell> cells;
    int orth_steps = 0;
    int diag_steps = 0;
    double cost = 0.0;
};

double step_cost(int orth_steps, int diag_steps);
// Octile distance between two cells, in the same canonical form.
double octile(Cell a, Cell b);

// 8-connected A* with the octile heuristic. Diagonal moves that would clip
// a blocked orthogonal neighbor are forbidden. Ties on f break toward the
// lower (row, col). Returns nullopt when the goal is unreachable; throws
// Errc::out_of_bounds / Errc::blocked_endpoint on bad endpoints.
std::optional<Path> astar(const OccupancyGrid& grid, Cell start, Cell goal);

// Cell centers in meters with collinear runs merged. Throws Errc::empty_path.
std::vector<Vec2> path_to_waypoints(const std::vector<Cell>& cells, const OccupancyGrid& grid);

}  // namespace semnet::pathplan
