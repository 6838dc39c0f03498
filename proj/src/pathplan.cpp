#include "pathplan.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

#include "error.hpp"

namespace semnet::pathplan {

Cell OccupancyGrid::cell_of(Vec2 p) const {
    // Points on the max boundary belong to the last cell.
    int col = std::min(static_cast<int>(p.x / cell_size_m), cols - 1);
    int row = std::min(static_cast<int>(p.y / cell_size_m), rows - 1);
    return {std::max(row, 0), std::max(col, 0)};
}

Vec2 OccupancyGrid::center_of(Cell c) const {
    return {(c.col + 0.5) * cell_size_m, (c.row + 0.5) * cell_size_m};
}

size_t OccupancyGrid::blocked_count() const {
    size_t n = 0;
    for (uint8_t b : blocked) n += b;
    return n;
}

OccupancyGrid rasterize(const ScenarioConfig& config) {
    validate(config);
    OccupancyGrid grid;
    grid.cell_size_m = 1.0;
    grid.cols = static_cast<int>(std::ceil(config.width_m / grid.cell_size_m));
    grid.rows = static_cast<int>(std::ceil(config.height_m / grid.cell_size_m));
    grid.blocked.assign(static_cast<size_t>(grid.cols) * grid.rows, 0);
    for (int row = 0; row < grid.rows; ++row) {
        for (int col = 0; col < grid.cols; ++col) {
            Rect cell{col * grid.cell_size_m, row * grid.cell_size_m, (col + 1) * grid.cell_size_m,
                      (row + 1) * grid.cell_size_m};
            for (const auto& wall : config.walls) {
                if (cell.overlaps_interior(wall)) {
                    grid.blocked[static_cast<size_t>(row) * grid.cols + col] = 1;
                    break;
                }
            }
        }
    }
    return grid;
}

double step_cost(int orth_steps, int diag_steps) {
    return static_cast<double>(orth_steps) + static_cast<double>(diag_steps) * std::numbers::sqrt2;
}

double octile(Cell a, Cell b) {
    int dr = std::abs(a.row - b.row);
    int dc = std::abs(a.col - b.col);
    int diag = std::min(dr, dc);
    return step_cost(std::max(dr, dc) - diag, diag);
}

namespace {

struct QueueEntry {
    double f;
    int row;
    int col;
    double g;

    // Min-heap by (f, row, col, g); the total order makes pop order, and
    // therefore returned paths, deterministic.
    bool operator>(const QueueEntry& o) const {
        if (f != o.f) return f > o.f;
        if (row != o.row) return row > o.row;
        if (col != o.col) return col > o.col;
        return g > o.g;
    }
};

constexpr int kDr[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
constexpr int kDc[8] = {-1, 0, 1, -1, 1, -1, 0, 1};

}  // namespace

std::optional<Path> astar(const OccupancyGrid& grid, Cell start, Cell goal) {
    if (!grid.in_bounds(start) || !grid.in_bounds(goal)) {
        fail(Errc::out_of_bounds, "astar endpoint outside the grid");
    }
    if (grid.is_blocked(start) || grid.is_blocked(goal)) {
        fail(Errc::blocked_endpoint, "astar endpoint on a blocked cell");
    }

    const size_t n_cells = static_cast<size_t>(grid.rows) * grid.cols;
    auto idx = [&](Cell c) { return static_cast<size_t>(c.row) * grid.cols + c.col; };

    std::vector<int> orth(n_cells, -1);
    std::vector<int> diag(n_cells, -1);
    std::vector<int32_t> parent(n_cells, -1);
    std::vector<uint8_t> closed(n_cells, 0);

    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> open;
    orth[idx(start)] = 0;
    diag[idx(start)] = 0;
    open.push({octile(start, goal), start.row, start.col, 0.0});

    while (!open.empty()) {
        QueueEntry top = open.top();
        open.pop();
        Cell cur{top.row, top.col};
        size_t ci = idx(cur);
        if (closed[ci]) continue;
        closed[ci] = 1;

        if (cur == goal) {
            Path path;
            path.orth_steps = orth[ci];
            path.diag_steps = diag[ci];
            path.cost = step_cost(path.orth_steps, path.diag_steps);
            for (int32_t at = static_cast<int32_t>(ci); at >= 0; at = parent[at]) {
                path.cells.push_back({at / grid.cols, at % grid.cols});
            }
            std::reverse(path.cells.begin(), path.cells.end());
            return path;
        }

        for (int d = 0; d < 8; ++d) {
            Cell next{cur.row + kDr[d], cur.col + kDc[d]};
            if (!grid.in_bounds(next) || grid.is_blocked(next)) continue;
            bool diagonal = kDr[d] != 0 && kDc[d] != 0;
            if (diagonal) {
                // No corner cutting: both orthogonal neighbors must be free.
                if (grid.is_blocked({cur.row + kDr[d], cur.col}) ||
                    grid.is_blocked({cur.row, cur.col + kDc[d]})) {
                    continue;
                }
            }
            size_t ni = idx(next);
            if (closed[ni]) continue;
            int no = orth[ci] + (diagonal ? 0 : 1);
            int nd = diag[ci] + (diagonal ? 1 : 0);
            double ng = step_cost(no, nd);
            if (orth[ni] >= 0 && step_cost(orth[ni], diag[ni]) <= ng) continue;
            orth[ni] = no;
            diag[ni] = nd;
            parent[ni] = static_cast<int32_t>(ci);
            open.push({ng + octile(next, goal), next.row, next.col, ng});
        }
    }
    return std::nullopt;
}

std::vector<Vec2> path_to_waypoints(const std::vector<Cell>& cells, const OccupancyGrid& grid) {
    if (cells.empty()) fail(Errc::empty_path, "cannot convert an empty path to waypoints");
    std::vector<Vec2> waypoints;
    waypoints.push_back(grid.center_of(cells.front()));
    for (size_t i = 1; i < cells.size(); ++i) {
        int dr = cells[i].row - cells[i - 1].row;
        int dc = cells[i].col - cells[i - 1].col;
        if (i + 1 < cells.size() && cells[i + 1].row - cells[i].row == dr &&
            cells[i + 1].col - cells[i].col == dc) {
            continue;  // interior point of a straight run
        }
        waypoints.push_back(grid.center_of(cells[i]));
    }
    return waypoints;
}

}  // namespace semnet::pathplan
