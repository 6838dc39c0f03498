#pragma once

#include <algorithm>
#include <cmath>

namespace semnet {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2&) const = default;

    double norm() const { return std::hypot(x, y); }
};

inline double distance(Vec2 a, Vec2 b) {
    return (a - b).norm();
}

// Axis-aligned rectangle, closed on all sides.
struct Rect {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    bool operator==(const Rect&) const = default;

    bool contains(Vec2 p) const {
        return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
    }

    // Euclidean distance from p to the rectangle; 0 when inside.
    double distance_to(Vec2 p) const {
        double dx = std::max({x_min - p.x, 0.0, p.x - x_max});
        double dy = std::max({y_min - p.y, 0.0, p.y - y_max});
        return std::hypot(dx, dy);
    }

    // True when the interiors overlap with positive area. Rectangles that
    // only touch along an edge do not count.
    bool overlaps_interior(const Rect& o) const {
        return x_min < o.x_max && o.x_min < x_max && y_min < o.y_max && o.y_min < y_max;
    }
};

}  // namespace semnet
