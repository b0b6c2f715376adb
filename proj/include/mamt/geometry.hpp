#pragma once

#include <cmath>

namespace mamt {

/// 2D point / vector on the Euclidean plane.
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    Point2() = default;
    Point2(double x_, double y_) : x(x_), y(y_) {}

    Point2 operator+(const Point2 &o) const { return {x + o.x, y + o.y}; }
    Point2 operator-(const Point2 &o) const { return {x - o.x, y - o.y}; }
    Point2 operator*(double s) const { return {x * s, y * s}; }
    Point2 operator/(double s) const { return {x / s, y / s}; }
    bool operator==(const Point2 &o) const { return x == o.x && y == o.y; }

    double operator[](int i) const { return i == 0 ? x : y; }

    double dot(const Point2 &o) const { return x * o.x + y * o.y; }
    double squared_norm() const { return x * x + y * y; }
    double norm() const { return std::hypot(x, y); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline Point2 operator*(double s, const Point2 &p) { return p * s; }

inline double distance(const Point2 &a, const Point2 &b) { return (a - b).norm(); }

} // namespace mamt
