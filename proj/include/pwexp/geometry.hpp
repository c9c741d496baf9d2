#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace pwexp {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point p) { return std::hypot(p.x, p.y); }

/// Closed axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rect {
    double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
    bool contains(Point p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
    bool contains_open(Point p) const { return p.x > x0 && p.x < x1 && p.y > y0 && p.y < y1; }
    Rect expanded(double r) const { return {x0 - r, x1 + r, y0 - r, y1 + r}; }
    bool overlaps(const Rect& o) const { return x0 <= o.x1 && o.x0 <= x1 && y0 <= o.y1 && o.y0 <= y1; }

    friend bool operator==(const Rect&, const Rect&) = default;
};

using Polygon = std::vector<Point>;

/// Closed interval on the real line; empty when lo > hi.
struct Interval {
    double lo = 1.0;
    double hi = 0.0;
    bool empty() const { return lo > hi; }
};

Rect bounding_box(std::span<const Point> pts);

/// Sutherland-Hodgman clip of a polygon against the half-plane n.p <= c.
Polygon clip_halfplane(const Polygon& poly, Point n, double c);

/// Even-odd point-in-polygon test (boundary points may go either way).
bool inside_polygon(const Polygon& poly, Point p);

double distance_to_segment(Point p, Point a, Point b);

/// Distance from p to the closed region bounded by the polygon (0 inside).
double distance_to_region(const Polygon& poly, Point p);

/// dist(p, region) <= r, with early exit.
bool near_region(const Polygon& poly, Point p, double r);

/// {u : dist((u,v), [a,b]) <= r}, an interval because capsules are convex.
Interval capsule_row(Point a, Point b, double r, double v);

/// Intervals of {u : (u,v) inside polygon} on the horizontal line at v.
std::vector<Interval> polygon_row(const Polygon& poly, double v);

/// Merge overlapping intervals in place; result sorted by lo.
std::vector<Interval> merge_intervals(std::vector<Interval> iv);

/// Horizontal cross-section of the r-collar {p : dist(p, region) <= r}.
std::vector<Interval> collar_row(const Polygon& poly, double r, double v);

/// Polygon vertices of the unit square scaled to [-L,L]^2, counter-clockwise.
Polygon square(double L);

/// Symmetric 2x2 matrix [[a, b], [b, c]]; smallest eigenvalue, computed stably.
double min_eigenvalue_sym2(double a, double b, double c);

}  // namespace pwexp
