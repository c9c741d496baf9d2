#include "pwexp/geometry.hpp"

#include <algorithm>
#include <limits>

namespace pwexp {

Rect bounding_box(std::span<const Point> pts) {
    Rect r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& p : pts) {
        r.x0 = std::min(r.x0, p.x);
        r.x1 = std::max(r.x1, p.x);
        r.y0 = std::min(r.y0, p.y);
        r.y1 = std::max(r.y1, p.y);
    }
    return r;
}

Polygon clip_halfplane(const Polygon& poly, Point n, double c) {
    Polygon out;
    const std::size_t m = poly.size();
    for (std::size_t i = 0; i < m; ++i) {
        const Point cur = poly[i];
        const Point nxt = poly[(i + 1) % m];
        const double dc = dot(n, cur) - c;
        const double dn = dot(n, nxt) - c;
        if (dc <= 0.0) out.push_back(cur);
        if ((dc < 0.0 && dn > 0.0) || (dc > 0.0 && dn < 0.0)) {
            const double t = dc / (dc - dn);
            out.push_back(cur + t * (nxt - cur));
        }
    }
    return out;
}

bool inside_polygon(const Polygon& poly, Point p) {
    bool in = false;
    const std::size_t m = poly.size();
    for (std::size_t i = 0, j = m - 1; i < m; j = i++) {
        const Point a = poly[i];
        const Point b = poly[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < xc) in = !in;
        }
    }
    return in;
}

double distance_to_segment(Point p, Point a, Point b) {
    const Point d = b - a;
    const double len2 = dot(d, d);
    if (len2 == 0.0) return norm(p - a);
    const double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
    return norm(p - (a + t * d));
}

double distance_to_region(const Polygon& poly, Point p) {
    if (inside_polygon(poly, p)) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    const std::size_t m = poly.size();
    for (std::size_t i = 0; i < m; ++i) {
        best = std::min(best, distance_to_segment(p, poly[i], poly[(i + 1) % m]));
    }
    return best;
}

bool near_region(const Polygon& poly, Point p, double r) {
    if (inside_polygon(poly, p)) return true;
    const std::size_t m = poly.size();
    for (std::size_t i = 0; i < m; ++i) {
        if (distance_to_segment(p, poly[i], poly[(i + 1) % m]) <= r) return true;
    }
    return false;
}

namespace {

Interval disc_row(Point c, double r, double v) {
    const double dy = v - c.y;
    const double h2 = r * r - dy * dy;
    if (h2 < 0.0) return {};
    const double h = std::sqrt(h2);
    return {c.x - h, c.x + h};
}

// {u : |c0 + c1 u| <= r}
Interval abs_linear_le(double c0, double c1, double r) {
    if (c1 == 0.0) {
        if (std::abs(c0) <= r) return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        return {};
    }
    double lo = (-r - c0) / c1;
    double hi = (r - c0) / c1;
    if (lo > hi) std::swap(lo, hi);
    return {lo, hi};
}

Interval intersect(Interval a, Interval b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }

}  // namespace

Interval capsule_row(Point a, Point b, double r, double v) {
    const Point d = b - a;
    const double len2 = dot(d, d);
    Interval hull = disc_row(a, r, v);
    auto absorb = [&hull](Interval iv) {
        if (iv.empty()) return;
        if (hull.empty()) {
            hull = iv;
        } else {
            hull.lo = std::min(hull.lo, iv.lo);
            hull.hi = std::max(hull.hi, iv.hi);
        }
    };
    absorb(disc_row(b, r, v));
    if (len2 == 0.0) return hull;
    // projection parameter t(u) = (d.x (u - a.x) + d.y (v - a.y)) / len2 must lie in [0,1]
    const double t1 = d.x / len2;
    const double t0 = (d.y * (v - a.y) - d.x * a.x) / len2;
    Interval slab = abs_linear_le(t0 - 0.5, t1, 0.5);
    // signed perpendicular distance (d.x (v - a.y) - d.y (u - a.x)) / |d|
    const double len = std::sqrt(len2);
    const double p1 = -d.y / len;
    const double p0 = (d.x * (v - a.y) + d.y * a.x) / len;
    slab = intersect(slab, abs_linear_le(p0, p1, r));
    absorb(slab);
    return hull;
}

std::vector<Interval> polygon_row(const Polygon& poly, double v) {
    std::vector<double> xs;
    const std::size_t m = poly.size();
    for (std::size_t i = 0, j = m - 1; i < m; j = i++) {
        const Point a = poly[i];
        const Point b = poly[j];
        if ((a.y > v) != (b.y > v)) {
            xs.push_back(a.x + (v - a.y) * (b.x - a.x) / (b.y - a.y));
        }
    }
    std::sort(xs.begin(), xs.end());
    std::vector<Interval> out;
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) out.push_back({xs[i], xs[i + 1]});
    return out;
}

std::vector<Interval> merge_intervals(std::vector<Interval> iv) {
    std::erase_if(iv, [](const Interval& i) { return i.empty(); });
    std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> out;
    for (const auto& i : iv) {
        if (!out.empty() && i.lo <= out.back().hi) {
            out.back().hi = std::max(out.back().hi, i.hi);
        } else {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<Interval> collar_row(const Polygon& poly, double r, double v) {
    std::vector<Interval> parts = polygon_row(poly, v);
    const std::size_t m = poly.size();
    for (std::size_t i = 0; i < m; ++i) parts.push_back(capsule_row(poly[i], poly[(i + 1) % m], r, v));
    return merge_intervals(std::move(parts));
}

Polygon square(double L) { return {{-L, -L}, {L, -L}, {L, L}, {-L, L}}; }

double min_eigenvalue_sym2(double a, double b, double c) {
    const double tr = a + c;
    const double det = a * c - b * b;
    const double disc = std::sqrt(std::max(0.0, (a - c) * (a - c) + 4.0 * b * b));
    // for tr > 0 the small root is det / large root, avoiding cancellation
    if (tr > 0.0) return 2.0 * det / (tr + disc);
    return 0.5 * (tr - disc);
}

}  // namespace pwexp
