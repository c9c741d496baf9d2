#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pwexp/geometry.hpp"
#include "pwexp/random.hpp"

namespace pwexp {

using ScalarField = std::function<double(double, double)>;
/// Returns (d/du, d/dv).
using GradientField = std::function<Point(double, double)>;

/// c0 + cu*u + cv*v + cuu*u^2 + cuv*u*v + cvv*v^2
struct Quadratic {
    std::array<double, 6> c{};

    double operator()(double u, double v) const {
        return c[0] + c[1] * u + c[2] * v + c[3] * u * u + c[4] * u * v + c[5] * v * v;
    }
    Point gradient(double u, double v) const {
        return {c[1] + 2.0 * c[3] * u + c[4] * v, c[2] + c[4] * u + 2.0 * c[5] * v};
    }
};

/// Strict inequality g(u,v) < 0; the zero set is part of the boundary set N.
struct Constraint {
    ScalarField value;
    GradientField gradient;
    std::optional<Quadratic> coefficients;

    static Constraint from(const Quadratic& q);
};

struct Branch {
    ScalarField value;
    GradientField gradient;
    double declared_A = 0.0;  // lower bound on |d phi / du| over the collar
    double declared_M = 0.0;  // upper bound on |d phi / dv| over the collar
    double holder_C = 0.0;    // Holder constant of the gradient
    std::optional<Quadratic> coefficients;

    static Branch from(const Quadratic& q, double A, double M, double C);
};

/// One open piece O_k of the partition together with its branch phi_k.
///
/// Membership is the conjunction of the strict constraints. The outline is a
/// polygonal approximation of the closure, used only for collar geometry
/// (distances, horizontal cross-sections) and for sampling.
struct Piece {
    long index = 0;
    std::vector<Constraint> constraints;
    Branch branch;
    Polygon outline;
    Rect bbox;  // bounding box of the outline

    bool contains(Point p) const {
        for (const auto& g : constraints) {
            if (!(g.value(p.x, p.y) < 0.0)) return false;
        }
        return true;
    }
    bool collar_contains(Point p, double eps) const { return near_region(outline, p, eps); }
};

struct PiecewiseMapSpec {
    std::string name;
    double L = 1.0;
    double alpha = 1.0;
    double eps1 = 1.0;
    int Y = 1;
    std::vector<Piece> pieces;
};

/// Validated, immutable map with a bucket index for piece lookup.
class PiecewiseMap {
public:
    explicit PiecewiseMap(PiecewiseMapSpec spec);

    const PiecewiseMapSpec& spec() const { return spec_; }
    double L() const { return spec_.L; }
    std::size_t size() const { return spec_.pieces.size(); }
    const Piece& piece(std::size_t i) const { return spec_.pieces[i]; }

    /// Position (not the index field) of the piece containing p, nullopt on N.
    std::optional<std::size_t> locate(Point p) const;
    /// Number of pieces whose constraints all hold at p (disjointness checks).
    int count_containing(Point p) const;

    double min_declared_A() const;
    double max_declared_M() const;

    /// Uniform sample in piece i by rejection from its bounding box.
    std::optional<Point> sample_piece(std::size_t i, Rng& rng, int max_tries = 100000) const;
    /// Uniform sample in the eps1-collar of piece i.
    Point sample_collar(std::size_t i, Rng& rng) const;

private:
    PiecewiseMapSpec spec_;
    int buckets_ = 0;
    double bucket_w_ = 0.0;
    std::vector<std::vector<std::uint32_t>> index_;
};

/// phi(point), nullopt when the point is on N. Throws OutOfDomain off [-L,L]^2.
std::optional<double> evaluate_phi(const PiecewiseMap& map, Point point);

/// Conjugated system T on Omega = [-L,L] x [-gamma L, gamma L].
class InducedSystem {
public:
    explicit InducedSystem(std::shared_ptr<const PiecewiseMap> map);

    double gamma() const { return gamma_; }
    const Rect& omega() const { return omega_; }
    const PiecewiseMap& map() const { return *map_; }
    std::shared_ptr<const PiecewiseMap> map_ptr() const { return map_; }
    double L() const { return map_->L(); }

    // The flattening is multiplication by gamma, its inverse division by gamma.
    double flatten(double v) const { return gamma_ * v; }
    double unflatten(double y) const { return y / gamma_; }

    /// Position of the flattened piece U_k containing z.
    std::optional<std::size_t> locate(Point z) const { return map_->locate({z.x, unflatten(z.y)}); }
    /// T_k(z) = (y/gamma, gamma * phi_k(x, y/gamma)) for the piece at position i, no membership test.
    Point branch_map(std::size_t i, Point z) const;
    /// T(z); nullopt on N'. Throws OutOfDomain outside Omega.
    std::optional<Point> step(Point z) const;

private:
    std::shared_ptr<const PiecewiseMap> map_;
    double gamma_;
    Rect omega_;
};

/// Throws InvalidBounds unless min declared_A > 1.
InducedSystem induce(std::shared_ptr<const PiecewiseMap> map);

std::optional<Point> step_T(const InducedSystem& sys, Point z);

struct ProcessResult {
    std::vector<double> values;      // X_0 .. X_{n} (or up to the halt)
    std::optional<long> halted_at;   // index of the first X that is undefined
};

/// X_{n+2} = phi(X_n, X_{n+1}) for n steps after X_0, X_1.
///
/// Every computed X_k (k >= 1) is passed through the flattening round trip
/// x -> (gamma x) / gamma, which is exactly the arithmetic step_T performs on
/// the second coordinate. With that convention (X_n, gamma X_{n+1}) reproduces
/// the step_T orbit of (X_0, gamma X_1) bit for bit.
ProcessResult iterate_process(const InducedSystem& sys, double x0, double x1, long n);

}  // namespace pwexp
