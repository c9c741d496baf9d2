#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pwexp/map_model.hpp"

namespace pwexp {

// ---------------------------------------------------------------------------
// Quadratic-strip example: f_k(x) = -(71/2) x^2 - 214 x + k - 1/2 on [-1,1]^2,
// pieces O_k = {f_k(u) < v < f_{k+1}(u)}, branches phi_k = 2v - 2 f_k(u) - 1.
// ---------------------------------------------------------------------------
namespace nonlinear {

inline constexpr long kFirst = -179;
inline constexpr long kLast = 250;
inline constexpr double kA = 144.0;
inline constexpr double kM = 2.0;
inline constexpr double kHolder = 142.0;
inline constexpr int kY = 3;

double f(long k, double x);
/// Psi_k(x,y) = 214^2 - 71 (2x - 12 y) + 142 k
double psi(long k, double x, double y);

enum class Region { Omega1, Omega2, Omega3, OnLine };
/// Omega1 lies above y = (2x+1)/12, Omega3 below y = (2x-1)/12.
Region classify(double x, double y);
/// Summation range (first, last) of branch indices contributing to P at a point of the region.
std::pair<long, long> branch_range(Region r);

/// A point of Omega on the level line x - 6y = z, for |z| < 3/2 off the dividing
/// values +-1/2. The exact P1 depends on the point only through z.
Point point_with_z(double z);

}  // namespace nonlinear

PiecewiseMapSpec build_nonlinear();

// ---------------------------------------------------------------------------
// Piecewise-linear example: phi_n(u,v) = a v + b u - 2 n L on strips
// Omega_n = {(2n-1)L < a v + b u < (2n+1)L}.
// ---------------------------------------------------------------------------

/// S = 1 + 48/pi + 288/pi^2 + (4/pi)(1 + 12/pi) sqrt(6 pi + 36)
double linear_S();

struct LinearAdmissibility {
    double S = 0.0;
    double bound = 0.0;      // (|b| - S) / sqrt(S)
    bool admissible = false;  // |a| < bound outside the guard band
    bool borderline = false;  // | |a| - bound | within 1e-12
};

LinearAdmissibility linear_admissibility(long a, long b);

struct IndexRange {
    long first = 0;
    long last = -1;
    bool contains(long n) const { return n >= first && n <= last; }
    long size() const { return last >= first ? last - first + 1 : 0; }
};

/// Integers n with (-|a|-|b|+1)/2 <= n <= (|a|+|b|+1)/2, i.e. the lines
/// a v + b u = (2n-1) L that meet the closed square.
IndexRange index_range(long a, long b);

/// Integers n for which the open strip piece Omega_n meets the open square.
/// Differs from index_range: the lowest strip lies below the lowest line.
IndexRange piece_indices(long a, long b);

/// Pieces without the admissibility check (constants can still be inspected).
PiecewiseMapSpec build_linear_unchecked(long a, long b, double L);

/// Throws NotAdmissible when |a| >= (|b| - S)/sqrt(S), InvalidBounds when a or b
/// is zero or 2L is not a positive integer.
PiecewiseMapSpec build_linear(long a, long b, double L);

// ---------------------------------------------------------------------------

enum class ExampleId { Nonlinear, Linear };

struct ExampleParams {
    ExampleId id = ExampleId::Nonlinear;
    long a = 1;
    long b = 101;
    double L = 1.0;
};

enum class FactKind { Constant, Flag, Monotone };

/// A machine-checkable statement about a built-in example.
struct Fact {
    std::string id;
    FactKind kind = FactKind::Constant;
    std::string statement;
    double value = 0.0;      // expected constant, or 1/0 for flags
    double tolerance = 0.0;  // absolute tolerance for constants
};

std::vector<Fact> ground_truth_facts(const ExampleParams& ex);

}  // namespace pwexp
