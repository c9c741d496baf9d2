#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Sparse>

#include "pwexp/examples_gallery.hpp"
#include "pwexp/map_model.hpp"
#include "pwexp/norms.hpp"

namespace pwexp {

using SparseMatrix = Eigen::SparseMatrix<double>;
using StepFunction = std::function<std::optional<Point>(Point)>;

/// How sample points are placed inside each source cell.
enum class CellSampling {
    Lattice,     // one additive low-discrepancy pattern, randomly shifted once, in every cell
    Stratified,  // the same sequence with an independent random shift per cell
    Iid,         // independent uniform draws
};

/// Ulam discretisation of the transfer operator on an nx x ny grid of a rectangle.
///
/// Cell c = j * nx + i. Column c holds the fractions of cell c's samples that
/// land in each target cell, so densities (as mass vectors) are pushed by
/// matrix * v. Samples that hit the boundary set are dropped.
struct UlamOperator {
    Rect domain;
    int nx = 0;
    int ny = 0;
    SparseMatrix matrix;
    int samples_per_cell = 0;
    std::uint64_t seed = 0;
    CellSampling sampling = CellSampling::Lattice;
    double halt_fraction = 0.0;  // dropped samples / all samples

    int cells() const { return nx * ny; }
    double cell_area() const { return domain.area() / cells(); }
};

UlamOperator build_ulam(const InducedSystem& sys, int nx, int ny, int samples_per_cell, std::uint64_t seed,
                        CellSampling sampling = CellSampling::Lattice);

/// Same for an arbitrary map of the rectangle; images outside it count as halted.
UlamOperator build_ulam(const Rect& domain, const StepFunction& step, int nx, int ny, int samples_per_cell,
                        std::uint64_t seed, CellSampling sampling = CellSampling::Lattice);

/// Wrap an explicit column-stochastic matrix (tests, cached operators).
UlamOperator ulam_from_matrix(const Rect& domain, int nx, int ny, SparseMatrix m);

struct SpectralReport {
    std::vector<std::complex<double>> leading_eigs;  // sorted by decreasing modulus
    GridFunction invariant_density;
    double gap_estimate = 0.0;   // 1 - subdominant_radius
    int peripheral_count = 0;    // eigenvalues with modulus >= 1 - tol_peripheral
    int iterations = 0;
    double residual = 0.0;       // || P h - h ||_1 in mass units
    bool cesaro = false;         // the fixed point came from the averaged iterates
    std::vector<double> residual_trace;
};

inline constexpr double kPeripheralTol = 1e-2;

/// Power iteration from the uniform density. Falls back to Cesaro averages
/// when the plain iterates keep oscillating; throws NoConvergence otherwise.
/// The returned report carries only the density part (no eigenvalues).
/// On failure the residual history is copied to trace_out when given.
SpectralReport invariant_density(const UlamOperator& op, double tol = 1e-10, int max_iters = 20000,
                                 std::vector<double>* trace_out = nullptr);

/// k largest-modulus eigenvalues. Dense solve for small grids, subspace
/// iteration with Rayleigh-Ritz otherwise. Throws NoConvergence.
std::vector<std::complex<double>> leading_eigenvalues(const UlamOperator& op, int k, int max_iters = 3000);

/// Spectral radius of the operator on the complement of h_star, from the
/// average growth of a deflated power iteration (Gelfand's formula). Robust to
/// rings of equal-modulus eigenvalues that subspace iteration cannot resolve.
double subdominant_radius(const UlamOperator& op, const GridFunction& h_star, int warmup = 100, int span = 200);

/// invariant_density plus leading eigenvalues, gap and peripheral count.
SpectralReport peripheral_spectrum(const UlamOperator& op, int k_eigs = 6, double tol = 1e-10,
                                   int max_iters = 20000, std::vector<double>* trace_out = nullptr);

/// One application of the discrete operator to a density on the grid.
GridFunction apply(const UlamOperator& op, const GridFunction& h);

/// Both expressions of the marginal density of X_n:
/// by_column: f(x) = integral of h(x, v) dv, on the nx x-cells;
/// by_row:    f(x) = gamma * integral of h(u, gamma x) du, on the ny rows mapped back by 1/gamma.
struct Marginals {
    GridFunction1D by_column;
    GridFunction1D by_row;
};
Marginals marginal_density(const GridFunction& h_star, const InducedSystem& sys);

/// L1 distance of two cell-constant functions on the same interval (any resolutions).
double l1_distance(const GridFunction1D& f, const GridFunction1D& g);

/// Closed-form transfer operator of a built-in example at the given points.
/// Points on the dividing lines of the quadratic example give NaN.
/// Throws OutOfDomain off Omega, BranchInversionFailure for an invalid preimage.
std::vector<double> pf_apply_exact(const ExampleParams& ex, const std::function<double(Point)>& h,
                                   std::span<const Point> points);
std::vector<double> pf_apply_exact(const ExampleParams& ex, const GridFunction& h, std::span<const Point> points);

/// Number of branches contributing at a point in the linear example (|b| off the boundary lines).
int linear_preimage_count(long a, long b, double L, Point z);

/// Triplet CSV "row,col,value" in column-major order.
void write_triplets(std::ostream& os, const UlamOperator& op);

}  // namespace pwexp
