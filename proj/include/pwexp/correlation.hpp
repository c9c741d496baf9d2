#pragma once

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "pwexp/map_model.hpp"
#include "pwexp/norms.hpp"
#include "pwexp/transfer_operator.hpp"

namespace pwexp {

/// Observables of the scalar process; both act on the first coordinate.
struct ObservablePair {
    GridFunction1D F;
    GridFunction1D H;
};

/// F = H = x / L on n cells.
ObservablePair default_observables(double L, int n);

/// Z_0 draws from a cell-constant density: cell chosen by mass, then uniform inside.
std::vector<Point> sample_stationary(const GridFunction& h_star, std::size_t count, std::uint64_t seed);

/// integral of Tr G * h_star over Omega, by cell quadrature.
double stationary_mean(const GridFunction& h_star, const GridFunction1D& G);

struct McCovariance {
    std::vector<long> lags;
    std::vector<double> cov;
    std::vector<double> stderr_;
    long shift = 0;             // covariance of F(X_{n+shift}) and H(X_shift)
    long trajectories = 0;      // requested
    long halted = 0;            // discarded because the orbit hit the boundary set
    double halt_fraction() const { return trajectories > 0 ? static_cast<double>(halted) / trajectories : 0.0; }
};

/// Trajectory Monte Carlo with batch-mean standard errors. Stationary means
/// come from quadrature against h_star.
McCovariance covariance_mc(const InducedSystem& sys, const GridFunction& h_star, const ObservablePair& pair,
                           const std::vector<long>& lags, long trajectories, std::uint64_t seed, long shift = 0,
                           int batches = 32);

/// <Tr F, P^n (Tr H * h_star)> - mu(F) mu(H) by repeated application of the operator.
/// floor_out receives, per lag, a bound on the rounding error of that value;
/// values below it are indistinguishable from zero.
std::vector<double> covariance_op(const UlamOperator& op, const GridFunction& h_star, const ObservablePair& pair,
                                  const std::vector<long>& lags, std::vector<double>* floor_out = nullptr);

struct DecayFit {
    double C = 0.0;
    double rho = 0.0;
    std::vector<long> window;  // lags used
    double max_excess = 0.0;   // max over the window of |cov_n| / (C rho^n)
};

/// Least squares of log|cov| on n. InsufficientSignal below 4 points,
/// NotDecaying for a non-negative slope.
DecayFit fit_decay(const std::vector<long>& lags, const std::vector<double>& values);

/// Smallest operator covariance treated as signal.
inline constexpr double kOperatorFloor = 1e-12;

/// Per-lag floor for fit_window: kOperatorFloor or the rounding bound, whichever is larger.
inline std::vector<double> window_floor(std::vector<double> rounding) {
    for (double& v : rounding) v = std::max(v, kOperatorFloor);
    return rounding;
}

/// Indices of lags n >= 1 whose |value| clears the floor, in increasing lag order.
std::vector<std::size_t> fit_window(const std::vector<long>& lags, const std::vector<double>& values,
                                    const std::vector<double>& floor);

struct DecayCurve {
    std::vector<long> lags;
    std::vector<double> cov_mc;
    std::vector<double> stderr_;
    std::vector<double> cov_op;
    std::optional<DecayFit> fit;  // fitted on the operator sequence
    bool estimators_agree = false;  // |mc - op| <= 3 stderr on the fit window
};

/// Observable-dependent factor C(F,H) of the correlation bound
/// |Cov(F(X_n), H(X_0))| <= C(F,H) rho^n, up to a global constant.
struct BoundFactor {
    double value = 0.0;          // L ||Tr F||_{L1_mu} * bracket
    double tr_f_l1_mu = 0.0;
    TrNorm tr_norm_h;            // L * bracket
    double global_constant = 1.0;
    bool constant_symbolic = true;  // the global constant is not computable and stands as 1
};

BoundFactor bound_factor(const ObservablePair& pair, const NormParams& p, const InducedSystem& sys,
                         const GridFunction& h_star);

/// "lag,cov_mc,stderr,cov_op"
void write_decay_csv(std::ostream& os, const DecayCurve& curve);

}  // namespace pwexp
