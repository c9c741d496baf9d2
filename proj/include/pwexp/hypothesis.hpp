#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "pwexp/map_model.hpp"

namespace pwexp {

/// s = ((2A + M^2 - M sqrt(M^2 + 4A)) / 2)^(-1/2). Requires A > 1, 0 <= M < A - 1.
double compute_s(double A, double M);

/// eta = s^alpha + 8 s Y / (pi (1 - s)).
double compute_eta(double s, double alpha, int Y);

enum class CheckStatus { Pass, SampledPass, Fail, NotChecked };

std::string to_string(CheckStatus s);

struct CheckResult {
    std::string id;
    CheckStatus status = CheckStatus::Pass;
    long samples_used = 0;
    std::vector<Point> witnesses;  // non-empty whenever status == Fail
    std::string detail;
    double observed = std::numeric_limits<double>::quiet_NaN();

    bool passed() const { return status == CheckStatus::Pass || status == CheckStatus::SampledPass; }
};

struct CheckOptions {
    long samples = 10000;               // per piece (collar points, pairs, or ordinates)
    long partition_samples = 100000;    // uniform points over the square
    std::uint64_t seed = 0x5eed2024;
    double rel_slack = 1e-9;            // relative slack on inequality checks
};

/// Sampled |d phi_k/du| >= declared_A and |d phi_k/dv| <= declared_M on each collar.
CheckResult check_derivative_bounds(const PiecewiseMap& map, const CheckOptions& opt = {});

/// Sampled gradient Holder inequality with the declared C_k and alpha.
CheckResult check_holder(const PiecewiseMap& map, const CheckOptions& opt = {});

/// Disjointness of pieces and coverage of the square up to a small sampled measure.
CheckResult check_partition(const PiecewiseMap& map, const CheckOptions& opt = {});

/// Nonvanishing constraint gradients at sampled boundary points.
CheckResult check_boundary_regularity(const PiecewiseMap& map, const CheckOptions& opt = {});

/// Segment form of the geometric condition: every horizontal cross-section of
/// every collar is a single interval. Fails with the two endpoints of a gap.
CheckResult check_geometric_condition(const PiecewiseMap& map, const CheckOptions& opt = {});

/// T_k(U_k) stays in the closure of Omega.
CheckResult check_trapping(const InducedSystem& sys, const CheckOptions& opt = {});

struct DilatanceResult {
    CheckResult pairwise;   // |T_k p - T_k q| >= |p - q| / s
    CheckResult eigen;      // lambda_min(DT_k^T DT_k) >= 1 / s^2
    long violations = 0;
};

DilatanceResult check_dilatance(const InducedSystem& sys, double s, const CheckOptions& opt = {});

struct HypothesisReport {
    double A = 0.0;
    double M = 0.0;
    double s = 0.0;
    double eta = 0.0;
    double gamma = 0.0;
    double alpha = 0.0;
    int Y = 0;
    std::vector<CheckResult> checks;

    bool overall_pass() const;
    const CheckResult* find(const std::string& id) const;
    /// Stable-order JSON document.
    std::string to_json() const;
};

/// Runs every check. Throws InvalidBounds when min declared_A <= 1; when only
/// M >= A - 1 the constants that remain defined are reported and the bound check fails.
HypothesisReport full_report(std::shared_ptr<const PiecewiseMap> map, const CheckOptions& opt = {});

}  // namespace pwexp
