#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pwexp/config.hpp"
#include "pwexp/transfer_operator.hpp"

namespace pwexp::cli {

enum ExitCode : int {
    kOk = 0,
    kHypothesisFail = 1,
    kConfigError = 2,
    kNoConvergence = 3,
    kNoSignal = 4,
};

inline constexpr std::uint64_t kDefaultSeed = 20240917;

struct RunConfig {
    MapSource source = example_source({});
    int nx = 64;
    int ny = 64;
    int samples_per_cell = 200;
    CellSampling sampling = CellSampling::Lattice;
    long trajectories = 100000;
    std::vector<long> lags;  // empty: 0..20
    std::uint64_t seed = kDefaultSeed;
    double eps0 = 0.05;
    std::filesystem::path out = "pwexp_out";
    bool force = false;
    bool write_operator = false;
    int threads = 1;  // accepted for interface stability; all work runs on the calling thread
    long check_samples = 10000;
    double tol = 1e-10;
    int max_iters = 20000;

    /// Throws ConfigError for non-positive counts or malformed lags.
    void validate() const;
    std::vector<long> effective_lags() const;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);

/// Cache key text for the density stage: map, grid, sampling, seed.
std::string density_key(const RunConfig& cfg);

struct DensityResult {
    UlamOperator op;
    SpectralReport spectrum;
    bool from_cache = false;
};

/// Each command writes its files under cfg.out and returns an exit code; diagnostics go to err.
int run_check(const RunConfig& cfg, std::ostream& log, std::ostream& err);
int run_density(const RunConfig& cfg, std::ostream& log, std::ostream& err);
int run_decay(const RunConfig& cfg, std::ostream& log, std::ostream& err);
/// Evaluates the ground-truth facts of a built-in example.
int run_example(const RunConfig& cfg, std::ostream& log, std::ostream& err);

/// Density stage with the on-disk cache (used by run_density and run_decay).
DensityResult compute_density(const RunConfig& cfg, const InducedSystem& sys, std::ostream& log);

}  // namespace pwexp::cli
