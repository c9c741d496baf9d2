#include "pwexp/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>

#include "pwexp/errors.hpp"
#include "pwexp/random.hpp"

namespace pwexp {

ObservablePair default_observables(double L, int n) {
    auto id = GridFunction1D::sample(-L, L, n, [L](double x) { return x / L; });
    return {id, id};
}

std::vector<Point> sample_stationary(const GridFunction& h, std::size_t count, std::uint64_t seed) {
    std::vector<double> cdf(h.size());
    double total = 0.0;
    for (std::size_t c = 0; c < h.size(); ++c) {
        if (h.values[c] < 0.0) throw InvalidBounds("density has a negative cell");
        total += h.values[c];
        cdf[c] = total;
    }
    if (!(total > 0.0)) throw InvalidBounds("density has no mass");
    Rng rng(seed);
    std::vector<Point> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double r = rng.uniform() * total;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
        std::size_t c = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), h.size() - 1);
        while (h.values[c] == 0.0 && c > 0) --c;  // never land in an empty cell through rounding
        const int i = static_cast<int>(c % h.nx);
        const int j = static_cast<int>(c / h.nx);
        out.push_back({h.rect.x0 + (i + rng.uniform()) * h.hx(), h.rect.y0 + (j + rng.uniform()) * h.hy()});
    }
    return out;
}

double stationary_mean(const GridFunction& h, const GridFunction1D& G) {
    double s = 0.0;
    for (int j = 0; j < h.ny; ++j) {
        for (int i = 0; i < h.nx; ++i) s += G(h.center(i, j).x) * h.at(i, j);
    }
    return s * h.cell_area();
}

McCovariance covariance_mc(const InducedSystem& sys, const GridFunction& h_star, const ObservablePair& pair,
                           const std::vector<long>& lags, long trajectories, std::uint64_t seed, long shift,
                           int batches) {
    if (lags.empty()) throw InvalidBounds("no lags requested");
    if (trajectories < 2 * batches || batches < 2) throw InvalidBounds("need at least two trajectories per batch");
    if (shift < 0 || *std::min_element(lags.begin(), lags.end()) < 0) throw InvalidBounds("lags must be non-negative");
    const long horizon = shift + *std::max_element(lags.begin(), lags.end());
    const double muF = stationary_mean(h_star, pair.F);
    const double muH = stationary_mean(h_star, pair.H);

    McCovariance out;
    out.lags = lags;
    out.shift = shift;
    out.trajectories = trajectories;

    const auto starts = sample_stationary(h_star, static_cast<std::size_t>(trajectories), seed);
    // per batch sums of F(X_{n+shift}) H(X_shift) for each lag
    std::vector<std::vector<double>> sums(batches, std::vector<double>(lags.size(), 0.0));
    std::vector<long> counts(batches, 0);
    std::vector<double> xs(static_cast<std::size_t>(horizon) + 1);
    for (long t = 0; t < trajectories; ++t) {
        Point z = starts[static_cast<std::size_t>(t)];
        bool ok = true;
        xs[0] = z.x;
        for (long n = 1; n <= horizon; ++n) {
            const auto next = sys.step(z);
            if (!next) {
                ok = false;
                break;
            }
            z = *next;
            xs[static_cast<std::size_t>(n)] = z.x;
        }
        if (!ok) {
            ++out.halted;
            continue;
        }
        const int b = static_cast<int>(t % batches);
        ++counts[b];
        const double h0 = pair.H(xs[static_cast<std::size_t>(shift)]);
        for (std::size_t l = 0; l < lags.size(); ++l) {
            sums[b][l] += pair.F(xs[static_cast<std::size_t>(shift + lags[l])]) * h0;
        }
    }
    for (long c : counts) {
        if (c == 0) throw InsufficientSignal("a batch lost every trajectory to halting");
    }
    out.cov.resize(lags.size());
    out.stderr_.resize(lags.size());
    const long used = std::accumulate(counts.begin(), counts.end(), 0L);
    for (std::size_t l = 0; l < lags.size(); ++l) {
        double total = 0.0;
        std::vector<double> means(batches);
        for (int b = 0; b < batches; ++b) {
            total += sums[b][l];
            means[b] = sums[b][l] / counts[b];
        }
        const double grand = total / used;
        double var = 0.0;
        for (double m : means) var += (m - grand) * (m - grand);
        var /= (batches - 1);
        out.cov[l] = grand - muF * muH;
        out.stderr_[l] = std::sqrt(var / batches);
    }
    return out;
}

std::vector<double> covariance_op(const UlamOperator& op, const GridFunction& h_star, const ObservablePair& pair,
                                  const std::vector<long>& lags, std::vector<double>* floor_out) {
    if (h_star.nx != op.nx || h_star.ny != op.ny) throw DegenerateGrid("density grid does not match the operator");
    const int n = op.cells();
    Eigen::VectorXd f(n), v(n);
    for (int j = 0; j < op.ny; ++j) {
        for (int i = 0; i < op.nx; ++i) {
            const int c = j * op.nx + i;
            const double x = h_star.center(i, j).x;
            f[c] = pair.F(x);
            v[c] = pair.H(x) * h_star.values[c] * op.cell_area();
        }
    }
    const double muF = stationary_mean(h_star, pair.F);
    const double muH = stationary_mean(h_star, pair.H);
    std::vector<std::size_t> order(lags.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&lags](std::size_t a, std::size_t b) { return lags[a] < lags[b]; });
    std::vector<double> out(lags.size());
    if (floor_out != nullptr) floor_out->assign(lags.size(), 0.0);
    constexpr double kEps = std::numeric_limits<double>::epsilon();
    long at = 0;
    for (std::size_t k : order) {
        if (lags[k] < 0) throw InvalidBounds("lags must be non-negative");
        for (; at < lags[k]; ++at) v = op.matrix * v;
        out[k] = f.dot(v) - muF * muH;
        // worst-case rounding of an n-term dot product and the mean subtraction
        if (floor_out != nullptr) {
            (*floor_out)[k] = kEps * (n * f.cwiseAbs().dot(v.cwiseAbs()) + 2.0 * std::abs(muF * muH));
        }
    }
    return out;
}

DecayFit fit_decay(const std::vector<long>& lags, const std::vector<double>& values) {
    if (lags.size() != values.size()) throw InvalidBounds("lags and values differ in length");
    std::vector<double> xs, ys;
    DecayFit fit;
    for (std::size_t i = 0; i < lags.size(); ++i) {
        if (values[i] != 0.0 && std::isfinite(values[i])) {
            xs.push_back(static_cast<double>(lags[i]));
            ys.push_back(std::log(std::abs(values[i])));
            fit.window.push_back(lags[i]);
        }
    }
    if (xs.size() < 4) throw InsufficientSignal("fewer than 4 usable lags");
    const double m = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw InsufficientSignal("all usable lags coincide");
    const double slope = sxy / sxx;
    if (!(slope < 0.0)) throw NotDecaying("fitted slope is not negative");
    fit.rho = std::exp(slope);
    fit.C = std::exp(my - slope * mx);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        fit.max_excess = std::max(fit.max_excess, std::exp(ys[i] - (my + slope * (xs[i] - mx))));
    }
    return fit;
}

std::vector<std::size_t> fit_window(const std::vector<long>& lags, const std::vector<double>& values,
                                    const std::vector<double>& floor) {
    std::vector<std::size_t> order(lags.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&lags](std::size_t a, std::size_t b) { return lags[a] < lags[b]; });
    std::vector<std::size_t> out;
    for (std::size_t k : order) {
        if (lags[k] < 1) continue;
        if (std::abs(values[k]) > floor[k]) out.push_back(k);
    }
    return out;
}

BoundFactor bound_factor(const ObservablePair& pair, const NormParams& p, const InducedSystem& sys,
                         const GridFunction& h_star) {
    BoundFactor out;
    double s = 0.0;
    for (int j = 0; j < h_star.ny; ++j) {
        for (int i = 0; i < h_star.nx; ++i) s += std::abs(pair.F(h_star.center(i, j).x)) * h_star.at(i, j);
    }
    out.tr_f_l1_mu = s * h_star.cell_area();
    out.tr_norm_h = tr_norm(pair.H, p, sys.L(), sys.gamma());
    out.value = out.tr_f_l1_mu * out.tr_norm_h.total;
    return out;
}

void write_decay_csv(std::ostream& os, const DecayCurve& c) {
    os << std::setprecision(17) << "lag,cov_mc,stderr,cov_op\n";
    for (std::size_t i = 0; i < c.lags.size(); ++i) {
        os << c.lags[i] << ',' << c.cov_mc[i] << ',' << c.stderr_[i] << ',' << c.cov_op[i] << '\n';
    }
}

}  // namespace pwexp
