#include "pwexp/transfer_operator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "pwexp/errors.hpp"
#include "pwexp/random.hpp"

namespace pwexp {

namespace {

// Additive recurrence of the plastic number, the two-dimensional analogue of
// the golden-ratio sequence.
constexpr double kR2a = 0.75487766624669276005;
constexpr double kR2b = 0.56984029099805326591;

double frac(double x) { return x - std::floor(x); }

Eigen::VectorXd mass_vector(const GridFunction& h, const UlamOperator& op) {
    if (h.nx != op.nx || h.ny != op.ny) throw DegenerateGrid("density grid does not match the operator grid");
    Eigen::VectorXd v(op.cells());
    for (int c = 0; c < op.cells(); ++c) v[c] = h.values[c] * op.cell_area();
    return v;
}

GridFunction density_from_mass(const Eigen::VectorXd& v, const UlamOperator& op) {
    GridFunction g(op.domain, op.nx, op.ny);
    for (int c = 0; c < op.cells(); ++c) g.values[c] = v[c] / op.cell_area();
    return g;
}

void sort_by_modulus(std::vector<std::complex<double>>& ev) {
    std::stable_sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
        if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
}

}  // namespace

UlamOperator build_ulam(const Rect& domain, const StepFunction& step, int nx, int ny, int samples_per_cell,
                        std::uint64_t seed, CellSampling sampling) {
    if (nx < 2 || ny < 2) throw DegenerateGrid("Ulam grid needs nx, ny >= 2");
    if (samples_per_cell < 1) throw DegenerateGrid("samples_per_cell must be positive");
    if (!(domain.width() > 0.0 && domain.height() > 0.0)) throw DegenerateGrid("domain has no area");

    UlamOperator op;
    op.domain = domain;
    op.nx = nx;
    op.ny = ny;
    op.samples_per_cell = samples_per_cell;
    op.seed = seed;
    op.sampling = sampling;

    const double hx = domain.width() / nx;
    const double hy = domain.height() / ny;
    // images a rounding error outside the rectangle are pulled back in
    const double slack = 1e-9 * std::max(domain.width(), domain.height());
    const Rect loose = domain.expanded(slack);

    std::vector<Eigen::Triplet<double>> triplets;
    std::vector<int> targets;
    targets.reserve(samples_per_cell);
    long halted = 0;
    const double w = 1.0 / samples_per_cell;
    Rng global(seed);
    const double global_x = global.uniform();
    const double global_y = global.uniform();

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int c = j * nx + i;
            Rng rng(seed, static_cast<std::uint64_t>(c));
            double shift_x = rng.uniform();
            double shift_y = rng.uniform();
            if (sampling == CellSampling::Lattice) {
                shift_x = global_x;
                shift_y = global_y;
            }
            targets.clear();
            for (int k = 0; k < samples_per_cell; ++k) {
                double s = 0.0, t = 0.0;
                if (sampling != CellSampling::Iid) {
                    s = frac(shift_x + (k + 1) * kR2a);
                    t = frac(shift_y + (k + 1) * kR2b);
                } else {
                    s = rng.uniform();
                    t = rng.uniform();
                }
                const Point p{domain.x0 + (i + s) * hx, domain.y0 + (j + t) * hy};
                const auto img = step(p);
                if (!img || !loose.contains(*img)) {
                    ++halted;
                    continue;
                }
                const int ti = std::clamp(static_cast<int>(std::floor((img->x - domain.x0) / hx)), 0, nx - 1);
                const int tj = std::clamp(static_cast<int>(std::floor((img->y - domain.y0) / hy)), 0, ny - 1);
                targets.push_back(tj * nx + ti);
            }
            std::sort(targets.begin(), targets.end());
            for (std::size_t a = 0; a < targets.size();) {
                std::size_t b = a;
                while (b < targets.size() && targets[b] == targets[a]) ++b;
                triplets.emplace_back(targets[a], c, static_cast<double>(b - a) * w);
                a = b;
            }
        }
    }
    op.matrix.resize(nx * ny, nx * ny);
    op.matrix.setFromTriplets(triplets.begin(), triplets.end());
    op.matrix.makeCompressed();
    op.halt_fraction = static_cast<double>(halted) / (static_cast<double>(samples_per_cell) * nx * ny);
    return op;
}

UlamOperator build_ulam(const InducedSystem& sys, int nx, int ny, int samples_per_cell, std::uint64_t seed,
                        CellSampling sampling) {
    const StepFunction step = [&sys](Point z) { return sys.step(z); };
    return build_ulam(sys.omega(), step, nx, ny, samples_per_cell, seed, sampling);
}

UlamOperator ulam_from_matrix(const Rect& domain, int nx, int ny, SparseMatrix m) {
    if (nx < 1 || ny < 1 || m.rows() != nx * ny || m.cols() != nx * ny) {
        throw DegenerateGrid("matrix size does not match the grid");
    }
    UlamOperator op;
    op.domain = domain;
    op.nx = nx;
    op.ny = ny;
    op.matrix = std::move(m);
    op.matrix.makeCompressed();
    return op;
}

constexpr int kCesaroBlock = 2520;  // lcm(1, ..., 10)

SpectralReport invariant_density(const UlamOperator& op, double tol, int max_iters, std::vector<double>* trace_out) {
    const int n = op.cells();
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / n);
    Eigen::VectorXd avg = Eigen::VectorXd::Zero(n);
    SpectralReport rep;

    auto push = [&op](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd y = op.matrix * x;
        const double s = y.sum();
        if (!(s > 0.0)) throw NoConvergence("operator annihilated the density", 0);
        return y / s;
    };

    for (int it = 1; it <= max_iters; ++it) {
        Eigen::VectorXd w = push(v);
        const double r = (w - v).lpNorm<1>();
        rep.residual_trace.push_back(r);
        v = std::move(w);
        if (r <= tol) {
            rep.iterations = it;
            rep.residual = r;
            rep.invariant_density = density_from_mass(v, op);
            return rep;
        }
        avg += v;
        // periodic parts never settle; their means over a block whose length is
        // a multiple of every period up to 10 do
        if (it % kCesaroBlock == 0) {
            const Eigen::VectorXd mean = avg / kCesaroBlock;
            avg.setZero();
            const double rc = (push(mean) - mean).lpNorm<1>();
            if (rc <= tol) {
                rep.iterations = it;
                rep.residual = rc;
                rep.cesaro = true;
                rep.invariant_density = density_from_mass(mean, op);
                return rep;
            }
        }
    }
    if (trace_out != nullptr) *trace_out = rep.residual_trace;
    throw NoConvergence("power iteration did not reach tolerance", max_iters);
}

std::vector<std::complex<double>> leading_eigenvalues(const UlamOperator& op, int k, int max_iters) {
    const int n = op.cells();
    k = std::clamp(k, 1, n);
    std::vector<std::complex<double>> ev;
    if (n <= 400) {
        const Eigen::MatrixXd dense(op.matrix);
        Eigen::EigenSolver<Eigen::MatrixXd> es(dense, false);
        if (es.info() != Eigen::Success) throw NoConvergence("dense eigensolver failed", 0);
        for (int i = 0; i < n; ++i) ev.push_back(es.eigenvalues()[i]);
        sort_by_modulus(ev);
        ev.resize(k);
        return ev;
    }

    const int p = std::min(n, k + 8);
    Eigen::MatrixXd Q(n, p);
    Rng rng(0x51ab5eedULL);
    for (int c = 0; c < p; ++c) {
        for (int r = 0; r < n; ++r) Q(r, c) = rng.uniform(-1.0, 1.0);
    }
    auto orthonormalize = [](Eigen::MatrixXd& X) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
        X = qr.householderQ() * Eigen::MatrixXd::Identity(X.rows(), X.cols());
    };
    orthonormalize(Q);
    std::vector<std::complex<double>> prev;
    for (int it = 1; it <= max_iters; ++it) {
        Eigen::MatrixXd Z = op.matrix * Q;
        if (it % 10 == 0) {
            const Eigen::MatrixXd H = Q.transpose() * Z;
            Eigen::EigenSolver<Eigen::MatrixXd> es(H, false);
            ev.clear();
            for (int i = 0; i < p; ++i) ev.push_back(es.eigenvalues()[i]);
            sort_by_modulus(ev);
            ev.resize(k);
            if (!prev.empty()) {
                // rings of equal-modulus eigenvalues wider than the block never
                // settle, so only the leading one has to
                if (it >= 200 && std::abs(std::abs(ev[0]) - std::abs(prev[0])) < 1e-9) return ev;
            }
            prev = ev;
        }
        Q = std::move(Z);
        orthonormalize(Q);
    }
    throw NoConvergence("subspace iteration did not settle", max_iters);
}

double subdominant_radius(const UlamOperator& op, const GridFunction& h_star, int warmup, int span) {
    const int n = op.cells();
    if (n < 2) return 0.0;
    Eigen::VectorXd h = mass_vector(h_star, op);
    h /= h.sum();
    // project out the invariant direction, with the counting measure as left eigenvector
    auto project = [&h](Eigen::VectorXd& x) { x -= h * x.sum(); };
    Rng rng(0x9a9e5eedULL);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(-1.0, 1.0);
    project(x);
    double log_growth = 0.0;
    for (int it = 0; it < warmup + span; ++it) {
        const double before = x.norm();
        if (!(before > 0.0)) return 0.0;
        x /= before;
        x = op.matrix * x;
        project(x);
        const double after = x.norm();
        if (!(after > 0.0)) return 0.0;
        if (it >= warmup) log_growth += std::log(after);
    }
    return std::exp(log_growth / span);
}

SpectralReport peripheral_spectrum(const UlamOperator& op, int k_eigs, double tol, int max_iters,
                                   std::vector<double>* trace_out) {
    SpectralReport rep = invariant_density(op, tol, max_iters, trace_out);
    rep.leading_eigs = leading_eigenvalues(op, std::max(k_eigs, 2));
    rep.peripheral_count = static_cast<int>(std::count_if(rep.leading_eigs.begin(), rep.leading_eigs.end(),
                                                          [](auto z) { return std::abs(z) >= 1.0 - kPeripheralTol; }));
    // the Ritz value and the growth rate bound the same radius from either side
    const double second = rep.leading_eigs.size() > 1 ? std::abs(rep.leading_eigs[1]) : 0.0;
    rep.gap_estimate = 1.0 - std::max(second, subdominant_radius(op, rep.invariant_density));
    if (static_cast<int>(rep.leading_eigs.size()) > k_eigs) rep.leading_eigs.resize(std::max(k_eigs, 1));
    return rep;
}

GridFunction apply(const UlamOperator& op, const GridFunction& h) {
    const Eigen::VectorXd v = op.matrix * mass_vector(h, op);
    return density_from_mass(v, op);
}

Marginals marginal_density(const GridFunction& h, const InducedSystem& sys) {
    const double L = sys.L();
    const double g = sys.gamma();
    Marginals m;
    m.by_column = GridFunction1D{-L, L, std::vector<double>(h.nx, 0.0)};
    m.by_row = GridFunction1D{-L, L, std::vector<double>(h.ny, 0.0)};
    for (int j = 0; j < h.ny; ++j) {
        for (int i = 0; i < h.nx; ++i) {
            m.by_column.values[i] += h.at(i, j) * h.hy();
            m.by_row.values[j] += g * h.at(i, j) * h.hx();
        }
    }
    return m;
}

double l1_distance(const GridFunction1D& f, const GridFunction1D& g) {
    if (f.a != g.a || f.b != g.b) throw DegenerateGrid("marginals live on different intervals");
    std::vector<double> cuts;
    for (int i = 0; i <= f.n(); ++i) cuts.push_back(f.a + i * f.h());
    for (int i = 0; i <= g.n(); ++i) cuts.push_back(g.a + i * g.h());
    std::sort(cuts.begin(), cuts.end());
    double d = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double w = cuts[i + 1] - cuts[i];
        if (w <= 0.0) continue;
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        d += std::abs(f(mid) - g(mid)) * w;
    }
    return d;
}

namespace {

double linear_exact(long a, long b, double L, const std::function<double(Point)>& h, Point z, int* count) {
    const double gamma = 1.0 / std::sqrt(static_cast<double>(std::abs(b)));
    const double v = z.y / gamma;  // phi value of the preimage
    const IndexRange pieces = piece_indices(a, b);
    double sum = 0.0;
    int active = 0;
    // preimage u = (v - a x + 2 n L) / b; scan a margin past the piece range to catch inconsistencies
    for (long n = pieces.first - 2; n <= pieces.last + 2; ++n) {
        const double u = (v - static_cast<double>(a) * z.x + 2.0 * static_cast<double>(n) * L) / static_cast<double>(b);
        if (!(std::abs(u) < L)) continue;
        if (!pieces.contains(n)) {
            throw BranchInversionFailure("preimage of branch outside the piece range", n);
        }
        ++active;
        if (count == nullptr) sum += h({u, gamma * z.x});
    }
    if (count != nullptr) *count = active;
    return sum / static_cast<double>(std::abs(b));
}

double nonlinear_exact(const std::function<double(Point)>& h, Point z) {
    const auto region = nonlinear::classify(z.x, z.y);
    if (region == nonlinear::Region::OnLine) return std::numeric_limits<double>::quiet_NaN();
    const auto [first, last] = nonlinear::branch_range(region);
    double sum = 0.0;
    for (long k = first; k <= last; ++k) {
        const double psi = nonlinear::psi(k, z.x, z.y);
        if (!(psi > 0.0)) throw BranchInversionFailure("Psi_k is not positive", k);
        const double root = std::sqrt(psi);
        const double u = (root - 214.0) / 71.0;
        if (!(std::abs(u) < 1.0)) throw BranchInversionFailure("preimage leaves (-1,1)", k);
        sum += h({u, z.x / 12.0}) / (2.0 * root);
    }
    return sum;
}

}  // namespace

std::vector<double> pf_apply_exact(const ExampleParams& ex, const std::function<double(Point)>& h,
                                   std::span<const Point> points) {
    std::vector<double> out;
    out.reserve(points.size());
    const double L = ex.id == ExampleId::Nonlinear ? 1.0 : ex.L;
    const double gamma =
        ex.id == ExampleId::Nonlinear ? 1.0 / 12.0 : 1.0 / std::sqrt(static_cast<double>(std::abs(ex.b)));
    const Rect omega{-L, L, -gamma * L, gamma * L};
    for (const Point& z : points) {
        if (!omega.contains(z)) throw OutOfDomain("point outside Omega");
        out.push_back(ex.id == ExampleId::Nonlinear ? nonlinear_exact(h, z) : linear_exact(ex.a, ex.b, L, h, z, nullptr));
    }
    return out;
}

std::vector<double> pf_apply_exact(const ExampleParams& ex, const GridFunction& h, std::span<const Point> points) {
    return pf_apply_exact(ex, [&h](Point p) { return h(p); }, points);
}

int linear_preimage_count(long a, long b, double L, Point z) {
    int count = 0;
    linear_exact(a, b, L, [](Point) { return 0.0; }, z, &count);
    return count;
}

void write_triplets(std::ostream& os, const UlamOperator& op) {
    os << std::setprecision(17) << "row,col,value\n";
    for (int c = 0; c < op.matrix.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(op.matrix, c); it; ++it) os << it.row() << ',' << it.col() << ',' << it.value() << '\n';
    }
}

}  // namespace pwexp
