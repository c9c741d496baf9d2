#include "pwexp/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pwexp/errors.hpp"

namespace pwexp {

double compute_s(double A, double M) {
    if (!(A > 1.0) || !(M >= 0.0) || !(M < A - 1.0)) {
        throw InvalidBounds("compute_s requires A > 1 and 0 <= M < A - 1");
    }
    const double inner = (2.0 * A + M * M - M * std::sqrt(M * M + 4.0 * A)) / 2.0;
    return 1.0 / std::sqrt(inner);
}

double compute_eta(double s, double alpha, int Y) {
    return std::pow(s, alpha) + 8.0 * s * static_cast<double>(Y) / (std::numbers::pi * (1.0 - s));
}

std::string to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::SampledPass: return "sampled-pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::NotChecked: return "not-checked";
    }
    return "unknown";
}

namespace {

constexpr std::size_t kMaxWitnesses = 4;

void add_witness(CheckResult& r, Point p) {
    if (r.witnesses.size() < kMaxWitnesses) r.witnesses.push_back(p);
}

void finish_sampled(CheckResult& r) { r.status = r.witnesses.empty() ? CheckStatus::SampledPass : CheckStatus::Fail; }

// log-uniform radius in [lo, hi]
double log_uniform(Rng& rng, double lo, double hi) { return lo * std::exp(rng.uniform() * std::log(hi / lo)); }

}  // namespace

CheckResult check_derivative_bounds(const PiecewiseMap& map, const CheckOptions& opt) {
    CheckResult r{.id = "derivative_bounds"};
    double worst_A = std::numeric_limits<double>::infinity();
    double worst_M = 0.0;
    for (std::size_t i = 0; i < map.size(); ++i) {
        const Branch& br = map.piece(i).branch;
        Rng rng(opt.seed, 3 * i + 1);
        for (long n = 0; n < opt.samples; ++n) {
            const Point p = map.sample_collar(i, rng);
            const Point g = br.gradient(p.x, p.y);
            const double du = std::abs(g.x);
            const double dv = std::abs(g.y);
            worst_A = std::min(worst_A, du / br.declared_A);
            worst_M = std::max(worst_M, dv - br.declared_M);
            const bool bad = du < br.declared_A * (1.0 - opt.rel_slack) ||
                             dv > br.declared_M * (1.0 + opt.rel_slack) + 1e-300;
            if (bad) add_witness(r, p);
        }
        r.samples_used += opt.samples;
    }
    r.observed = worst_A;
    std::ostringstream os;
    os << "min |d_u phi|/declared_A = " << worst_A << ", max |d_v phi| - declared_M = " << worst_M;
    r.detail = os.str();
    finish_sampled(r);
    return r;
}

CheckResult check_holder(const PiecewiseMap& map, const CheckOptions& opt) {
    CheckResult r{.id = "gradient_holder"};
    const double alpha = map.spec().alpha;
    double worst = 0.0;
    for (std::size_t i = 0; i < map.size(); ++i) {
        const Piece& piece = map.piece(i);
        const Branch& br = piece.branch;
        Rng rng(opt.seed, 3 * i + 2);
        for (long n = 0; n < opt.samples; ++n) {
            const Point p = map.sample_collar(i, rng);
            const double theta = 2.0 * std::numbers::pi * rng.uniform();
            const Point q = p + log_uniform(rng, 1e-6, map.spec().eps1) * Point{std::cos(theta), std::sin(theta)};
            if (!piece.collar_contains(q, map.spec().eps1)) continue;
            const Point gp = br.gradient(p.x, p.y);
            const Point gq = br.gradient(q.x, q.y);
            const double bound = br.holder_C * std::pow(norm(p - q), alpha);
            const double diff = std::max(std::abs(gp.x - gq.x), std::abs(gp.y - gq.y));
            const double tol = opt.rel_slack * (1.0 + std::abs(gp.x) + std::abs(gp.y));
            if (bound > 0.0) worst = std::max(worst, diff / bound);
            if (diff > bound * (1.0 + opt.rel_slack) + tol) add_witness(r, p);
        }
        r.samples_used += opt.samples;
    }
    r.observed = worst;
    r.detail = "max gradient increment / (C_k |p-q|^alpha) = " + std::to_string(worst);
    finish_sampled(r);
    return r;
}

CheckResult check_partition(const PiecewiseMap& map, const CheckOptions& opt) {
    CheckResult r{.id = "partition"};
    const double L = map.L();
    Rng rng(opt.seed, 0x9a57);
    long uncovered = 0;
    long overlaps = 0;
    long locator_mismatch = 0;
    for (long n = 0; n < opt.partition_samples; ++n) {
        const Point p{rng.uniform(-L, L), rng.uniform(-L, L)};
        const int c = map.count_containing(p);
        if (c == 0) ++uncovered;
        if (c > 1) {
            ++overlaps;
            add_witness(r, p);
        }
        const auto k = map.locate(p);
        if (c == 1 && !k) {
            ++locator_mismatch;
            add_witness(r, p);
        }
    }
    r.samples_used = opt.partition_samples;
    const double frac = static_cast<double>(uncovered) / static_cast<double>(std::max(1L, opt.partition_samples));
    r.observed = frac;
    std::ostringstream os;
    os << "overlaps = " << overlaps << ", uncovered fraction = " << frac << ", locator misses = " << locator_mismatch;
    r.detail = os.str();
    // a null boundary set is hit with probability zero; allow a sampled fraction of 1e-3
    if (frac >= 1e-3 && r.witnesses.empty()) {
        Rng again(opt.seed, 0x9a58);
        for (int t = 0; t < 1000000 && r.witnesses.empty(); ++t) {
            const Point p{again.uniform(-L, L), again.uniform(-L, L)};
            if (map.count_containing(p) == 0) add_witness(r, p);
        }
    }
    r.status = (overlaps == 0 && locator_mismatch == 0 && frac < 1e-3) ? CheckStatus::SampledPass : CheckStatus::Fail;
    return r;
}

CheckResult check_boundary_regularity(const PiecewiseMap& map, const CheckOptions& opt) {
    CheckResult r{.id = "boundary_regularity"};
    const long per_piece = std::max(1L, opt.samples / 100);
    double min_grad = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < map.size(); ++i) {
        const Piece& piece = map.piece(i);
        Rng rng(opt.seed, 3 * i + 3);
        const Rect box = piece.bbox.expanded(0.05 * std::max(piece.bbox.width(), piece.bbox.height()) + 1e-9);
        for (long n = 0; n < per_piece; ++n) {
            const auto inside = map.sample_piece(i, rng, 1000);
            if (!inside) break;
            Point outside{};
            bool found = false;
            for (int t = 0; t < 1000 && !found; ++t) {
                outside = {rng.uniform(box.x0, box.x1), rng.uniform(box.y0, box.y1)};
                found = !piece.contains(outside);
            }
            if (!found) continue;
            Point a = *inside;
            Point b = outside;
            for (int it = 0; it < 60; ++it) {
                const Point m = 0.5 * (a + b);
                (piece.contains(m) ? a : b) = m;
            }
            // the active constraint is the one closest to zero at the crossing
            const Constraint* active = nullptr;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& g : piece.constraints) {
                const double val = std::abs(g.value(b.x, b.y));
                if (val < best) {
                    best = val;
                    active = &g;
                }
            }
            if (!active) continue;
            const double gn = norm(active->gradient(b.x, b.y));
            min_grad = std::min(min_grad, gn);
            if (!(gn > 1e-12)) add_witness(r, b);
            ++r.samples_used;
        }
    }
    r.observed = min_grad;
    r.detail = "min |grad g| at sampled boundary points = " + std::to_string(min_grad);
    finish_sampled(r);
    return r;
}

CheckResult check_geometric_condition(const PiecewiseMap& map, const CheckOptions& opt) {
    CheckResult r{.id = "geometric_segment"};
    const double eps = map.spec().eps1;
    for (std::size_t i = 0; i < map.size(); ++i) {
        const Piece& piece = map.piece(i);
        Rng rng(opt.seed, 3 * i + 4);
        const double y0 = piece.bbox.y0 - eps;
        const double y1 = piece.bbox.y1 + eps;
        for (long n = 0; n < opt.samples; ++n) {
            const double v = rng.uniform(y0, y1);
            const auto row = collar_row(piece.outline, eps, v);
            if (row.size() > 1) {
                add_witness(r, {row[0].hi, v});
                add_witness(r, {row[1].lo, v});
                break;
            }
        }
        r.samples_used += opt.samples;
        if (!r.witnesses.empty()) {
            r.detail = "collar of piece " + std::to_string(piece.index) +
                       " has a horizontal cross-section with two components";
            break;
        }
    }
    if (r.witnesses.empty()) r.detail = "every sampled horizontal cross-section of every collar is one interval";
    finish_sampled(r);
    return r;
}

CheckResult check_trapping(const InducedSystem& sys, const CheckOptions& opt) {
    CheckResult r{.id = "trapping"};
    const PiecewiseMap& map = sys.map();
    const Rect omega = sys.omega();
    const double tol = 1e-12 * sys.L();
    double worst = 0.0;
    for (std::size_t i = 0; i < map.size(); ++i) {
        Rng rng(opt.seed, 3 * i + 5);
        for (long n = 0; n < opt.samples; ++n) {
            const auto p = map.sample_piece(i, rng, 10000);
            if (!p) break;
            const Point z{p->x, sys.flatten(p->y)};
            const Point t = sys.branch_map(i, z);
            const double out = std::max({omega.x0 - t.x, t.x - omega.x1, omega.y0 - t.y, t.y - omega.y1, 0.0});
            worst = std::max(worst, out);
            if (out > tol) add_witness(r, z);
            ++r.samples_used;
        }
    }
    r.observed = worst;
    r.detail = "max distance of T_k(U_k) outside Omega = " + std::to_string(worst);
    finish_sampled(r);
    return r;
}

DilatanceResult check_dilatance(const InducedSystem& sys, double s, const CheckOptions& opt) {
    DilatanceResult out;
    out.pairwise.id = "dilatance_pairwise";
    out.eigen.id = "dilatance_eigenvalue";
    const PiecewiseMap& map = sys.map();
    const double gamma = sys.gamma();
    const double eps = map.spec().eps1;
    const double inv_s2 = 1.0 / (s * s);
    double min_ratio = std::numeric_limits<double>::infinity();
    double min_eig = std::numeric_limits<double>::infinity();
    const double r_max = 0.05 * sys.L();
    for (std::size_t i = 0; i < map.size(); ++i) {
        const Piece& piece = map.piece(i);
        Rng rng(opt.seed, 3 * i + 6);
        auto in_W = [&](Point z) { return piece.collar_contains({z.x, sys.unflatten(z.y)}, eps); };
        long accepted = 0;
        for (long attempt = 0; accepted < opt.samples && attempt < 20 * opt.samples; ++attempt) {
            const Point u = map.sample_collar(i, rng);
            const Point p{u.x, sys.flatten(u.y)};

            // (ii) pointwise: B = DT^T DT at p
            if (accepted < opt.samples && attempt < opt.samples) {
                const Point g = piece.branch.gradient(u.x, u.y);
                const double b11 = gamma * gamma * g.x * g.x;
                const double b12 = gamma * g.x * g.y;
                const double b22 = 1.0 / (gamma * gamma) + g.y * g.y;
                const double lam = min_eigenvalue_sym2(b11, b12, b22);
                min_eig = std::min(min_eig, lam / inv_s2);
                if (lam < inv_s2 * (1.0 - opt.rel_slack)) add_witness(out.eigen, p);
                ++out.eigen.samples_used;
            }

            // (i) pairwise on segments inside W_k
            const double theta = 2.0 * std::numbers::pi * rng.uniform();
            const Point q = p + log_uniform(rng, 1e-5, r_max) * Point{std::cos(theta), std::sin(theta)};
            // the whole segment is within eps of the piece when its far end cannot
            // outrun the slack at p (unflattening stretches lengths by at most 1/gamma)
            bool inside = distance_to_region(piece.outline, u) + norm(q - p) / std::min(gamma, 1.0) <= eps;
            if (!inside) {
                inside = true;
                for (int t = 1; t <= 8 && inside; ++t) inside = in_W(p + (t / 8.0) * (q - p));
            }
            if (!inside) continue;
            const double d = norm(p - q);
            const double d_img = norm(sys.branch_map(i, p) - sys.branch_map(i, q));
            const double ratio = d_img * s / d;
            min_ratio = std::min(min_ratio, ratio);
            if (ratio < 1.0 - opt.rel_slack) {
                ++out.violations;
                add_witness(out.pairwise, p);
                add_witness(out.pairwise, q);
            }
            ++accepted;
        }
        out.pairwise.samples_used += accepted;
    }
    out.pairwise.observed = min_ratio;
    out.pairwise.detail = "min s |T p - T q| / |p - q| = " + std::to_string(min_ratio) + ", violations = " +
                          std::to_string(out.violations);
    out.eigen.observed = min_eig;
    out.eigen.detail = "min s^2 lambda_min(B) = " + std::to_string(min_eig);
    finish_sampled(out.pairwise);
    finish_sampled(out.eigen);
    return out;
}

bool HypothesisReport::overall_pass() const {
    if (checks.empty()) return false;
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
}

const CheckResult* HypothesisReport::find(const std::string& id) const {
    for (const auto& c : checks) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

namespace {

nlohmann::ordered_json number(double x) {
    if (std::isfinite(x)) return x;
    return nullptr;
}

}  // namespace

std::string HypothesisReport::to_json() const {
    nlohmann::ordered_json doc;
    doc["overall"] = overall_pass() ? "pass" : "fail";
    doc["constants"] = {{"A", number(A)},         {"M", number(M)},         {"s", number(s)},
                        {"eta", number(eta)},     {"gamma", number(gamma)}, {"alpha", number(alpha)},
                        {"Y", Y}};
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json rec;
        rec["id"] = c.id;
        rec["status"] = to_string(c.status);
        rec["samples_used"] = c.samples_used;
        rec["observed"] = number(c.observed);
        rec["detail"] = c.detail;
        auto w = nlohmann::ordered_json::array();
        for (const auto& p : c.witnesses) w.push_back({p.x, p.y});
        rec["witnesses"] = w;
        arr.push_back(std::move(rec));
    }
    doc["checks"] = std::move(arr);
    return doc.dump(2) + "\n";
}

HypothesisReport full_report(std::shared_ptr<const PiecewiseMap> map, const CheckOptions& opt) {
    HypothesisReport rep;
    const InducedSystem sys = induce(map);
    rep.A = map->min_declared_A();
    rep.M = map->max_declared_M();
    rep.gamma = sys.gamma();
    rep.alpha = map->spec().alpha;
    rep.Y = map->spec().Y;
    rep.s = std::numeric_limits<double>::quiet_NaN();
    rep.eta = std::numeric_limits<double>::quiet_NaN();

    CheckResult bounds{.id = "bound_relation", .samples_used = 0};
    const bool bounds_ok = rep.M >= 0.0 && rep.M < rep.A - 1.0;
    bounds.status = bounds_ok ? CheckStatus::Pass : CheckStatus::Fail;
    bounds.observed = rep.A - 1.0 - rep.M;
    bounds.detail = "A - 1 - M = " + std::to_string(bounds.observed) + " (witness holds (A, M))";
    if (!bounds_ok) bounds.witnesses.push_back({rep.A, rep.M});

    rep.checks.push_back(check_partition(*map, opt));
    rep.checks.push_back(check_boundary_regularity(*map, opt));
    rep.checks.push_back(bounds);
    rep.checks.push_back(check_derivative_bounds(*map, opt));
    rep.checks.push_back(check_holder(*map, opt));

    CheckResult geo = check_geometric_condition(*map, opt);
    if (geo.status == CheckStatus::Fail) {
        geo.status = CheckStatus::NotChecked;
        geo.detail += "; segment form fails, path form not checked";
    }
    rep.checks.push_back(geo);

    CheckResult eta_check{.id = "eta_contraction"};
    if (bounds_ok) {
        rep.s = compute_s(rep.A, rep.M);
        rep.eta = compute_eta(rep.s, rep.alpha, rep.Y);
        eta_check.observed = rep.eta;
        eta_check.status = rep.eta < 1.0 ? CheckStatus::Pass : CheckStatus::Fail;
        eta_check.detail = "eta = " + std::to_string(rep.eta) + " (witness holds (s, eta))";
        if (rep.eta >= 1.0) eta_check.witnesses.push_back({rep.s, rep.eta});
    } else {
        eta_check.status = CheckStatus::NotChecked;
        eta_check.detail = "s undefined because M >= A - 1";
    }
    rep.checks.push_back(eta_check);
    rep.checks.push_back(check_trapping(sys, opt));

    if (bounds_ok) {
        DilatanceResult dil = check_dilatance(sys, rep.s, opt);
        rep.checks.push_back(std::move(dil.pairwise));
        rep.checks.push_back(std::move(dil.eigen));
    } else {
        rep.checks.push_back({.id = "dilatance_pairwise", .status = CheckStatus::NotChecked, .detail = "s undefined"});
        rep.checks.push_back({.id = "dilatance_eigenvalue", .status = CheckStatus::NotChecked, .detail = "s undefined"});
    }
    return rep;
}

}  // namespace pwexp
