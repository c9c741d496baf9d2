#include "pwexp/examples_gallery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pwexp/errors.hpp"

namespace pwexp {

namespace nonlinear {

double f(long k, double x) { return -35.5 * x * x - 214.0 * x + static_cast<double>(k) - 0.5; }

double psi(long k, double x, double y) {
    return 214.0 * 214.0 - 71.0 * (2.0 * x - 12.0 * y) + 142.0 * static_cast<double>(k);
}

Region classify(double x, double y) {
    const double t = 12.0 * y;
    if (t > 2.0 * x + 1.0) return Region::Omega1;
    if (t < 2.0 * x - 1.0) return Region::Omega3;
    if (t > 2.0 * x - 1.0 && t < 2.0 * x + 1.0) return Region::Omega2;
    return Region::OnLine;
}

std::pair<long, long> branch_range(Region r) {
    switch (r) {
        case Region::Omega1: return {-179, 248};
        case Region::Omega2: return {-178, 249};
        case Region::Omega3: return {-177, 250};
        case Region::OnLine: break;
    }
    return {0, -1};
}

Point point_with_z(double z) {
    if (!(std::abs(z) < 1.5)) throw OutOfDomain("z = x - 6y must lie in (-3/2, 3/2)");
    // x moves half as fast as z, keeping |x| < 1 and |y| = |x - z| / 6 < 1/12
    double x = z;
    if (z > 0.5) x = 0.25 + 0.5 * z;
    if (z < -0.5) x = -0.25 + 0.5 * z;
    return {x, (x - z) / 6.0};
}

namespace {

// u in [-1,1] with f_k(u) = w (f_k is decreasing there)
double f_inverse(long k, double w) {
    const double disc = 214.0 * 214.0 + 142.0 * (static_cast<double>(k) - 0.5 - w);
    return (-214.0 + std::sqrt(disc)) / 71.0;
}

Polygon strip_outline(long k) {
    const double v_lo = std::max(-1.0, f(k, 1.0));
    const double v_hi = std::min(1.0, f(k, -1.0) + 1.0);
    std::vector<double> vs;
    constexpr int kSamples = 24;
    for (int i = 0; i <= kSamples; ++i) vs.push_back(v_lo + (v_hi - v_lo) * i / kSamples);
    // corners where a boundary parabola leaves through a vertical side of the square
    for (double kink : {f(k, -1.0), f(k, 1.0) + 1.0}) {
        if (kink > v_lo && kink < v_hi) vs.push_back(kink);
    }
    std::sort(vs.begin(), vs.end());
    Polygon poly;
    auto push = [&poly](Point p) {
        if (poly.empty() || !(poly.back() == p)) poly.push_back(p);
    };
    for (double v : vs) push({std::max(-1.0, f_inverse(k, v)), v});
    for (auto it = vs.rbegin(); it != vs.rend(); ++it) push({std::min(1.0, f_inverse(k, *it - 1.0)), *it});
    if (poly.size() > 1 && poly.front() == poly.back()) poly.pop_back();
    return poly;
}

}  // namespace

}  // namespace nonlinear

namespace {

long floor_div2(long n) { return n >= 0 ? n / 2 : -((-n + 1) / 2); }
long ceil_div2(long n) { return -floor_div2(-n); }

std::vector<Constraint> square_constraints(double L) {
    return {Constraint::from({{-L, 1, 0, 0, 0, 0}}), Constraint::from({{-L, -1, 0, 0, 0, 0}}),
            Constraint::from({{-L, 0, 1, 0, 0, 0}}), Constraint::from({{-L, 0, -1, 0, 0, 0}})};
}

}  // namespace

PiecewiseMapSpec build_nonlinear() {
    using namespace nonlinear;
    PiecewiseMapSpec spec;
    spec.name = "nonlinear";
    spec.L = 1.0;
    spec.alpha = 1.0;
    spec.eps1 = 1.0;
    spec.Y = kY;
    for (long k = kFirst; k <= kLast; ++k) {
        Piece p;
        p.index = k;
        p.constraints = square_constraints(1.0);
        const double kd = static_cast<double>(k);
        // f_k(u) - v < 0 and v - f_{k+1}(u) < 0
        p.constraints.push_back(Constraint::from({{kd - 0.5, -214.0, -1.0, -35.5, 0.0, 0.0}}));
        p.constraints.push_back(Constraint::from({{-kd - 0.5, 214.0, 1.0, 35.5, 0.0, 0.0}}));
        // phi_k(u,v) = 2v - 2 f_k(u) - 1 = 71 u^2 + 428 u + 2 v - 2k
        p.branch = Branch::from({{-2.0 * kd, 428.0, 2.0, 71.0, 0.0, 0.0}}, kA, kM, kHolder);
        p.outline = strip_outline(k);
        p.bbox = bounding_box(p.outline);
        spec.pieces.push_back(std::move(p));
    }
    return spec;
}

double linear_S() {
    constexpr double pi = std::numbers::pi;
    return 1.0 + 48.0 / pi + 288.0 / (pi * pi) + (4.0 / pi) * (1.0 + 12.0 / pi) * std::sqrt(6.0 * pi + 36.0);
}

LinearAdmissibility linear_admissibility(long a, long b) {
    LinearAdmissibility out;
    out.S = linear_S();
    out.bound = (static_cast<double>(std::abs(b)) - out.S) / std::sqrt(out.S);
    const double margin = out.bound - static_cast<double>(std::abs(a));
    out.borderline = std::abs(margin) <= 1e-12;
    out.admissible = margin > 1e-12;
    return out;
}

IndexRange index_range(long a, long b) {
    const long s = std::abs(a) + std::abs(b);
    return {ceil_div2(1 - s), floor_div2(1 + s)};
}

IndexRange piece_indices(long a, long b) {
    const long s = std::abs(a) + std::abs(b);
    // 2n + 1 > -s and 2n - 1 < s
    return {floor_div2(-s - 1) + 1, ceil_div2(s + 1) - 1};
}

PiecewiseMapSpec build_linear_unchecked(long a, long b, double L) {
    if (a == 0 || b == 0) throw InvalidBounds("a and b must be nonzero");
    const double twice = 2.0 * L;
    if (!(L > 0.0) || twice != std::round(twice)) throw InvalidBounds("L must be a positive integer or half-integer");
    PiecewiseMapSpec spec;
    spec.name = "linear";
    spec.L = L;
    spec.alpha = 1.0;
    spec.eps1 = L;
    spec.Y = 3;
    const double ad = static_cast<double>(a);
    const double bd = static_cast<double>(b);
    const IndexRange range = piece_indices(a, b);
    for (long n = range.first; n <= range.last; ++n) {
        const double nd = static_cast<double>(n);
        Piece p;
        p.index = n;
        p.constraints = square_constraints(L);
        // (2n-1)L - (a v + b u) < 0 and (a v + b u) - (2n+1)L < 0
        p.constraints.push_back(Constraint::from({{(2.0 * nd - 1.0) * L, -bd, -ad, 0, 0, 0}}));
        p.constraints.push_back(Constraint::from({{-(2.0 * nd + 1.0) * L, bd, ad, 0, 0, 0}}));
        p.branch = Branch::from({{-2.0 * nd * L, bd, ad, 0, 0, 0}}, std::abs(bd), std::abs(ad), 0.0);
        Polygon poly = square(L);
        poly = clip_halfplane(poly, {bd, ad}, (2.0 * nd + 1.0) * L);
        poly = clip_halfplane(poly, {-bd, -ad}, -(2.0 * nd - 1.0) * L);
        p.outline = std::move(poly);
        if (p.outline.size() < 3) continue;
        p.bbox = bounding_box(p.outline);
        spec.pieces.push_back(std::move(p));
    }
    return spec;
}

PiecewiseMapSpec build_linear(long a, long b, double L) {
    const LinearAdmissibility adm = linear_admissibility(a, b);
    if (!adm.admissible) {
        throw NotAdmissible("|a| = " + std::to_string(std::abs(a)) + " is not below (|b| - S)/sqrt(S) = " +
                                std::to_string(adm.bound) + (adm.borderline ? " (borderline)" : ""),
                            adm.S, adm.bound);
    }
    return build_linear_unchecked(a, b, L);
}

std::vector<Fact> ground_truth_facts(const ExampleParams& ex) {
    std::vector<Fact> facts;
    if (ex.id == ExampleId::Nonlinear) {
        facts.push_back({"A", FactKind::Constant, "lower bound on |d phi_k/du| over the collars", 144.0, 0.0});
        facts.push_back({"M", FactKind::Constant, "|d phi_k/dv| over the collars", 2.0, 0.0});
        facts.push_back({"gamma", FactKind::Constant, "flattening factor 1/sqrt(A)", 1.0 / 12.0, 1e-15});
        facts.push_back({"Y", FactKind::Constant, "maximal number of crossing boundary arcs", 3.0, 0.0});
        facts.push_back({"pieces", FactKind::Constant, "nonempty pieces k = -179..250", 430.0, 0.0});
        facts.push_back({"s_at_most_tenth", FactKind::Flag, "s <= 1/10", 1.0, 0.0});
        facts.push_back({"eta_below_one", FactKind::Flag, "eta < 1", 1.0, 0.0});
        facts.push_back({"p1_increasing_omega3", FactKind::Monotone,
                         "exact P1 is strictly increasing in z = x - 6y across Omega3", 1.0, 0.0});
        facts.push_back({"density_constant", FactKind::Flag, "invariant density is not constant (cv above 1%)", 0.0, 0.0});
    } else {
        const double b = static_cast<double>(std::abs(ex.b));
        facts.push_back({"A", FactKind::Constant, "A = |b|", b, 0.0});
        facts.push_back({"M", FactKind::Constant, "M = |a|", static_cast<double>(std::abs(ex.a)), 0.0});
        facts.push_back({"gamma", FactKind::Constant, "gamma = |b|^(-1/2)", 1.0 / std::sqrt(b), 1e-15});
        facts.push_back({"Y", FactKind::Constant, "maximal number of crossing boundary segments", 3.0, 0.0});
        facts.push_back({"pf_cardinality", FactKind::Constant, "preimage count of a generic point", b, 0.0});
        facts.push_back({"eta_below_one", FactKind::Flag, "eta < 1", 1.0, 0.0});
        facts.push_back({"density_constant", FactKind::Flag, "invariant density is constant (within 5%)", 1.0, 0.0});
    }
    return facts;
}

}  // namespace pwexp
