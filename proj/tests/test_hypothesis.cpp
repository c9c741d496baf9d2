#include <doctest.h>

#include <cmath>
#include <memory>

#include <nlohmann/json.hpp>

#include "pwexp/errors.hpp"
#include "pwexp/examples_gallery.hpp"
#include "pwexp/hypothesis.hpp"

using namespace pwexp;

namespace {

CheckOptions quick(long n = 300) {
    CheckOptions o;
    o.samples = n;
    o.partition_samples = 20 * n;
    return o;
}

// Single piece covering the square with phi(u, v) = k u + c v (not self-mapping, for local checks).
PiecewiseMapSpec one_piece(const Polygon& outline, Quadratic phi, double A, double M, double eps1) {
    PiecewiseMapSpec spec;
    spec.name = "synthetic";
    spec.L = 1.0;
    spec.eps1 = eps1;
    Piece p;
    p.constraints = {Constraint::from({{-1, 1, 0, 0, 0, 0}}), Constraint::from({{-1, -1, 0, 0, 0, 0}}),
                     Constraint::from({{-1, 0, 1, 0, 0, 0}}), Constraint::from({{-1, 0, -1, 0, 0, 0}})};
    p.branch = Branch::from(phi, A, M, 0.0);
    p.outline = outline;
    spec.pieces.push_back(p);
    return spec;
}

}  // namespace

TEST_SUITE("hypothesis_checker") {

TEST_CASE("s and eta of the two examples against a 40 digit evaluation") {
    const double s1 = compute_s(144.0, 2.0);
    CHECK(s1 == doctest::Approx(0.0905666290193909408342239).epsilon(1e-13));
    CHECK(compute_eta(s1, 1.0, 3) == doctest::Approx(0.8513459264175709730138405).epsilon(1e-13));
    const double s2 = compute_s(101.0, 1.0);
    CHECK(s2 == doctest::Approx(0.1045772861262282538004087).epsilon(1e-13));
    CHECK(compute_eta(s2, 1.0, 3) == doctest::Approx(0.9967945648299816526978835).epsilon(1e-13));
    CHECK_THROWS_AS(compute_s(1.0, 0.0), InvalidBounds);
    CHECK_THROWS_AS(compute_s(4.0, 3.0), InvalidBounds);
}

TEST_CASE("s is increasing in M and decreasing in A") {
    Rng rng(1);
    for (int k = 0; k < 200; ++k) {
        const double A = 2.0 + 200.0 * rng.uniform();
        const double M = (A - 1.0) * 0.9 * rng.uniform();
        CHECK(compute_s(A, M) < compute_s(A, M + 0.05 * (A - 1.0 - M)));
        CHECK(compute_s(A * 1.1, M) < compute_s(A, M));
        CHECK(compute_s(A, 0.0) == doctest::Approx(1.0 / std::sqrt(A)));
    }
}

TEST_CASE("the linear example passes every check") {
    const auto map = std::make_shared<const PiecewiseMap>(build_linear(1, 101, 1.0));
    const HypothesisReport rep = full_report(map, quick());
    for (const auto& c : rep.checks) {
        INFO(c.id << ": " << c.detail);
        CHECK(c.passed());
    }
    CHECK(rep.overall_pass());
    CHECK(rep.s == doctest::Approx(0.1045772861262282538004087).epsilon(1e-13));
}

TEST_CASE("an inadmissible linear example fails eta with a witness") {
    const auto map = std::make_shared<const PiecewiseMap>(build_linear_unchecked(1, 50, 1.0));
    const HypothesisReport rep = full_report(map, quick(100));
    CHECK_FALSE(rep.overall_pass());
    const CheckResult* eta = rep.find("eta_contraction");
    REQUIRE(eta != nullptr);
    CHECK(eta->status == CheckStatus::Fail);
    CHECK_FALSE(eta->witnesses.empty());
    CHECK(rep.eta >= 1.0);
}

TEST_CASE("overstated A is caught by the derivative check") {
    // phi = 3u + 0.5 v declared with A = 4
    const auto map = std::make_shared<const PiecewiseMap>(one_piece(square(1.0), {{0, 3, 0.5, 0, 0, 0}}, 4.0, 0.5, 0.2));
    const CheckResult r = check_derivative_bounds(*map, quick());
    CHECK(r.status == CheckStatus::Fail);
    REQUIRE_FALSE(r.witnesses.empty());
}

TEST_CASE("a concave piece rotated by 45 degrees fails the segment condition") {
    const Polygon base{{0, 0}, {0.8, 0}, {0.8, 0.2}, {0.2, 0.2}, {0.2, 0.8}, {0, 0.8}};
    const double c = std::cos(M_PI / 4), s = std::sin(M_PI / 4);
    Polygon rot;
    for (Point p : base) rot.push_back({c * p.x - s * p.y - 0.0, s * p.x + c * p.y - 0.5});
    const auto narrow = std::make_shared<const PiecewiseMap>(one_piece(rot, {{0, 3, 0, 0, 0, 0}}, 3.0, 0.0, 0.05));
    const CheckResult r = check_geometric_condition(*narrow, quick(2000));
    CHECK(r.status == CheckStatus::Fail);
    REQUIRE(r.witnesses.size() == 2);
    // the witnesses bound a gap on the same horizontal line
    CHECK(r.witnesses[0].y == r.witnesses[1].y);
    CHECK(r.witnesses[0].x < r.witnesses[1].x);

    // the same piece unrotated has interval cross-sections, and so does its collar
    Polygon upright;
    for (Point p : base) upright.push_back({p.x - 0.4, p.y - 0.4});
    const auto flat = std::make_shared<const PiecewiseMap>(one_piece(upright, {{0, 3, 0, 0, 0, 0}}, 3.0, 0.0, 0.05));
    CHECK(check_geometric_condition(*flat, quick(2000)).status == CheckStatus::SampledPass);

    // in a report the failure is downgraded to not-checked and blocks the overall verdict
    const HypothesisReport rep = full_report(narrow, quick(100));
    const CheckResult* geo = rep.find("geometric_segment");
    REQUIRE(geo != nullptr);
    CHECK(geo->status == CheckStatus::NotChecked);
    CHECK_FALSE(rep.overall_pass());
}

TEST_CASE("overlapping pieces fail the partition check") {
    PiecewiseMapSpec spec = build_linear(1, 101, 1.0);
    spec.pieces.push_back(spec.pieces[spec.pieces.size() / 2]);
    const PiecewiseMap map(spec);
    const CheckResult r = check_partition(map, quick());
    CHECK(r.status == CheckStatus::Fail);
    CHECK_FALSE(r.witnesses.empty());
}

TEST_CASE("M at least A - 1 leaves s undefined") {
    const auto map = std::make_shared<const PiecewiseMap>(one_piece(square(1.0), {{0, 3, 2.5, 0, 0, 0}}, 3.0, 2.5, 0.2));
    const HypothesisReport rep = full_report(map, quick(50));
    CHECK(std::isnan(rep.s));
    CHECK(rep.find("bound_relation")->status == CheckStatus::Fail);
    CHECK(rep.find("eta_contraction")->status == CheckStatus::NotChecked);
    CHECK_FALSE(rep.overall_pass());
}

TEST_CASE("A at most one is rejected") {
    const auto map = std::make_shared<const PiecewiseMap>(one_piece(square(1.0), {{0, 1, 0, 0, 0, 0}}, 1.0, 0.0, 0.2));
    CHECK_THROWS_AS(full_report(map, quick(10)), InvalidBounds);
}

TEST_CASE("dilatance on the nonlinear example") {
    const auto map = std::make_shared<const PiecewiseMap>(build_nonlinear());
    const InducedSystem sys(map);
    const DilatanceResult d = check_dilatance(sys, compute_s(144.0, 2.0), quick(20));
    CHECK(d.violations == 0);
    CHECK(d.pairwise.status == CheckStatus::SampledPass);
    CHECK(d.eigen.status == CheckStatus::SampledPass);
    CHECK(d.eigen.observed >= 1.0);
}

TEST_CASE("dilatance detects a contracting branch") {
    const auto map = std::make_shared<const PiecewiseMap>(one_piece(square(1.0), {{0, 4, 0, 0, 0, 0}}, 4.0, 0.0, 0.2));
    const InducedSystem sys(map);
    // claim s = 0.1 although the induced map only expands by 2
    const DilatanceResult d = check_dilatance(sys, 0.1, quick(50));
    CHECK(d.violations > 0);
    CHECK(d.pairwise.status == CheckStatus::Fail);
    CHECK(d.eigen.status == CheckStatus::Fail);
}

TEST_CASE("report json has stable keys") {
    const auto map = std::make_shared<const PiecewiseMap>(build_linear(1, 101, 1.0));
    const auto doc = nlohmann::json::parse(full_report(map, quick(50)).to_json());
    CHECK(doc["overall"] == "pass");
    CHECK(doc["constants"]["A"] == 101.0);
    for (const auto& c : doc["checks"]) {
        CHECK(c.contains("id"));
        CHECK(c.contains("status"));
        CHECK(c.contains("samples_used"));
        CHECK(c.contains("witnesses"));
    }
}

}
