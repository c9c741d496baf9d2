#include <doctest.h>

#include <cmath>
#include <memory>

#include "pwexp/errors.hpp"
#include "pwexp/examples_gallery.hpp"
#include "pwexp/map_model.hpp"

using namespace pwexp;

TEST_SUITE("examples_gallery") {

TEST_CASE("S and the admissibility bound") {
    // independent 40 digit evaluation
    CHECK(linear_S() == doctest::Approx(90.90775068946149489783738).epsilon(1e-14));
    const auto adm = linear_admissibility(1, 101);
    CHECK(adm.bound == doctest::Approx(1.058491839875423763563128).epsilon(1e-13));
    CHECK(adm.admissible);
    CHECK_FALSE(adm.borderline);
    CHECK_FALSE(linear_admissibility(1, 50).admissible);
    CHECK_FALSE(linear_admissibility(2, 101).admissible);
    // for a = 1 admissibility starts at the first integer above S + sqrt(S)
    long first = 0;
    for (long b = 1; b < 200; ++b) {
        if (linear_admissibility(1, b).admissible) {
            first = b;
            break;
        }
    }
    const double S = 90.90775068946149489783738;
    CHECK(first == static_cast<long>(std::floor(S + std::sqrt(S))) + 1);
    CHECK_THROWS_AS(build_linear(1, 50, 1.0), NotAdmissible);
    CHECK_THROWS_AS(build_linear(0, 101, 1.0), InvalidBounds);
    CHECK_THROWS_AS(build_linear(1, 101, 0.3), InvalidBounds);
}

TEST_CASE("index_range matches a corner scan") {
    for (long a : {1L, -1L, 3L}) {
        for (long b : {101L, -101L, 7L, 2L}) {
            // n with a line a v + b u = (2n-1) L through the closed square: corners give the extremes
            double lo = 1e300, hi = -1e300;
            for (double u : {-1.0, 1.0}) {
                for (double v : {-1.0, 1.0}) {
                    lo = std::min(lo, a * v + b * u);
                    hi = std::max(hi, a * v + b * u);
                }
            }
            long first = 0, last = -1;
            bool any = false;
            for (long n = -1000; n <= 1000; ++n) {
                const double w = 2.0 * n - 1.0;
                if (w >= lo && w <= hi) {
                    if (!any) first = n;
                    last = n;
                    any = true;
                }
            }
            const IndexRange r = index_range(a, b);
            CHECK(r.first == first);
            CHECK(r.last == last);
        }
    }
}

TEST_CASE("piece_indices matches rejection sampling") {
    const long a = 1, b = 7;
    const IndexRange r = piece_indices(a, b);
    Rng rng(2);
    long seen_lo = 1000, seen_hi = -1000;
    for (int k = 0; k < 200000; ++k) {
        const double u = rng.uniform(-1, 1), v = rng.uniform(-1, 1);
        const long n = std::lround((a * v + b * u) / 2.0);
        seen_lo = std::min(seen_lo, n);
        seen_hi = std::max(seen_hi, n);
    }
    CHECK(r.first == seen_lo);
    CHECK(r.last == seen_hi);
    CHECK(r.size() == static_cast<long>(build_linear_unchecked(a, b, 1.0).pieces.size()));
}

TEST_CASE("linear branches are affine with gradient (b, a) and land inside (-L, L)") {
    const auto spec = build_linear(1, 101, 1.0);
    Rng rng(4);
    for (const Piece& p : spec.pieces) {
        for (int k = 0; k < 20; ++k) {
            const Point g = p.branch.gradient(rng.uniform(-1, 1), rng.uniform(-1, 1));
            CHECK(g.x == 101.0);
            CHECK(g.y == 1.0);
        }
    }
    const PiecewiseMap map(spec);
    for (int k = 0; k < 5000; ++k) {
        const Point q{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const auto v = evaluate_phi(map, q);
        if (v) CHECK(std::abs(*v) < 1.0);
    }
}

TEST_CASE("distinct points of one linear piece have distinct images") {
    const auto map = std::make_shared<const PiecewiseMap>(build_linear(1, 101, 1.0));
    const InducedSystem sys(map);
    Rng rng(9);
    for (int k = 0; k < 2000; ++k) {
        const Point p{rng.uniform(-1, 1), rng.uniform(sys.omega().y0, sys.omega().y1)};
        const Point q{p.x + rng.uniform(-1e-4, 1e-4), p.y + rng.uniform(-1e-5, 1e-5)};
        const auto i = sys.locate(p), j = sys.locate(q);
        if (!i || !j || *i != *j || p == q) continue;
        CHECK_FALSE(sys.branch_map(*i, p) == sys.branch_map(*i, q));
    }
}

TEST_CASE("nonlinear strips: phi_k maps O_k onto (-1, 1)") {
    const auto spec = build_nonlinear();
    CHECK(spec.pieces.size() == 430);
    CHECK(spec.pieces.front().index == -179);
    CHECK(spec.pieces.back().index == 250);
    const PiecewiseMap map(spec);
    Rng rng(21);
    // sample each interior strip densely along its two boundary parabolas
    for (long k : {-150L, 0L, 37L, 200L}) {
        const std::size_t i = static_cast<std::size_t>(k - nonlinear::kFirst);
        double lo = 1e9, hi = -1e9;
        for (int s = 0; s < 200000; ++s) {
            const auto p = map.sample_piece(i, rng);
            REQUIRE(p.has_value());
            const double v = map.piece(i).branch.value(p->x, p->y);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(lo == doctest::Approx(-1.0).epsilon(1e-3));
        CHECK(hi == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(lo > -1.0);
        CHECK(hi < 1.0);
    }
    // deterministic sup/inf on the closure: v -> f_k(u), f_{k+1}(u)
    for (long k = -150; k <= 200; k += 50) {
        for (double u : {-0.99, -0.5, 0.0, 0.5, 0.99}) {
            const std::size_t i = static_cast<std::size_t>(k - nonlinear::kFirst);
            const double below = nonlinear::f(k, u), above = nonlinear::f(k + 1, u);
            if (below < -1.0 || above > 1.0) continue;
            const Quadratic q = *map.piece(i).branch.coefficients;
            CHECK(q(u, below) == doctest::Approx(-1.0).epsilon(1e-6));
            CHECK(q(u, above) == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
}

TEST_CASE("nonlinear region classification and branch ranges") {
    using namespace nonlinear;
    CHECK(classify(0.0, 0.5) == Region::Omega1);
    CHECK(classify(0.0, 0.0) == Region::Omega2);
    CHECK(classify(0.0, -0.5) == Region::Omega3);
    CHECK(classify(0.5, 1.0 / 6.0) == Region::OnLine);
    CHECK(branch_range(Region::Omega1) == std::pair<long, long>{-179, 248});
    CHECK(branch_range(Region::Omega3) == std::pair<long, long>{-177, 250});
    CHECK(branch_range(Region::OnLine).first > branch_range(Region::OnLine).second);
    for (double z : {-1.4, -0.7, 0.0, 0.3, 0.9, 1.49}) {
        const Point p = point_with_z(z);
        CHECK(p.x - 6.0 * p.y == doctest::Approx(z));
        CHECK(std::abs(p.x) < 1.0);
        CHECK(std::abs(p.y) < 1.0 / 12.0);
    }
    CHECK_THROWS_AS(point_with_z(1.5), OutOfDomain);
}

TEST_CASE("ground truth facts") {
    const auto nl = ground_truth_facts({});
    CHECK(nl.size() == 9);
    const auto lin = ground_truth_facts({ExampleId::Linear, 1, 101, 1.0});
    bool has_card = false;
    for (const auto& f : lin) has_card = has_card || (f.id == "pf_cardinality" && f.value == 101.0);
    CHECK(has_card);
}

}
