#include <doctest.h>

#include <cmath>

#include "pwexp/geometry.hpp"
#include "pwexp/random.hpp"

using namespace pwexp;

TEST_SUITE("geometry") {

TEST_CASE("clipping the square by a half-plane") {
    const Polygon sq = square(1.0);
    const Polygon left = clip_halfplane(sq, {1.0, 0.0}, 0.0);
    const Rect box = bounding_box(left);
    CHECK(box.x0 == -1.0);
    CHECK(box.x1 == doctest::Approx(0.0));
    CHECK(box.y0 == -1.0);
    CHECK(box.y1 == 1.0);
    CHECK(clip_halfplane(sq, {1.0, 0.0}, -2.0).empty());
    CHECK(clip_halfplane(sq, {1.0, 0.0}, 5.0).size() == 4);
}

TEST_CASE("distance to a region is zero inside and Euclidean outside") {
    const Polygon sq = square(1.0);
    CHECK(distance_to_region(sq, {0.3, -0.2}) == 0.0);
    CHECK(distance_to_region(sq, {2.0, 0.0}) == doctest::Approx(1.0));
    CHECK(distance_to_region(sq, {2.0, 2.0}) == doctest::Approx(std::sqrt(2.0)));
    CHECK(near_region(sq, {1.5, 0.0}, 0.5));
    CHECK_FALSE(near_region(sq, {1.5, 0.0}, 0.49));
}

TEST_CASE("collar rows of an L-shaped piece rotated by 45 degrees") {
    // L shape: [0,2]x[0,1] union [0,1]x[1,2], rotated about the origin
    const Polygon base{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
    const double c = std::cos(M_PI / 4), s = std::sin(M_PI / 4);
    Polygon rot;
    for (Point p : base) rot.push_back({c * p.x - s * p.y, s * p.x + c * p.y});

    Rng rng(7);
    for (int k = 0; k < 200; ++k) {
        const double v = rng.uniform(-0.2, 2.4);
        const double r = rng.uniform(0.0, 0.6);
        const auto rows = collar_row(rot, r, v);
        // brute force along the row
        const Rect box = bounding_box(rot).expanded(r + 0.1);
        int inside_runs = 0;
        bool prev = false;
        for (int i = 0; i <= 4000; ++i) {
            const double u = box.x0 + box.width() * i / 4000.0;
            const bool in = distance_to_region(rot, {u, v}) <= r;
            if (in && !prev) ++inside_runs;
            prev = in;
            bool listed = false;
            for (const auto& iv : rows) listed = listed || (u >= iv.lo - 1e-9 && u <= iv.hi + 1e-9);
            if (std::abs(distance_to_region(rot, {u, v}) - r) > 1e-6) CHECK(listed == in);
        }
        CHECK(static_cast<int>(rows.size()) == inside_runs);
    }
}

TEST_CASE("merge_intervals joins overlaps and sorts") {
    const auto m = merge_intervals({{3, 4}, {0, 1}, {0.5, 2}, {5, 4}});
    REQUIRE(m.size() == 2);
    CHECK(m[0].lo == 0.0);
    CHECK(m[0].hi == 2.0);
    CHECK(m[1].lo == 3.0);
}

TEST_CASE("smallest eigenvalue of a symmetric 2x2 matrix") {
    CHECK(min_eigenvalue_sym2(2, 0, 3) == doctest::Approx(2.0));
    CHECK(min_eigenvalue_sym2(2, 1, 2) == doctest::Approx(1.0));
    // nearly singular, where the naive formula cancels
    CHECK(min_eigenvalue_sym2(1e8, 1e4, 1.0 + 1e-8) == doctest::Approx(1e-8 * 1e8 / (1e8 + 1)).epsilon(1e-6));
}

TEST_CASE("rng substreams are reproducible and distinct") {
    Rng a(1, 2), b(1, 2), c(1, 3);
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x != c.uniform());
    Rng d(5);
    for (int i = 0; i < 1000; ++i) {
        const double u = d.uniform();
        CHECK((u >= 0.0 && u < 1.0));
    }
}

}
