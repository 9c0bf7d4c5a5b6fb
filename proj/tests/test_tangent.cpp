#include <doctest.h>

#include <cmath>

#include "umbra/tangent.hpp"

using namespace umbra;

namespace {
constexpr double kPi = 3.14159265358979323846;

// Oracle for the tangent solution: residuals of the two defining dot products.
void check_residuals(const TangentPair& p, const TangentSolution& s) {
    double resA = s.x3 - std::sqrt(1.0 - p.r1 * p.r1);
    double resB = s.b2 * s.x2 + s.b3 * s.x3 - std::sqrt(1.0 - p.r2 * p.r2);
    double unit = s.x1 * s.x1 + s.x2 * s.x2 + s.x3 * s.x3 - 1.0;
    CHECK(std::fabs(resA) <= 1e-9);
    CHECK(std::fabs(resB) <= 1e-9);
    CHECK(std::fabs(unit) <= 1e-9);
    CHECK(s.x1 >= 0.0);
    CHECK(std::fabs(s.b2 * s.b2 + s.b3 * s.b3 - 1.0) <= 1e-9);
}
}  // namespace

TEST_CASE("second center") {
    auto [b2, b3] = second_center(TangentPair(0.5, 0.5));
    CHECK(b3 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(b2 == doctest::Approx(std::sqrt(0.75)).epsilon(1e-12));

    auto [c2, c3] = second_center(TangentPair(1.0, 1.0));
    CHECK(c3 == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(c2 == doctest::Approx(0.0).epsilon(1e-12));

    auto [d2, d3] = second_center(TangentPair(0.8, 0.5));
    CHECK(d3 == doctest::Approx(0.155).epsilon(1e-12));
    CHECK(d2 == doctest::Approx(0.98791).epsilon(1e-5));
}

TEST_CASE("common tangent direction: pinned examples") {
    TangentSolution even = common_tangent_direction(TangentPair(0.6, 0.6));
    CHECK(even.x1 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(even.x2 == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(even.x3 == doctest::Approx(0.8).epsilon(1e-12));

    TangentPair p(0.8, 0.5);
    TangentSolution s = common_tangent_direction(p);
    CHECK(s.x1 == doctest::Approx(0.16651).epsilon(1e-4));
    CHECK(s.x2 == doctest::Approx(0.78248).epsilon(1e-4));
    CHECK(s.x3 == doctest::Approx(0.6).epsilon(1e-12));
    check_residuals(p, s);

    // disjoint/contained cones share no tangent line, under either labeling
    CHECK_THROWS_AS(common_tangent_direction(TangentPair(0.05, 0.9)), NoCommonTangent);
    CHECK_THROWS_AS(common_tangent_direction(TangentPair(0.9, 0.05)), NoCommonTangent);
}

TEST_CASE("residuals hold over a parameter sweep") {
    for (int i = 1; i < 40; ++i) {
        for (int j = 1; j < 40; ++j) {
            TangentPair p(i / 40.0, j / 40.0);
            try {
                check_residuals(p, common_tangent_direction(p));
            } catch (const NoCommonTangent&) {
            }
        }
    }
}

TEST_CASE("equal radii collapse to a single tangent line") {
    for (int i = 1; i < 100; ++i) {
        double r = i / 100.0;
        CHECK(std::fabs(common_tangent_direction(TangentPair(r, r)).x1) <= 1e-9);
    }
}

TEST_CASE("projection angle") {
    TangentSolution flat;
    flat.x1 = 0.0;
    flat.x2 = 0.6;
    flat.x3 = 0.8;
    CHECK(projection_angle(flat) == doctest::Approx(0.0));

    CHECK(projection_angle(common_tangent_direction(TangentPair(0.8, 0.5))) ==
          doctest::Approx(0.4193113).epsilon(1e-6));

    TangentSolution s93 = common_tangent_direction(TangentPair(0.9, 0.3));
    double phi = projection_angle(s93);
    CHECK(phi == doctest::Approx(0.5469685).epsilon(1e-6));
    CHECK(std::tan(0.5 * phi) == doctest::Approx(s93.ratio).epsilon(1e-12));
    CHECK(phi < kPi / 2.0);
    CHECK(s93.ratio == doctest::Approx(0.28052).epsilon(1e-3));
    CHECK(std::fabs(s93.ratio - 0.28052) < 1e-4);

    TangentSolution bad;
    bad.x1 = 0.5;
    bad.x2 = 0.0;
    CHECK_THROWS_AS(projection_angle(bad), NonPositiveX2);
    bad.x2 = -0.2;
    CHECK_THROWS_AS(projection_angle(bad), NonPositiveX2);
}

TEST_CASE("ratio scan stays below one") {
    RatioScan scan = max_projection_ratio(100, 3);
    CHECK(scan.allBelowOne);
    CHECK(scan.maxRatio < 1.0);
    CHECK(scan.maxRatio >= 0.28);
    CHECK(scan.evaluated > 5000);
    CHECK(scan.skippedNoTangent > 0);

    // deterministic
    RatioScan again = max_projection_ratio(100, 3);
    CHECK(again.maxRatio == scan.maxRatio);
    CHECK(again.argR1 == scan.argR1);
    CHECK(again.argR2 == scan.argR2);

    CHECK_THROWS_AS(max_projection_ratio(8, 1), OutOfDomain);
}

TEST_CASE("equatorial arc width") {
    // residual oracle: the returned width must satisfy sin((pi - width)/2) = k
    // with r = 2 sin(theta/2) - 1 and k = sqrt(1 - r^2)/sin(theta)
    for (double theta : {1.5, 2.0, 2.0 * kPi / 3.0, 2.8, 3.0}) {
        double w = equator_arc_width(theta);
        double r = 2.0 * std::sin(0.5 * theta) - 1.0;
        double k = std::sqrt(1.0 - r * r) / std::sin(theta);
        CHECK(std::sin(0.5 * (kPi - w)) == doctest::Approx(k).epsilon(1e-12));
    }
    CHECK(equator_arc_width(2.0 * kPi / 3.0) == doctest::Approx(1.3308975).epsilon(1e-6));
    // zero-radius tangent ball just above the domain edge
    CHECK(equator_arc_width(kPi / 3.0 + 1e-9) == doctest::Approx(0.0));
    // the limit value
    CHECK(equator_arc_limit() == doctest::Approx(kPi / 2.0).epsilon(1e-15));
    CHECK(equator_arc_width(kPi - 1e-4) > kPi / 2.0 - 1e-3);
    CHECK(equator_arc_width(kPi - 1e-4) <= kPi / 2.0);

    CHECK_THROWS_AS(equator_arc_width(kPi / 3.0), OutOfDomain);
    CHECK_THROWS_AS(equator_arc_width(kPi), OutOfDomain);
    CHECK_THROWS_AS(equator_arc_width(0.1), OutOfDomain);
}

TEST_CASE("equatorial arc width is monotone") {
    double prev = -1.0;
    for (int i = 0; i < 2000; ++i) {
        double theta = kPi / 3.0 + (kPi - kPi / 3.0) * (i + 0.5) / 2000.0;
        double w = equator_arc_width(theta);
        CHECK(w >= prev - 1e-12);
        prev = w;
    }
}
