#include <doctest.h>

#include <cmath>

#include "umbra/mesh.hpp"
#include "umbra/types.hpp"

using namespace umbra;

TEST_CASE("icosphere counts and unit vertices") {
    for (int level = 0; level <= 4; ++level) {
        Icosphere s = make_icosphere(level);
        std::size_t expectTris = 20u << (2 * level);
        CHECK(s.triangles.size() == expectTris);
        CHECK(s.vertices.size() == 10u * (1u << (2 * level)) + 2u);
        for (const Vec3& v : s.vertices) CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(make_icosphere(-1), OutOfDomain);
    CHECK_THROWS_AS(make_icosphere(10), OutOfDomain);
}

TEST_CASE("covering radius of the icosahedron matches the face circumradius") {
    // circumradius of a face seen from the center: acos(sqrt((5 + 2 sqrt 5)/15))
    double expected = std::acos(std::sqrt((5.0 + 2.0 * std::sqrt(5.0)) / 15.0));
    CHECK(make_icosphere(0).covering_radius() == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("covering radius roughly halves per level") {
    double prev = make_icosphere(0).covering_radius();
    for (int level = 1; level <= 5; ++level) {
        double h = make_icosphere(level).covering_radius();
        CHECK(h < prev);
        CHECK(h > 0.4 * prev);
        CHECK(h < 0.6 * prev);
        prev = h;
    }
}

TEST_CASE("subdivision keeps coarse vertices") {
    Icosphere coarse = make_icosphere(2);
    Icosphere fine = make_icosphere(3);
    for (std::size_t i = 0; i < coarse.vertices.size(); ++i) {
        CHECK((coarse.vertices[i] - fine.vertices[i]).norm() == doctest::Approx(0.0));
    }
}
