#pragma once

#include <cstdint>
#include <vector>

#include "umbra/vec.hpp"

namespace umbra {

/// Geodesic sphere from icosahedron midpoint subdivision. Vertices are unit;
/// subdividing keeps all coarser vertices, so a vertex-level witness persists
/// at finer levels.
struct Icosphere {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;

    /// Max over triangles of the spherical circumradius. Every point of the
    /// sphere is within this angle of some vertex, so it bounds the covering
    /// radius from above.
    double covering_radius() const;
};

/// level 0 is the icosahedron; each level quadruples the triangle count.
Icosphere make_icosphere(int level);

}  // namespace umbra
