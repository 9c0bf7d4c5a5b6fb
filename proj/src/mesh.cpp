#include "umbra/mesh.hpp"

#include <cmath>
#include <unordered_map>

#include "umbra/types.hpp"

namespace umbra {

namespace {

Icosphere base_icosahedron() {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    Icosphere s;
    const double raw[12][3] = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                               {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                               {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
    s.vertices.reserve(12);
    for (auto& v : raw) s.vertices.push_back(Vec3{v[0], v[1], v[2]}.normalized());
    s.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                   {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                   {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                   {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    return s;
}

}  // namespace

Icosphere make_icosphere(int level) {
    if (level < 0 || level > 9) throw OutOfDomain("icosphere level must be in [0, 9]");
    Icosphere s = base_icosahedron();
    for (int l = 0; l < level; ++l) {
        std::unordered_map<std::uint64_t, std::uint32_t> midpoint;
        midpoint.reserve(s.vertices.size() * 3);
        auto mid = [&](std::uint32_t a, std::uint32_t b) -> std::uint32_t {
            std::uint64_t key = a < b ? (std::uint64_t(a) << 32) | b : (std::uint64_t(b) << 32) | a;
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            Vec3 m = (s.vertices[a] + s.vertices[b]).normalized();
            std::uint32_t idx = static_cast<std::uint32_t>(s.vertices.size());
            s.vertices.push_back(m);
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<std::uint32_t, 3>> next;
        next.reserve(s.triangles.size() * 4);
        for (auto& t : s.triangles) {
            std::uint32_t ab = mid(t[0], t[1]);
            std::uint32_t bc = mid(t[1], t[2]);
            std::uint32_t ca = mid(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({t[1], bc, ab});
            next.push_back({t[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        s.triangles = std::move(next);
    }
    return s;
}

double Icosphere::covering_radius() const {
    double worst = 0.0;
    for (auto& t : triangles) {
        const Vec3& a = vertices[t[0]];
        const Vec3& b = vertices[t[1]];
        const Vec3& c = vertices[t[2]];
        Vec3 n = (b - a).cross(c - a);
        double nn = n.norm();
        if (nn == 0.0) continue;
        Vec3 w = n / nn;
        if (w.dot(a) < 0.0) w = -w;
        double r = unit_angle(w, a);
        if (r > worst) worst = r;
    }
    return worst;
}

}  // namespace umbra
