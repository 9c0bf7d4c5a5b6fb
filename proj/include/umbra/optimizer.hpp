#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "umbra/types.hpp"
#include "umbra/verifier.hpp"

namespace umbra {

/// Parameters of the three-ball family on the ellipsoid with d = z:
/// r1 = x at (0,0,1), r2 = y tangent to the first ball, r3 = sqrt(z^2+1) - 1
/// at the apex (z,0,0).
struct FamilyParams {
    double x = 0.0, y = 0.0, z = 0.0;

    FamilyParams(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {
        if (!(x > 0.0 && x <= 1.0 && y > 0.0 && y <= 1.0 && z > 0.0))
            throw OutOfDomain("FamilyParams: need x, y in (0,1] and z > 0");
    }
};

SceneConfig family_config(const FamilyParams& p,
                          HitSemantics sem = HitSemantics::Closed);

enum class ViolationKind { Surface, Overlap, CenterExclusion };

const char* to_string(ViolationKind k);

struct Violation {
    ViolationKind kind;
    int ballA = -1;
    int ballB = -1;    // second ball for Overlap, else -1
    double amount = 0; // positive magnitude of the violation
};

/// Empty result iff centers on the surface (1e-9), pairwise non-overlapping
/// (slack >= -1e-12) and no ball holds the center under the scene semantics.
std::vector<Violation> feasibility_check(const SceneConfig& cfg);

struct MarginOptions {
    int starts = 32;
    int iters = 220;
    std::uint64_t seed = 0;
};

/// Minimax shadow margin of the scene; >= 0 means shadow under Closed
/// semantics. Exact critical enumeration for three balls, search otherwise.
double shadow_margin(const SceneConfig& cfg, const MarginOptions& opts = {});

struct SearchOptions {
    double dLow = 2.0;
    double dHigh = 4.0;
    double dTol = 0.02;
    int multistarts = 64;
    std::uint64_t seed = 0;
    int innerIters = 500;
};

struct BestConfig {
    SceneConfig scene;
    double margin = 0.0;            // minimax shadow margin of scene
    double worstPatternNorm = 0.0;  // certificate value; shadow iff <= 1
    bool feasible = false;          // feasibility_check empty
    bool shadow = false;            // feasible and margin >= 0
};

/// Derivative-free inner search: maximizes the shadow margin over ball
/// positions (two surface angles each) and radii subject to feasibility via
/// exact penalty, from structured warm starts plus seeded random multistarts.
/// Extra scenes are used as additional warm starts after projection onto the
/// d-ellipsoid.
BestConfig best_config_for_d(double d, const SearchOptions& opts,
                             const std::vector<SceneConfig>& warmScenes = {});

struct OptimizationResult {
    double dEstimate = 0.0;
    SceneConfig bestScene;
    double marginAtBest = 0.0;
    std::vector<std::pair<double, double>> history;  // (d, margin) per probe
};

/// Bisection on d with predicate "best_config_for_d(d) attains shadow".
/// Throws BadBracket unless dLow is infeasible and dHigh feasible.
OptimizationResult min_axis_ratio(const SearchOptions& opts);

}  // namespace umbra
