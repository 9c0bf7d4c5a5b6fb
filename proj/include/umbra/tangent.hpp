#pragma once

#include <utility>

#include "umbra/types.hpp"

namespace umbra {

/// Two tangent balls on the unit sphere, radii in (0,1). The pair is
/// geometrically unordered; construction normalizes to r1 >= r2 (the ball at
/// the pole is the larger one), which is the labeling under which the
/// projection-angle bound is sharp.
struct TangentPair {
    double r1 = 0.0, r2 = 0.0;

    TangentPair(double a, double b);
};

/// Common tangent direction of the two cones, first ball at (0,0,1), second
/// at (0, b2, b3). Only the x1 >= 0 representative of the mirror pair is kept.
struct TangentSolution {
    double b2 = 0.0, b3 = 0.0;
    double x1 = 0.0, x2 = 0.0, x3 = 0.0;
    double ratio = 0.0;  // x1 / x2
    double phi = 0.0;    // 2 atan(ratio)
};

/// Center of the second ball: b3 = 1 - (r1+r2)^2/2, b2 = sqrt(1 - b3^2).
std::pair<double, double> second_center(const TangentPair& p);

/// Solves for the tangent-point direction X with x.a = sqrt(1-r1^2) and
/// x.b = sqrt(1-r2^2). Throws NoCommonTangent when r1^2 < x2^2 (the cones
/// are disjoint or nested and share no tangent line through the center).
TangentSolution common_tangent_direction(const TangentPair& p);

/// phi = 2 atan(x1/x2). Throws NonPositiveX2 when x2 <= 0.
double projection_angle(const TangentSolution& s);

struct RatioScan {
    double maxRatio = 0.0;
    double argR1 = 0.0, argR2 = 0.0;
    long evaluated = 0;
    long skippedNoTangent = 0;  // NoCommonTangent or x2 <= 0 cells
    bool allBelowOne = true;    // every valid evaluated point had ratio < 1
};

/// Deterministic grid scan of x1/x2 over the open square, skipping invalid
/// cells, followed by iterated local refinement around the best cell
/// (shrink factor 0.1). Ties break toward the lexicographically smallest
/// (r1, r2), so the result does not depend on evaluation order.
RatioScan max_projection_ratio(int gridN, int refineIters);

/// Angular measure of equatorial line directions covered by a ball tangent to
/// the open unit ball at the north pole, with center at polar angle theta.
/// Defined on (pi/3, pi); the limit theta -> pi equals pi/2.
double equator_arc_width(double theta);

/// The analytic limit of equator_arc_width at theta -> pi.
double equator_arc_limit();

}  // namespace umbra
