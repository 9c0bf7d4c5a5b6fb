#include "umbra/tangent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace umbra {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

TangentPair::TangentPair(double a, double b) {
    if (!(a > 0.0 && a <= 1.0 && b > 0.0 && b <= 1.0))
        throw OutOfDomain("TangentPair: radii must lie in (0, 1]");
    r1 = std::max(a, b);
    r2 = std::min(a, b);
}

std::pair<double, double> second_center(const TangentPair& p) {
    double s = p.r1 + p.r2;
    double b3 = 1.0 - 0.5 * s * s;
    double b2 = std::sqrt(std::max(0.0, 1.0 - b3 * b3));
    return {b2, b3};
}

TangentSolution common_tangent_direction(const TangentPair& p) {
    TangentSolution s;
    auto [b2, b3] = second_center(p);
    s.b2 = b2;
    s.b3 = b3;
    double c1 = std::sqrt(1.0 - p.r1 * p.r1);
    double c2 = std::sqrt(1.0 - p.r2 * p.r2);
    s.x3 = c1;
    if (b2 <= 0.0) throw NoCommonTangent("tangent balls are antipodal, cones coincide");
    s.x2 = (c2 - b3 * c1) / b2;
    // x1^2 = r1^2 - x2^2 factors as (c1 - c2)^2 (r1 r2 - b3 + c1 c2) / (2 b2^2),
    // which evaluates without cancellation: the first factor is written with
    // the difference of squares and vanishes exactly for equal radii.
    double diff = (c1 + c2) > 0.0 ? (p.r2 * p.r2 - p.r1 * p.r1) / (c1 + c2) : 0.0;
    double second = p.r1 * p.r2 - b3 + c1 * c2;
    if (second < 0.0) throw NoCommonTangent("cones share no tangent line through the center");
    s.x1 = std::fabs(diff) * std::sqrt(second / (2.0 * b2 * b2));
    if (s.x2 > 0.0) {
        s.ratio = s.x1 / s.x2;
        s.phi = 2.0 * std::atan(s.ratio);
    } else {
        s.ratio = std::numeric_limits<double>::infinity();
        s.phi = kPi;
    }
    return s;
}

double projection_angle(const TangentSolution& s) {
    if (!(s.x2 > 0.0)) throw NonPositiveX2("projection angle needs x2 > 0");
    return 2.0 * std::atan(s.x1 / s.x2);
}

namespace {

/// ratio at a grid point, or a negative sentinel when the point is invalid.
double ratio_at(double r1, double r2, long& skipped) {
    try {
        TangentPair p(r1, r2);
        TangentSolution s = common_tangent_direction(p);
        if (!(s.x2 > 0.0)) {
            ++skipped;
            return -1.0;
        }
        return s.ratio;
    } catch (const NoCommonTangent&) {
        ++skipped;
        return -1.0;
    }
}

}  // namespace

RatioScan max_projection_ratio(int gridN, int refineIters) {
    if (gridN < 16) throw OutOfDomain("max_projection_ratio: gridN must be >= 16");
    RatioScan out;
    double lo = 0.5 / gridN, hi = 1.0 - 0.5 / gridN;

    auto scan_window = [&](double c1, double c2, double halfWidth) {
        for (int i = 0; i < gridN; ++i) {
            for (int j = 0; j < gridN; ++j) {
                double r1 = c1 - halfWidth + 2.0 * halfWidth * i / (gridN - 1);
                double r2 = c2 - halfWidth + 2.0 * halfWidth * j / (gridN - 1);
                if (!(r1 > 0.0 && r1 < 1.0 && r2 > 0.0 && r2 < 1.0)) continue;
                double v = ratio_at(r1, r2, out.skippedNoTangent);
                if (v < 0.0) continue;
                ++out.evaluated;
                if (v >= 1.0) out.allBelowOne = false;
                if (v > out.maxRatio ||
                    (v == out.maxRatio && (r1 < out.argR1 || (r1 == out.argR1 && r2 < out.argR2)))) {
                    out.maxRatio = v;
                    out.argR1 = r1;
                    out.argR2 = r2;
                }
            }
        }
    };

    scan_window(0.5 * (lo + hi), 0.5 * (lo + hi), 0.5 * (hi - lo));
    double w = (hi - lo) / (gridN - 1);
    for (int it = 0; it < refineIters; ++it) {
        scan_window(out.argR1, out.argR2, w);
        w *= 0.1;
    }
    return out;
}

double equator_arc_width(double theta) {
    if (!(theta > kPi / 3.0 && theta < kPi))
        throw OutOfDomain("equator_arc_width: theta must lie in (pi/3, pi)");
    // Second ball tangent to the open unit ball at the pole: its radius is
    // r = 2 sin(theta/2) - 1. The covered fraction depends on
    // k = sqrt(1 - r^2)/sin(theta), rewritten through half-angle identities so
    // nothing cancels as theta approaches pi:
    //   k = sqrt(2 / sin(theta/2)) / (2 cos((pi - theta)/4))
    double k = std::sqrt(2.0 / std::sin(0.5 * theta)) / (2.0 * std::cos(0.25 * (kPi - theta)));
    if (k >= 1.0) return 0.0;
    return kPi - 2.0 * std::asin(k);
}

double equator_arc_limit() {
    // k -> 1/sqrt(2) as theta -> pi, so the width tends to pi - 2 asin(1/sqrt2).
    return kPi - 2.0 * std::asin(1.0 / std::sqrt(2.0));
}

}  // namespace umbra
