#pragma once

#include "umbra/types.hpp"

namespace umbra {

/// Result of a line/ball hit test. The raw margin is exposed so callers that
/// need robustness can work with the number instead of the boolean.
struct HitEval {
    bool hit = false;
    double margin = 0.0;     // (c.u)^2 - (|c|^2 - r^2) for the unit direction u
    bool renormalized = false;
};

/// Tangent cone under a ball seen from the origin.
/// Throws BallContainsCenter when radius >= |center|.
ShadowCone cone_under_ball(const Ball& b);

/// Half-angle of the cone under a ball, in (0, pi/2).
/// The line with unit direction u meets the ball (closed) iff the geodesic
/// angle between u and the nearer of +-axis is at most this value.
double cap_angular_radius(const Ball& b);

/// Margin and hit decision for the full line {t u} against a ball.
/// u must be unit within kUnitTol (NotUnit otherwise); it is renormalized
/// before evaluation and the flag records whether that changed anything.
HitEval line_hit_eval(const Vec3& u, const Ball& b, HitSemantics sem);

bool line_hits_ball(const Vec3& u, const Ball& b, HitSemantics sem);

/// Same for the image of a ball under an invertible map.
HitEval mapped_hit_eval(const Vec3& u, const MappedBall& mb, HitSemantics sem);

bool line_hits_mapped_ball(const Vec3& u, const MappedBall& mb, HitSemantics sem);

/// Margin without the unit-tolerance gate, for internal hot loops.
/// u must already be unit.
inline double raw_margin(const Vec3& u, const Ball& b) {
    double d = b.center.dot(u);
    return d * d - b.tangent2();
}

inline bool margin_hits(double margin, HitSemantics sem) {
    return sem == HitSemantics::Closed ? margin >= -kPredicateTol : margin > kPredicateTol;
}

}  // namespace umbra
