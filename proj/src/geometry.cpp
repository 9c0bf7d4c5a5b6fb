#include "umbra/geometry.hpp"

#include <cmath>

namespace umbra {

namespace {

Vec3 checked_unit(const Vec3& u, bool& renormalized) {
    double n = u.norm();
    if (std::fabs(n - 1.0) > kUnitTol) throw NotUnit("direction is not unit length");
    renormalized = n != 1.0;
    return renormalized ? u / n : u;
}

}  // namespace

ShadowCone cone_under_ball(const Ball& b) {
    double t2 = b.tangent2();
    if (t2 <= 0.0)
        throw BallContainsCenter("cone undefined: radius >= |center|");
    double n = b.center.norm();
    return ShadowCone{b.center / n, std::sqrt(t2) / n};
}

double cap_angular_radius(const Ball& b) {
    if (b.tangent2() <= 0.0)
        throw BallContainsCenter("cap undefined: radius >= |center|");
    // asin(r/|c|) equals acos(sqrt(|c|^2-r^2)/|c|) and is better conditioned
    // for small radii.
    return std::asin(b.radius / b.center.norm());
}

HitEval line_hit_eval(const Vec3& u, const Ball& b, HitSemantics sem) {
    HitEval e;
    Vec3 w = checked_unit(u, e.renormalized);
    e.margin = raw_margin(w, b);
    e.hit = margin_hits(e.margin, sem);
    return e;
}

bool line_hits_ball(const Vec3& u, const Ball& b, HitSemantics sem) {
    return line_hit_eval(u, b, sem).hit;
}

HitEval mapped_hit_eval(const Vec3& u, const MappedBall& mb, HitSemantics sem) {
    HitEval e;
    Vec3 v = checked_unit(u, e.renormalized);
    // Line {t u} meets map(B) iff line {t map^-1 u} meets B. With w = map^-1 u
    // and q = center, min_t |t w - q|^2 = |q|^2 - (q.w)^2/|w|^2, and
    // r^2 minus that distance equals the plain ball margin at w/|w|.
    Vec3 w = mb.map.inverse * v;
    double w2 = w.norm2();
    if (w2 <= 0.0) throw SingularMap("mapped direction collapsed to zero");
    const Vec3& q = mb.ball.center;
    double qw = q.dot(w);
    e.margin = mb.ball.radius * mb.ball.radius - (q.norm2() - qw * qw / w2);
    e.hit = margin_hits(e.margin, sem);
    return e;
}

bool line_hits_mapped_ball(const Vec3& u, const MappedBall& mb, HitSemantics sem) {
    return mapped_hit_eval(u, mb, sem).hit;
}

}  // namespace umbra
