#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "umbra/vec.hpp"

namespace umbra {

// Tolerances used across the library. Exact predicates compare margins
// against zero with kPredicateTol; unit-vector inputs may deviate by kUnitTol
// and are renormalized; classifications against 1 use kClassifyTol.
inline constexpr double kPredicateTol = 1e-12;
inline constexpr double kUnitTol = 1e-9;
inline constexpr double kClassifyTol = 1e-9;
inline constexpr double kDetTol = 1e-12;
inline constexpr double kCondLimit = 1e12;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BallContainsCenter : Error { using Error::Error; };
struct NotUnit : Error { using Error::Error; };
struct SingularMap : Error { using Error::Error; };
struct SingularSystem : Error { using Error::Error; };
struct NoCommonTangent : Error { using Error::Error; };
struct NonPositiveX2 : Error { using Error::Error; };
struct OutOfDomain : Error { using Error::Error; };
struct EmptyScene : Error { using Error::Error; };
struct BadBracket : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

enum class HitSemantics { Closed, Open };

inline const char* to_string(HitSemantics s) {
    return s == HitSemantics::Closed ? "closed" : "open";
}

/// Obstacle ball: center off the origin, positive radius.
struct Ball {
    Vec3 center;
    double radius = 0.0;

    Ball() = default;
    Ball(const Vec3& c, double r) : center(c), radius(r) {
        if (!(r > 0.0) || !std::isfinite(r) || !c.finite())
            throw OutOfDomain("Ball: radius must be positive and finite");
        if (c.norm2() == 0.0) throw OutOfDomain("Ball: center must not be the origin");
    }

    /// Squared tangent length |c|^2 - r^2; negative when the ball holds the origin.
    double tangent2() const { return center.norm2() - radius * radius; }
};

/// Prolate ellipsoid |Mx| = 1 with M = diag(1/d, 1, 1), unit minor axis.
struct EllipsoidMetric {
    double d = 1.0;

    EllipsoidMetric() = default;
    explicit EllipsoidMetric(double d_) : d(d_) {
        if (!(d >= 1.0) || !std::isfinite(d))
            throw OutOfDomain("EllipsoidMetric: axis ratio d must be >= 1");
    }

    Mat3 matrix() const { return Mat3::diagonal(1.0 / d, 1.0, 1.0); }
    double metric_norm(const Vec3& p) const {
        Vec3 q{p.x / d, p.y, p.z};
        return q.norm();
    }
    /// Point at surface angles: (d cos(theta), sin(theta) cos(psi), sin(theta) sin(psi)).
    Vec3 surface_point(double theta, double psi) const {
        double st = std::sin(theta);
        return {d * std::cos(theta), st * std::cos(psi), st * std::sin(psi)};
    }
};

/// Double cone of directions whose lines meet a ball, stored as axis + cos of half-angle.
struct ShadowCone {
    Vec3 axis;       // unit
    double cosHalf;  // in [0, 1)
};

struct LinearMap {
    Mat3 forward;
    Mat3 inverse;
    double det = 1.0;

    LinearMap() : forward(Mat3::identity()), inverse(Mat3::identity()) {}
    explicit LinearMap(const Mat3& m) : forward(m) {
        det = m.det();
        if (std::fabs(det) <= kDetTol) throw SingularMap("LinearMap: |det| below tolerance");
        inverse = m.inverse();
        // Frobenius-norm condition estimate; rejects numerically useless maps.
        if (forward.frobenius() * inverse.frobenius() > kCondLimit)
            throw SingularMap("LinearMap: condition number above 1e12");
    }
};

/// Image of a ball under a linear map: { y : |map^-1 y - center| <= radius }.
struct MappedBall {
    Ball ball;
    LinearMap map;
};

/// Scene to verify: ellipsoid, balls, hit semantics.
struct SceneConfig {
    EllipsoidMetric ellipsoid;
    std::vector<Ball> balls;
    HitSemantics semantics = HitSemantics::Closed;
};

}  // namespace umbra
