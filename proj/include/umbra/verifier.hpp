#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "umbra/geometry.hpp"
#include "umbra/types.hpp"

namespace umbra {

/// One of the 8 nappe selections (+-1 per ball).
struct SignPattern {
    std::array<int, 3> s{1, 1, 1};

    static std::array<SignPattern, 8> all();
    SignPattern negated() const { return {{-s[0], -s[1], -s[2]}}; }
};

enum class ConeClass { TangentLine, CommonRay, TrivialIntersection, Singular };

const char* to_string(ConeClass c);

struct ConeSystemSolution {
    SignPattern pattern;
    Vec3 x;
    double normX = 0.0;
    ConeClass cls = ConeClass::Singular;
};

/// Solves (a_i, x) = s_i sqrt(|a_i|^2 - r_i^2) for exactly three balls and
/// classifies by |x| against 1 (tolerance kClassifyTol).
/// Throws SingularSystem when |det| <= 1e-12 * |a_1||a_2||a_3| and
/// BallContainsCenter when some radius >= |center|.
ConeSystemSolution solve_sign_system(const std::vector<Ball>& balls, const SignPattern& s);

/// True iff every sign pattern yields normX <= 1 + kClassifyTol. True
/// certifies shadow under Closed semantics.
bool cone_cover_certificate(const std::vector<Ball>& balls);

/// Max over the 8 patterns of |x_s|; the certificate is exactly this <= 1.
double worst_pattern_norm(const std::vector<Ball>& balls);

struct SampleStats {
    double fractionCovered = 0.0;
    double minMargin = 0.0;
    Vec3 argminDirection;
    std::int64_t covered = 0;
    std::int64_t total = 0;
};

/// Evaluates n directions of a Fibonacci sphere lattice (azimuth phase keyed
/// by seed) against the scene. Deterministic for fixed (cfg, n, seed)
/// regardless of thread count.
SampleStats sample_coverage(const SceneConfig& cfg, std::int64_t n, std::uint64_t seed);

struct Witness {
    Vec3 direction;
    std::vector<double> margins;  // per ball, all misses under the scene semantics
    double worst = 0.0;           // max of margins
};

/// Multistart minimax descent for a direction missing every ball. Starts on a
/// Fibonacci lattice (seeded) plus structural candidates; a located minimum is
/// accepted only after exact re-verification against line_hits_ball.
std::optional<Witness> find_missing_line(const SceneConfig& cfg, int starts, int iters,
                                         std::uint64_t seed);

struct MeshCoverReport {
    bool certified = false;
    int level = 0;
    double coveringRadius = 0.0;
    double minSlack = 0.0;
    Vec3 argminVertex;
};

/// Icosphere cap-covering certificate: true when every vertex has angular
/// slack at least the mesh covering radius, which certifies shadow for Closed
/// semantics because geodesic distance is 1-Lipschitz on the sphere.
MeshCoverReport mesh_cover_report(const SceneConfig& cfg, int level);

bool certified_cover_mesh(const SceneConfig& cfg, int level);

struct MinimaxResult {
    double value = 0.0;  // min over directions of max over balls of the margin
    Vec3 direction;
};

/// Minimax margin of the scene. For three balls with well-posed cones this
/// enumerates all critical classes of max-margin (pattern tie roots, pairwise
/// span circles, per-ball perpendicular circles, axis directions) and is
/// accurate to roundoff; otherwise it falls back to lattice scan plus
/// smoothed multistart descent.
MinimaxResult minimax_margin(const SceneConfig& cfg, int starts = 32, int iters = 220,
                             std::uint64_t seed = 0);

enum class VerdictKind { CertifiedShadow, CertifiedNoShadow, Undecided };

const char* to_string(VerdictKind k);

struct Verdict {
    VerdictKind kind = VerdictKind::Undecided;
    std::string method;  // for CertifiedShadow: "sign-pattern", "mesh", "center-holding-ball"
    std::optional<Witness> witness;
    double bestMargin = 0.0;
    Vec3 bestDirection;
    int meshLevel = -1;  // level that certified, when method == "mesh"
};

struct VerifyOptions {
    int maxMeshLevel = 7;
    int witnessStarts = 48;
    int witnessIters = 220;
    std::uint64_t seed = 0;
};

/// Decision pipeline: sign-pattern certificate (3 balls, Closed), then the
/// mesh certificate with increasing level, then the witness search, else
/// Undecided with the best margin found.
Verdict verify(const SceneConfig& cfg, const VerifyOptions& opts = {});

/// Fibonacci lattice direction i of n with an azimuth phase.
Vec3 fibonacci_direction(std::int64_t i, std::int64_t n, double phase);

/// Verdict for the image of a scene under an invertible map (the balls become
/// ellipsoids). Runs the same machinery in image space: the mesh certificate
/// carries the map's sphere-distortion factor, and witnesses are re-verified
/// through line_hits_mapped_ball.
Verdict verify_mapped(const SceneConfig& base, const LinearMap& map,
                      const VerifyOptions& opts = {});

}  // namespace umbra
