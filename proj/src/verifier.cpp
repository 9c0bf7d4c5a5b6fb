#include "umbra/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "umbra/mesh.hpp"
#include "umbra/parallel.hpp"
#include "umbra/rng.hpp"

namespace umbra {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kGoldenAngle = 2.39996322972865332223155550663361;  // pi (3 - sqrt 5)

double scene_max_margin(const Vec3& u, const std::vector<Ball>& balls) {
    double best = -std::numeric_limits<double>::infinity();
    for (const Ball& b : balls) {
        double m = raw_margin(u, b);
        if (m > best) best = m;
    }
    return best;
}

}  // namespace

Vec3 fibonacci_direction(std::int64_t i, std::int64_t n, double phase) {
    double z = 1.0 - (2.0 * i + 1.0) / static_cast<double>(n);
    double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    double th = kGoldenAngle * static_cast<double>(i) + phase;
    return {rho * std::cos(th), rho * std::sin(th), z};
}

std::array<SignPattern, 8> SignPattern::all() {
    std::array<SignPattern, 8> out;
    for (int k = 0; k < 8; ++k)
        out[k] = SignPattern{{k & 1 ? -1 : 1, k & 2 ? -1 : 1, k & 4 ? -1 : 1}};
    return out;
}

const char* to_string(ConeClass c) {
    switch (c) {
        case ConeClass::TangentLine: return "tangent-line";
        case ConeClass::CommonRay: return "common-ray";
        case ConeClass::TrivialIntersection: return "trivial-intersection";
        case ConeClass::Singular: return "singular";
    }
    return "?";
}

const char* to_string(VerdictKind k) {
    switch (k) {
        case VerdictKind::CertifiedShadow: return "certified-shadow";
        case VerdictKind::CertifiedNoShadow: return "certified-no-shadow";
        case VerdictKind::Undecided: return "undecided";
    }
    return "?";
}

namespace {

struct SignSystem {
    Mat3 centers;      // rows a_i
    Mat3 inverse;
    Vec3 q;            // sqrt(|a_i|^2 - r_i^2)
    double scale = 0;  // |a_1||a_2||a_3|
};

SignSystem build_sign_system(const std::vector<Ball>& balls) {
    if (balls.size() != 3)
        throw OutOfDomain("sign system needs exactly three balls");
    SignSystem s;
    s.centers = Mat3::from_rows(balls[0].center, balls[1].center, balls[2].center);
    s.scale = balls[0].center.norm() * balls[1].center.norm() * balls[2].center.norm();
    double det = s.centers.det();
    if (std::fabs(det) <= kDetTol * s.scale)
        throw SingularSystem("ball centers are coplanar with the origin");
    for (int i = 0; i < 3; ++i) {
        double t2 = balls[i].tangent2();
        if (t2 <= 0.0) throw BallContainsCenter("sign system needs radius < |center|");
        (i == 0 ? s.q.x : i == 1 ? s.q.y : s.q.z) = std::sqrt(t2);
    }
    s.inverse = s.centers.inverse();
    return s;
}

Vec3 pattern_solution(const SignSystem& sys, const SignPattern& p) {
    Vec3 rhs{p.s[0] * sys.q.x, p.s[1] * sys.q.y, p.s[2] * sys.q.z};
    return sys.inverse * rhs;
}

}  // namespace

ConeSystemSolution solve_sign_system(const std::vector<Ball>& balls, const SignPattern& s) {
    ConeSystemSolution out;
    out.pattern = s;
    SignSystem sys = build_sign_system(balls);
    out.x = pattern_solution(sys, s);
    out.normX = out.x.norm();
    if (std::fabs(out.normX - 1.0) <= kClassifyTol)
        out.cls = ConeClass::TangentLine;
    else if (out.normX < 1.0)
        out.cls = ConeClass::CommonRay;
    else
        out.cls = ConeClass::TrivialIntersection;
    return out;
}

double worst_pattern_norm(const std::vector<Ball>& balls) {
    SignSystem sys = build_sign_system(balls);
    double worst = 0.0;
    // Patterns come in centrally symmetric pairs with equal norms; four suffice.
    for (int k = 0; k < 4; ++k) {
        SignPattern p{{1, k & 1 ? -1 : 1, k & 2 ? -1 : 1}};
        worst = std::max(worst, pattern_solution(sys, p).norm());
    }
    return worst;
}

bool cone_cover_certificate(const std::vector<Ball>& balls) {
    return worst_pattern_norm(balls) <= 1.0 + kClassifyTol;
}

SampleStats sample_coverage(const SceneConfig& cfg, std::int64_t n, std::uint64_t seed) {
    if (cfg.balls.empty()) throw EmptyScene("sample_coverage: no balls");
    if (n < 1) throw OutOfDomain("sample_coverage: n must be >= 1");
    double phase = 0.0;
    if (seed != 0) {
        Rng rng(seed);
        phase = rng.uniform(0.0, 2.0 * kPi);
    }

    struct Partial {
        std::int64_t covered = 0;
        double minMargin = std::numeric_limits<double>::infinity();
        std::int64_t argmin = -1;
    };
    std::vector<Partial> parts(64);

    parallel_chunks(static_cast<std::size_t>(n), [&](std::size_t chunk, std::size_t b, std::size_t e) {
        Partial p;
        for (std::size_t i = b; i < e; ++i) {
            Vec3 u = fibonacci_direction(static_cast<std::int64_t>(i), n, phase);
            double m = scene_max_margin(u, cfg.balls);
            if (margin_hits(m, cfg.semantics)) ++p.covered;
            if (m < p.minMargin) {
                p.minMargin = m;
                p.argmin = static_cast<std::int64_t>(i);
            }
        }
        parts[chunk] = p;
    });

    SampleStats st;
    st.total = n;
    std::int64_t argmin = -1;
    st.minMargin = std::numeric_limits<double>::infinity();
    for (const Partial& p : parts) {
        st.covered += p.covered;
        if (p.argmin >= 0 && p.minMargin < st.minMargin) {
            st.minMargin = p.minMargin;
            argmin = p.argmin;
        }
    }
    st.fractionCovered = static_cast<double>(st.covered) / static_cast<double>(n);
    st.argminDirection = fibonacci_direction(argmin, n, phase);
    return st;
}

// ---- minimax machinery ----------------------------------------------------

namespace {

/// Minimize F along the great circle cos(phi) e + sin(phi) f; margins are even
/// in u so half a period suffices. Coarse scan, then ternary refinement of
/// every local basin.
void circle_minima(const Vec3& e, const Vec3& f, const std::vector<Ball>& balls, int coarse,
                   std::vector<MinimaxResult>& out) {
    std::vector<double> val(coarse);
    for (int k = 0; k < coarse; ++k) {
        double ph = kPi * k / coarse;
        val[k] = scene_max_margin(std::cos(ph) * e + std::sin(ph) * f, balls);
    }
    for (int k = 0; k < coarse; ++k) {
        double prev = val[(k + coarse - 1) % coarse];
        double next = val[(k + 1) % coarse];
        if (!(val[k] <= prev && val[k] <= next)) continue;
        double lo = kPi * (k - 1) / coarse, hi = kPi * (k + 1) / coarse;
        for (int it = 0; it < 90; ++it) {
            double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
            double v1 = scene_max_margin(std::cos(m1) * e + std::sin(m1) * f, balls);
            double v2 = scene_max_margin(std::cos(m2) * e + std::sin(m2) * f, balls);
            if (v1 < v2)
                hi = m2;
            else
                lo = m1;
        }
        double ph = 0.5 * (lo + hi);
        Vec3 u = std::cos(ph) * e + std::sin(ph) * f;
        out.push_back({scene_max_margin(u, balls), u});
    }
}

Vec3 any_orthogonal(const Vec3& v) {
    Vec3 h = std::fabs(v.x) < 0.9 * v.norm() ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    return v.cross(h).normalized();
}

/// Critical-class enumeration of min_u max_i margin for exactly three balls
/// with positive tangent lengths and a nonsingular center matrix.
MinimaxResult minimax_exact3(const std::vector<Ball>& balls) {
    SignSystem sys = build_sign_system(balls);
    std::vector<MinimaxResult> cands;

    // Three-way tie points: margins all equal t on |u| = 1, per sign pattern.
    double q2[3] = {sys.q.x * sys.q.x, sys.q.y * sys.q.y, sys.q.z * sys.q.z};
    double tLow = -std::min({q2[0], q2[1], q2[2]});
    for (const SignPattern& p : SignPattern::all()) {
        if (p.s[0] < 0) continue;  // central symmetry
        auto norm2_at = [&](double t) {
            Vec3 rhs{p.s[0] * std::sqrt(q2[0] + t), p.s[1] * std::sqrt(q2[1] + t),
                     p.s[2] * std::sqrt(q2[2] + t)};
            return (sys.inverse * rhs).norm2() - 1.0;
        };
        double tHi = std::max(1.0, 4.0 * std::max({q2[0], q2[1], q2[2]}));
        int guard = 0;
        while (norm2_at(tHi) < 0.0 && guard++ < 80) tHi *= 2.0;
        const int grid = 256;
        double prevT = tLow, prevV = norm2_at(tLow);
        for (int k = 1; k <= grid; ++k) {
            double t = tLow + (tHi - tLow) * k / grid;
            double v = norm2_at(t);
            if ((prevV <= 0.0 && v > 0.0) || (prevV > 0.0 && v <= 0.0)) {
                double lo = prevT, hi = t;
                for (int it = 0; it < 200; ++it) {
                    double mid = 0.5 * (lo + hi);
                    if ((norm2_at(lo) <= 0.0) == (norm2_at(mid) <= 0.0))
                        lo = mid;
                    else
                        hi = mid;
                }
                double tr = 0.5 * (lo + hi);
                Vec3 rhs{p.s[0] * std::sqrt(std::max(0.0, q2[0] + tr)),
                         p.s[1] * std::sqrt(std::max(0.0, q2[1] + tr)),
                         p.s[2] * std::sqrt(std::max(0.0, q2[2] + tr))};
                Vec3 u = (sys.inverse * rhs).normalized();
                cands.push_back({scene_max_margin(u, balls), u});
            }
            prevT = t;
            prevV = v;
        }
    }

    // Two-active critical points lie in the span of the two centers; minimize
    // the full max on each span circle. One-active minima lie on the circle
    // perpendicular to a center. Axis directions close the list.
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            Vec3 e = balls[i].center.normalized();
            Vec3 fraw = balls[j].center - balls[j].center.dot(e) * e;
            double fn = fraw.norm();
            if (fn < 1e-12) continue;
            circle_minima(e, fraw / fn, balls, 720, cands);
        }
        Vec3 e = any_orthogonal(balls[i].center);
        Vec3 f = balls[i].center.normalized().cross(e);
        circle_minima(e, f, balls, 720, cands);
        Vec3 axis = balls[i].center.normalized();
        cands.push_back({scene_max_margin(axis, balls), axis});
    }

    MinimaxResult best = cands.front();
    for (const MinimaxResult& c : cands)
        if (c.value < best.value) best = c;
    return best;
}

struct DescentSettings {
    int iters = 220;
    double tStartRel = 1e-2;
    double tEndRel = 1e-6;
};

/// Projected descent on the log-sum-exp smoothing of the max margin, with a
/// geometric temperature schedule and a final exact evaluation.
MinimaxResult lse_descent(Vec3 u, const std::vector<Ball>& balls, const DescentSettings& ds) {
    double scale = 0.0;
    for (const Ball& b : balls) scale = std::max(scale, b.center.norm2());
    double step = 0.25;
    for (int k = 0; k < ds.iters; ++k) {
        double T = scale * ds.tStartRel *
                   std::pow(ds.tEndRel / ds.tStartRel, static_cast<double>(k) / (ds.iters - 1));
        double mx = -std::numeric_limits<double>::infinity();
        for (const Ball& b : balls) mx = std::max(mx, raw_margin(u, b));
        Vec3 grad{0, 0, 0};
        double wsum = 0.0;
        for (const Ball& b : balls) {
            double w = std::exp((raw_margin(u, b) - mx) / T);
            grad = grad + w * (2.0 * b.center.dot(u)) * b.center;
            wsum += w;
        }
        grad = grad / wsum;
        Vec3 g = grad - grad.dot(u) * u;  // tangent projection
        double gn = g.norm();
        if (gn < 1e-16 * scale) break;
        double f0 = T * std::log(wsum) + mx;
        bool moved = false;
        for (int ls = 0; ls < 20; ++ls) {
            Vec3 v = (u - (step / gn) * g).normalized();
            double mv = -std::numeric_limits<double>::infinity();
            for (const Ball& b : balls) mv = std::max(mv, raw_margin(v, b));
            double sv = 0.0;
            for (const Ball& b : balls) sv += std::exp((raw_margin(v, b) - mv) / T);
            double fv = T * std::log(sv) + mv;
            if (fv < f0) {
                u = v;
                step = std::min(0.5, step * 1.6);
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved && step < 1e-14) break;
    }
    return {scene_max_margin(u, balls), u};
}

MinimaxResult minimax_search(const std::vector<Ball>& balls, int starts, int iters,
                             std::uint64_t seed) {
    double phase = 0.0;
    if (seed != 0) {
        Rng rng(seed);
        phase = rng.uniform(0.0, 2.0 * kPi);
    }
    std::vector<Vec3> seedsv;
    seedsv.reserve(starts + 16);
    for (int i = 0; i < starts; ++i) seedsv.push_back(fibonacci_direction(i, starts, phase));
    // Structural candidates: pattern directions and circle minima.
    if (balls.size() == 3) {
        try {
            SignSystem sys = build_sign_system(balls);
            for (const SignPattern& p : SignPattern::all()) {
                if (p.s[0] < 0) continue;
                Vec3 x = pattern_solution(sys, p);
                double n = x.norm();
                if (n > 1e-12) seedsv.push_back(x / n);
            }
        } catch (const Error&) {
        }
    }
    std::vector<MinimaxResult> circle;
    for (std::size_t i = 0; i < balls.size(); ++i) {
        for (std::size_t j = i + 1; j < balls.size(); ++j) {
            Vec3 e = balls[i].center.normalized();
            Vec3 fraw = balls[j].center - balls[j].center.dot(e) * e;
            double fn = fraw.norm();
            if (fn > 1e-12) circle_minima(e, fraw / fn, balls, 256, circle);
        }
        Vec3 e = any_orthogonal(balls[i].center);
        Vec3 f = balls[i].center.normalized().cross(e);
        circle_minima(e, f, balls, 256, circle);
    }
    for (const MinimaxResult& c : circle) seedsv.push_back(c.direction);

    DescentSettings ds;
    ds.iters = iters;
    std::vector<MinimaxResult> results(seedsv.size());
    parallel_chunks(seedsv.size(), [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) results[i] = lse_descent(seedsv[i], balls, ds);
    });
    MinimaxResult best = results.front();
    for (const MinimaxResult& r : results)
        if (r.value < best.value) best = r;
    return best;
}

bool exact3_applicable(const std::vector<Ball>& balls) {
    if (balls.size() != 3) return false;
    for (const Ball& b : balls)
        if (b.tangent2() <= 0.0) return false;
    Mat3 A = Mat3::from_rows(balls[0].center, balls[1].center, balls[2].center);
    double scale = balls[0].center.norm() * balls[1].center.norm() * balls[2].center.norm();
    return std::fabs(A.det()) > kDetTol * scale;
}

}  // namespace

MinimaxResult minimax_margin(const SceneConfig& cfg, int starts, int iters, std::uint64_t seed) {
    if (cfg.balls.empty()) throw EmptyScene("minimax_margin: no balls");
    if (exact3_applicable(cfg.balls)) return minimax_exact3(cfg.balls);
    return minimax_search(cfg.balls, starts, iters, seed);
}

std::optional<Witness> find_missing_line(const SceneConfig& cfg, int starts, int iters,
                                         std::uint64_t seed) {
    if (cfg.balls.empty()) throw EmptyScene("find_missing_line: no balls");
    if (starts < 1) throw OutOfDomain("find_missing_line: starts must be >= 1");
    MinimaxResult m = minimax_margin(cfg, starts, iters, seed);
    bool accept = cfg.semantics == HitSemantics::Closed ? m.value < -1e-10
                                                        : m.value <= kPredicateTol;
    if (!accept) return std::nullopt;
    Witness w;
    w.direction = m.direction.normalized();
    w.worst = -std::numeric_limits<double>::infinity();
    for (const Ball& b : cfg.balls) {
        HitEval e = line_hit_eval(w.direction, b, cfg.semantics);
        if (e.hit) return std::nullopt;  // exact re-verification failed
        w.margins.push_back(e.margin);
        w.worst = std::max(w.worst, e.margin);
    }
    return w;
}

MeshCoverReport mesh_cover_report(const SceneConfig& cfg, int level) {
    if (cfg.balls.empty()) throw EmptyScene("certified_cover_mesh: no balls");
    if (level < 0) throw OutOfDomain("certified_cover_mesh: level must be >= 0");
    Icosphere sphere = make_icosphere(level);

    MeshCoverReport rep;
    rep.level = level;
    rep.coveringRadius = sphere.covering_radius();

    struct CapAxis {
        Vec3 axis;
        double alpha;
    };
    std::vector<CapAxis> caps;
    caps.reserve(cfg.balls.size());
    for (const Ball& b : cfg.balls) {
        double n = b.center.norm();
        double ratio = std::min(1.0, b.radius / n);
        caps.push_back({b.center / n, std::asin(ratio)});
    }

    struct Partial {
        double minSlack = std::numeric_limits<double>::infinity();
        std::size_t argmin = 0;
    };
    std::vector<Partial> parts(64);
    parallel_chunks(sphere.vertices.size(), [&](std::size_t chunk, std::size_t b, std::size_t e) {
        Partial p;
        for (std::size_t i = b; i < e; ++i) {
            double slack = -std::numeric_limits<double>::infinity();
            for (const CapAxis& c : caps)
                slack = std::max(slack, c.alpha - axis_angle(sphere.vertices[i], c.axis));
            if (slack < p.minSlack) {
                p.minSlack = slack;
                p.argmin = i;
            }
        }
        parts[chunk] = p;
    });
    rep.minSlack = std::numeric_limits<double>::infinity();
    std::size_t argmin = 0;
    for (const Partial& p : parts) {
        if (p.minSlack < rep.minSlack) {
            rep.minSlack = p.minSlack;
            argmin = p.argmin;
        }
    }
    rep.argminVertex = sphere.vertices[argmin];
    rep.certified = rep.minSlack >= rep.coveringRadius;
    return rep;
}

bool certified_cover_mesh(const SceneConfig& cfg, int level) {
    return mesh_cover_report(cfg, level).certified;
}

namespace {

/// Max over balls of the mapped margin at unit image direction v; equals the
/// plain scene margin at the pulled-back direction.
double mapped_max_margin(const Vec3& v, const std::vector<Ball>& balls, const Mat3& inv) {
    Vec3 w = (inv * v).normalized();
    return scene_max_margin(w, balls);
}

/// Ratio of extreme singular values of the map, which bounds the geodesic
/// distortion of v -> normalize(map^-1 v) on the sphere. Jacobi iteration on
/// M^T M; the matrices here are tiny and well within its comfort zone.
double sphere_distortion(const Mat3& m) {
    Mat3 a = m.transposed() * m;
    for (int sweep = 0; sweep < 60; ++sweep) {
        int p = 0, q = 1;
        double off = std::fabs(a(0, 1));
        if (std::fabs(a(0, 2)) > off) { p = 0; q = 2; off = std::fabs(a(0, 2)); }
        if (std::fabs(a(1, 2)) > off) { p = 1; q = 2; off = std::fabs(a(1, 2)); }
        if (off < 1e-15 * a.frobenius()) break;
        double theta = 0.5 * std::atan2(2.0 * a(p, q), a(q, q) - a(p, p));
        double c = std::cos(theta), s = std::sin(theta);
        Mat3 g = Mat3::identity();
        g(p, p) = c; g(q, q) = c; g(p, q) = s; g(q, p) = -s;
        a = g.transposed() * a * g;
    }
    double lo = std::min({a(0, 0), a(1, 1), a(2, 2)});
    double hi = std::max({a(0, 0), a(1, 1), a(2, 2)});
    return std::sqrt(hi / std::max(lo, 1e-300));
}

}  // namespace

Verdict verify_mapped(const SceneConfig& base, const LinearMap& map, const VerifyOptions& opts) {
    if (base.balls.empty()) throw EmptyScene("verify_mapped: no balls");
    Verdict v;

    for (const Ball& b : base.balls) {
        double t2 = b.tangent2();
        bool holds = base.semantics == HitSemantics::Closed ? t2 <= 0.0 : t2 < 0.0;
        if (holds) {
            v.kind = VerdictKind::CertifiedShadow;
            v.method = "center-holding-ball";
            return v;
        }
    }

    // Cap certificate in image space: pulled-back slack must beat the mesh
    // covering radius inflated by the distortion of the pull-back map.
    double lip = sphere_distortion(map.inverse);
    std::vector<std::pair<Vec3, double>> caps;
    for (const Ball& b : base.balls) {
        double n = b.center.norm();
        caps.emplace_back(b.center / n, std::asin(std::min(1.0, b.radius / n)));
    }
    for (int level = 0; level <= opts.maxMeshLevel; ++level) {
        Icosphere sphere = make_icosphere(level);
        double h = sphere.covering_radius() * lip;
        double minSlack = std::numeric_limits<double>::infinity();
        std::vector<double> partial(64, std::numeric_limits<double>::infinity());
        parallel_chunks(sphere.vertices.size(),
                        [&](std::size_t chunk, std::size_t b, std::size_t e) {
                            double local = std::numeric_limits<double>::infinity();
                            for (std::size_t i = b; i < e; ++i) {
                                Vec3 w = (map.inverse * sphere.vertices[i]).normalized();
                                double slack = -std::numeric_limits<double>::infinity();
                                for (auto& [axis, alpha] : caps)
                                    slack = std::max(slack, alpha - axis_angle(w, axis));
                                local = std::min(local, slack);
                            }
                            partial[chunk] = local;
                        });
        for (double p : partial) minSlack = std::min(minSlack, p);
        bool ok = base.semantics == HitSemantics::Closed ? minSlack >= h : minSlack > h;
        if (ok) {
            v.kind = VerdictKind::CertifiedShadow;
            v.method = "mesh";
            v.meshLevel = level;
            return v;
        }
        if (minSlack < 0.0) break;
    }

    // Witness search in image space by projected descent on the pulled-back
    // margin, then exact re-verification through the mapped-ball predicate.
    double phase = 0.0;
    if (opts.seed != 0) {
        Rng rng(opts.seed);
        phase = rng.uniform(0.0, 2.0 * kPi);
    }
    double scale = 0.0;
    for (const Ball& b : base.balls) scale = std::max(scale, b.center.norm2());
    MinimaxResult best{std::numeric_limits<double>::infinity(), {0, 0, 1}};
    for (int s = 0; s < opts.witnessStarts; ++s) {
        Vec3 vdir = fibonacci_direction(s, opts.witnessStarts, phase);
        double step = 0.2;
        for (int k = 0; k < opts.witnessIters; ++k) {
            double T = scale * 1e-2 *
                       std::pow(1e-4, static_cast<double>(k) / (opts.witnessIters - 1));
            Vec3 w = map.inverse * vdir;
            Vec3 what = w.normalized();
            double mx = scene_max_margin(what, base.balls);
            Vec3 gw{0, 0, 0};
            double wsum = 0.0;
            for (const Ball& b : base.balls) {
                double wt = std::exp((raw_margin(what, b) - mx) / T);
                Vec3 gunit = 2.0 * b.center.dot(what) * b.center;
                gw = gw + wt * (gunit - gunit.dot(what) * what) / w.norm();
                wsum += wt;
            }
            Vec3 gv = map.inverse.transposed() * (gw / wsum);
            gv = gv - gv.dot(vdir) * vdir;
            double gn = gv.norm();
            if (gn < 1e-18) break;
            Vec3 cand = (vdir - (step / gn) * gv).normalized();
            if (mapped_max_margin(cand, base.balls, map.inverse) <
                mapped_max_margin(vdir, base.balls, map.inverse)) {
                vdir = cand;
                step = std::min(0.4, step * 1.5);
            } else {
                step *= 0.5;
                if (step < 1e-14) break;
            }
        }
        double val = mapped_max_margin(vdir, base.balls, map.inverse);
        if (val < best.value) best = {val, vdir};
    }
    bool accept = base.semantics == HitSemantics::Closed ? best.value < -1e-10
                                                         : best.value <= kPredicateTol;
    if (accept) {
        Witness w;
        w.direction = best.direction.normalized();
        w.worst = -std::numeric_limits<double>::infinity();
        bool allMiss = true;
        for (const Ball& b : base.balls) {
            HitEval e = mapped_hit_eval(w.direction, MappedBall{b, map}, base.semantics);
            if (e.hit) allMiss = false;
            w.margins.push_back(e.margin);
            w.worst = std::max(w.worst, e.margin);
        }
        if (allMiss) {
            v.kind = VerdictKind::CertifiedNoShadow;
            v.witness = std::move(w);
            v.bestMargin = v.witness->worst;
            v.bestDirection = v.witness->direction;
            return v;
        }
    }
    v.kind = VerdictKind::Undecided;
    v.bestMargin = best.value;
    v.bestDirection = best.direction;
    return v;
}

Verdict verify(const SceneConfig& cfg, const VerifyOptions& opts) {
    if (cfg.balls.empty()) throw EmptyScene("verify: no balls");
    Verdict v;

    // A ball that holds the center generates shadow by itself.
    for (const Ball& b : cfg.balls) {
        double t2 = b.tangent2();
        bool holds = cfg.semantics == HitSemantics::Closed ? t2 <= 0.0 : t2 < 0.0;
        if (holds) {
            v.kind = VerdictKind::CertifiedShadow;
            v.method = "center-holding-ball";
            v.bestMargin = -t2;
            return v;
        }
    }

    if (cfg.balls.size() == 3 && cfg.semantics == HitSemantics::Closed) {
        try {
            if (cone_cover_certificate(cfg.balls)) {
                v.kind = VerdictKind::CertifiedShadow;
                v.method = "sign-pattern";
                return v;
            }
        } catch (const SingularSystem&) {
            // coplanar centers: fall through to the mesh and the search
        }
    }

    for (int level = 0; level <= opts.maxMeshLevel; ++level) {
        MeshCoverReport rep = mesh_cover_report(cfg, level);
        bool ok = cfg.semantics == HitSemantics::Closed ? rep.certified
                                                        : rep.minSlack > rep.coveringRadius;
        if (ok) {
            v.kind = VerdictKind::CertifiedShadow;
            v.method = "mesh";
            v.meshLevel = level;
            return v;
        }
        // A vertex with negative slack is carried into every finer level, so
        // the climb cannot succeed anymore.
        if (rep.minSlack < 0.0) break;
    }

    if (auto w = find_missing_line(cfg, opts.witnessStarts, opts.witnessIters, opts.seed)) {
        v.kind = VerdictKind::CertifiedNoShadow;
        v.witness = std::move(w);
        v.bestMargin = v.witness->worst;
        v.bestDirection = v.witness->direction;
        return v;
    }

    MinimaxResult m = minimax_margin(cfg, opts.witnessStarts, opts.witnessIters, opts.seed);
    v.kind = VerdictKind::Undecided;
    v.bestMargin = m.value;
    v.bestDirection = m.direction;
    return v;
}

}  // namespace umbra
