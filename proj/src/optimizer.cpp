#include "umbra/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "umbra/parallel.hpp"
#include "umbra/rng.hpp"

namespace umbra {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
// Radius cap keeps center exclusion strictly interior during the search. The
// shadow optimum presses one radius against this bound, so the slack must be
// far below the bisection resolution; 1e-9 relative keeps the induced bias on
// the minimal axis ratio around +0.01.
constexpr double kRadiusSlack = 1e-9;
constexpr double kThetaClamp = 1e-6;
}  // namespace

SceneConfig family_config(const FamilyParams& p, HitSemantics sem) {
    if (p.x + p.y > 2.0) throw OutOfDomain("family_config: x + y must be <= 2");
    if (p.z < 1.0) throw OutOfDomain("family_config: z must be >= 1");
    double s = p.x + p.y;
    SceneConfig cfg;
    cfg.ellipsoid = EllipsoidMetric(p.z);
    cfg.semantics = sem;
    cfg.balls.emplace_back(Vec3{0.0, 0.0, 1.0}, p.x);
    // Coordinates chosen so that |a1 - a2| = x + y exactly (tangency).
    cfg.balls.emplace_back(Vec3{0.0, 0.5 * s * std::sqrt(std::max(0.0, 4.0 - s * s)),
                                1.0 - 0.5 * s * s},
                           p.y);
    cfg.balls.emplace_back(Vec3{p.z, 0.0, 0.0}, std::sqrt(p.z * p.z + 1.0) - 1.0);
    return cfg;
}

const char* to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::Surface: return "surface";
        case ViolationKind::Overlap: return "overlap";
        case ViolationKind::CenterExclusion: return "center-exclusion";
    }
    return "?";
}

std::vector<Violation> feasibility_check(const SceneConfig& cfg) {
    std::vector<Violation> out;
    const int n = static_cast<int>(cfg.balls.size());
    for (int i = 0; i < n; ++i) {
        const Ball& b = cfg.balls[i];
        double dev = std::fabs(cfg.ellipsoid.metric_norm(b.center) - 1.0);
        if (dev > 1e-9) out.push_back({ViolationKind::Surface, i, -1, dev});
        double cn = b.center.norm();
        bool excluded = cfg.semantics == HitSemantics::Closed ? cn > b.radius : cn >= b.radius;
        if (!excluded)
            out.push_back({ViolationKind::CenterExclusion, i, -1, b.radius - cn});
        for (int j = i + 1; j < n; ++j) {
            const Ball& c = cfg.balls[j];
            double gap = (b.center - c.center).norm() - (b.radius + c.radius);
            if (gap < -1e-12) out.push_back({ViolationKind::Overlap, i, j, -gap});
        }
    }
    return out;
}

double shadow_margin(const SceneConfig& cfg, const MarginOptions& opts) {
    if (cfg.balls.empty()) throw EmptyScene("shadow_margin: no balls");
    return minimax_margin(cfg, opts.starts, opts.iters, opts.seed).value;
}

// ---- inner search ----------------------------------------------------------

namespace {

// Nine parameters: per ball (theta, psi, radius fraction of |center|).
struct Params {
    std::array<double, 9> v{};
};

SceneConfig scene_from(const Params& p, double d, HitSemantics sem) {
    SceneConfig cfg;
    cfg.ellipsoid = EllipsoidMetric(d);
    cfg.semantics = sem;
    for (int i = 0; i < 3; ++i) {
        double theta = std::clamp(p.v[3 * i], kThetaClamp, kPi - kThetaClamp);
        double psi = p.v[3 * i + 1];
        double frac = std::clamp(p.v[3 * i + 2], 1e-6, 1.0 - kRadiusSlack);
        Vec3 c = cfg.ellipsoid.surface_point(theta, psi);
        cfg.balls.emplace_back(c, frac * c.norm());
    }
    return cfg;
}

/// Smooth surrogate for "how far from a shadow": worst pattern norm minus 1
/// (sign-compatible with the shadow margin at the boundary) plus overlap
/// penalties. Lower is better; <= 0 with zero penalty means shadow.
double inner_score(const Params& p, double d, double penaltyWeight) {
    SceneConfig cfg = scene_from(p, d, HitSemantics::Closed);
    double pen = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            double gap = (cfg.balls[i].center - cfg.balls[j].center).norm() -
                         (cfg.balls[i].radius + cfg.balls[j].radius);
            if (gap < 0.0) pen += -gap;
        }
    double w;
    try {
        w = worst_pattern_norm(cfg.balls);
    } catch (const Error&) {
        return 50.0 + penaltyWeight * pen;
    }
    return (w - 1.0) + penaltyWeight * pen;
}

/// Adaptive Nelder-Mead down the score surface.
Params nelder_mead(Params start, double d, double penaltyWeight, int maxIters,
                   double simplexScale) {
    constexpr int n = 9;
    const double alpha = 1.0, beta = 1.0 + 2.0 / n, gamma = 0.75 - 1.0 / (2.0 * n),
                 delta = 1.0 - 1.0 / n;
    std::array<Params, n + 1> xs;
    std::array<double, n + 1> fs;
    xs[0] = start;
    fs[0] = inner_score(start, d, penaltyWeight);
    for (int i = 0; i < n; ++i) {
        xs[i + 1] = start;
        xs[i + 1].v[i] += simplexScale * (i % 3 == 2 ? 0.05 : 0.25);
        fs[i + 1] = inner_score(xs[i + 1], d, penaltyWeight);
    }
    std::array<int, n + 1> ord;
    for (int it = 0; it < maxIters; ++it) {
        for (int i = 0; i <= n; ++i) ord[i] = i;
        std::sort(ord.begin(), ord.end(), [&](int a, int b) { return fs[a] < fs[b]; });
        if (fs[ord[n]] - fs[ord[0]] < 1e-15) break;
        Params centroid;
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < 9; ++k) centroid.v[k] += xs[ord[i]].v[k] / n;
        const Params& worst = xs[ord[n]];
        auto blend = [&](double t) {
            Params r;
            for (int k = 0; k < 9; ++k) r.v[k] = centroid.v[k] + t * (centroid.v[k] - worst.v[k]);
            return r;
        };
        Params xr = blend(alpha);
        double fr = inner_score(xr, d, penaltyWeight);
        if (fr < fs[ord[0]]) {
            Params xe = blend(beta);
            double fe = inner_score(xe, d, penaltyWeight);
            if (fe < fr) {
                xs[ord[n]] = xe;
                fs[ord[n]] = fe;
            } else {
                xs[ord[n]] = xr;
                fs[ord[n]] = fr;
            }
        } else if (fr < fs[ord[n - 1]]) {
            xs[ord[n]] = xr;
            fs[ord[n]] = fr;
        } else {
            Params xc = blend(fr < fs[ord[n]] ? gamma : -gamma);
            double fc = inner_score(xc, d, penaltyWeight);
            if (fc < std::min(fr, fs[ord[n]])) {
                xs[ord[n]] = xc;
                fs[ord[n]] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {
                    int id = ord[i];
                    for (int k = 0; k < 9; ++k)
                        xs[id].v[k] = xs[ord[0]].v[k] + delta * (xs[id].v[k] - xs[ord[0]].v[k]);
                    fs[id] = inner_score(xs[id], d, penaltyWeight);
                }
            }
        }
    }
    int best = 0;
    for (int i = 1; i <= n; ++i)
        if (fs[i] < fs[best]) best = i;
    return xs[best];
}

Params params_from_scene(const SceneConfig& scene, double d) {
    Params p;
    for (int i = 0; i < 3 && i < static_cast<int>(scene.balls.size()); ++i) {
        const Ball& b = scene.balls[i];
        // Project the center onto the d-ellipsoid parametrization.
        double ct = std::clamp(b.center.x / d, -1.0, 1.0);
        double theta = std::acos(ct);
        double psi = std::atan2(b.center.z, b.center.y);
        Vec3 c = EllipsoidMetric(d).surface_point(theta, psi);
        double cn = c.norm();
        p.v[3 * i] = theta;
        p.v[3 * i + 1] = psi;
        p.v[3 * i + 2] = std::clamp(b.radius / cn, 1e-6, 1.0 - kRadiusSlack);
    }
    return p;
}

/// The structure the optimum lives in: a large ball at one apex tangent to a
/// "film" ball on the unit circle whose radius presses the exclusion bound,
/// plus a third ball tangent to the film ball and tilted away from its
/// antipode. The apex cap reaches half-angle 45 degrees, which is what the
/// tilted pair needs, exactly at d = 2 sqrt 2.
std::vector<Params> structured_starts(double d) {
    std::vector<Params> out;

    // Near-limit analytic structure. The film ball fixes q2; the tilt trades
    // the q2/tau seam term against the tau^2 curvature term, optimal at
    // tau = (16 sqrt2 q2 / 3)^(1/3). Radii come from measured distances with
    // a hair of slack so the theta clamp cannot push the seed into overlap.
    double q2 = std::sqrt(std::max(0.0, 1.0 - (1.0 - kRadiusSlack) * (1.0 - kRadiusSlack)));
    double tauStar = std::cbrt(16.0 * std::sqrt(2.0) * q2 / 3.0);
    EllipsoidMetric surf(d);
    for (double tau : {0.5 * tauStar, tauStar, 2.0 * tauStar, 0.15, 0.3}) {
        const double gap = 1e-7;
        Vec3 c1 = surf.surface_point(kPi - kThetaClamp, 0.0);
        Vec3 c2 = surf.surface_point(kPi / 2, 0.0);
        Vec3 c3 = surf.surface_point(kPi / 2, -kPi + tau);
        double r2 = (1.0 - kRadiusSlack) * c2.norm();
        double r3 = std::min((c2 - c3).norm() - r2, (1.0 - kRadiusSlack) * c3.norm()) - gap;
        double r1 = std::min((c1 - c2).norm() - r2, (c1 - c3).norm() - r3) - gap;
        Params p;
        p.v[0] = kPi - kThetaClamp;
        p.v[1] = 0.0;
        p.v[2] = r1 / c1.norm();
        p.v[3] = kPi / 2;
        p.v[4] = 0.0;
        p.v[5] = 1.0;  // clamped to the cap
        p.v[6] = kPi / 2;
        p.v[7] = -kPi + tau;
        p.v[8] = r3 / c3.norm();
        out.push_back(p);
    }

    // Looser variants with a mid-size side ball give the polish somewhere to
    // go when d is far above the threshold.
    for (double a2 : {0.25, 0.40}) {
        for (double tau : {0.35, 0.55}) {
            Params p;
            p.v[0] = kPi - 1e-4;
            p.v[1] = 0.0;
            p.v[2] = (std::sqrt(d * d + 1.0) - 1.0) / d * 0.999;
            p.v[3] = kPi / 2;
            p.v[4] = 0.0;
            p.v[5] = std::cos(a2);
            p.v[6] = kPi / 2;
            p.v[7] = -kPi + tau;
            p.v[8] = 1.0 - kRadiusSlack;
            out.push_back(p);
        }
    }
    return out;
}

/// Clears residual pairwise overlaps left by the soft penalty: shaves the
/// offending radii by half the deficit plus a hair. The certificate loss is
/// O(radius * deficit) and the deficits here are ~1e-7.
Params repair_overlaps(Params p, double d) {
    for (int pass = 0; pass < 12; ++pass) {
        SceneConfig s = scene_from(p, d, HitSemantics::Closed);
        bool dirty = false;
        for (int i = 0; i < 3; ++i) {
            for (int j = i + 1; j < 3; ++j) {
                double deficit = (s.balls[i].radius + s.balls[j].radius) -
                                 (s.balls[i].center - s.balls[j].center).norm();
                if (deficit > -1e-11) {
                    double shave = 0.5 * std::max(deficit, 0.0) + 1e-10;
                    p.v[3 * i + 2] -= shave / s.balls[i].center.norm();
                    p.v[3 * j + 2] -= shave / s.balls[j].center.norm();
                    dirty = true;
                }
            }
        }
        if (!dirty) break;
    }
    return p;
}

BestConfig evaluate_params(const Params& p, double d, HitSemantics sem) {
    BestConfig bc;
    bc.scene = scene_from(p, d, sem);
    bc.feasible = feasibility_check(bc.scene).empty();
    try {
        bc.worstPatternNorm = worst_pattern_norm(bc.scene.balls);
    } catch (const Error&) {
        bc.worstPatternNorm = std::numeric_limits<double>::infinity();
    }
    bc.margin = shadow_margin(bc.scene);
    // For three strict balls, margin >= 0 and worst pattern norm <= 1 are the
    // same statement; the norm is the numerically sharp side of it, the
    // margin acts as a sanity net at predicate tolerance.
    bc.shadow = bc.feasible && bc.worstPatternNorm <= 1.0 && bc.margin >= -kPredicateTol;
    return bc;
}

}  // namespace

BestConfig best_config_for_d(double d, const SearchOptions& opts,
                             const std::vector<SceneConfig>& warmScenes) {
    if (!(d >= 1.0)) throw OutOfDomain("best_config_for_d: d must be >= 1");

    std::vector<Params> starts = structured_starts(d);
    if (d >= 2.0) {
        try {
            starts.push_back(params_from_scene(family_config(FamilyParams(0.99, 0.99, d)), d));
        } catch (const Error&) {
        }
    }
    for (const SceneConfig& s : warmScenes)
        if (s.balls.size() == 3) starts.push_back(params_from_scene(s, d));
    int randomStarts = std::max(0, opts.multistarts - static_cast<int>(starts.size()));
    for (int k = 0; k < randomStarts; ++k) {
        Rng rng(opts.seed, static_cast<std::uint64_t>(k) + 7919);
        Params p;
        for (int i = 0; i < 3; ++i) {
            p.v[3 * i] = std::acos(rng.uniform(-1.0, 1.0));
            p.v[3 * i + 1] = rng.uniform(-kPi, kPi);
            p.v[3 * i + 2] = rng.uniform(0.5, 1.0 - kRadiusSlack);
        }
        starts.push_back(p);
    }

    std::vector<Params> polished(starts.size());
    parallel_chunks(starts.size(), [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            Params p = nelder_mead(starts[i], d, 1e3, opts.innerIters, 1.0);
            double f = inner_score(p, d, 1e3);
            // Exact-penalty restart with doubled weight while overlaps stay active.
            double w = 1e3;
            for (int r = 0; r < 3 && f > 0.0; ++r) {
                SceneConfig s = scene_from(p, d, HitSemantics::Closed);
                bool overlapping = false;
                for (const Violation& v : feasibility_check(s))
                    if (v.kind == ViolationKind::Overlap) overlapping = true;
                if (!overlapping) break;
                w *= 2.0;
                p = nelder_mead(p, d, w, opts.innerIters / 2, 0.2);
                f = inner_score(p, d, w);
            }
            // Fine re-polish rounds; restarting the simplex unsticks the
            // near-degenerate optima close to the feasibility threshold.
            p = nelder_mead(p, d, w, opts.innerIters / 2, 0.05);
            p = nelder_mead(p, d, w, opts.innerIters / 2, 0.005);
            polished[i] = repair_overlaps(p, d);
        }
    });

    BestConfig best;
    bool haveBest = false;
    auto better = [](const BestConfig& a, const BestConfig& b) {
        if (a.shadow != b.shadow) return a.shadow;
        if (a.feasible != b.feasible) return a.feasible;
        return a.worstPatternNorm < b.worstPatternNorm;
    };
    auto consider = [&](const Params& p) {
        BestConfig bc = evaluate_params(p, d, HitSemantics::Closed);
        if (!haveBest || better(bc, best)) {
            best = bc;
            haveBest = true;
        }
    };
    for (const Params& p : polished) consider(p);
    // The raw structured seeds are already tangency-exact; keep them in the
    // running in case a polish traded feasibility for certificate value.
    for (const Params& p : starts) consider(repair_overlaps(p, d));
    return best;
}

OptimizationResult min_axis_ratio(const SearchOptions& opts) {
    if (!(opts.dLow < opts.dHigh) || !(opts.dTol > 0.0))
        throw OutOfDomain("min_axis_ratio: need dLow < dHigh and dTol > 0");
    OptimizationResult out;
    std::vector<SceneConfig> warm;

    auto probe = [&](double d) {
        BestConfig bc = best_config_for_d(d, opts, warm);
        out.history.emplace_back(d, bc.margin);
        warm.push_back(bc.scene);
        return bc;
    };

    BestConfig lowCfg = probe(opts.dLow);
    if (lowCfg.shadow)
        throw BadBracket("min_axis_ratio: lower end of the bracket is already feasible");
    BestConfig highCfg = probe(opts.dHigh);
    if (!highCfg.shadow)
        throw BadBracket("min_axis_ratio: upper end of the bracket is infeasible");

    double lo = opts.dLow, hi = opts.dHigh;
    BestConfig bestFeasible = highCfg;
    while (hi - lo > opts.dTol) {
        double mid = 0.5 * (lo + hi);
        BestConfig bc = probe(mid);
        if (bc.shadow) {
            hi = mid;
            bestFeasible = bc;
        } else {
            lo = mid;
        }
    }
    out.dEstimate = 0.5 * (lo + hi);
    out.bestScene = bestFeasible.scene;
    out.marginAtBest = bestFeasible.margin;
    return out;
}

}  // namespace umbra
