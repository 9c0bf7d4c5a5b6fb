// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Tolerances and thresholds are pinned in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenes.hpp"
#include "umbra/cli.hpp"
#include "umbra/geometry.hpp"
#include "umbra/optimizer.hpp"
#include "umbra/rng.hpp"
#include "umbra/scene_io.hpp"
#include "umbra/tangent.hpp"
#include "umbra/verifier.hpp"

using namespace umbra;
using namespace umbra::testing;
using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kDMin = 2.8284271247461903;

int failures = 0;

struct Criterion {
    const char* tag;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;

    explicit Criterion(const char* t) : tag(t) {}
    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    void finish(double timeLimitSec) {
        double dt = seconds();
        if (dt > timeLimitSec) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += "runtime " + std::to_string(dt) + "s exceeded " +
                      std::to_string(timeLimitSec) + "s";
        }
        std::printf("%s %-60s [%.1fs]%s%s\n", ok ? "PASS" : "FAIL", tag, dt,
                    detail.empty() ? "" : "  -- ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
};

// C1: tangent projection ratio stays below one on a 500x500 scan with three
// refinement passes, and the (0.9, 0.3) witness matches its pinned value.
void criterion1() {
    Criterion c("C1 tangent-angle bound (ratio < 1, witness 0.28052)");
    cli::RunResult r = cli::run({"tangent-scan", "--grid", "500", "--refine", "3"});
    c.expect(r.exitCode == 0, "tangent-scan exit code " + std::to_string(r.exitCode));
    json rep = json::parse(r.report);
    c.expect(rep["all_below_one"] == true, "a valid grid point reached ratio >= 1");
    c.expect(rep["max_ratio"].get<double>() < 1.0, "maxRatio >= 1");

    TangentPair witness(0.9, 0.3);
    TangentSolution s = common_tangent_direction(witness);
    c.expect(std::fabs(s.ratio - 0.28052) <= 1e-4,
             "witness ratio " + format_double(s.ratio));
    double resA = s.x3 - std::sqrt(1.0 - witness.r1 * witness.r1);
    double resB = s.b2 * s.x2 + s.b3 * s.x3 - std::sqrt(1.0 - witness.r2 * witness.r2);
    c.expect(std::fabs(resA) <= 1e-9 && std::fabs(resB) <= 1e-9, "tangency residuals");
    c.finish(10.0);
}

// C2: equatorial limit pi/2 and monotone widths.
void criterion2() {
    Criterion c("C2 equatorial arc limit pi/2, monotone widths");
    double atLimit = equator_arc_width(kPi - 1e-4);
    c.expect(atLimit >= kPi / 2.0 - 1e-3 && atLimit <= kPi / 2.0,
             "width(pi - 1e-4) = " + format_double(atLimit));
    double prev = -1.0;
    for (int i = 0; i < 1000; ++i) {
        double theta = kPi / 3.0 + (kPi - kPi / 3.0) * (i + 0.5) / 1000.0;
        double w = equator_arc_width(theta);
        if (w < prev) {
            c.expect(false, "width not monotone at theta " + format_double(theta));
            break;
        }
        prev = w;
    }
    c.finish(1.0);
}

// C3: 200 random feasible Closed sphere scenes are all certified no-shadow
// with exactly re-verified witnesses.
void criterion3() {
    Criterion c("C3 sphere three-ball insufficiency (200 scenes)");
    for (std::uint64_t k = 0; k < 200; ++k) {
        SceneConfig cfg = random_sphere_scene(424242, k);
        if (!feasibility_check(cfg).empty()) {
            c.expect(false, "generator produced an infeasible scene");
            break;
        }
        Verdict v = verify(cfg);
        if (v.kind != VerdictKind::CertifiedNoShadow || !v.witness) {
            c.expect(false, "scene " + std::to_string(k) + " verdict " +
                                std::string(to_string(v.kind)));
            break;
        }
        for (const Ball& b : cfg.balls) {
            if (line_hits_ball(v.witness->direction, b, cfg.semantics)) {
                c.expect(false, "witness re-verification failed on scene " + std::to_string(k));
                break;
            }
        }
        if (!c.ok) break;
    }
    c.finish(60.0);
}

// C4: the optimizer reproduces the minimal axis ratio 2 sqrt 2.
void criterion4() {
    Criterion c("C4 minimal axis ratio 2.8284 +- 0.05");
    cli::RunResult r = cli::run({"optimize", "--bracket", "2,4", "--tol", "0.02",
                                 "--multistarts", "64", "--seed", "7"});
    c.expect(r.exitCode == 0, "optimize exit code " + std::to_string(r.exitCode));
    if (r.exitCode == 0) {
        json rep = json::parse(r.report);
        double d = rep["d_estimate"].get<double>();
        c.expect(std::fabs(d - 2.8284) <= 0.05, "dEstimate " + format_double(d));
        c.expect(rep["margin_at_best"].get<double>() >= -1e-12, "best margin negative");
    }
    c.finish(600.0);
}

// C5: family algebra over a 50^3 grid, the feasibility boundary, and the
// pinned family(0.99, 0.99, 2.9) CertifiedShadow claim, checked exactly
// as stated with the oracle run first.
void criterion5() {
    Criterion c("C5 family algebra, boundary, pinned scene shadow");
    for (int ix = 1; ix <= 50 && c.ok; ++ix) {
        for (int iy = 1; iy <= 50 && c.ok; ++iy) {
            for (int iz = 1; iz <= 50; ++iz) {
                double x = ix / 50.0, y = iy / 50.0, z = 1.0 + iz * 0.05;
                SceneConfig cfg = family_config(FamilyParams(x, y, z));
                const Vec3& a1 = cfg.balls[0].center;
                const Vec3& a2 = cfg.balls[1].center;
                const Vec3& a3 = cfg.balls[2].center;
                double expected = std::sqrt(z * z + 1.0);
                bool good = std::fabs(a2.norm() - 1.0) <= 1e-9 &&
                            std::fabs((a1 - a2).norm() - (x + y)) <= 1e-9 &&
                            std::fabs((a3 - a1).norm() - expected) <= 1e-9 &&
                            std::fabs((a3 - a2).norm() - expected) <= 1e-9 &&
                            std::fabs(cfg.ellipsoid.metric_norm(a1) - 1.0) <= 1e-9 &&
                            std::fabs(cfg.ellipsoid.metric_norm(a2) - 1.0) <= 1e-9 &&
                            std::fabs(cfg.ellipsoid.metric_norm(a3) - 1.0) <= 1e-9;
                if (!good) {
                    c.expect(false, "family algebra off at (" + format_double(x) + "," +
                                        format_double(y) + "," + format_double(z) + ")");
                    break;
                }
                bool feasible = feasibility_check(cfg).empty();
                bool expectFeasible = x < 1.0 && y < 1.0;
                if (feasible != expectFeasible) {
                    c.expect(false, "feasibility boundary wrong at x=" + format_double(x) +
                                        " y=" + format_double(y));
                    break;
                }
                if (!expectFeasible) {
                    bool sawExclusion = false;
                    for (const Violation& viol : feasibility_check(cfg))
                        if (viol.kind == ViolationKind::CenterExclusion) sawExclusion = true;
                    if (!sawExclusion) {
                        c.expect(false, "boundary violation is not CenterExclusion");
                        break;
                    }
                }
            }
        }
    }

    // The pinned scene, oracle first, then both certificates.
    SceneConfig pinned = family_config(FamilyParams(0.99, 0.99, 2.9));
    SampleStats oracle = sample_coverage(pinned, 1000000, 0);
    c.expect(oracle.minMargin >= 0.0,
             "oracle minMargin of family(0.99,0.99,2.9) = " + format_double(oracle.minMargin));
    bool signPattern = false, mesh = false;
    try {
        signPattern = cone_cover_certificate(pinned.balls);
    } catch (const Error&) {
    }
    for (int level = 0; level <= 7 && !mesh; ++level) {
        MeshCoverReport rep = mesh_cover_report(pinned, level);
        mesh = rep.certified;
        if (rep.minSlack < 0.0) break;
    }
    c.expect(signPattern, "sign-pattern certificate is false for family(0.99,0.99,2.9)");
    c.expect(mesh, "mesh certificate is false for family(0.99,0.99,2.9)");
    c.finish(120.0);

    // Context for the line above: the pinned scene provably does not cover
    // (the whole finite-parameter family leaves a hole near the apex cap
    // edge), so the oracle-first pin fails as measured. The dual-certificate
    // capability itself is demonstrated on a configuration that does cover.
    SceneConfig covering = demo_shadow_scene();
    SampleStats ocov = sample_coverage(covering, 1000000, 0);
    bool sp = cone_cover_certificate(covering.balls);
    bool mc = false;
    for (int level = 0; level <= 7 && !mc; ++level) mc = certified_cover_mesh(covering, level);
    std::printf("     note: covering scene at d=4: oracle minMargin %s, sign-pattern %s, "
                "mesh %s\n",
                format_double(ocov.minMargin).c_str(), sp ? "true" : "false",
                mc ? "true" : "false");
}

// C6: certificate soundness against the sampling oracle, both directions,
// zero false certificates tolerated.
void criterion6() {
    Criterion c("C6 certificate soundness (500 + 500 scenes, 1e6 samples)");
    for (std::uint64_t k = 0; k < 500 && c.ok; ++k) {
        SceneConfig cfg = random_certificate_true_scene(990001, k);
        if (!cone_cover_certificate(cfg.balls)) {
            c.expect(false, "generator emitted a certificate-false scene");
            break;
        }
        SampleStats st = sample_coverage(cfg, 1000000, 0);
        if (st.fractionCovered != 1.0 || st.minMargin < -1e-9) {
            c.expect(false, "certificate-true scene " + std::to_string(k) +
                                " has fraction " + format_double(st.fractionCovered) +
                                " minMargin " + format_double(st.minMargin));
            break;
        }
    }
    for (std::uint64_t k = 0; k < 500 && c.ok; ++k) {
        SceneConfig cfg = random_sphere_scene(990002, k);
        auto w = find_missing_line(cfg, 48, 220, 0);
        if (!w) {
            c.expect(false, "no witness for sphere scene " + std::to_string(k));
            break;
        }
        for (std::size_t i = 0; i < cfg.balls.size(); ++i) {
            if (!(w->margins[i] < 0.0) ||
                line_hits_ball(w->direction, cfg.balls[i], HitSemantics::Closed)) {
                c.expect(false, "false witness on sphere scene " + std::to_string(k));
                break;
            }
        }
    }
    c.finish(300.0);
}

// C7: affine invariance of the hit predicate over 50 scene/map pairs.
void criterion7() {
    Criterion c("C7 affine invariance (50 pairs x 1e4 directions)");
    for (std::uint64_t k = 0; k < 50 && c.ok; ++k) {
        SceneConfig cfg = (k % 2 == 0) ? random_sphere_scene(7100, k)
                                       : random_certificate_true_scene(7200, k);
        Rng rng(7300, k);
        Mat3 m = Mat3::diagonal(rng.uniform(0.2, 5.0), rng.uniform(0.2, 5.0),
                                rng.uniform(0.2, 5.0));
        // a couple of shears keep the map generic
        m(0, 1) = rng.uniform(-0.5, 0.5);
        m(1, 2) = rng.uniform(-0.5, 0.5);
        LinearMap map(m);
        double phase = rng.uniform(0.0, 2.0 * kPi);
        for (std::int64_t i = 0; i < 10000; ++i) {
            Vec3 u = fibonacci_direction(i, 10000, phase);
            Vec3 v = (map.forward * u).normalized();
            for (const Ball& b : cfg.balls) {
                HitEval plain = line_hit_eval(u, b, cfg.semantics);
                HitEval mapped = mapped_hit_eval(v, MappedBall{b, map}, cfg.semantics);
                if (std::fabs(plain.margin - mapped.margin) > 1e-9) {
                    c.expect(false, "margin mismatch " +
                                        format_double(plain.margin - mapped.margin));
                    break;
                }
                if (plain.hit != mapped.hit && std::fabs(plain.margin) > 1e-9) {
                    c.expect(false, "hit mismatch away from the boundary");
                    break;
                }
            }
            if (!c.ok) break;
        }
    }
    c.finish(120.0);
}

// C8: the closed/open dichotomy at the exactly tangent orthogonal scene.
void criterion8() {
    Criterion c("C8 boundary semantics at radii sqrt(2/3)");
    double r = std::sqrt(2.0 / 3.0);
    Verdict closed = verify(orthogonal_scene(r, HitSemantics::Closed));
    c.expect(closed.kind == VerdictKind::CertifiedShadow && closed.method == "sign-pattern",
             "closed verdict " + std::string(to_string(closed.kind)));
    Verdict open = verify(orthogonal_scene(r, HitSemantics::Open));
    c.expect(open.kind == VerdictKind::CertifiedNoShadow,
             "open verdict " + std::string(to_string(open.kind)));
    if (open.witness) {
        for (double m : open.witness->margins)
            c.expect(m <= kPredicateTol, "open witness margin " + format_double(m));
    } else {
        c.expect(false, "open verdict carries no witness");
    }
    c.finish(30.0);
}

}  // namespace

int main() {
    std::printf("umbra acceptance suite\n");
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    if (failures == 0)
        std::printf("all criteria passed\n");
    else
        std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
