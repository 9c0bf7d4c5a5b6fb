#include "umbra/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "umbra/geometry.hpp"
#include "umbra/optimizer.hpp"
#include "umbra/tangent.hpp"
#include "umbra/parallel.hpp"
#include "umbra/rng.hpp"
#include "umbra/scene_io.hpp"
#include "umbra/verifier.hpp"
#include "umbra/version.hpp"

namespace umbra::cli {

using nlohmann::json;

namespace {

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

json base_report(const std::string& command) {
    json r;
    r["schema"] = 1;
    r["tool"] = kToolName;
    r["version"] = kVersion;
    r["command"] = command;
    return r;
}

json verdict_json(const Verdict& v) {
    json out;
    out["kind"] = to_string(v.kind);
    if (v.kind == VerdictKind::CertifiedShadow) {
        out["method"] = v.method;
        if (v.meshLevel >= 0) out["mesh_level"] = v.meshLevel;
    }
    if (v.witness) {
        out["witness"] = {{"direction", vec_json(v.witness->direction)},
                          {"margins", v.witness->margins},
                          {"worst_margin", v.witness->worst}};
    }
    if (v.kind != VerdictKind::CertifiedShadow) {
        out["best_margin"] = v.bestMargin;
        out["best_direction"] = vec_json(v.bestDirection);
    }
    return out;
}

int verdict_exit(const Verdict& v) {
    switch (v.kind) {
        case VerdictKind::CertifiedShadow: return kExitShadow;
        case VerdictKind::CertifiedNoShadow: return kExitNoShadow;
        case VerdictKind::Undecided: return kExitUndecided;
    }
    return kExitNumerical;
}

void apply_thread_env() {
    if (const char* env = std::getenv("UMBRA_THREADS")) {
        char* end = nullptr;
        unsigned long v = std::strtoul(env, &end, 10);
        if (end && *end == '\0') set_thread_cap(static_cast<unsigned>(v));
    }
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

void finish(RunResult& res, json& report, const Timer& timer, const std::string& reportPath) {
    report["timing_ms"] = timer.ms();
    res.report = report.dump(2) + "\n";
    if (!reportPath.empty()) {
        std::ofstream out(reportPath, std::ios::binary);
        if (!out) throw ParseError("cannot write report file: " + reportPath);
        out << res.report;
    }
}

std::string describe_verdict(const Verdict& v) {
    std::ostringstream ss;
    ss << "verdict: " << to_string(v.kind);
    if (v.kind == VerdictKind::CertifiedShadow) {
        ss << " (method: " << v.method;
        if (v.meshLevel >= 0) ss << ", level " << v.meshLevel;
        ss << ")";
    } else if (v.witness) {
        const Vec3& u = v.witness->direction;
        ss << "\nwitness direction: [" << format_double(u.x) << ", " << format_double(u.y) << ", "
           << format_double(u.z) << "]";
        ss << "\nper-ball margins:";
        for (double m : v.witness->margins) ss << " " << format_double(m);
    } else {
        ss << " (best margin " << format_double(v.bestMargin) << ")";
    }
    return ss.str();
}

}  // namespace

RunResult run(const std::vector<std::string>& args) {
    RunResult res;
    apply_thread_env();

    CLI::App app{"umbra: does a configuration of balls on a sphere or prolate ellipsoid "
                 "generate shadow at the center?"};
    app.require_subcommand(1);

    // verify
    std::string scenePath, reportPath;
    int meshLevel = 7, starts = 48, iters = 220;
    std::uint64_t seed = 0;
    auto* cmdVerify = app.add_subcommand("verify", "decide shadow for a scene file");
    cmdVerify->add_option("scene", scenePath, "scene JSON file")->required();
    cmdVerify->add_option("--mesh-level", meshLevel, "max icosphere subdivision level");
    cmdVerify->add_option("--starts", starts, "witness search multistarts");
    cmdVerify->add_option("--iters", iters, "descent iterations per start");
    cmdVerify->add_option("--seed", seed, "master seed");
    cmdVerify->add_option("--report", reportPath, "write machine-readable report here");

    // oracle
    std::int64_t samples = 1000000;
    std::string csvPath;
    auto* cmdOracle = app.add_subcommand("oracle", "sampled coverage statistics");
    cmdOracle->add_option("scene", scenePath, "scene JSON file")->required();
    cmdOracle->add_option("--samples", samples, "number of lattice directions");
    cmdOracle->add_option("--seed", seed, "lattice phase seed (0 = plain lattice)");
    cmdOracle->add_option("--csv", csvPath, "write per-direction margins as CSV");
    cmdOracle->add_option("--report", reportPath, "write machine-readable report here");

    // tangent-scan
    int grid = 500, refine = 3;
    auto* cmdTangent = app.add_subcommand("tangent-scan",
                                          "scan the tangent projection ratio x1/x2");
    cmdTangent->add_option("--grid", grid, "lattice resolution per axis");
    cmdTangent->add_option("--refine", refine, "local refinement iterations");
    cmdTangent->add_option("--report", reportPath, "write machine-readable report here");

    // equator
    double theta = 0.0;
    bool limitFlag = false;
    auto* cmdEquator = app.add_subcommand("equator", "equatorial arc width of the tangent ball");
    auto* thetaOpt = cmdEquator->add_option("--theta", theta, "polar angle in (pi/3, pi)");
    cmdEquator->add_flag("--limit", limitFlag, "print the theta -> pi limit");
    cmdEquator->add_option("--report", reportPath, "write machine-readable report here");

    // family
    double fx = 0.0, fy = 0.0, fz = 0.0;
    std::string emitPath;
    auto* cmdFamily = app.add_subcommand("family", "build the three-parameter configuration");
    cmdFamily->add_option("--x", fx, "radius of the first ball")->required();
    cmdFamily->add_option("--y", fy, "radius of the second ball")->required();
    cmdFamily->add_option("--z", fz, "apex coordinate (also the axis ratio)")->required();
    cmdFamily->add_option("--emit", emitPath, "write the scene file here");
    cmdFamily->add_option("--report", reportPath, "write machine-readable report here");

    // optimize
    std::string bracket = "2,4";
    double tol = 0.02;
    int multistarts = 64;
    auto* cmdOpt = app.add_subcommand("optimize", "minimal axis ratio by bisection");
    cmdOpt->add_option("--bracket", bracket, "dLow,dHigh");
    cmdOpt->add_option("--tol", tol, "bisection width target");
    cmdOpt->add_option("--multistarts", multistarts, "inner search starts per probe");
    cmdOpt->add_option("--seed", seed, "master seed");
    cmdOpt->add_option("--report", reportPath, "write machine-readable report here");

    // transform
    double scale = 1.0;
    std::int64_t checkDirs = 10000;
    auto* cmdTransform = app.add_subcommand("transform",
                                            "stretch the first axis and check invariance");
    cmdTransform->add_option("scene", scenePath, "scene JSON file")->required();
    cmdTransform->add_option("--scale", scale, "stretch factor along the first axis")->required();
    cmdTransform->add_option("--check-dirs", checkDirs, "spot-check direction count");
    cmdTransform->add_option("--emit", emitPath, "write the mapped scene document here");
    cmdTransform->add_option("--seed", seed, "spot-check seed");
    cmdTransform->add_option("--report", reportPath, "write machine-readable report here");

    std::vector<const char*> argv;
    argv.push_back(kToolName);
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        std::ostringstream ss;
        if (e.get_exit_code() == 0) {
            // --help and friends
            ss << app.help();
            res.text = ss.str();
            res.exitCode = kExitShadow;
            return res;
        }
        ss << "usage error: " << e.what();
        res.text = ss.str();
        res.exitCode = kExitUsage;
        return res;
    }

    Timer timer;
    try {
        if (cmdVerify->parsed()) {
            std::string bytes = read_file(scenePath);
            ParsedScene parsed = parse_scene_text(bytes);
            json report = base_report("verify");
            report["input_digest"] = "fnv1a:" + fnv1a_digest(bytes);
            report["seed"] = seed;
            report["warnings"] = parsed.warnings;
            VerifyOptions opts;
            opts.maxMeshLevel = meshLevel;
            opts.witnessStarts = starts;
            opts.witnessIters = iters;
            opts.seed = seed;
            Verdict v = verify(parsed.scene, opts);
            report["verdict"] = verdict_json(v);
            res.text = describe_verdict(v);
            res.exitCode = verdict_exit(v);
            finish(res, report, timer, reportPath);
            return res;
        }

        if (cmdOracle->parsed()) {
            std::string bytes = read_file(scenePath);
            ParsedScene parsed = parse_scene_text(bytes);
            json report = base_report("oracle");
            report["input_digest"] = "fnv1a:" + fnv1a_digest(bytes);
            report["seed"] = seed;
            report["samples"] = samples;
            SampleStats st = sample_coverage(parsed.scene, samples, seed);
            report["fraction_covered"] = st.fractionCovered;
            report["min_margin"] = st.minMargin;
            report["argmin_direction"] = vec_json(st.argminDirection);
            if (!csvPath.empty()) {
                std::ofstream csv(csvPath, std::ios::binary);
                if (!csv) throw ParseError("cannot write CSV file: " + csvPath);
                csv << "u1,u2,u3,maxMargin\n";
                double phase = 0.0;
                if (seed != 0) {
                    Rng rng(seed);
                    phase = rng.uniform(0.0, 6.283185307179586);
                }
                for (std::int64_t i = 0; i < samples; ++i) {
                    Vec3 u = fibonacci_direction(i, samples, phase);
                    double m = -std::numeric_limits<double>::infinity();
                    for (const Ball& b : parsed.scene.balls)
                        m = std::max(m, raw_margin(u, b));
                    csv << format_double(u.x) << ',' << format_double(u.y) << ','
                        << format_double(u.z) << ',' << format_double(m) << '\n';
                }
            }
            std::ostringstream ss;
            ss << "fraction covered: " << format_double(st.fractionCovered)
               << "\nmin margin: " << format_double(st.minMargin);
            res.text = ss.str();
            res.exitCode = kExitShadow;
            finish(res, report, timer, reportPath);
            return res;
        }

        if (cmdTangent->parsed()) {
            json report = base_report("tangent-scan");
            report["grid"] = grid;
            report["refine"] = refine;
            RatioScan scan = max_projection_ratio(grid, refine);
            report["max_ratio"] = scan.maxRatio;
            report["arg_r1"] = scan.argR1;
            report["arg_r2"] = scan.argR2;
            report["evaluated"] = scan.evaluated;
            report["skipped_no_tangent"] = scan.skippedNoTangent;
            report["all_below_one"] = scan.allBelowOne;
            report["max_phi"] = 2.0 * std::atan(scan.maxRatio);
            std::ostringstream ss;
            ss << "max ratio x1/x2: " << format_double(scan.maxRatio) << " at (r1, r2) = ("
               << format_double(scan.argR1) << ", " << format_double(scan.argR2) << ")"
               << "\nall valid points below 1: " << (scan.allBelowOne ? "yes" : "no");
            res.text = ss.str();
            res.exitCode = kExitShadow;
            finish(res, report, timer, reportPath);
            return res;
        }

        if (cmdEquator->parsed()) {
            json report = base_report("equator");
            std::ostringstream ss;
            if (limitFlag) {
                double w = equator_arc_limit();
                report["limit"] = w;
                ss << "limit width: " << format_double(w);
            } else {
                if (thetaOpt->count() == 0)
                    throw ParseError("equator: give --theta or --limit");
                double w = equator_arc_width(theta);
                report["theta"] = theta;
                report["width"] = w;
                ss << "width at theta=" << format_double(theta) << ": " << format_double(w);
            }
            res.text = ss.str();
            res.exitCode = kExitShadow;
            finish(res, report, timer, reportPath);
            return res;
        }

        if (cmdFamily->parsed()) {
            json report = base_report("family");
            SceneConfig scene = family_config(FamilyParams(fx, fy, fz));
            report["x"] = fx;
            report["y"] = fy;
            report["z"] = fz;
            report["scene"] = json::parse(scene_to_text(scene));
            json viols = json::array();
            for (const Violation& v : feasibility_check(scene)) {
                json jv;
                jv["kind"] = to_string(v.kind);
                jv["ball"] = v.ballA;
                if (v.ballB >= 0) jv["other"] = v.ballB;
                jv["amount"] = v.amount;
                viols.push_back(jv);
            }
            report["violations"] = viols;
            if (!emitPath.empty()) {
                write_scene_file(scene, emitPath);
                report["emitted"] = emitPath;
            }
            std::ostringstream ss;
            ss << "family scene on ellipsoid d = " << format_double(fz) << ", "
               << (viols.empty() ? "feasible" : "infeasible");
            res.text = ss.str();
            res.exitCode = kExitShadow;
            finish(res, report, timer, reportPath);
            return res;
        }

        if (cmdOpt->parsed()) {
            json report = base_report("optimize");
            SearchOptions opts;
            auto comma = bracket.find(',');
            if (comma == std::string::npos)
                throw OutOfDomain("optimize: --bracket expects LO,HI");
            opts.dLow = std::stod(bracket.substr(0, comma));
            opts.dHigh = std::stod(bracket.substr(comma + 1));
            opts.dTol = tol;
            opts.multistarts = multistarts;
            opts.seed = seed;
            report["bracket"] = {opts.dLow, opts.dHigh};
            report["tol"] = tol;
            report["multistarts"] = multistarts;
            report["seed"] = seed;
            OptimizationResult r = min_axis_ratio(opts);
            report["d_estimate"] = r.dEstimate;
            report["margin_at_best"] = r.marginAtBest;
            json hist = json::array();
            for (auto& [d, m] : r.history) hist.push_back({{"d", d}, {"margin", m}});
            report["history"] = hist;
            report["best_scene"] = json::parse(scene_to_text(r.bestScene));
            std::ostringstream ss;
            ss << "minimal axis ratio estimate: " << format_double(r.dEstimate);
            res.text = ss.str();
            res.exitCode = kExitShadow;
            finish(res, report, timer, reportPath);
            return res;
        }

        if (cmdTransform->parsed()) {
            std::string bytes = read_file(scenePath);
            ParsedScene parsed = parse_scene_text(bytes);
            json report = base_report("transform");
            report["input_digest"] = "fnv1a:" + fnv1a_digest(bytes);
            report["scale"] = scale;
            LinearMap map(Mat3::diagonal(scale, 1.0, 1.0));

            // Spot check: affine hit equivalence over sampled directions.
            double phase = 0.0;
            if (seed != 0) {
                Rng rng(seed);
                phase = rng.uniform(0.0, 6.283185307179586);
            }
            double maxDiff = 0.0;
            std::int64_t disagreements = 0;
            for (std::int64_t i = 0; i < checkDirs; ++i) {
                Vec3 u = fibonacci_direction(i, checkDirs, phase);
                Vec3 v = (map.forward * u).normalized();
                for (const Ball& b : parsed.scene.balls) {
                    HitEval plain = line_hit_eval(u, b, parsed.scene.semantics);
                    HitEval mapped = mapped_hit_eval(v, MappedBall{b, map}, parsed.scene.semantics);
                    maxDiff = std::max(maxDiff, std::fabs(plain.margin - mapped.margin));
                    if (plain.hit != mapped.hit) ++disagreements;
                }
            }
            report["spot_check"] = {{"directions", checkDirs},
                                    {"max_margin_diff", maxDiff},
                                    {"hit_disagreements", disagreements}};

            VerifyOptions origOpts;
            origOpts.seed = seed;
            Verdict orig = verify(parsed.scene, origOpts);
            // The image-space mesh certificate pays the map's distortion
            // factor, so give it more levels than the plain pipeline.
            VerifyOptions mappedOpts;
            mappedOpts.maxMeshLevel = 9;
            mappedOpts.seed = seed;
            Verdict mapped = verify_mapped(parsed.scene, map, mappedOpts);
            report["original_verdict"] = verdict_json(orig);
            report["mapped_verdict"] = verdict_json(mapped);
            bool match = orig.kind == mapped.kind && disagreements == 0 && maxDiff <= 1e-9;
            report["match"] = match;

            if (!emitPath.empty()) {
                json doc;
                doc["schema"] = 1;
                doc["map"] = {{"diag", {scale, 1.0, 1.0}}};
                doc["base_scene"] = json::parse(scene_to_text(parsed.scene));
                doc["note"] = "balls are images of base_scene.balls under the map";
                std::ofstream out(emitPath, std::ios::binary);
                if (!out) throw ParseError("cannot write file: " + emitPath);
                out << doc.dump(2) << "\n";
                report["emitted"] = emitPath;
            }

            std::ostringstream ss;
            ss << "original: " << to_string(orig.kind) << ", mapped: " << to_string(mapped.kind)
               << ", invariance " << (match ? "holds" : "VIOLATED");
            res.text = ss.str();
            res.exitCode = match ? verdict_exit(orig) : kExitNumerical;
            finish(res, report, timer, reportPath);
            return res;
        }
    } catch (const ParseError& e) {
        res.text = std::string("parse error: ") + e.what();
        res.exitCode = kExitUsage;
        return res;
    } catch (const ValidationError& e) {
        res.text = std::string("validation error: ") + e.what();
        res.exitCode = kExitUsage;
        return res;
    } catch (const Error& e) {
        res.text = std::string("numerical failure: ") + e.what();
        res.exitCode = kExitNumerical;
        return res;
    }

    res.text = "no subcommand executed";
    res.exitCode = kExitUsage;
    return res;
}

}  // namespace umbra::cli
