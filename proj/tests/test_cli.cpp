#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "scenes.hpp"
#include "umbra/cli.hpp"
#include "umbra/optimizer.hpp"
#include "umbra/scene_io.hpp"

using namespace umbra;
using namespace umbra::testing;
using nlohmann::json;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/umbra_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

std::string write_temp_scene(const SceneConfig& cfg, const std::string& name) {
    std::string path = "/tmp/umbra_test_" + name;
    write_scene_file(cfg, path);
    return path;
}

json strip_timing(const std::string& report) {
    json j = json::parse(report);
    j.erase("timing_ms");
    return j;
}

}  // namespace

TEST_CASE("verify subcommand: exit codes by verdict") {
    std::string shadow = write_temp_scene(demo_shadow_scene(), "demo.json");
    cli::RunResult r = cli::run({"verify", shadow});
    CHECK(r.exitCode == cli::kExitShadow);
    json rep = json::parse(r.report);
    CHECK(rep["verdict"]["kind"] == "certified-shadow");
    CHECK(rep["verdict"]["method"] == "sign-pattern");
    CHECK(rep["schema"] == 1);
    std::remove(shadow.c_str());

    std::string sphere = write_temp_scene(random_sphere_scene(10, 0), "sphere.json");
    cli::RunResult rs = cli::run({"verify", sphere});
    CHECK(rs.exitCode == cli::kExitNoShadow);
    json repS = json::parse(rs.report);
    CHECK(repS["verdict"]["kind"] == "certified-no-shadow");
    CHECK(repS["verdict"]["witness"]["direction"].size() == 3);
    std::remove(sphere.c_str());
}

TEST_CASE("verify subcommand: probe scene with a holding ball") {
    SceneConfig probe;
    probe.ellipsoid = EllipsoidMetric(1.0);
    probe.semantics = HitSemantics::Closed;
    probe.balls.emplace_back(Vec3{0, 0, 1}, 1.25);
    std::string path = write_temp_scene(probe, "probe.json");
    cli::RunResult r = cli::run({"verify", path});
    CHECK(r.exitCode == cli::kExitShadow);
    json rep = json::parse(r.report);
    CHECK(rep["verdict"]["method"] == "center-holding-ball");
    REQUIRE(rep["warnings"].size() == 1);
    std::remove(path.c_str());
}

TEST_CASE("verify subcommand: usage and parse failures") {
    CHECK(cli::run({"verify", "/nonexistent/scene.json"}).exitCode == cli::kExitUsage);
    CHECK(cli::run({"bogus-subcommand"}).exitCode == cli::kExitUsage);
    CHECK(cli::run({}).exitCode == cli::kExitUsage);

    TempFile bad("bad.json");
    std::ofstream(bad.path) << "{\"oops\": true}";
    CHECK(cli::run({"verify", bad.path}).exitCode == cli::kExitUsage);
}

TEST_CASE("reports are deterministic except for timing") {
    std::string sphere = write_temp_scene(random_sphere_scene(21, 3), "det.json");
    cli::RunResult a = cli::run({"verify", sphere, "--seed", "5"});
    cli::RunResult b = cli::run({"verify", sphere, "--seed", "5"});
    CHECK(strip_timing(a.report) == strip_timing(b.report));
    std::remove(sphere.c_str());
}

TEST_CASE("UMBRA_THREADS does not change results") {
    std::string path = write_temp_scene(random_sphere_scene(64, 2), "threads.json");
    setenv("UMBRA_THREADS", "1", 1);
    cli::RunResult one = cli::run({"verify", path, "--seed", "3"});
    setenv("UMBRA_THREADS", "4", 1);
    cli::RunResult four = cli::run({"verify", path, "--seed", "3"});
    unsetenv("UMBRA_THREADS");
    CHECK(strip_timing(one.report) == strip_timing(four.report));
    std::remove(path.c_str());
}

TEST_CASE("oracle subcommand") {
    std::string path = write_temp_scene(demo_shadow_scene(), "oracle.json");
    cli::RunResult r = cli::run({"oracle", path, "--samples", "200000", "--seed", "4"});
    CHECK(r.exitCode == 0);
    json rep = json::parse(r.report);
    CHECK(rep["fraction_covered"] == 1.0);
    CHECK(rep["min_margin"].get<double>() >= 0.0);
    CHECK(rep["input_digest"].get<std::string>().substr(0, 6) == "fnv1a:");
    std::remove(path.c_str());
}

TEST_CASE("oracle CSV emission") {
    SceneConfig one;
    one.ellipsoid = EllipsoidMetric(1.0);
    one.semantics = HitSemantics::Closed;
    one.balls.emplace_back(Vec3{0, 0, 1}, 0.8);
    std::string path = write_temp_scene(one, "csv_scene.json");
    TempFile csv("out.csv");
    cli::RunResult r = cli::run({"oracle", path, "--samples", "1000", "--csv", csv.path});
    CHECK(r.exitCode == 0);
    std::ifstream in(csv.path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "u1,u2,u3,maxMargin");
    int lines = 0;
    for (std::string line; std::getline(in, line);) ++lines;
    CHECK(lines == 1000);
    std::remove(path.c_str());
}

TEST_CASE("tangent-scan subcommand") {
    cli::RunResult r = cli::run({"tangent-scan", "--grid", "64", "--refine", "2"});
    CHECK(r.exitCode == 0);
    json rep = json::parse(r.report);
    CHECK(rep["max_ratio"].get<double>() < 1.0);
    CHECK(rep["max_ratio"].get<double>() >= 0.28);
    CHECK(rep["all_below_one"] == true);
    CHECK(rep["skipped_no_tangent"].get<long>() > 0);
}

TEST_CASE("equator subcommand") {
    cli::RunResult lim = cli::run({"equator", "--limit"});
    CHECK(lim.exitCode == 0);
    CHECK(json::parse(lim.report)["limit"].get<double>() ==
          doctest::Approx(1.5707963267948966).epsilon(1e-15));

    cli::RunResult at = cli::run({"equator", "--theta", "2.0943951023931953"});
    CHECK(at.exitCode == 0);
    CHECK(json::parse(at.report)["width"].get<double>() == doctest::Approx(1.3308975).epsilon(1e-6));

    CHECK(cli::run({"equator", "--theta", "0.5"}).exitCode == cli::kExitNumerical);
    CHECK(cli::run({"equator"}).exitCode == cli::kExitUsage);
}

TEST_CASE("family subcommand round-trips through its emitted scene") {
    TempFile scene("family.json");
    cli::RunResult r = cli::run({"family", "--x", "0.9", "--y", "0.9", "--z", "2.9",
                                 "--emit", scene.path});
    CHECK(r.exitCode == 0);
    json rep = json::parse(r.report);
    CHECK(rep["violations"].empty());

    ParsedScene parsed = parse_scene_file(scene.path);
    SceneConfig direct = family_config(FamilyParams(0.9, 0.9, 2.9));
    REQUIRE(parsed.scene.balls.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(parsed.scene.balls[i].center.x == direct.balls[i].center.x);
        CHECK(parsed.scene.balls[i].center.y == direct.balls[i].center.y);
        CHECK(parsed.scene.balls[i].center.z == direct.balls[i].center.z);
        CHECK(parsed.scene.balls[i].radius == direct.balls[i].radius);
    }

    // infeasible at the boundary: report carries the violations
    cli::RunResult lim = cli::run({"family", "--x", "1", "--y", "1", "--z",
                                   "2.8284271247461903"});
    CHECK(lim.exitCode == 0);
    CHECK(json::parse(lim.report)["violations"].size() == 2);
}

TEST_CASE("transform subcommand checks affine invariance") {
    std::string path = write_temp_scene(demo_shadow_scene(), "transform.json");
    TempFile mapped("mapped.json");
    cli::RunResult r = cli::run({"transform", path, "--scale", "0.25", "--check-dirs", "4000",
                                 "--emit", mapped.path});
    CHECK(r.exitCode == cli::kExitShadow);
    json rep = json::parse(r.report);
    CHECK(rep["match"] == true);
    CHECK(rep["spot_check"]["hit_disagreements"] == 0);
    CHECK(rep["spot_check"]["max_margin_diff"].get<double>() <= 1e-9);
    CHECK(rep["original_verdict"]["kind"] == "certified-shadow");
    CHECK(rep["mapped_verdict"]["kind"] == "certified-shadow");
    json doc = json::parse(read_file(mapped.path));
    CHECK(doc["map"]["diag"][0] == 0.25);
    std::remove(path.c_str());

    std::string sphere = write_temp_scene(random_sphere_scene(77, 1), "transform2.json");
    cli::RunResult rs = cli::run({"transform", sphere, "--scale", "3.0", "--check-dirs", "2000"});
    CHECK(rs.exitCode == cli::kExitNoShadow);
    CHECK(json::parse(rs.report)["match"] == true);
    std::remove(sphere.c_str());
}
