#include "umbra/scene_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace umbra {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fnv1a_digest(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    static const char* hex = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = hex[h & 0xF];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) ok = true;
        if (!ok) throw ParseError("unknown field \"" + it.key() + "\" in " + where);
    }
}

double require_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ParseError(where + "." + key);
    const json& v = obj.at(key);
    if (!v.is_number()) throw ParseError(where + "." + key + " must be a number");
    return v.get<double>();
}

}  // namespace

ParsedScene parse_scene_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid document: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("top level must be an object");
    reject_unknown(doc, {"ellipsoid", "balls", "semantics"}, "scene");
    if (!doc.contains("ellipsoid")) throw ParseError("ellipsoid");
    if (!doc.contains("balls")) throw ParseError("balls");
    if (!doc.contains("semantics")) throw ParseError("semantics");

    const json& el = doc.at("ellipsoid");
    if (!el.is_object()) throw ParseError("ellipsoid must be an object");
    reject_unknown(el, {"d"}, "ellipsoid");
    double d = require_number(el, "d", "ellipsoid");
    if (!(d >= 1.0)) throw ValidationError("ellipsoid.d must be >= 1, got " + format_double(d));

    std::string sem = doc.at("semantics").is_string() ? doc.at("semantics").get<std::string>() : "";
    if (sem != "closed" && sem != "open")
        throw ParseError("semantics must be \"closed\" or \"open\"");

    ParsedScene out;
    out.scene.ellipsoid = EllipsoidMetric(d);
    out.scene.semantics = sem == "closed" ? HitSemantics::Closed : HitSemantics::Open;

    const json& balls = doc.at("balls");
    if (!balls.is_array()) throw ParseError("balls must be an array");
    for (std::size_t i = 0; i < balls.size(); ++i) {
        std::string where = "balls[" + std::to_string(i) + "]";
        const json& b = balls[i];
        if (!b.is_object()) throw ParseError(where + " must be an object");
        reject_unknown(b, {"center", "radius"}, where);
        if (!b.contains("center")) throw ParseError(where + ".center");
        if (!b.contains("radius")) throw ParseError(where + ".radius");
        const json& c = b.at("center");
        if (!c.is_array() || c.size() != 3 || !c[0].is_number() || !c[1].is_number() ||
            !c[2].is_number())
            throw ParseError(where + ".center must be an array of 3 numbers");
        double radius = b.at("radius").get<double>();
        if (!b.at("radius").is_number() || !(radius > 0.0))
            throw ValidationError(where + ".radius must be > 0");
        Vec3 center{c[0].get<double>(), c[1].get<double>(), c[2].get<double>()};
        double dev = std::fabs(out.scene.ellipsoid.metric_norm(center) - 1.0);
        if (dev > 1e-6)
            throw ValidationError(where + ".center is off the ellipsoid surface by " +
                                  format_double(dev));
        Ball ball(center, radius);
        if (radius >= center.norm())
            out.warnings.push_back(where + ": radius >= |center|, ball holds the center");
        out.scene.balls.push_back(ball);
    }
    return out;
}

ParsedScene parse_scene_file(const std::string& path) {
    return parse_scene_text(read_file(path));
}

std::string scene_to_text(const SceneConfig& cfg) {
    json doc;
    doc["ellipsoid"] = {{"d", cfg.ellipsoid.d}};
    json balls = json::array();
    for (const Ball& b : cfg.balls) {
        json jb;
        jb["center"] = {b.center.x, b.center.y, b.center.z};
        jb["radius"] = b.radius;
        balls.push_back(jb);
    }
    doc["balls"] = balls;
    doc["semantics"] = to_string(cfg.semantics);
    return doc.dump(2) + "\n";
}

void write_scene_file(const SceneConfig& cfg, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path);
    out << scene_to_text(cfg);
}

}  // namespace umbra
