#pragma once

#include <string>
#include <vector>

#include "umbra/types.hpp"

namespace umbra {

/// Reads and validates a scene document:
///   {"ellipsoid": {"d": 2.9},
///    "balls": [{"center": [x, y, z], "radius": r}, ...],
///    "semantics": "closed" | "open"}
/// Unknown fields are rejected. Balls with radius >= |center| produce
/// warnings, not errors, so probe scenes remain expressible.
struct ParsedScene {
    SceneConfig scene;
    std::vector<std::string> warnings;
};

ParsedScene parse_scene_text(const std::string& text);
ParsedScene parse_scene_file(const std::string& path);

/// Serializes with shortest round-trip doubles; parse(serialize(s)) == s bitwise.
std::string scene_to_text(const SceneConfig& cfg);
void write_scene_file(const SceneConfig& cfg, const std::string& path);

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

/// FNV-1a 64-bit digest of a byte string, hex-encoded; used to stamp reports
/// with the exact input they were computed from.
std::string fnv1a_digest(const std::string& bytes);

std::string read_file(const std::string& path);

}  // namespace umbra
