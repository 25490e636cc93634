#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "quadloco/vec3.hpp"

namespace quadloco {

struct Box {
    Vec3 min;
    Vec3 max;

    Vec3 center() const { return (min + max) * 0.5; }
    Vec3 size() const { return max - min; }
    Box translated(const Vec3& d) const { return {min + d, max + d}; }
    friend bool operator==(const Box&, const Box&) = default;
};

// Strict interior overlap; touching faces do not count.
bool overlaps(const Box& a, const Box& b, double eps = 1e-9);

enum class PlatformKind { Static, Falling, Moving };

struct Platform {
    PlatformKind kind = PlatformKind::Static;
    Box box;
    // Moving: offset from `box` follows travel * (1 - cos(2*pi*t/period + phase)) / 2.
    Vec3 travel;
    double period = 0.0;
    double phase = 0.0;
    // Falling: seconds from first avatar contact until the platform stops being solid.
    double collapse_delay = 0.0;

    friend bool operator==(const Platform&, const Platform&) = default;
};

struct Checkpoint {
    int id = 0;
    double z = 0.0;     // plane crossed when the avatar's center passes it
    Vec3 spawn;         // avatar center after a respawn here
    friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

struct LevelSpec {
    std::string name;
    std::vector<Platform> platforms;
    std::vector<Checkpoint> checkpoints;  // ordered by id, ids 1..n
    Vec3 spawn;                           // checkpoint 0
    double kill_y = -5.0;
    double finish_z = 0.0;

    Vec3 spawn_for(int checkpoint_id) const;
    friend bool operator==(const LevelSpec&, const LevelSpec&) = default;
};

// Line-oriented declarative format, see levels/*.lvl.
LevelSpec parse_level(std::string_view text);
LevelSpec load_level(const std::filesystem::path& path);
std::string serialize_level(const LevelSpec& level);

int bundled_level_count();
// 1: flat run, 2: single 1.2 m gap, 3: mixed course. Throws InvalidLevel.
LevelSpec bundled_level(int id);
std::string_view bundled_level_source(int id);

// A flat strip long enough for `length` meters of running, used by benchmarks.
LevelSpec endless_flat_level(double length);

} // namespace quadloco
