#pragma once

#include <optional>
#include <vector>

#include "quadloco/level.hpp"
#include "quadloco/mapper.hpp"

namespace quadloco {

inline constexpr Vec3 kAvatarHalfExtents{0.25, 0.25, 0.45};

struct AvatarState {
    Vec3 position;
    Vec3 velocity;
    bool grounded = false;
    std::optional<double> last_grounded;
    Vec3 half_extents = kAvatarHalfExtents;
    int support = -1;  // platform index under the avatar, -1 if none

    Box box() const { return {position - half_extents, position + half_extents}; }
    AvatarView view() const { return {velocity, grounded, last_grounded}; }
    friend bool operator==(const AvatarState&, const AvatarState&) = default;
};

struct PlatformState {
    Vec3 offset;
    Vec3 last_delta;
    bool solid = true;
    std::optional<double> first_contact;
    friend bool operator==(const PlatformState&, const PlatformState&) = default;
};

struct World {
    LevelSpec level;
    std::vector<PlatformState> platforms;
    double time = 0.0;

    explicit World(LevelSpec lvl);
    Box platform_box(std::size_t i) const { return level.platforms[i].box.translated(platforms[i].offset); }
    bool solid(std::size_t i) const { return platforms[i].solid; }
    // Restores every platform to its initial state; the clock keeps running.
    void reset_platforms();
    double thinnest_solid_extent() const;
};

struct ContactReport {
    bool ground = false;
    bool ceiling = false;
    bool wall = false;
    int support = -1;
    std::vector<int> touched;  // sorted, unique
};

struct PhysicsParams {
    double gravity = 9.81;
    double friction = 0.92;
    double max_step_up = 0.15;
    int max_substeps = 64;
};

struct StepResult {
    AvatarState avatar;
    ContactReport contacts;
    Vec3 pre_integration_velocity;  // velocity after overrides, before gravity
    int substeps = 1;
};

struct CollisionResult {
    Vec3 position;
    ContactReport contacts;
    bool blocked_x = false;
    bool blocked_y = false;
    bool blocked_z = false;
};

// Moves the avatar box by `attempted_move` one axis at a time (y, z, x) and
// pushes it back out of any solid platform on that axis. `allow_step_up`
// lets a horizontal move climb ledges up to params.max_step_up.
CollisionResult resolve_collisions(const World& world, const AvatarState& avatar,
                                   const Vec3& attempted_move, bool allow_step_up = false,
                                   double max_step_up = 0.15);

// Advances platform motion and collapse timers by dt. Returns indices of
// falling platforms that collapsed during this call.
std::vector<int> update_platforms(World& world, double dt, const ContactReport& contacts);

// One fixed tick. `now` is the time at the end of the tick.
StepResult step(const World& world, const AvatarState& avatar, const MapperOutput& output,
                const PhysicsParams& params, double dt, double now);

// Pushes the avatar out of solid platforms along the shallowest axis.
Vec3 depenetrate(const World& world, const AvatarState& avatar);

} // namespace quadloco
