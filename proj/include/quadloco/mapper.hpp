#pragma once

#include <array>
#include <optional>
#include <span>

#include "quadloco/skeleton.hpp"

namespace quadloco {

struct MapperConfig {
    double c = 0.25;                // contact zone thickness, m
    double b_xz = 1.6;              // forward boost
    double b_y = 1.5;               // vertical jump boost
    double b_z = 0.6;               // forward lunge boost
    double v_y_max = 4.0;           // m/s
    double v_z_max = 6.0;           // m/s
    double speed_threshold = 0.15;  // m/s, limbs slower than this carry no weight
    double jump_trigger = 1.0;      // m/s, minimum upward limb speed
    double coyote = 0.200;          // s

    void validate() const;
    friend bool operator==(const MapperConfig&, const MapperConfig&) = default;
};

struct Calibration {
    double floor_y = 0.0;
    std::array<Vec3, kJointCount> neutral{};
    double hold_duration = 0.0;
};

struct LimbKinematics {
    JointId limb = JointId::LeftHand;
    Vec3 velocity;
    double ground_distance = 0.0;
    double weight = 0.0;
    bool fresh = false;
    bool degraded = false;

    friend bool operator==(const LimbKinematics&, const LimbKinematics&) = default;
};

using LimbSet = std::array<LimbKinematics, kLimbCount>;

struct JumpVelocity {
    double vy = 0.0;
    double vz = 0.0;
    friend bool operator==(const JumpVelocity&, const JumpVelocity&) = default;
};

struct MapperOutput {
    std::optional<Vec3> locomotion;
    std::optional<JumpVelocity> jump;
    LimbSet limbs{};
    bool fresh = false;

    bool has_override() const { return locomotion.has_value() || jump.has_value(); }
};

struct LimbVelocity {
    Vec3 velocity;
    bool degraded = false;
};

// Mean pose over a held rest period. Throws InsufficientFrames when the frames
// cover less than `required_hold`, CalibrationUnstable when an end effector's
// height range exceeds `stability_tol`.
Calibration calibrate(std::span<const SkeletonFrame> frames, double required_hold,
                      double stability_tol);

LimbVelocity limb_velocity(const SkeletonFrame& prev, const SkeletonFrame& cur, JointId limb);

// max(0, 1 - d/c)
double contact_weight(double d, double c);

std::optional<Vec3> locomotion_velocity(std::span<const LimbKinematics, kLimbCount> limbs,
                                        const MapperConfig& cfg);

bool grounded_with_coyote(bool grounded_now, std::optional<double> last_grounded, double now,
                          double coyote);

// Candidate per triggering limb, best one wins: highest vertical speed, then
// highest forward speed, then limb order.
std::optional<JumpVelocity> jump_decision(std::span<const LimbKinematics, kLimbCount> limbs,
                                          const Vec3& avatar_velocity, bool grounded,
                                          const MapperConfig& cfg);

struct AvatarView {
    Vec3 velocity;
    bool grounded = false;
    std::optional<double> last_grounded;
};

MapperOutput map_frame(const SkeletonFrame& prev, const SkeletonFrame& cur,
                       const Calibration& calibration, const AvatarView& avatar,
                       const MapperConfig& cfg, double now);

// Output for a tick without a new sensor sample: the previous kinematics
// marked stale, and no overrides.
MapperOutput map_stale(const MapperOutput& previous);

} // namespace quadloco
