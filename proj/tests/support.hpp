#pragma once

#include <cstdint>
#include <random>

#include "oracle/reference_mapper.hpp"
#include "quadloco/config.hpp"
#include "quadloco/ingest.hpp"
#include "quadloco/mapper.hpp"

namespace qt {

using namespace quadloco;

// Small seeded source for the property generators below.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool chance(double p) { return uniform(0.0, 1.0) < p; }
    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

inline oracle::Params oracle_params(const MapperConfig& m) {
    return {m.c, m.b_xz, m.b_y, m.b_z, m.v_y_max, m.v_z_max, m.speed_threshold, m.jump_trigger, m.coyote};
}

// A mapper config with every value drawn from a plausible range.
inline MapperConfig random_mapper_config(Gen& g) {
    MapperConfig m;
    m.c = g.uniform(0.05, 0.5);
    m.b_xz = g.uniform(0.2, 3.0);
    m.b_y = g.uniform(0.2, 3.0);
    m.b_z = g.uniform(0.1, 2.0);
    m.v_y_max = g.uniform(0.5, 8.0);
    m.v_z_max = g.uniform(0.5, 10.0);
    m.speed_threshold = g.uniform(0.0, 0.5);
    m.jump_trigger = g.uniform(0.3, 2.0);
    m.coyote = g.uniform(0.0, 0.4);
    return m;
}

// Random limb kinematics of the kind map_frame produces.
inline LimbSet random_limbs(Gen& g, const MapperConfig& m) {
    LimbSet limbs{};
    for (std::size_t i = 0; i < kLimbCount; ++i) {
        LimbKinematics& k = limbs[i];
        k.limb = kLimbs[i];
        k.fresh = true;
        if (g.chance(0.15)) {
            k.velocity = {g.uniform(-0.1, 0.1), g.uniform(-0.1, 0.1), g.uniform(-0.1, 0.1)};
        } else {
            k.velocity = {g.uniform(-1.0, 1.0), g.uniform(-3.0, 4.0), g.uniform(-4.0, 4.0)};
        }
        k.ground_distance = g.chance(0.2) ? g.uniform(m.c, 2 * m.c) : g.uniform(0.0, m.c);
        k.weight = contact_weight(k.ground_distance, m.c);
    }
    return limbs;
}

struct FramePair {
    SkeletonFrame prev;
    SkeletonFrame cur;
    Calibration calib;
};

// Two consecutive sensor frames with random end-effector motion.
inline FramePair random_frame_pair(Gen& g, double floor_y = 0.05) {
    FramePair p;
    const double t0 = g.integer(0, 3000) / kSensorRate;
    p.prev = neutral_pose(t0);
    p.cur = neutral_pose(t0 + 1.0 / kSensorRate);
    for (JointId limb : kLimbs) {
        Vec3 a = p.prev.at(limb);
        a.y = floor_y + (g.chance(0.2) ? g.uniform(-0.05, 0.6) : g.uniform(0.0, 0.3));
        a.z += g.uniform(-0.3, 0.3);
        const Vec3 move{g.uniform(-0.05, 0.05), g.uniform(-0.1, 0.15), g.uniform(-0.15, 0.15)};
        p.prev.at(limb) = a;
        p.cur.at(limb) = g.chance(0.1) ? a : a + move;
        if (g.chance(0.05)) p.cur.confidence[index(limb)] = Confidence::Lost;
        if (g.chance(0.05)) p.prev.confidence[index(limb)] = Confidence::Lost;
    }
    p.calib.floor_y = floor_y;
    return p;
}

inline oracle::Input oracle_input(const FramePair& p, const AvatarView& avatar, double now) {
    oracle::Input in;
    in.t0 = p.prev.timestamp;
    in.t1 = p.cur.timestamp;
    in.floor_y = p.calib.floor_y;
    for (std::size_t i = 0; i < kLimbCount; ++i) {
        const Vec3 a = p.prev.at(kLimbs[i]);
        const Vec3 b = p.cur.at(kLimbs[i]);
        in.limbs[i] = {a.x, a.y, a.z, b.x, b.y, b.z, p.prev.lost(kLimbs[i]) || p.cur.lost(kLimbs[i])};
    }
    in.avatar_vy = avatar.velocity.y;
    in.avatar_vz = avatar.velocity.z;
    in.grounded_now = avatar.grounded;
    in.has_last_grounded = avatar.last_grounded.has_value();
    in.last_grounded = avatar.last_grounded.value_or(0.0);
    in.now = now;
    return in;
}

// Stationary neutral frames covering `seconds` at the sensor rate.
inline TrackedSequence still_sequence(double seconds) {
    TrackedSequence seq;
    const auto n = static_cast<std::size_t>(std::llround(seconds * kSensorRate));
    for (std::size_t k = 0; k < n; ++k) seq.frames.push_back(neutral_pose(static_cast<double>(k) / kSensorRate));
    return seq;
}

} // namespace qt
