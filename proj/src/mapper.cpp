#include "quadloco/mapper.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "quadloco/error.hpp"

namespace quadloco {

namespace {

// Lower bound wins when the bounds cross: a jump never slows the avatar.
double clip(double x, double lo, double hi) { return std::max(lo, std::min(x, hi)); }

void check_config(bool ok, const char* what) {
    if (!ok) throw Error(Errc::InvalidConfig, what);
}

} // namespace

void MapperConfig::validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) throw Error(Errc::InvalidC, "contact zone thickness c must be > 0");
    check_config(b_xz > 0.0 && std::isfinite(b_xz), "b_xz must be > 0");
    check_config(b_y > 0.0 && std::isfinite(b_y), "b_y must be > 0");
    check_config(b_z > 0.0 && std::isfinite(b_z), "b_z must be > 0");
    check_config(v_y_max > 0.0 && std::isfinite(v_y_max), "v_y_max must be > 0");
    check_config(v_z_max > 0.0 && std::isfinite(v_z_max), "v_z_max must be > 0");
    check_config(speed_threshold >= 0.0 && std::isfinite(speed_threshold), "speed_threshold must be >= 0");
    check_config(jump_trigger >= 0.0 && std::isfinite(jump_trigger), "jump_trigger must be >= 0");
    check_config(coyote >= 0.0 && std::isfinite(coyote), "coyote must be >= 0");
}

Calibration calibrate(std::span<const SkeletonFrame> frames, double required_hold, double stability_tol) {
    if (frames.size() < 2) throw Error(Errc::InsufficientFrames, "calibration needs at least two frames");
    const double first = frames.front().timestamp;
    const double last = frames.back().timestamp;
    const double period = (last - first) / static_cast<double>(frames.size() - 1);
    const double span = last - first + period;
    if (span + 1e-9 < required_hold) {
        throw Error(Errc::InsufficientFrames, "calibration hold covers " + std::to_string(span) +
                                                  " s, need " + std::to_string(required_hold) + " s");
    }

    Calibration cal;
    cal.hold_duration = span;
    for (JointId limb : kLimbs) {
        double lo = INFINITY;
        double hi = -INFINITY;
        for (const SkeletonFrame& f : frames) {
            if (f.lost(limb)) continue;
            lo = std::min(lo, f.at(limb).y);
            hi = std::max(hi, f.at(limb).y);
        }
        if (lo > hi) {
            throw Error(Errc::CalibrationUnstable,
                        std::string(joint_name(limb)) + " was never tracked during calibration");
        }
        if (hi - lo > stability_tol) {
            throw Error(Errc::CalibrationUnstable, std::string(joint_name(limb)) + " moved " +
                                                       std::to_string(hi - lo) + " m vertically (tolerance " +
                                                       std::to_string(stability_tol) + " m)");
        }
    }

    // Shifted means, relative to the first tracked sample.
    std::array<Vec3, kJointCount> ref{};
    std::array<Vec3, kJointCount> sum{};
    std::array<std::size_t, kJointCount> count{};
    std::optional<double> floor_ref;
    double floor_sum = 0.0;
    std::size_t floor_count = 0;

    for (const SkeletonFrame& f : frames) {
        for (std::size_t j = 0; j < kJointCount; ++j) {
            if (!f.present.test(j) || f.confidence[j] == Confidence::Lost) continue;
            if (count[j] == 0) ref[j] = f.joints[j];
            sum[j] += f.joints[j] - ref[j];
            ++count[j];
            if (j < kLimbCount) {
                if (!floor_ref) floor_ref = f.joints[j].y;
                floor_sum += f.joints[j].y - *floor_ref;
                ++floor_count;
            }
        }
    }
    for (std::size_t j = 0; j < kJointCount; ++j) {
        if (count[j] > 0) cal.neutral[j] = ref[j] + sum[j] / static_cast<double>(count[j]);
    }
    cal.floor_y = *floor_ref + floor_sum / static_cast<double>(floor_count);
    return cal;
}

LimbVelocity limb_velocity(const SkeletonFrame& prev, const SkeletonFrame& cur, JointId limb) {
    const double dt = cur.timestamp - prev.timestamp;
    if (!(dt > 0.0)) throw Error(Errc::ZeroDt, "limb velocity needs increasing timestamps");
    if (prev.lost(limb) || cur.lost(limb)) return {{}, true};
    return {(cur.at(limb) - prev.at(limb)) / dt, false};
}

double contact_weight(double d, double c) {
    if (!(c > 0.0)) throw Error(Errc::InvalidC, "contact zone thickness c must be > 0");
    return std::max(0.0, 1.0 - d / c);
}

std::optional<Vec3> locomotion_velocity(std::span<const LimbKinematics, kLimbCount> limbs,
                                        const MapperConfig& cfg) {
    Vec3 weighted;
    double weight_sum = 0.0;
    for (const LimbKinematics& limb : limbs) {
        const double w = limb.velocity.norm() > cfg.speed_threshold ? limb.weight : 0.0;
        weighted += limb.velocity * w;
        weight_sum += w;
    }
    if (weight_sum == 0.0) return std::nullopt;
    const Vec3 target = weighted / weight_sum * cfg.b_xz;
    return Vec3{0.0, 0.0, std::max(0.0, target.z)};
}

bool grounded_with_coyote(bool grounded_now, std::optional<double> last_grounded, double now,
                          double coyote) {
    if (grounded_now) return true;
    return last_grounded.has_value() && now - *last_grounded <= coyote;
}

std::optional<JumpVelocity> jump_decision(std::span<const LimbKinematics, kLimbCount> limbs,
                                          const Vec3& avatar_velocity, bool grounded,
                                          const MapperConfig& cfg) {
    if (!grounded) return std::nullopt;
    std::optional<JumpVelocity> best;
    for (const LimbKinematics& limb : limbs) {
        if (!limb.fresh || limb.degraded || !(limb.velocity.y > cfg.jump_trigger)) continue;
        const double vy = limb.velocity.y;
        const JumpVelocity candidate{
            clip(cfg.b_y * vy, avatar_velocity.y, cfg.v_y_max),
            clip(limb.velocity.z + cfg.b_z * vy, avatar_velocity.z, cfg.v_z_max),
        };
        if (!best || candidate.vy > best->vy || (candidate.vy == best->vy && candidate.vz > best->vz))
            best = candidate;
    }
    return best;
}

MapperOutput map_frame(const SkeletonFrame& prev, const SkeletonFrame& cur, const Calibration& calibration,
                       const AvatarView& avatar, const MapperConfig& cfg, double now) {
    MapperOutput out;
    out.fresh = true;
    for (std::size_t i = 0; i < kLimbCount; ++i) {
        const JointId limb = kLimbs[i];
        const LimbVelocity lv = limb_velocity(prev, cur, limb);
        LimbKinematics& k = out.limbs[i];
        k.limb = limb;
        k.velocity = lv.velocity;
        k.degraded = lv.degraded;
        k.fresh = true;
        k.ground_distance = std::max(0.0, cur.at(limb).y - calibration.floor_y);
        k.weight = lv.degraded ? 0.0 : contact_weight(k.ground_distance, cfg.c);
    }
    const bool grounded = grounded_with_coyote(avatar.grounded, avatar.last_grounded, now, cfg.coyote);
    out.jump = jump_decision(out.limbs, avatar.velocity, grounded, cfg);
    if (!out.jump) out.locomotion = locomotion_velocity(out.limbs, cfg);
    return out;
}

MapperOutput map_stale(const MapperOutput& previous) {
    MapperOutput out;
    out.limbs = previous.limbs;
    for (std::size_t i = 0; i < kLimbCount; ++i) {
        out.limbs[i].limb = kLimbs[i];
        out.limbs[i].fresh = false;
    }
    return out;
}

} // namespace quadloco
