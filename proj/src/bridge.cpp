#include "quadloco/bridge.hpp"

#include <cmath>
#include <numbers>

namespace quadloco {

SynthInputBridge::SynthInputBridge(BridgeParams params) : params_(params) { recording_.nominal_rate = params_.rate; }

void SynthInputBridge::apply(const cmd::LimbInput& input) {
    if (input.pattern == cmd::Pattern::Paddle) {
        hold_paddle(input.action != cmd::Action::Release);
    } else if (input.pattern == cmd::Pattern::Flick) {
        if (input.action != cmd::Action::Release) flick();
    } else if (input.limb) {
        set_limb_velocity(*input.limb, input.velocity);
    }
}

void SynthInputBridge::flick() {
    if (flick_sample_ < 0) flick_sample_ = 0;
}

void SynthInputBridge::set_limb_velocity(JointId limb, const Vec3& velocity) {
    if (is_end_effector(limb)) manual_velocity_[index(limb)] = velocity;
}

void SynthInputBridge::reset() {
    const bool rec = recording_on_;
    *this = SynthInputBridge(params_);
    recording_on_ = rec;
}

std::optional<SkeletonFrame> SynthInputBridge::poll(double tick_time) {
    const double t = static_cast<double>(sample_) / params_.rate;
    if (t > tick_time) return std::nullopt;
    SkeletonFrame f = generate();
    ++sample_;
    if (recording_on_) recording_.frames.push_back(f);
    return f;
}

SkeletonFrame SynthInputBridge::generate() {
    const double rate = params_.rate;
    const double t = static_cast<double>(sample_) / rate;
    const auto ramp_samples = static_cast<std::int64_t>(std::llround(kGaitRampSeconds * rate));

    // Paddle: read counters, then advance.
    LimbOffsets offsets{};
    if (paddle_held_ || envelope_samples_ > 0) {
        const double local = static_cast<double>(paddle_samples_) / rate;
        const double phase = 2.0 * std::numbers::pi * params_.gait_frequency * local;
        const double env = gait_envelope(static_cast<double>(envelope_samples_) / rate, kGaitRampSeconds);
        offsets = gait_offsets(phase, env, params_.gait_amplitude);
        ++paddle_samples_;
        if (paddle_held_) envelope_samples_ = std::min(envelope_samples_ + 1, ramp_samples);
        else --envelope_samples_;
    }
    if (!paddle_held_ && envelope_samples_ == 0) paddle_samples_ = 0;

    if (flick_sample_ >= 0) {
        // one sample ahead of synth_jump
        const double s = static_cast<double>(flick_sample_ + 1) / rate;
        const double sweep = 2.0 * kJumpRampSeconds + kJumpHoldSeconds;
        LimbOffsets lift = jump_offsets(s, params_.flick_peak_speed);
        const double u = (s - sweep - params_.flick_hold) / params_.flick_lower;
        if (u > 0.0) {
            const double keep = u >= 1.0 ? 0.0 : 0.5 * (1.0 + std::cos(std::numbers::pi * u));
            for (Vec3& o : lift) o.y *= keep;
        }
        for (std::size_t i = 0; i < kLimbCount; ++i) offsets[i] += lift[i];
        flick_sample_ = u >= 1.0 ? -1 : flick_sample_ + 1;
    }

    for (std::size_t i = 0; i < kLimbCount; ++i) {
        manual_offset_[i] += manual_velocity_[i] / rate;
        offsets[i] += manual_offset_[i];
    }
    return apply_offsets(neutral_pose(t), offsets);
}

} // namespace quadloco
