#pragma once

#include <array>
#include <cstdint>

#include "quadloco/ingest.hpp"
#include "quadloco/protocol.hpp"

namespace quadloco {

struct BridgeParams {
    double rate = kSensorRate;
    double gait_frequency = 1.0;   // Hz
    double gait_amplitude = 0.3;   // m
    double flick_peak_speed = 2.6; // m/s, clears the bundled 1.2 m gap
    double flick_hold = 0.3;       // s the limbs stay raised after a flick
    double flick_lower = 1.0;      // s to lower them again
};

// Turns held/pressed key patterns into sensor frames at the sensor rate.
// Paddle produces the synth_gait motion, flick the synth_jump sweep.
class SynthInputBridge final : public FrameSource {
public:
    explicit SynthInputBridge(BridgeParams params = {});

    void apply(const cmd::LimbInput& input);
    void hold_paddle(bool held) { paddle_held_ = held; }
    void flick();
    void set_limb_velocity(JointId limb, const Vec3& velocity);
    void reset();

    std::optional<SkeletonFrame> poll(double tick_time) override;
    bool exhausted() const override { return false; }

    void set_recording(bool on) { recording_on_ = on; }
    const TrackedSequence& recording() const { return recording_; }

    bool paddle_held() const { return paddle_held_; }
    bool flick_active() const { return flick_sample_ >= 0; }
    std::uint64_t samples() const { return sample_; }

private:
    SkeletonFrame generate();

    BridgeParams params_;
    std::uint64_t sample_ = 0;
    bool paddle_held_ = false;
    std::uint64_t paddle_samples_ = 0;   // phase counter while the paddle envelope is open
    std::int64_t envelope_samples_ = 0;  // 0..ramp in samples
    std::int64_t flick_sample_ = -1;     // samples since the flick started, -1 when idle
    std::array<Vec3, kLimbCount> manual_velocity_{};
    std::array<Vec3, kLimbCount> manual_offset_{};
    bool recording_on_ = false;
    TrackedSequence recording_;
};

} // namespace quadloco
