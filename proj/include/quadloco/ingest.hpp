#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "quadloco/skeleton.hpp"

namespace quadloco {

inline constexpr double kSensorRate = 30.0;
inline constexpr double kPhysicsRate = 60.0;

struct TrackedSequence {
    std::vector<SkeletonFrame> frames;
    double nominal_rate = kSensorRate;

    bool empty() const { return frames.empty(); }
    std::size_t size() const { return frames.size(); }
    double duration() const;

    friend bool operator==(const TrackedSequence&, const TrackedSequence&) = default;
};

// Trace text format, one frame per line:
//   t=<sec> <jointName>=<x>,<y>,<z>[,<T|I|L>] ...
// Blank lines and lines starting with '#' are ignored. A joint flagged L keeps
// the position it had in the previous frame.
TrackedSequence parse_trace(std::string_view text);
TrackedSequence load_trace(const std::filesystem::path& path);
std::string serialize_trace(const TrackedSequence& seq);
void save_trace(const TrackedSequence& seq, const std::filesystem::path& path);

/// Fixed supine rest pose used by the generators: pelvis at the origin, hands
/// at (+-0.25, 0.05, 0.45), feet at (+-0.15, 0.05, -0.55). Left is -x.
SkeletonFrame neutral_pose(double timestamp = 0.0);

// Per-limb displacement from the neutral pose, indexed like kLimbs.
using LimbOffsets = std::array<Vec3, kLimbCount>;

/// Trot-like paddling. `phase` is the cycle angle in radians, `envelope`
/// in [0,1] scales the whole motion. Diagonal pairs (LH+RF, RH+LF) are
/// phase-opposed; a limb touches the floor plane while it strokes forward
/// and lifts by amplitude/2 while it recovers.
LimbOffsets gait_offsets(double phase, double envelope, double amplitude);

/// Raised-cosine ramp from 0 to 1 over `ramp` seconds.
double gait_envelope(double t, double ramp);
inline constexpr double kGaitRampSeconds = 0.5;

/// Upward sweep of all four limbs `t` seconds after onset. Vertical speed
/// ramps linearly to `peak_speed`, holds, ramps back to zero, and the limbs
/// then stay raised.
LimbOffsets jump_offsets(double t, double peak_speed);
inline constexpr double kJumpRampSeconds = 0.1;
inline constexpr double kJumpHoldSeconds = 0.1;

SkeletonFrame apply_offsets(const SkeletonFrame& base, const LimbOffsets& offsets);

TrackedSequence synth_gait(double frequency, double amplitude, double duration, double rate);
TrackedSequence synth_jump(double peak_speed, double onset, double duration, double rate);

// Prepends `hold` seconds of neutral frames at the sequence rate and shifts the
// original frames to follow them.
TrackedSequence with_calibration_hold(const TrackedSequence& seq, double hold);

// Adds Gaussian noise to every joint position. Deterministic for a given seed.
void add_jitter(TrackedSequence& seq, double sigma, std::uint64_t seed);

// Positions are rounded to this grid by the generators (0.1 mm).
double quantize(double v);

// Aligns sensor samples with physics ticks: a frame is released on the first
// tick whose time is at or after its timestamp, at most once, in order.
class SampleClock {
public:
    explicit SampleClock(double sensor_rate = kSensorRate, double physics_rate = kPhysicsRate);

    std::optional<SkeletonFrame> next_sample(const TrackedSequence& seq, double tick_time);

    std::size_t cursor() const { return cursor_; }
    bool exhausted(const TrackedSequence& seq) const { return cursor_ >= seq.size(); }
    double sensor_rate() const { return sensor_rate_; }
    double physics_rate() const { return physics_rate_; }

private:
    double sensor_rate_;
    double physics_rate_;
    std::size_t cursor_ = 0;
};

// What the session loop pulls sensor frames from.
class FrameSource {
public:
    virtual ~FrameSource() = default;
    virtual std::optional<SkeletonFrame> poll(double tick_time) = 0;
    virtual bool exhausted() const = 0;
};

class SequenceSource final : public FrameSource {
public:
    explicit SequenceSource(TrackedSequence seq) : seq_(std::move(seq)) {}

    std::optional<SkeletonFrame> poll(double tick_time) override {
        return clock_.next_sample(seq_, tick_time);
    }
    bool exhausted() const override { return clock_.exhausted(seq_); }
    const TrackedSequence& sequence() const { return seq_; }

private:
    TrackedSequence seq_;
    SampleClock clock_;
};

} // namespace quadloco
