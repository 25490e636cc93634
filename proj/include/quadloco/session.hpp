#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "quadloco/config.hpp"
#include "quadloco/ingest.hpp"
#include "quadloco/physics.hpp"
#include "quadloco/retarget.hpp"

namespace quadloco {

enum class Phase { Calibrating, Running, Finished };
const char* phase_name(Phase p);

enum class EventKind { CheckpointReached, Respawned, Finished, PlatformCollapsed };
const char* event_name(EventKind k);

struct GameEvent {
    EventKind kind = EventKind::CheckpointReached;
    double clock = 0.0;
    int checkpoint = -1;  // CheckpointReached, Respawned (target checkpoint)
    int platform = -1;    // PlatformCollapsed
    friend bool operator==(const GameEvent&, const GameEvent&) = default;
};

struct SessionMetrics {
    std::vector<std::pair<int, double>> checkpoint_times;  // run-relative seconds
    int respawns = 0;
    std::optional<double> completion_time;
    double distance_travelled = 0.0;
    bool input_exhausted_before_finish = false;
    std::vector<double> progress;  // avatar z at each whole second of run time
    std::uint64_t ticks = 0;
};

enum class OverrideKind : unsigned char { None, Locomotion, Jump };

struct StateRecord {
    std::uint64_t tick = 0;
    double clock = 0.0;  // at the end of the tick
    Vec3 position;
    Vec3 velocity;
    bool grounded = false;
    bool fresh = false;
    OverrideKind override_kind = OverrideKind::None;
    Phase phase = Phase::Calibrating;
    std::vector<GameEvent> events;
    friend bool operator==(const StateRecord&, const StateRecord&) = default;
};

std::string format_state_record(const StateRecord& rec);

// FNV-1a over the bit patterns of every logged field.
class RunHasher {
public:
    void add(const StateRecord& rec);
    std::uint64_t value() const { return h_; }

private:
    void mix(const void* data, std::size_t n);
    std::uint64_t h_ = 14695981039346656037ull;
};

std::string hash_hex(std::uint64_t h);

struct TickResult {
    bool fresh = false;
    std::vector<GameEvent> events;
    StateRecord record;
};

class Session {
public:
    Session(LevelSpec level, SimConfig cfg);

    // One fixed physics tick: at most one fresh sensor frame, mapping, physics,
    // then checkpoint/respawn/finish rules. The first `calibration_hold`
    // seconds of input calibrate the floor plane before the run clock starts.
    TickResult tick(FrameSource& input);

    // Mapper keys only; takes effect on the next tick.
    void set_param(std::string_view key, double value);

    Phase phase() const { return phase_; }
    double clock() const { return static_cast<double>(tick_) / kPhysicsRate; }
    double dt() const { return dt_; }
    std::uint64_t tick_count() const { return tick_; }
    std::optional<double> run_start() const { return run_start_; }
    int last_checkpoint() const { return last_checkpoint_; }
    const AvatarState& avatar() const { return avatar_; }
    const World& world() const { return world_; }
    const LevelSpec& level() const { return world_.level; }
    const SimConfig& config() const { return cfg_; }
    const SessionMetrics& metrics() const { return metrics_; }
    const MapperOutput& last_output() const { return output_; }
    const QuadPose& pose() const { return pose_; }
    const std::optional<Calibration>& calibration() const { return calibration_; }

private:
    void start_run();
    void respawn(double now, std::vector<GameEvent>& events);

    SimConfig cfg_;
    World world_;
    AvatarState avatar_;
    ContactReport contacts_;
    double dt_ = 1.0 / kPhysicsRate;
    std::uint64_t tick_ = 0;
    Phase phase_ = Phase::Calibrating;
    std::optional<double> run_start_;
    int last_checkpoint_ = 0;
    SessionMetrics metrics_;
    std::vector<SkeletonFrame> calibration_frames_;
    std::optional<Calibration> calibration_;
    std::optional<SkeletonFrame> prev_frame_;
    MapperOutput output_;
    QuadPose pose_;
};

struct HeadlessOptions {
    bool keep_log = true;
    double grace_after_input = 5.0;  // seconds simulated after input runs out
    std::uint64_t max_ticks = 10'000'000;
};

struct HeadlessResult {
    SessionMetrics metrics;
    std::vector<StateRecord> log;
    std::uint64_t hash = 0;
};

HeadlessResult run_headless(const LevelSpec& level, FrameSource& input, const SimConfig& cfg,
                            const HeadlessOptions& options = {});
HeadlessResult run_headless(const LevelSpec& level, const TrackedSequence& input,
                            const SimConfig& cfg, const HeadlessOptions& options = {});

void write_state_log(const std::vector<StateRecord>& log, const std::filesystem::path& path);

} // namespace quadloco
