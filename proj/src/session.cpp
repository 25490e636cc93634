#include "quadloco/session.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "quadloco/error.hpp"
#include "text_util.hpp"

namespace quadloco {

const char* phase_name(Phase p) {
    switch (p) {
    case Phase::Calibrating: return "calibrating";
    case Phase::Running: return "running";
    case Phase::Finished: return "finished";
    }
    return "?";
}

const char* event_name(EventKind k) {
    switch (k) {
    case EventKind::CheckpointReached: return "CheckpointReached";
    case EventKind::Respawned: return "Respawned";
    case EventKind::Finished: return "Finished";
    case EventKind::PlatformCollapsed: return "PlatformCollapsed";
    }
    return "?";
}

std::string format_state_record(const StateRecord& rec) {
    using detail::format_double;
    using detail::format_vec3;
    static constexpr const char* kOverride[] = {"none", "loco", "jump"};
    std::string out = "tick=" + std::to_string(rec.tick) + " t=" + format_double(rec.clock) +
                      " phase=" + phase_name(rec.phase) + " pos=" + format_vec3(rec.position) +
                      " vel=" + format_vec3(rec.velocity) + " grounded=" + (rec.grounded ? "1" : "0") +
                      " fresh=" + (rec.fresh ? "1" : "0") +
                      " override=" + kOverride[static_cast<int>(rec.override_kind)] + " events=";
    if (rec.events.empty()) out += '-';
    for (std::size_t i = 0; i < rec.events.size(); ++i) {
        const GameEvent& e = rec.events[i];
        if (i) out += ';';
        switch (e.kind) {
        case EventKind::CheckpointReached: out += "checkpoint:" + std::to_string(e.checkpoint); break;
        case EventKind::Respawned: out += "respawn:" + std::to_string(e.checkpoint); break;
        case EventKind::Finished: out += "finished"; break;
        case EventKind::PlatformCollapsed: out += "collapse:" + std::to_string(e.platform); break;
        }
    }
    return out;
}

void RunHasher::mix(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h_ ^= p[i];
        h_ *= 1099511628211ull;
    }
}

void RunHasher::add(const StateRecord& rec) {
    auto f64 = [this](double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        mix(&bits, sizeof bits);
    };
    auto i64 = [this](std::int64_t v) { mix(&v, sizeof v); };
    i64(static_cast<std::int64_t>(rec.tick));
    f64(rec.clock);
    for (const Vec3* v : {&rec.position, &rec.velocity}) {
        f64(v->x);
        f64(v->y);
        f64(v->z);
    }
    i64(rec.grounded);
    i64(rec.fresh);
    i64(static_cast<std::int64_t>(rec.override_kind));
    i64(static_cast<std::int64_t>(rec.phase));
    for (const GameEvent& e : rec.events) {
        i64(static_cast<std::int64_t>(e.kind));
        i64(e.checkpoint);
        i64(e.platform);
        f64(e.clock);
    }
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Session::Session(LevelSpec level, SimConfig cfg) : cfg_(cfg), world_(std::move(level)) {
    cfg_.validate();
    avatar_.position = world_.level.spawn;
    avatar_.grounded = true;
    avatar_.last_grounded = 0.0;
    output_ = map_stale(MapperOutput{});
    pose_ = neutral_quad_pose();
}

void Session::set_param(std::string_view key, double value) {
    if (!is_mapper_key(key)) throw Error(Errc::UnknownKey, "'" + std::string(key) + "' is not a mapper parameter");
    set_config_value(cfg_, key, value);
}

void Session::start_run() {
    prev_frame_ = calibration_frames_.back();
    calibration_frames_.clear();
    calibration_frames_.shrink_to_fit();
    phase_ = Phase::Running;
    run_start_ = clock();
}

void Session::respawn(double now, std::vector<GameEvent>& events) {
    AvatarState fresh;
    fresh.position = world_.level.spawn_for(last_checkpoint_);
    fresh.half_extents = avatar_.half_extents;
    fresh.grounded = true;
    fresh.last_grounded = now;
    avatar_ = fresh;
    contacts_ = {};
    world_.reset_platforms();
    ++metrics_.respawns;
    events.push_back({EventKind::Respawned, now, last_checkpoint_, -1});
}

TickResult Session::tick(FrameSource& input) {
    TickResult r;
    const double t0 = clock();
    const double t1 = static_cast<double>(tick_ + 1) / kPhysicsRate;

    if (phase_ == Phase::Finished) {
        r.record = {tick_, t0, avatar_.position, avatar_.velocity, avatar_.grounded, false, OverrideKind::None, phase_, {}};
        return r;
    }

    std::optional<SkeletonFrame> frame = input.poll(t0);

    if (phase_ == Phase::Calibrating && frame) {
        const bool holding = calibration_frames_.empty() ||
                             frame->timestamp - calibration_frames_.front().timestamp < cfg_.calibration_hold - 1e-9;
        if (holding) {
            calibration_frames_.push_back(*frame);
            frame.reset();
        } else {
            try {
                calibration_ = calibrate(calibration_frames_, cfg_.calibration_hold, cfg_.calibration_tol);
                start_run();
            } catch (const Error& e) {
                if (e.code() != Errc::CalibrationUnstable && e.code() != Errc::InsufficientFrames) throw;
                // Start over from this frame; the player has to hold still again.
                calibration_frames_.clear();
                calibration_frames_.push_back(*frame);
                frame.reset();
            }
        }
    }

    if (phase_ == Phase::Running && frame) {
        output_ = map_frame(*prev_frame_, *frame, *calibration_, avatar_.view(), cfg_.mapper, t0);
        pose_ = retarget_pose(*frame, *calibration_, pose_);
        prev_frame_ = *frame;
        r.fresh = true;
    } else {
        output_ = map_stale(output_);
    }

    for (int idx : update_platforms(world_, dt_, contacts_))
        r.events.push_back({EventKind::PlatformCollapsed, t1, -1, idx});

    const PhysicsParams params{cfg_.gravity, cfg_.friction};
    const double z_before = avatar_.position.z;
    StepResult res = step(world_, avatar_, output_, params, dt_, t1);
    avatar_ = res.avatar;
    contacts_ = std::move(res.contacts);
    if (phase_ == Phase::Running) metrics_.distance_travelled += std::abs(avatar_.position.z - z_before);

    if (avatar_.position.y < world_.level.kill_y) respawn(t1, r.events);

    if (phase_ == Phase::Running) {
        const double rel = t1 - *run_start_;
        for (const Checkpoint& cp : world_.level.checkpoints) {
            if (cp.id <= last_checkpoint_) continue;
            if (avatar_.position.z < cp.z) break;
            last_checkpoint_ = cp.id;
            metrics_.checkpoint_times.emplace_back(cp.id, rel);
            r.events.push_back({EventKind::CheckpointReached, t1, cp.id, -1});
        }
        while (static_cast<double>(metrics_.progress.size() + 1) <= rel + 1e-9)
            metrics_.progress.push_back(avatar_.position.z);
        if (avatar_.position.z >= world_.level.finish_z) {
            phase_ = Phase::Finished;
            metrics_.completion_time = rel;
            r.events.push_back({EventKind::Finished, t1, -1, -1});
        }
    }

    ++tick_;
    metrics_.ticks = tick_;

    OverrideKind kind = OverrideKind::None;
    if (output_.jump) kind = OverrideKind::Jump;
    else if (output_.locomotion) kind = OverrideKind::Locomotion;
    r.record = {tick_ - 1, t1, avatar_.position, avatar_.velocity, avatar_.grounded, r.fresh, kind, phase_, r.events};
    return r;
}

HeadlessResult run_headless(const LevelSpec& level, FrameSource& input, const SimConfig& cfg,
                            const HeadlessOptions& options) {
    Session session(level, cfg);
    RunHasher hasher;
    HeadlessResult result;
    std::optional<double> exhausted_at;
    while (session.tick_count() < options.max_ticks && session.phase() != Phase::Finished) {
        if (input.exhausted()) {
            if (!exhausted_at) exhausted_at = session.clock();
            const AvatarState& a = session.avatar();
            const bool at_rest = a.grounded && a.velocity.norm() < 1e-6;
            if (at_rest || session.clock() - *exhausted_at >= options.grace_after_input) break;
        }
        TickResult tr = session.tick(input);
        hasher.add(tr.record);
        if (options.keep_log) result.log.push_back(std::move(tr.record));
    }
    result.metrics = session.metrics();
    result.metrics.input_exhausted_before_finish = session.phase() != Phase::Finished && input.exhausted();
    result.hash = hasher.value();
    return result;
}

HeadlessResult run_headless(const LevelSpec& level, const TrackedSequence& input, const SimConfig& cfg,
                            const HeadlessOptions& options) {
    SequenceSource source(input);
    return run_headless(level, source, cfg, options);
}

void write_state_log(const std::vector<StateRecord>& log, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::Io, "cannot write state log '" + path.string() + "'");
    for (const StateRecord& rec : log) out << format_state_record(rec) << '\n';
}

} // namespace quadloco
