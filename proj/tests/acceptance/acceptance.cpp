// Headless acceptance suite: one PASS/FAIL line per criterion.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oracle/reference_mapper.hpp"
#include "quadloco/bridge.hpp"
#include "quadloco/session.hpp"
#include "support.hpp"

using namespace quadloco;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Paths {
    std::string cli;
    std::string cli_o0;
    std::string trace;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string run_command(const std::string& cmd, int& status) {
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        status = -1;
        return out;
    }
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), buf.size(), pipe)) out += buf.data();
    status = pclose(pipe);
    return out;
}

std::string field(const std::string& text, const std::string& key) {
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (line.rfind(key + ": ", 0) == 0) return line.substr(key.size() + 2);
    return {};
}

Outcome contact_weight_exactness() {
    const auto start = Clock::now();
    qt::Gen g(101);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double c = g.uniform(1e-3, 1.0);
        const double d = g.uniform(0.0, 1.5 * c);
        worst = std::max(worst, std::abs(contact_weight(d, c) - std::max(0.0, 1.0 - d / c)));
    }
    const bool boundaries = contact_weight(0.0, 0.25) == 1.0 && contact_weight(0.25, 0.25) == 0.0 &&
                            contact_weight(0.3, 0.25) == 0.0 && contact_weight(10.0, 0.25) == 0.0;
    const double t = seconds_since(start);
    return {worst <= 1e-12 && boundaries && t < 1.0,
            "1000 pairs, max error " + fmt("%.3g", worst) + (boundaries ? ", boundaries ok" : ", boundaries WRONG") +
                ", " + fmt("%.3f", t) + " s"};
}

Outcome locomotion_oracle_equivalence() {
    const auto start = Clock::now();
    qt::Gen g(102);
    double worst = 0.0;
    int mismatched_presence = 0, none = 0, gated = 0;
    for (int i = 0; i < 1000; ++i) {
        const MapperConfig m = qt::random_mapper_config(g);
        LimbSet limbs = qt::random_limbs(g, m);
        if (i % 10 == 0)
            for (auto& k : limbs) k.weight = 0.0;
        oracle::LimbVel ref[4];
        for (std::size_t j = 0; j < kLimbCount; ++j) {
            ref[j] = {limbs[j].velocity.x, limbs[j].velocity.y, limbs[j].velocity.z, limbs[j].weight, true};
            if (limbs[j].weight > 0 && limbs[j].velocity.norm() <= m.speed_threshold) ++gated;
        }
        double expect = 0.0;
        const bool has = oracle::locomotion(ref, qt::oracle_params(m), expect);
        const auto got = locomotion_velocity(limbs, m);
        if (got.has_value() != has) {
            ++mismatched_presence;
            continue;
        }
        if (!has) {
            ++none;
            continue;
        }
        worst = std::max(worst, std::abs(got->z - expect));
        worst = std::max({worst, std::abs(got->x), std::abs(got->y)});
    }
    const double t = seconds_since(start);
    return {mismatched_presence == 0 && worst <= 1e-9 && none > 0 && gated > 0 && t < 1.0,
            "1000 frames, max error " + fmt("%.3g", worst) + ", presence mismatches " +
                std::to_string(mismatched_presence) + ", no-override cases " + std::to_string(none) +
                ", gated limbs " + std::to_string(gated) + ", " + fmt("%.3f", t) + " s"};
}

Outcome jump_clip_contract() {
    const auto start = Clock::now();
    qt::Gen g(103);
    int violations = 0, decisions = 0;
    while (decisions < 1000) {
        const MapperConfig m = qt::random_mapper_config(g);
        const LimbSet limbs = qt::random_limbs(g, m);
        const Vec3 av{0, g.uniform(-3.0, m.v_y_max), g.uniform(0.0, m.v_z_max)};
        const auto j = jump_decision(limbs, av, true, m);
        if (!j) continue;
        ++decisions;
        if (!(av.y <= j->vy && j->vy <= m.v_y_max && av.z <= j->vz && j->vz <= m.v_z_max)) ++violations;
    }
    const double t = seconds_since(start);
    return {violations == 0 && t < 1.0,
            "1000 jump decisions, " + std::to_string(violations) + " bound violations, " + fmt("%.3f", t) + " s"};
}

Outcome coyote_window() {
    // Run off a ledge, then try to jump just inside and just outside the window.
    LevelSpec ledge;
    ledge.name = "ledge";
    ledge.spawn = {0, 5.25, 0};
    ledge.kill_y = -50;
    ledge.finish_z = 100;
    ledge.platforms.push_back({PlatformKind::Static, {{-2, 4, -3}, {2, 5, 1}}, {}});
    World world(ledge);
    AvatarState a;
    a.position = ledge.spawn;
    a.grounded = true;
    a.last_grounded = 0.0;
    MapperOutput run;
    run.locomotion = Vec3{0, 0, 2.0};
    const double dt = 1.0 / 60.0;
    int n = 0;
    while (a.grounded && n < 600) {
        a = step(world, a, run, {}, dt, (n + 1) * dt).avatar;
        ++n;
    }
    if (a.grounded || !a.last_grounded) return {false, "avatar never left the ledge"};
    const double t0 = *a.last_grounded;

    SkeletonFrame prev = neutral_pose(0.0), cur = neutral_pose(1.0 / 30.0);
    for (JointId limb : kLimbs) cur.at(limb).y += 0.1;  // 3 m/s upward sweep
    Calibration cal;
    cal.floor_y = 0.05;
    const MapperConfig m;
    const AvatarView view = a.view();
    const auto inside = map_frame(prev, cur, cal, view, m, t0 + 0.199);
    const auto outside = map_frame(prev, cur, cal, view, m, t0 + 0.201);
    bool applied = false;
    if (inside.jump) {
        const StepResult r = step(world, a, inside, {}, dt, t0 + 0.199);
        applied = r.pre_integration_velocity.y == inside.jump->vy;
    }
    const bool pass = m.coyote == 0.2 && inside.jump.has_value() && !outside.jump.has_value() && applied;
    return {pass, std::string("left ground at t0=") + fmt("%.4f", t0) + " s; t0+0.199 " +
                      (inside.jump ? "jumps" : "no jump") + ", t0+0.201 " + (outside.jump ? "jumps" : "no jump")};
}

Outcome sensor_sync() {
    const SimConfig cfg;
    const auto seq = with_calibration_hold(synth_gait(1.0, 0.3, 11.0, 30.0), cfg.calibration_hold);
    Session s(endless_flat_level(100.0), cfg);
    SequenceSource src(seq);
    while (s.phase() == Phase::Calibrating) s.tick(src);
    const std::uint64_t first = s.tick_count();
    int violations = 0, overrides = 0, fresh = 0, ticks = 0;
    while (ticks < 600) {
        const TickResult r = s.tick(src);
        const bool expect_fresh = (r.record.tick - first) % 2 == 1;
        if (r.fresh != expect_fresh) ++violations;
        if (r.record.override_kind != OverrideKind::None) {
            ++overrides;
            if (!r.fresh) ++violations;
        }
        fresh += r.fresh;
        ++ticks;
    }
    return {violations == 0 && ticks == 600 && fresh == 300 && overrides > 0,
            std::to_string(ticks) + " ticks, " + std::to_string(fresh) + " fresh, " + std::to_string(overrides) +
                " overrides, " + std::to_string(violations) + " violations"};
}

Outcome forward_only(const Paths& paths) {
    const SimConfig cfg;
    std::vector<std::pair<std::string, TrackedSequence>> corpora;
    corpora.emplace_back("bundled trace", load_trace(paths.trace));
    corpora.emplace_back("gait", with_calibration_hold(synth_gait(1.0, 0.3, 12.0, 30.0), 3.0));
    corpora.emplace_back("fast gait", with_calibration_hold(synth_gait(2.0, 0.45, 8.0, 30.0), 3.0));
    corpora.emplace_back("jump", with_calibration_hold(synth_jump(3.0, 1.0, 4.0, 30.0), 3.0));
    // Backward stroke: slide back on the floor, lift clear of the contact zone,
    // swing forward, lower again. Every limb in contact moves backwards.
    {
        TrackedSequence back;
        for (int k = 0; k < 300; ++k) {
            const double t = k / 30.0;
            const double u = std::fmod(t, 2.0);
            double dz = 0.0, dy = 0.0;
            if (u < 0.6) dz = -0.5 * u;
            else if (u < 1.1) dz = -0.3, dy = 0.3 * (u - 0.6) / 0.5;
            else if (u < 1.5) dz = -0.3 + 0.3 * (u - 1.1) / 0.4, dy = 0.3;
            else dy = 0.3 * (2.0 - u) / 0.5;
            LimbOffsets off{};
            for (auto& o : off) o = {0.0, quantize(dy), quantize(dz)};
            back.frames.push_back(apply_offsets(neutral_pose(t), off));
        }
        corpora.emplace_back("backward stroke", with_calibration_hold(back, 3.0));
    }
    qt::Gen gen(104);
    for (int i = 0; i < 6; ++i) {
        SynthInputBridge bridge;
        bridge.set_recording(true);
        for (int k = 0; k < 600; ++k) {
            if (k > 90 && gen.chance(0.04)) bridge.hold_paddle(!bridge.paddle_held());
            if (k > 90 && gen.chance(0.01)) bridge.flick();
            if (k > 90 && gen.chance(0.02))
                bridge.set_limb_velocity(kLimbs[gen.integer(0, 3)], {0, 0, gen.uniform(-1.0, 1.0)});
            bridge.poll(k / 30.0);
        }
        auto seq = bridge.recording();
        add_jitter(seq, 0.004, 7 + i);
        corpora.emplace_back("random input " + std::to_string(i), seq);
    }

    int overrides = 0, negatives = 0, backward_overrides = 0, backward_moves = 0;
    for (const auto& [name, seq] : corpora) {
        for (int level = 1; level <= 3; ++level) {
            Session s(bundled_level(level), cfg);
            SequenceSource src(seq);
            double z_prev = s.avatar().position.z;
            while (!src.exhausted() && s.phase() != Phase::Finished) {
                const TickResult r = s.tick(src);
                if (const auto& loco = s.last_output().locomotion) {
                    ++overrides;
                    if (loco->z < 0.0) ++negatives;
                    if (name == "backward stroke") {
                        ++backward_overrides;
                        if (loco->z != 0.0) ++negatives;
                    }
                }
                if (name == "backward stroke" && r.record.position.z < z_prev - 1e-12 &&
                    r.record.override_kind != OverrideKind::None)
                    ++backward_moves;
                z_prev = r.record.position.z;
            }
        }
    }
    return {negatives == 0 && backward_moves == 0 && backward_overrides > 0 && overrides > 1000,
            std::to_string(corpora.size()) + " corpora x 3 levels, " + std::to_string(overrides) +
                " locomotion overrides, " + std::to_string(negatives) + " negative, backward stroke overrides " +
                std::to_string(backward_overrides) + " all zero"};
}

Outcome determinism(const Paths& paths) {
    std::vector<std::string> hashes;
    auto run = [&](const std::string& cli) {
        int status = 0;
        const std::string out = run_command(cli + " replay --trace " + paths.trace + " --level 1", status);
        hashes.push_back(status == 0 ? field(out, "run_hash") : "error");
    };
    for (int i = 0; i < 3; ++i) run(paths.cli);
    for (int i = 0; i < 3; ++i) run(paths.cli_o0);
    bool same = !hashes[0].empty() && hashes[0] != "error";
    for (const auto& h : hashes) same = same && h == hashes[0];
    std::string detail = "3 runs optimized + 3 runs unoptimized build, hashes:";
    for (const auto& h : hashes) detail += " " + (h.empty() ? std::string("?") : h);
    return {same, detail};
}

struct GapRun {
    bool cleared = false;
    int respawns = 0;
    double landing_z = 0.0;
};

GapRun gap_jump(double peak) {
    const LevelSpec gap = bundled_level(2);
    const SimConfig cfg;
    Session s(gap, cfg);
    SequenceSource src(with_calibration_hold(synth_jump(peak, 0.5, 3.0, 30.0), cfg.calibration_hold));
    GapRun out;
    const double far_edge = gap.platforms[1].box.min.z;
    bool airborne = false;
    while (!src.exhausted() || !s.avatar().grounded) {
        s.tick(src);
        if (s.tick_count() > 20 * 60) break;
        if (!s.avatar().grounded) airborne = true;
        if (airborne && s.avatar().grounded && !out.cleared && s.metrics().respawns == 0) {
            out.landing_z = s.avatar().position.z;
            out.cleared = s.avatar().support == 1 && s.avatar().position.z + s.avatar().half_extents.z > far_edge;
        }
    }
    out.respawns = s.metrics().respawns;
    out.cleared = out.cleared && out.respawns == 0;
    return out;
}

Outcome end_to_end() {
    const auto start = Clock::now();
    const SimConfig cfg;
    const auto flat = run_headless(bundled_level(1), with_calibration_hold(synth_gait(1.0, 0.3, 20.0, 30.0), 3.0), cfg);
    const bool flat_ok = flat.metrics.completion_time.has_value() && flat.metrics.respawns == 0;

    const LevelSpec gap = bundled_level(2);
    const double width = gap.platforms[1].box.min.z - gap.platforms[0].box.max.z;
    const double v_min = oracle::min_gap_peak_speed(width, cfg.gravity, cfg.mapper.b_y, cfg.mapper.b_z);
    const GapRun at_min = gap_jump(v_min);
    const GapRun short_jump = gap_jump(0.8 * v_min);
    const double t = seconds_since(start);
    const bool pass = flat_ok && at_min.cleared && !short_jump.cleared && short_jump.respawns > 0 && t < 5.0;
    std::string detail = "flat: ";
    detail += flat_ok ? "finished in " + fmt("%.2f", *flat.metrics.completion_time) + " s, 0 respawns" : "NOT finished";
    detail += "; gap " + fmt("%.2f", width) + " m, minimum peak " + fmt("%.3f", v_min) + " m/s ";
    detail += at_min.cleared ? "clears" : "FAILS";
    detail += ", 80% ";
    detail += short_jump.cleared ? "CLEARS" : "falls (" + std::to_string(short_jump.respawns) + " respawn)";
    detail += "; " + fmt("%.2f", t) + " s";
    return {pass, detail};
}

Outcome throughput(const Paths& paths) {
    int status = 0;
    const std::string out = run_command(paths.cli + " bench --ticks 60000", status);
    const std::string tps = field(out, "ticks_per_second");
    if (status != 0 || tps.empty()) return {false, "bench did not report throughput"};
    const double rate = std::stod(tps);
    return {rate >= 6000.0, "60000 ticks, " + fmt("%.0f", rate) + " ticks/s (" + fmt("%.0f", rate / 60.0) +
                                "x real time)"};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance suite"};
    Paths paths;
    app.add_option("--cli", paths.cli, "CLI binary")->required();
    app.add_option("--cli-o0", paths.cli_o0, "CLI binary of the unoptimized build")->required();
    app.add_option("--trace", paths.trace, "Bundled gait trace")->required();
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"contact weight exactness", contact_weight_exactness},
        {"locomotion oracle equivalence", locomotion_oracle_equivalence},
        {"jump clip contract", jump_clip_contract},
        {"coyote window", coyote_window},
        {"sensor-sync rule", sensor_sync},
        {"forward-only", [&] { return forward_only(paths); }},
        {"determinism", [&] { return determinism(paths); }},
        {"end-to-end traversal", end_to_end},
        {"throughput", [&] { return throughput(paths); }},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << "  -- " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
