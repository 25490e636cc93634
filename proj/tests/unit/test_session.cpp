#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "quadloco/error.hpp"
#include "quadloco/session.hpp"
#include "support.hpp"

using namespace quadloco;

namespace {

TrackedSequence gait_run(double seconds, double amplitude = 0.3) {
    return with_calibration_hold(synth_gait(1.0, amplitude, seconds, 30.0), 3.0);
}

struct Recorded {
    std::vector<TickResult> ticks;
};

} // namespace

TEST(Session, CalibrationConsumesTheHold) {
    Session s(bundled_level(1), SimConfig{});
    SequenceSource src(gait_run(5.0));
    int ticks = 0;
    while (s.phase() == Phase::Calibrating) {
        s.tick(src);
        ++ticks;
        ASSERT_LT(ticks, 400);
    }
    EXPECT_EQ(ticks, 181);
    ASSERT_TRUE(s.run_start());
    EXPECT_DOUBLE_EQ(*s.run_start(), 3.0);
    ASSERT_TRUE(s.calibration());
    EXPECT_DOUBLE_EQ(s.calibration()->floor_y, 0.05);
}

TEST(Session, UnsteadyStartRestartsCalibration) {
    TrackedSequence seq = gait_run(4.0);
    for (int k = 0; k < 15; ++k) seq.frames[k].at(JointId::RightHand).y += 0.1 * k / 14.0;
    Session s(bundled_level(1), SimConfig{});
    SequenceSource src(seq);
    while (s.phase() == Phase::Calibrating && !src.exhausted()) s.tick(src);
    EXPECT_EQ(s.phase(), Phase::Calibrating);
    EXPECT_FALSE(s.run_start());
}

TEST(Session, ClockAdvancesByDt) {
    Session s(bundled_level(1), SimConfig{});
    SequenceSource src(gait_run(2.0));
    for (int n = 0; n < 300; ++n) {
        const auto r = s.tick(src);
        EXPECT_EQ(r.record.tick, static_cast<std::uint64_t>(n));
        EXPECT_EQ(r.record.clock, (n + 1) / 60.0);
    }
    EXPECT_EQ(s.tick_count(), 300u);
}

TEST(Session, GaitFinishesFlatRunWithOracleTime) {
    const SimConfig cfg;
    const auto result = run_headless(bundled_level(1), gait_run(20.0), cfg);
    ASSERT_TRUE(result.metrics.completion_time);
    EXPECT_EQ(result.metrics.respawns, 0);
    ASSERT_EQ(result.metrics.checkpoint_times.size(), 1u);
    EXPECT_EQ(result.metrics.checkpoint_times[0].first, 1);
    EXPECT_FALSE(result.metrics.input_exhausted_before_finish);

    const double expected = oracle::gait_flat_time(10.0, 60.0, 30.0, 60.0, 1.0, 0.3, cfg.friction, qt::oracle_params(cfg.mapper));
    ASSERT_GT(expected, 0.0);
    EXPECT_NEAR(*result.metrics.completion_time, expected, 0.1 * expected);

    // completion time is the finish tick clock minus the run start
    const StateRecord& last = result.log.back();
    EXPECT_EQ(last.phase, Phase::Finished);
    EXPECT_DOUBLE_EQ(*result.metrics.completion_time, last.clock - 3.0);
}

TEST(Session, ProgressEverySecond) {
    const auto result = run_headless(bundled_level(1), gait_run(20.0), SimConfig{});
    ASSERT_GE(result.metrics.progress.size(), 5u);
    for (std::size_t k = 1; k < result.metrics.progress.size(); ++k)
        EXPECT_GT(result.metrics.progress[k], result.metrics.progress[k - 1]) << "second " << k;
}

TEST(Session, EmptyInputNeverMoves) {
    const auto result = run_headless(bundled_level(1), TrackedSequence{}, SimConfig{});
    EXPECT_TRUE(result.metrics.input_exhausted_before_finish);
    EXPECT_EQ(result.metrics.distance_travelled, 0.0);
    EXPECT_FALSE(result.metrics.completion_time);
}

TEST(Session, ZeroAmplitudeNeverMoves) {
    const auto result = run_headless(bundled_level(1), gait_run(5.0, 0.0), SimConfig{});
    EXPECT_TRUE(result.metrics.input_exhausted_before_finish);
    EXPECT_EQ(result.metrics.distance_travelled, 0.0);
}

TEST(Session, GapWalkRespawnsAtCheckpoint) {
    const LevelSpec gap = bundled_level(2);
    Session s(gap, SimConfig{});
    SequenceSource src(gait_run(6.0));
    std::optional<GameEvent> respawn;
    while (!respawn && !src.exhausted()) {
        for (const GameEvent& e : s.tick(src).events)
            if (e.kind == EventKind::Respawned) respawn = e;
    }
    ASSERT_TRUE(respawn);
    EXPECT_EQ(respawn->checkpoint, 0);
    EXPECT_EQ(s.metrics().respawns, 1);
    EXPECT_EQ(s.avatar().position, gap.spawn);
    EXPECT_EQ(s.avatar().velocity, Vec3{});
    EXPECT_TRUE(s.avatar().grounded);
}

TEST(Session, IdenticalRunsIdenticalHash) {
    const auto seq = gait_run(8.0);
    const auto a = run_headless(bundled_level(3), seq, SimConfig{});
    const auto b = run_headless(bundled_level(3), seq, SimConfig{});
    EXPECT_EQ(a.hash, b.hash);
    EXPECT_EQ(a.log, b.log);
    EXPECT_EQ(a.metrics.distance_travelled, b.metrics.distance_travelled);
}

TEST(Session, HashSeesEveryField) {
    auto seq = gait_run(8.0);
    const auto a = run_headless(bundled_level(1), seq, SimConfig{});
    seq.frames[150].at(JointId::LeftHand).z += 1e-4;
    const auto b = run_headless(bundled_level(1), seq, SimConfig{});
    EXPECT_NE(a.hash, b.hash);
}

TEST(Session, SetParamOnlyMapperKeys) {
    Session s(bundled_level(1), SimConfig{});
    s.set_param("b_xz", 2.0);
    EXPECT_EQ(s.config().mapper.b_xz, 2.0);
    EXPECT_THROW(s.set_param("gravity", 1.0), Error);
    EXPECT_THROW(s.set_param("c", -1.0), Error);
    EXPECT_EQ(s.config().mapper.c, 0.25);
}

TEST(Session, StateLogOneLinePerTick) {
    const auto result = run_headless(bundled_level(1), gait_run(4.0), SimConfig{});
    const auto path = std::filesystem::temp_directory_path() / "quadloco_state.log";
    write_state_log(result.log, path);
    std::ifstream in(path);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (n == 0) {
            EXPECT_EQ(line.rfind("tick=0 t=", 0), 0u) << line;
        }
        EXPECT_NE(line.find(" pos="), std::string::npos);
        EXPECT_NE(line.find(" events="), std::string::npos);
        ++n;
    }
    EXPECT_EQ(n, result.log.size());
    std::filesystem::remove(path);
}

TEST(Session, CheckpointEventCarriesClock) {
    Session s(bundled_level(1), SimConfig{});
    SequenceSource src(gait_run(20.0));
    while (s.phase() != Phase::Finished && s.tick_count() < 5000) {
        const auto r = s.tick(src);
        for (const GameEvent& e : r.events) {
            if (e.kind == EventKind::CheckpointReached) {
                EXPECT_EQ(e.checkpoint, 1);
                EXPECT_EQ(e.clock, r.record.clock);
                EXPECT_GE(s.avatar().position.z, 5.0);
            }
        }
    }
    EXPECT_EQ(s.phase(), Phase::Finished);
    EXPECT_EQ(s.last_checkpoint(), 1);
}
