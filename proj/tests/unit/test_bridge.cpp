#include <gtest/gtest.h>

#include "quadloco/bridge.hpp"
#include "quadloco/session.hpp"
#include "support.hpp"

using namespace quadloco;

namespace {

void calibrate_session(Session& s, FrameSource& src) {
    while (s.phase() == Phase::Calibrating) s.tick(src);
}

} // namespace

TEST(Bridge, IdleBridgeIsStill) {
    SynthInputBridge bridge;
    for (int n = 0; n < 20; ++n) {
        auto f = bridge.poll(n / 60.0);
        EXPECT_EQ(f.has_value(), n % 2 == 0);
        if (f) {
            EXPECT_EQ(f->joints, neutral_pose().joints);
        }
    }
    EXPECT_FALSE(bridge.exhausted());
}

TEST(Bridge, PaddleMatchesGaitGenerator) {
    SynthInputBridge bridge;
    bridge.hold_paddle(true);
    const auto gait = synth_gait(1.0, 0.3, 3.0, 30.0);
    for (std::size_t k = 0; k < gait.size(); ++k) {
        auto f = bridge.poll(static_cast<double>(k) / 30.0);
        ASSERT_TRUE(f);
        EXPECT_EQ(f->joints, gait.frames[k].joints) << "sample " << k;
    }
}

TEST(Bridge, CalibratesAndHoldingPaddleAdvances) {
    const SimConfig cfg;
    Session s(bundled_level(1), cfg);
    SynthInputBridge bridge;
    calibrate_session(s, bridge);
    // next tick takes a fresh sample
    if (s.tick_count() % 2 == 1) s.tick(bridge);
    ASSERT_EQ(s.tick_count() % 2, 0u);
    const double z0 = s.avatar().position.z;
    bridge.hold_paddle(true);
    for (int i = 0; i < 60; ++i) s.tick(bridge);
    const double moved = s.avatar().position.z - z0;
    const double expected =
        oracle::gait_flat_distance(1.0, 30.0, 60.0, 1.0, 0.3, cfg.friction, qt::oracle_params(cfg.mapper));
    EXPECT_GT(moved, 0.1);
    EXPECT_NEAR(moved, expected, 1e-6 * std::max(1.0, expected));
}

TEST(Bridge, FlickJumpsWithinTwoSamples) {
    Session s(bundled_level(1), SimConfig{});
    SynthInputBridge bridge;
    calibrate_session(s, bridge);
    for (int i = 0; i < 10; ++i) s.tick(bridge);
    ASSERT_TRUE(s.avatar().grounded);
    bridge.flick();
    int samples = 0;
    bool jumped = false;
    while (samples < 2 && !jumped) {
        const auto r = s.tick(bridge);
        if (r.fresh) ++samples;
        jumped = r.record.override_kind == OverrideKind::Jump;
    }
    EXPECT_TRUE(jumped);
    EXPECT_GT(s.avatar().velocity.y, 0.0);
}

TEST(Bridge, ReleaseDeceleratesToRest) {
    Session s(bundled_level(1), SimConfig{});
    SynthInputBridge bridge;
    calibrate_session(s, bridge);
    bridge.hold_paddle(true);
    for (int i = 0; i < 120; ++i) s.tick(bridge);
    ASSERT_GT(s.avatar().velocity.z, 0.0);
    bridge.hold_paddle(false);
    for (int i = 0; i < 60; ++i) s.tick(bridge);  // envelope winds down
    double last = s.avatar().velocity.z;
    for (int i = 0; i < 240; ++i) {
        s.tick(bridge);
        EXPECT_LE(s.avatar().velocity.z, last + 1e-12);
        last = s.avatar().velocity.z;
    }
    EXPECT_LT(last, 1e-6);
}

TEST(Bridge, InputPathEquivalence) {
    // Drive a session live, then replay what the bridge produced as a trace.
    Session live(bundled_level(3), SimConfig{});
    SynthInputBridge bridge;
    bridge.set_recording(true);
    std::vector<StateRecord> live_log;
    for (int n = 0; n < 1500; ++n) {
        if (n == 200) bridge.hold_paddle(true);
        if (n == 500) bridge.flick();
        if (n == 700) bridge.hold_paddle(false);
        if (n == 760) bridge.set_limb_velocity(JointId::LeftHand, {0, 0, 0.5});
        if (n == 800) bridge.set_limb_velocity(JointId::LeftHand, {});
        if (n == 900) bridge.hold_paddle(true);
        live_log.push_back(live.tick(bridge).record);
    }
    TrackedSequence recorded = bridge.recording();
    ASSERT_GT(recorded.size(), 700u);

    Session replay(bundled_level(3), SimConfig{});
    SequenceSource src(recorded);
    for (std::size_t n = 0; n < live_log.size(); ++n) {
        const StateRecord rec = replay.tick(src).record;
        ASSERT_EQ(rec, live_log[n]) << "tick " << n;
    }
}

TEST(Bridge, ApplyCommands) {
    SynthInputBridge bridge;
    bridge.apply({cmd::Pattern::Paddle, cmd::Action::Hold, std::nullopt, {}});
    EXPECT_TRUE(bridge.paddle_held());
    bridge.apply({cmd::Pattern::Paddle, cmd::Action::Release, std::nullopt, {}});
    EXPECT_FALSE(bridge.paddle_held());
    bridge.apply({cmd::Pattern::Flick, cmd::Action::Press, std::nullopt, {}});
    EXPECT_TRUE(bridge.flick_active());
    bridge.reset();
    EXPECT_FALSE(bridge.flick_active());
    EXPECT_EQ(bridge.samples(), 0u);
}
