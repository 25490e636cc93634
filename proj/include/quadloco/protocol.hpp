#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "quadloco/session.hpp"

namespace quadloco {

inline constexpr int kProtocolVersion = 1;

struct PlatformSnapshot {
    Vec3 offset;
    bool solid = true;
    friend bool operator==(const PlatformSnapshot&, const PlatformSnapshot&) = default;
};

// One broadcast tick of a live session.
struct StateFrame {
    std::uint64_t tick = 0;
    double clock = 0.0;
    Phase phase = Phase::Calibrating;
    int level = 0;
    bool paused = false;
    Vec3 position;
    Vec3 velocity;
    bool grounded = false;
    QuadPose pose;
    LimbSet limbs{};
    std::vector<PlatformSnapshot> platforms;
    std::vector<GameEvent> events;
    int checkpoint = 0;
    int respawns = 0;
    friend bool operator==(const StateFrame&, const StateFrame&) = default;
};

StateFrame make_state_frame(const Session& session, int level_id, const TickResult& tick);

std::string encode_state(const StateFrame& frame);
// Throws Error(MalformedRecord) on anything that is not a well-formed state message.
StateFrame decode_state(std::string_view text);

namespace cmd {
struct LoadLevel { int level = 1; };
struct Reset {};
struct SetParam {
    std::string key;
    double value = 0.0;
};
enum class Pattern { Paddle, Flick };
enum class Action { Hold, Release, Press };
// Either a key pattern (paddle/flick) or a direct velocity for one limb.
struct LimbInput {
    std::optional<Pattern> pattern;
    Action action = Action::Press;
    std::optional<JointId> limb;
    Vec3 velocity;
};
struct Pause {};
struct Resume {};
} // namespace cmd

using CommandBody = std::variant<cmd::LoadLevel, cmd::Reset, cmd::SetParam, cmd::LimbInput, cmd::Pause, cmd::Resume>;

struct Command {
    CommandBody body;
    std::optional<std::string> id;  // echoed back in the ack/error
};

// Throws Error(MalformedCommand), or Error(UnknownKey) for set_param on a key
// that is not a mapper parameter.
Command decode_command(std::string_view text);
std::string encode_command(const Command& command);
std::string_view command_type(const Command& command);

std::string encode_hello(int level_id, const LevelSpec& level, const SimConfig& cfg, double tick_rate);
std::string encode_ack(std::string_view command, const std::optional<std::string>& id,
                       const LevelSpec* level = nullptr, int level_id = 0);
std::string encode_param_ack(std::string_view key, double value, const std::optional<std::string>& id);
std::string encode_error(std::string_view code, std::string_view message, const std::optional<std::string>& id);
std::string encode_event(const GameEvent& event, std::uint64_t tick);

} // namespace quadloco
