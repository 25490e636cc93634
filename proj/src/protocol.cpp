#include "quadloco/protocol.hpp"

#include <json.hpp>

#include "quadloco/error.hpp"

namespace quadloco {

namespace {

using nlohmann::json;

json vec(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 to_vec(const json& j) {
    if (!j.is_array() || j.size() != 3) throw std::invalid_argument("expected [x, y, z]");
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

Phase phase_from(std::string_view s) {
    if (s == "calibrating") return Phase::Calibrating;
    if (s == "running") return Phase::Running;
    if (s == "finished") return Phase::Finished;
    throw std::invalid_argument("unknown phase");
}

EventKind event_from(std::string_view s) {
    for (auto k : {EventKind::CheckpointReached, EventKind::Respawned, EventKind::Finished, EventKind::PlatformCollapsed}) {
        if (s == event_name(k)) return k;
    }
    throw std::invalid_argument("unknown event");
}

json event_json(const GameEvent& e) {
    return {{"event", event_name(e.kind)}, {"clock", e.clock}, {"checkpoint", e.checkpoint}, {"platform", e.platform}};
}

GameEvent event_from_json(const json& j) {
    return {event_from(j.at("event").get<std::string>()), j.at("clock").get<double>(), j.at("checkpoint").get<int>(),
            j.at("platform").get<int>()};
}

const char* kind_name(PlatformKind k) {
    switch (k) {
    case PlatformKind::Static: return "static";
    case PlatformKind::Falling: return "falling";
    case PlatformKind::Moving: return "moving";
    }
    return "static";
}

json level_json(int id, const LevelSpec& level) {
    json platforms = json::array();
    for (const Platform& p : level.platforms) {
        json pj = {{"kind", kind_name(p.kind)}, {"min", vec(p.box.min)}, {"max", vec(p.box.max)}};
        if (p.kind == PlatformKind::Moving) {
            pj["travel"] = vec(p.travel);
            pj["period"] = p.period;
            pj["phase"] = p.phase;
        }
        if (p.kind == PlatformKind::Falling) pj["delay"] = p.collapse_delay;
        platforms.push_back(pj);
    }
    json checkpoints = json::array();
    for (const Checkpoint& cp : level.checkpoints)
        checkpoints.push_back({{"id", cp.id}, {"z", cp.z}, {"spawn", vec(cp.spawn)}});
    return {{"id", id},
            {"name", level.name},
            {"spawn", vec(level.spawn)},
            {"kill_y", level.kill_y},
            {"finish_z", level.finish_z},
            {"platforms", platforms},
            {"checkpoints", checkpoints},
            {"half_extents", vec(kAvatarHalfExtents)}};
}

[[noreturn]] void malformed(const std::string& what) { throw Error(Errc::MalformedCommand, what); }

} // namespace

StateFrame make_state_frame(const Session& session, int level_id, const TickResult& tick) {
    StateFrame f;
    f.tick = tick.record.tick;
    f.clock = tick.record.clock;
    f.phase = session.phase();
    f.level = level_id;
    f.position = session.avatar().position;
    f.velocity = session.avatar().velocity;
    f.grounded = session.avatar().grounded;
    f.pose = session.pose();
    f.limbs = session.last_output().limbs;
    for (const PlatformState& p : session.world().platforms) f.platforms.push_back({p.offset, p.solid});
    f.events = tick.events;
    f.checkpoint = session.last_checkpoint();
    f.respawns = session.metrics().respawns;
    return f;
}

std::string encode_state(const StateFrame& f) {
    json feet = json::array();
    for (const Vec3& foot : f.pose.feet) feet.push_back(vec(foot));
    json limbs = json::array();
    for (const LimbKinematics& k : f.limbs) {
        limbs.push_back({{"limb", joint_name(k.limb)},
                         {"velocity", vec(k.velocity)},
                         {"d", k.ground_distance},
                         {"w", k.weight},
                         {"fresh", k.fresh},
                         {"degraded", k.degraded}});
    }
    json platforms = json::array();
    for (const PlatformSnapshot& p : f.platforms) platforms.push_back({{"offset", vec(p.offset)}, {"solid", p.solid}});
    json events = json::array();
    for (const GameEvent& e : f.events) events.push_back(event_json(e));
    json j = {{"type", "state"},
              {"version", kProtocolVersion},
              {"tick", f.tick},
              {"clock", f.clock},
              {"phase", phase_name(f.phase)},
              {"level", f.level},
              {"paused", f.paused},
              {"avatar", {{"position", vec(f.position)}, {"velocity", vec(f.velocity)}, {"grounded", f.grounded}}},
              {"pose", {{"feet", feet}, {"pitch", f.pose.pitch}, {"degraded", f.pose.degraded}}},
              {"limbs", limbs},
              {"platforms", platforms},
              {"events", events},
              {"checkpoint", f.checkpoint},
              {"respawns", f.respawns}};
    return j.dump();
}

StateFrame decode_state(std::string_view text) {
    try {
        const json j = json::parse(text);
        if (j.at("type") != "state") throw std::invalid_argument("not a state message");
        if (j.at("version") != kProtocolVersion) throw std::invalid_argument("protocol version mismatch");
        StateFrame f;
        f.tick = j.at("tick").get<std::uint64_t>();
        f.clock = j.at("clock").get<double>();
        f.phase = phase_from(j.at("phase").get<std::string>());
        f.level = j.at("level").get<int>();
        f.paused = j.at("paused").get<bool>();
        const json& a = j.at("avatar");
        f.position = to_vec(a.at("position"));
        f.velocity = to_vec(a.at("velocity"));
        f.grounded = a.at("grounded").get<bool>();
        const json& pose = j.at("pose");
        if (pose.at("feet").size() != kLimbCount) throw std::invalid_argument("expected four feet");
        for (std::size_t i = 0; i < kLimbCount; ++i) f.pose.feet[i] = to_vec(pose.at("feet").at(i));
        f.pose.pitch = pose.at("pitch").get<double>();
        f.pose.degraded = pose.at("degraded").get<bool>();
        const json& limbs = j.at("limbs");
        if (limbs.size() != kLimbCount) throw std::invalid_argument("expected four limbs");
        for (std::size_t i = 0; i < kLimbCount; ++i) {
            const json& l = limbs.at(i);
            auto limb = joint_from_name(l.at("limb").get<std::string>());
            if (!limb || !is_end_effector(*limb)) throw std::invalid_argument("bad limb");
            f.limbs[i] = {*limb,
                          to_vec(l.at("velocity")),
                          l.at("d").get<double>(),
                          l.at("w").get<double>(),
                          l.at("fresh").get<bool>(),
                          l.at("degraded").get<bool>()};
        }
        for (const json& p : j.at("platforms")) f.platforms.push_back({to_vec(p.at("offset")), p.at("solid").get<bool>()});
        for (const json& e : j.at("events")) f.events.push_back(event_from_json(e));
        f.checkpoint = j.at("checkpoint").get<int>();
        f.respawns = j.at("respawns").get<int>();
        return f;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(Errc::MalformedRecord, std::string("bad state frame: ") + e.what());
    }
}

Command decode_command(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception&) {
        malformed("command is not valid JSON");
    }
    if (!j.is_object()) malformed("command must be a JSON object");
    if (!j.contains("version")) malformed("missing version field");
    if (!j["version"].is_number_integer() || j["version"].get<int>() != kProtocolVersion)
        malformed("unsupported protocol version (server speaks " + std::to_string(kProtocolVersion) + ")");
    if (!j.contains("type") || !j["type"].is_string()) malformed("missing type field");

    Command c;
    if (j.contains("id")) {
        if (!j["id"].is_string()) malformed("id must be a string");
        c.id = j["id"].get<std::string>();
    }
    const std::string type = j["type"].get<std::string>();
    try {
        if (type == "load_level") {
            if (!j.at("level").is_number_integer()) malformed("level must be an integer");
            c.body = cmd::LoadLevel{j.at("level").get<int>()};
        } else if (type == "reset") {
            c.body = cmd::Reset{};
        } else if (type == "set_param") {
            cmd::SetParam p{j.at("key").get<std::string>(), j.at("value").get<double>()};
            if (!is_mapper_key(p.key)) throw Error(Errc::UnknownKey, "'" + p.key + "' is not a mapper parameter");
            c.body = p;
        } else if (type == "limb_input") {
            cmd::LimbInput in;
            if (j.contains("pattern")) {
                const std::string pattern = j.at("pattern").get<std::string>();
                const std::string action = j.value("action", std::string("press"));
                if (pattern == "paddle") in.pattern = cmd::Pattern::Paddle;
                else if (pattern == "flick") in.pattern = cmd::Pattern::Flick;
                else malformed("unknown pattern '" + pattern + "'");
                if (action == "hold") in.action = cmd::Action::Hold;
                else if (action == "release") in.action = cmd::Action::Release;
                else if (action == "press") in.action = cmd::Action::Press;
                else malformed("unknown action '" + action + "'");
            } else if (j.contains("limb")) {
                auto limb = joint_from_name(j.at("limb").get<std::string>());
                if (!limb || !is_end_effector(*limb)) malformed("limb must be one of the four end effectors");
                in.limb = *limb;
                in.velocity = to_vec(j.at("velocity"));
                if (!in.velocity.finite()) malformed("velocity must be finite");
            } else {
                malformed("limb_input needs a pattern or a limb");
            }
            c.body = in;
        } else if (type == "pause") {
            c.body = cmd::Pause{};
        } else if (type == "resume") {
            c.body = cmd::Resume{};
        } else {
            malformed("unknown command type '" + type + "'");
        }
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        malformed("bad " + type + " command: " + e.what());
    }
    return c;
}

std::string_view command_type(const Command& command) {
    struct Visitor {
        std::string_view operator()(const cmd::LoadLevel&) const { return "load_level"; }
        std::string_view operator()(const cmd::Reset&) const { return "reset"; }
        std::string_view operator()(const cmd::SetParam&) const { return "set_param"; }
        std::string_view operator()(const cmd::LimbInput&) const { return "limb_input"; }
        std::string_view operator()(const cmd::Pause&) const { return "pause"; }
        std::string_view operator()(const cmd::Resume&) const { return "resume"; }
    };
    return std::visit(Visitor{}, command.body);
}

std::string encode_command(const Command& command) {
    json j = {{"type", command_type(command)}, {"version", kProtocolVersion}};
    if (command.id) j["id"] = *command.id;
    if (auto* l = std::get_if<cmd::LoadLevel>(&command.body)) j["level"] = l->level;
    if (auto* p = std::get_if<cmd::SetParam>(&command.body)) {
        j["key"] = p->key;
        j["value"] = p->value;
    }
    if (auto* in = std::get_if<cmd::LimbInput>(&command.body)) {
        if (in->pattern) {
            j["pattern"] = *in->pattern == cmd::Pattern::Paddle ? "paddle" : "flick";
            j["action"] = in->action == cmd::Action::Hold ? "hold" : in->action == cmd::Action::Release ? "release" : "press";
        } else if (in->limb) {
            j["limb"] = joint_name(*in->limb);
            j["velocity"] = vec(in->velocity);
        }
    }
    return j.dump();
}

std::string encode_hello(int level_id, const LevelSpec& level, const SimConfig& cfg, double tick_rate) {
    json params = json::object();
    for (auto key : mapper_keys()) params[std::string(key)] = get_config_value(cfg, key);
    return json{{"type", "hello"},
                {"version", kProtocolVersion},
                {"server", "quadloco"},
                {"tick_rate", tick_rate},
                {"sensor_rate", kSensorRate},
                {"levels", bundled_level_count()},
                {"level", level_json(level_id, level)},
                {"params", params}}
        .dump();
}

std::string encode_ack(std::string_view command, const std::optional<std::string>& id, const LevelSpec* level,
                       int level_id) {
    json j = {{"type", "ack"}, {"version", kProtocolVersion}, {"command", command}};
    if (id) j["id"] = *id;
    if (level) j["level"] = level_json(level_id, *level);
    return j.dump();
}

std::string encode_param_ack(std::string_view key, double value, const std::optional<std::string>& id) {
    json j = {{"type", "ack"}, {"version", kProtocolVersion}, {"command", "set_param"}, {"key", key}, {"value", value}};
    if (id) j["id"] = *id;
    return j.dump();
}

std::string encode_error(std::string_view code, std::string_view message, const std::optional<std::string>& id) {
    json j = {{"type", "error"}, {"version", kProtocolVersion}, {"code", code}, {"message", message}};
    if (id) j["id"] = *id;
    return j.dump();
}

std::string encode_event(const GameEvent& event, std::uint64_t tick) {
    json j = event_json(event);
    j["type"] = "event";
    j["version"] = kProtocolVersion;
    j["tick"] = tick;
    return j.dump();
}

} // namespace quadloco
