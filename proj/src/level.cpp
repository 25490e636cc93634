#include "quadloco/level.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "quadloco/error.hpp"
#include "quadloco/physics.hpp"
#include "text_util.hpp"

namespace quadloco {

namespace {

#include "bundled_levels.inc"

[[noreturn]] void bad_level(int line, const std::string& what) {
    const std::string where = line > 0 ? "line " + std::to_string(line) + ": " : "";
    throw Error(Errc::InvalidLevel, where + what, line);
}

// key=value attributes following the directive word.
std::map<std::string, std::string_view, std::less<>> attributes(const std::vector<std::string_view>& toks,
                                                                std::size_t first, int line) {
    std::map<std::string, std::string_view, std::less<>> out;
    for (std::size_t i = first; i < toks.size(); ++i) {
        const auto eq = toks[i].find('=');
        if (eq == std::string_view::npos) bad_level(line, "expected key=value, got '" + std::string(toks[i]) + "'");
        if (!out.emplace(std::string(toks[i].substr(0, eq)), toks[i].substr(eq + 1)).second)
            bad_level(line, "duplicate attribute '" + std::string(toks[i].substr(0, eq)) + "'");
    }
    return out;
}

double number_attr(const auto& attrs, std::string_view key, int line, std::optional<double> fallback = {}) {
    auto it = attrs.find(key);
    if (it == attrs.end()) {
        if (fallback) return *fallback;
        bad_level(line, "missing attribute '" + std::string(key) + "'");
    }
    auto v = detail::parse_double(it->second);
    if (!v || !std::isfinite(*v)) bad_level(line, "bad number for '" + std::string(key) + "'");
    return *v;
}

Vec3 vec_attr(const auto& attrs, std::string_view key, int line, std::optional<Vec3> fallback = {}) {
    auto it = attrs.find(key);
    if (it == attrs.end()) {
        if (fallback) return *fallback;
        bad_level(line, "missing attribute '" + std::string(key) + "'");
    }
    auto v = detail::parse_vec3(it->second);
    if (!v || !v->finite()) bad_level(line, "bad vector for '" + std::string(key) + "'");
    return *v;
}

void check_known(const auto& attrs, std::initializer_list<std::string_view> allowed, int line) {
    for (const auto& [key, value] : attrs) {
        bool ok = false;
        for (auto a : allowed) ok = ok || a == key;
        if (!ok) bad_level(line, "unknown attribute '" + key + "'");
    }
}

void validate(const LevelSpec& level) {
    if (level.platforms.empty()) bad_level(0, "level has no platforms");
    for (std::size_t i = 0; i < level.platforms.size(); ++i) {
        const Platform& p = level.platforms[i];
        const Vec3 s = p.box.size();
        if (!(s.x > 0 && s.y > 0 && s.z > 0)) bad_level(0, "platform " + std::to_string(i) + " has non-positive extent");
        if (p.kind == PlatformKind::Moving && !(p.period > 0.0))
            bad_level(0, "moving platform " + std::to_string(i) + " needs period > 0");
        if (p.kind == PlatformKind::Falling && !(p.collapse_delay >= 0.0))
            bad_level(0, "falling platform " + std::to_string(i) + " needs delay >= 0");
    }
    double prev_z = -INFINITY;
    for (std::size_t i = 0; i < level.checkpoints.size(); ++i) {
        const Checkpoint& cp = level.checkpoints[i];
        if (cp.id != static_cast<int>(i) + 1) bad_level(0, "checkpoint ids must run 1..n in order");
        if (!(cp.z > prev_z)) bad_level(0, "checkpoint planes must be strictly increasing in z");
        prev_z = cp.z;
    }
    if (!(level.finish_z > prev_z)) bad_level(0, "finish plane must lie beyond the last checkpoint");
    if (!(level.kill_y < level.spawn.y)) bad_level(0, "kill plane must lie below the spawn point");

    const World world(level);
    auto clear = [&](const Vec3& at, const std::string& what) {
        AvatarState probe;
        probe.position = at;
        for (std::size_t i = 0; i < level.platforms.size(); ++i) {
            if (overlaps(probe.box(), world.platform_box(i))) bad_level(0, what + " overlaps platform " + std::to_string(i));
        }
    };
    clear(level.spawn, "spawn");
    for (const Checkpoint& cp : level.checkpoints) clear(cp.spawn, "checkpoint " + std::to_string(cp.id) + " spawn");
}

} // namespace

bool overlaps(const Box& a, const Box& b, double eps) {
    return a.min.x < b.max.x - eps && a.max.x > b.min.x + eps && a.min.y < b.max.y - eps &&
           a.max.y > b.min.y + eps && a.min.z < b.max.z - eps && a.max.z > b.min.z + eps;
}

Vec3 LevelSpec::spawn_for(int checkpoint_id) const {
    if (checkpoint_id <= 0) return spawn;
    for (const Checkpoint& cp : checkpoints) {
        if (cp.id == checkpoint_id) return cp.spawn;
    }
    return spawn;
}

LevelSpec parse_level(std::string_view text) {
    LevelSpec level;
    bool have_spawn = false;
    bool have_finish = false;
    int line_no = 0;
    for (std::string_view raw : detail::lines(text)) {
        ++line_no;
        std::string_view line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto toks = detail::tokens(line);
        const std::string_view word = toks.front();

        if (word == "name") {
            level.name = std::string(detail::trim(line.substr(4)));
        } else if (word == "spawn" || word == "kill_y" || word == "finish_z") {
            if (toks.size() != 2) bad_level(line_no, std::string(word) + " takes one value");
            if (word == "spawn") {
                auto v = detail::parse_vec3(toks[1]);
                if (!v || !v->finite()) bad_level(line_no, "bad spawn point");
                level.spawn = *v;
                have_spawn = true;
            } else {
                auto v = detail::parse_double(toks[1]);
                if (!v || !std::isfinite(*v)) bad_level(line_no, "bad number");
                (word == "kill_y" ? level.kill_y : level.finish_z) = *v;
                have_finish = have_finish || word == "finish_z";
            }
        } else if (word == "platform") {
            if (toks.size() < 2) bad_level(line_no, "platform needs a kind");
            const auto attrs = attributes(toks, 2, line_no);
            Platform p;
            p.box = {vec_attr(attrs, "min", line_no), vec_attr(attrs, "max", line_no)};
            if (toks[1] == "static") {
                p.kind = PlatformKind::Static;
                check_known(attrs, {"min", "max"}, line_no);
            } else if (toks[1] == "falling") {
                p.kind = PlatformKind::Falling;
                check_known(attrs, {"min", "max", "delay"}, line_no);
                p.collapse_delay = number_attr(attrs, "delay", line_no);
            } else if (toks[1] == "moving") {
                p.kind = PlatformKind::Moving;
                check_known(attrs, {"min", "max", "travel", "period", "phase"}, line_no);
                p.travel = vec_attr(attrs, "travel", line_no);
                p.period = number_attr(attrs, "period", line_no);
                p.phase = number_attr(attrs, "phase", line_no, 0.0);
            } else if (toks[1] == "rotating") {
                bad_level(line_no, "rotating platforms are not supported");
            } else {
                bad_level(line_no, "unknown platform kind '" + std::string(toks[1]) + "'");
            }
            level.platforms.push_back(p);
        } else if (word == "checkpoint") {
            const auto attrs = attributes(toks, 1, line_no);
            check_known(attrs, {"id", "z", "spawn"}, line_no);
            Checkpoint cp;
            const double id = number_attr(attrs, "id", line_no);
            if (id != std::floor(id)) bad_level(line_no, "checkpoint id must be an integer");
            cp.id = static_cast<int>(id);
            cp.z = number_attr(attrs, "z", line_no);
            cp.spawn = vec_attr(attrs, "spawn", line_no);
            level.checkpoints.push_back(cp);
        } else {
            bad_level(line_no, "unknown directive '" + std::string(word) + "'");
        }
    }
    if (!have_spawn) bad_level(0, "missing spawn");
    if (!have_finish) bad_level(0, "missing finish_z");
    validate(level);
    return level;
}

LevelSpec load_level(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open level '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_level(ss.str());
}

std::string serialize_level(const LevelSpec& level) {
    using detail::format_double;
    using detail::format_vec3;
    std::string out = "name " + level.name + "\n";
    out += "spawn " + format_vec3(level.spawn) + "\n";
    out += "kill_y " + format_double(level.kill_y) + "\n";
    out += "finish_z " + format_double(level.finish_z) + "\n";
    for (const Platform& p : level.platforms) {
        const std::string box = " min=" + format_vec3(p.box.min) + " max=" + format_vec3(p.box.max);
        switch (p.kind) {
        case PlatformKind::Static: out += "platform static" + box + "\n"; break;
        case PlatformKind::Falling:
            out += "platform falling" + box + " delay=" + format_double(p.collapse_delay) + "\n";
            break;
        case PlatformKind::Moving:
            out += "platform moving" + box + " travel=" + format_vec3(p.travel) + " period=" +
                   format_double(p.period) + " phase=" + format_double(p.phase) + "\n";
            break;
        }
    }
    for (const Checkpoint& cp : level.checkpoints) {
        out += "checkpoint id=" + std::to_string(cp.id) + " z=" + format_double(cp.z) +
               " spawn=" + format_vec3(cp.spawn) + "\n";
    }
    return out;
}

int bundled_level_count() { return static_cast<int>(std::size(kBundledLevels)); }

std::string_view bundled_level_source(int id) {
    if (id < 1 || id > bundled_level_count()) throw Error(Errc::InvalidLevel, "no bundled level " + std::to_string(id));
    return kBundledLevels[id - 1];
}

LevelSpec bundled_level(int id) { return parse_level(bundled_level_source(id)); }

LevelSpec endless_flat_level(double length) {
    LevelSpec level;
    level.name = "Endless flat";
    level.spawn = {0.0, kAvatarHalfExtents.y, 0.0};
    level.kill_y = -5.0;
    level.finish_z = length;
    Platform floor;
    floor.box = {{-2.0, -1.0, -3.0}, {2.0, 0.0, length + 10.0}};
    level.platforms.push_back(floor);
    return level;
}

} // namespace quadloco
