#include "quadloco/config.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "quadloco/error.hpp"
#include "text_util.hpp"

namespace quadloco {

namespace {

constexpr std::array<std::string_view, 9> kMapperKeys = {
    "c", "b_xz", "b_y", "b_z", "v_y_max", "v_z_max", "speed_threshold", "jump_trigger", "coyote",
};

constexpr std::array<std::string_view, 13> kAllKeys = {
    "c",        "b_xz",    "b_y",  "b_z",    "v_y_max", "v_z_max", "speed_threshold", "jump_trigger",
    "coyote",   "friction", "gravity", "calibration_hold", "calibration_tol",
};

double* slot(SimConfig& cfg, std::string_view key) {
    MapperConfig& m = cfg.mapper;
    if (key == "c") return &m.c;
    if (key == "b_xz") return &m.b_xz;
    if (key == "b_y") return &m.b_y;
    if (key == "b_z") return &m.b_z;
    if (key == "v_y_max") return &m.v_y_max;
    if (key == "v_z_max") return &m.v_z_max;
    if (key == "speed_threshold") return &m.speed_threshold;
    if (key == "jump_trigger") return &m.jump_trigger;
    if (key == "coyote") return &m.coyote;
    if (key == "friction") return &cfg.friction;
    if (key == "gravity") return &cfg.gravity;
    if (key == "calibration_hold") return &cfg.calibration_hold;
    if (key == "calibration_tol") return &cfg.calibration_tol;
    return nullptr;
}

} // namespace

void SimConfig::validate() const {
    mapper.validate();
    if (!(friction >= 0.0 && friction <= 1.0)) throw Error(Errc::InvalidConfig, "friction must lie in [0, 1]");
    if (!(gravity > 0.0) || !std::isfinite(gravity)) throw Error(Errc::InvalidConfig, "gravity must be > 0");
    if (!(calibration_hold > 0.0) || !std::isfinite(calibration_hold))
        throw Error(Errc::InvalidConfig, "calibration_hold must be > 0");
    if (!(calibration_tol > 0.0) || !std::isfinite(calibration_tol))
        throw Error(Errc::InvalidConfig, "calibration_tol must be > 0");
}

std::span<const std::string_view> mapper_keys() { return kMapperKeys; }
std::span<const std::string_view> config_keys() { return kAllKeys; }

bool is_mapper_key(std::string_view key) {
    for (auto k : kMapperKeys) {
        if (k == key) return true;
    }
    return false;
}

void set_config_value(SimConfig& cfg, std::string_view key, double value) {
    SimConfig next = cfg;
    double* dst = slot(next, key);
    if (!dst) throw Error(Errc::UnknownKey, "unknown config key '" + std::string(key) + "'");
    *dst = value;
    next.validate();
    cfg = next;
}

double get_config_value(const SimConfig& cfg, std::string_view key) {
    SimConfig copy = cfg;
    double* src = slot(copy, key);
    if (!src) throw Error(Errc::UnknownKey, "unknown config key '" + std::string(key) + "'");
    return *src;
}

SimConfig parse_config(std::string_view text, SimConfig base) {
    int line_no = 0;
    for (std::string_view raw : detail::lines(text)) {
        ++line_no;
        std::string_view line = raw.substr(0, raw.find('#'));
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(Errc::InvalidConfig, "line " + std::to_string(line_no) + ": expected key = value", line_no);
        }
        const std::string_view key = detail::trim(line.substr(0, eq));
        const auto value = detail::parse_double(line.substr(eq + 1));
        if (!slot(base, key)) {
            throw Error(Errc::UnknownKey,
                        "line " + std::to_string(line_no) + ": unknown config key '" + std::string(key) + "'",
                        line_no);
        }
        if (!value) {
            throw Error(Errc::InvalidConfig, "line " + std::to_string(line_no) + ": bad value for '" +
                                                 std::string(key) + "'", line_no);
        }
        *slot(base, key) = *value;
    }
    base.validate();
    return base;
}

SimConfig load_config(const std::filesystem::path& path, SimConfig base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open config '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), base);
}

std::string serialize_config(const SimConfig& cfg) {
    std::string out;
    for (auto key : kAllKeys) {
        out += key;
        out += " = ";
        out += detail::format_double(get_config_value(cfg, key));
        out += '\n';
    }
    return out;
}

} // namespace quadloco
