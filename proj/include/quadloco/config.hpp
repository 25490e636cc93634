#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "quadloco/mapper.hpp"

namespace quadloco {

struct SimConfig {
    MapperConfig mapper;
    double friction = 0.92;          // horizontal decay per grounded tick without override
    double gravity = 9.81;           // m/s^2
    double calibration_hold = 3.0;   // s
    double calibration_tol = 0.05;   // m

    void validate() const;
    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

// Keys accepted by set_param on a live session.
std::span<const std::string_view> mapper_keys();
// Every key a config file may contain.
std::span<const std::string_view> config_keys();

bool is_mapper_key(std::string_view key);

// Throws UnknownKey, InvalidC (c <= 0) or InvalidConfig. The config is left
// untouched on failure.
void set_config_value(SimConfig& cfg, std::string_view key, double value);
double get_config_value(const SimConfig& cfg, std::string_view key);

// Flat `key = value` lines, '#' comments.
SimConfig parse_config(std::string_view text, SimConfig base = {});
SimConfig load_config(const std::filesystem::path& path, SimConfig base = {});
std::string serialize_config(const SimConfig& cfg);

} // namespace quadloco
