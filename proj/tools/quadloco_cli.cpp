// Command-line front end. Talks to the simulation only through the C API.
#include <atomic>
#include <charconv>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "quadloco/quadloco.h"

namespace {

struct CliFailure {
    std::string message;
};

void check(ql_status status, const std::string& what) {
    if (status == QL_OK) return;
    std::string msg = what + ": " + ql_status_name(status);
    if (int line = ql_last_error_line(); line > 0) msg += " at line " + std::to_string(line);
    if (const char* detail = ql_last_error(); detail && *detail) msg += ": " + std::string(detail);
    throw CliFailure{msg};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};
using Sequence = std::unique_ptr<ql_sequence, Deleter<ql_sequence, ql_sequence_free>>;
using Config = std::unique_ptr<ql_config, Deleter<ql_config, ql_config_free>>;
using Level = std::unique_ptr<ql_level, Deleter<ql_level, ql_level_free>>;
using Report = std::unique_ptr<ql_report, Deleter<ql_report, ql_report_free>>;
using Text = std::unique_ptr<char, Deleter<char, ql_string_free>>;

std::optional<int> as_level_id(const std::string& s) {
    int id = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), id);
    if (ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
    return id;
}

Level open_level(const std::string& arg) {
    ql_level* raw = nullptr;
    if (auto id = as_level_id(arg))
        check(ql_level_bundled(*id, &raw), "level " + arg);
    else
        check(ql_level_load(arg.c_str(), &raw), "level " + arg);
    return Level(raw);
}

// Defaults, then the config file, then --set overrides.
Config open_config(const std::string& path, const std::vector<std::string>& overrides) {
    ql_config* raw = nullptr;
    check(ql_config_new(&raw), "config");
    Config cfg(raw);
    if (!path.empty()) check(ql_config_load(cfg.get(), path.c_str()), "config " + path);
    for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw CliFailure{"--set expects key=value, got '" + kv + "'"};
        const std::string key = kv.substr(0, eq);
        const std::string text = kv.substr(eq + 1);
        double value = 0.0;
        auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || end != text.data() + text.size())
            throw CliFailure{"--set " + key + ": not a number '" + text + "'"};
        check(ql_config_set(cfg.get(), key.c_str(), value), "--set " + key);
    }
    return cfg;
}

std::string hex(uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void print_report(const ql_report* r, bool json) {
    if (json) {
        char* raw = nullptr;
        check(ql_report_json(r, &raw), "report");
        Text text(raw);
        std::cout << text.get() << '\n';
        return;
    }
    double completion = 0.0;
    std::cout << "status: " << (ql_report_finished(r) ? "finished" : "not finished") << '\n';
    if (ql_report_completion_time(r, &completion)) std::cout << "completion_time: " << completion << " s\n";
    std::cout << "respawns: " << ql_report_respawns(r) << '\n';
    std::cout << "checkpoints:";
    for (size_t i = 0; i < ql_report_checkpoint_count(r); ++i) {
        int id = 0;
        double t = 0.0;
        check(ql_report_checkpoint(r, i, &id, &t), "report");
        std::cout << ' ' << id << '@' << t;
    }
    std::cout << '\n';
    std::cout << "distance: " << ql_report_distance(r) << " m\n";
    if (ql_report_input_exhausted(r)) std::cout << "input_exhausted_before_finish: yes\n";
    std::cout << "ticks: " << ql_report_ticks(r) << '\n';
    std::cout << "run_hash: " << hex(ql_report_hash(r)) << '\n';
    const double wall = ql_report_wall_seconds(r);
    std::cout << "wall_seconds: " << wall << '\n';
    if (wall > 0) std::cout << "ticks_per_second: " << static_cast<double>(ql_report_ticks(r)) / wall << '\n';
}

void print_config(const ql_config* cfg) {
    char* raw = nullptr;
    check(ql_config_dump(cfg, &raw), "config");
    Text text(raw);
    std::cout << "config:\n" << text.get();
}

std::atomic<bool> g_interrupted{false};
extern "C" void on_signal(int) { g_interrupted = true; }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quadruped locomotion from four-limb motion: replay, synthesize, serve, benchmark."};
    app.require_subcommand(1);

    std::string level_spec = "1";
    std::string config_path;
    std::vector<std::string> overrides;
    std::string log_path;
    bool json = false;
    double grace = -1.0;

    auto add_run_options = [&](CLI::App* sub) {
        sub->add_option("--level", level_spec, "Bundled level id or level file")->capture_default_str();
        sub->add_option("--config", config_path, "Config file");
        sub->add_option("--set", overrides, "Override a config value (key=value)");
        sub->add_option("--log", log_path, "Write the per-tick state log here");
        sub->add_option("--grace", grace, "Seconds simulated after input runs out");
        sub->add_flag("--json", json, "Print the report as JSON");
    };

    std::string path;
    auto* vtrace = app.add_subcommand("validate-trace", "Check a tracked skeleton file");
    vtrace->add_option("file", path)->required();
    auto* vlevel = app.add_subcommand("validate-level", "Check a level file");
    vlevel->add_option("file", path)->required();
    auto* vconfig = app.add_subcommand("validate-config", "Check a config file");
    vconfig->add_option("file", path)->required();

    std::string trace_path;
    auto* replay = app.add_subcommand("replay", "Run a recorded trace headless");
    replay->add_option("--trace", trace_path, "Trace file")->required();
    add_run_options(replay);

    std::string generator;
    double frequency = 1.0, amplitude = 0.3, peak_speed = 2.6, onset = 1.0, duration = 20.0, rate = 30.0;
    double hold = 3.0, jitter = 0.0;
    uint64_t seed = 1;
    std::string emit_path;
    auto* synth = app.add_subcommand("synth", "Run generated input headless");
    synth->add_option("generator", generator, "gait or jump")->required()->check(CLI::IsMember({"gait", "jump"}));
    synth->add_option("--frequency", frequency, "Gait cycles per second")->capture_default_str();
    synth->add_option("--amplitude", amplitude, "Gait stroke amplitude (m)")->capture_default_str();
    synth->add_option("--peak-speed", peak_speed, "Jump peak limb speed (m/s)")->capture_default_str();
    synth->add_option("--onset", onset, "Jump start (s)")->capture_default_str();
    synth->add_option("--duration", duration, "Generated motion length (s)")->capture_default_str();
    synth->add_option("--rate", rate, "Sample rate (Hz)")->capture_default_str();
    synth->add_option("--hold", hold, "Calibration pose prepended (s)")->capture_default_str();
    synth->add_option("--jitter", jitter, "Gaussian position noise sigma (m)");
    synth->add_option("--seed", seed, "Noise seed")->capture_default_str();
    synth->add_option("--emit-trace", emit_path, "Also save the generated input as a trace");
    add_run_options(synth);

    std::string bind = "127.0.0.1:8765";
    double serve_seconds = 0.0;
    auto* serve = app.add_subcommand("serve", "Stream a live session over WebSocket");
    serve->add_option("--bind", bind, "host:port")->capture_default_str();
    serve->add_option("--level", level_spec, "Bundled level id")->capture_default_str();
    serve->add_option("--config", config_path, "Config file");
    serve->add_option("--set", overrides, "Override a config value (key=value)");
    serve->add_option("--seconds", serve_seconds, "Stop after this long (0 runs until interrupted)");
    serve->add_flag("--json", json, "Print the final report as JSON");

    uint64_t ticks = 60000;
    auto* bench = app.add_subcommand("bench", "Measure simulated ticks per wall-clock second");
    bench->add_option("--ticks", ticks, "Ticks to simulate")->capture_default_str()->check(CLI::PositiveNumber);
    bench->add_option("--config", config_path, "Config file");
    bench->add_option("--set", overrides, "Override a config value (key=value)");
    bench->add_flag("--json", json, "Print the report as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*vtrace) {
            ql_sequence* raw = nullptr;
            check(ql_sequence_load(path.c_str(), &raw), path);
            Sequence seq(raw);
            std::cout << path << ": ok, " << ql_sequence_frame_count(seq.get()) << " frames, "
                      << ql_sequence_duration(seq.get()) << " s at " << ql_sequence_rate(seq.get()) << " Hz\n";
            return 0;
        }
        if (*vlevel) {
            ql_level* raw = nullptr;
            check(ql_level_load(path.c_str(), &raw), path);
            Level level(raw);
            std::cout << path << ": ok, '" << ql_level_name(level.get()) << "', "
                      << ql_level_checkpoint_count(level.get()) << " checkpoints, finish at z="
                      << ql_level_finish_z(level.get()) << '\n';
            return 0;
        }
        if (*vconfig) {
            Config cfg = open_config(path, {});
            std::cout << path << ": ok\n";
            print_config(cfg.get());
            return 0;
        }

        Config cfg = open_config(config_path, overrides);

        if (*replay || *synth) {
            Level level = open_level(level_spec);
            ql_sequence* raw = nullptr;
            if (*replay) {
                check(ql_sequence_load(trace_path.c_str(), &raw), trace_path);
            } else {
                ql_sequence* motion = nullptr;
                if (generator == "gait")
                    check(ql_sequence_synth_gait(frequency, amplitude, duration, rate, &motion), "synth gait");
                else
                    check(ql_sequence_synth_jump(peak_speed, onset, duration, rate, &motion), "synth jump");
                Sequence generated(motion);
                check(ql_sequence_with_hold(generated.get(), hold, &raw), "synth");
            }
            Sequence seq(raw);
            if (jitter > 0) check(ql_sequence_jitter(seq.get(), jitter, seed), "jitter");
            if (!emit_path.empty()) check(ql_sequence_save(seq.get(), emit_path.c_str()), emit_path);

            ql_run_options options = ql_run_options_default();
            if (grace >= 0) options.grace_after_input = grace;
            if (!log_path.empty()) options.log_path = log_path.c_str();
            ql_report* rep = nullptr;
            check(ql_run(level.get(), seq.get(), cfg.get(), &options, &rep), "run");
            Report report(rep);
            if (!json) std::cout << "level: " << ql_level_name(level.get()) << '\n';
            print_report(report.get(), json);
            if (!json) print_config(cfg.get());
            return 0;
        }

        if (*bench) {
            ql_report* rep = nullptr;
            check(ql_bench(ticks, cfg.get(), &rep), "bench");
            Report report(rep);
            print_report(report.get(), json);
            return 0;
        }

        if (*serve) {
            const auto colon = bind.rfind(':');
            if (colon == std::string::npos) throw CliFailure{"--bind expects host:port"};
            const std::string host = bind.substr(0, colon);
            const std::string port_text = bind.substr(colon + 1);
            unsigned port = 0;
            auto [end, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
            if (ec != std::errc() || end != port_text.data() + port_text.size() || port > 65535)
                throw CliFailure{"--bind: bad port '" + port_text + "'"};
            const auto id = as_level_id(level_spec);
            if (!id) throw CliFailure{"serve takes a bundled level id"};

            ql_service* svc = nullptr;
            check(ql_service_start(host.c_str(), static_cast<uint16_t>(port), *id, cfg.get(), &svc), "serve");
            std::unique_ptr<ql_service, Deleter<ql_service, ql_service_free>> service(svc);
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            std::cout << "quadloco stream service on ws://" << host << ':' << ql_service_port(svc)
                      << " protocol version " << ql_protocol_version() << ", level " << *id << std::endl;

            const auto started = std::chrono::steady_clock::now();
            while (!g_interrupted) {
                std::this_thread::sleep_for(std::chrono::milliseconds(20));
                if (serve_seconds > 0 &&
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count() >= serve_seconds)
                    break;
            }
            ql_service_stop(svc);
            ql_report* rep = nullptr;
            check(ql_service_report(svc, &rep), "serve");
            Report report(rep);
            if (!json) std::cout << "shutdown after " << ql_service_tick(svc) << " ticks\n";
            print_report(report.get(), json);
            return 0;
        }
    } catch (const CliFailure& e) {
        std::cerr << "error: " << e.message << '\n';
        return 1;
    }
    return 0;
}
