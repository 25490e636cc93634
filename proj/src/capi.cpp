#include "quadloco/quadloco.h"

#include <chrono>
#include <cstring>
#include <memory>
#include <string>

#include <json.hpp>

#include "quadloco/bridge.hpp"
#include "quadloco/config.hpp"
#include "quadloco/error.hpp"
#include "quadloco/ingest.hpp"
#include "quadloco/level.hpp"
#include "quadloco/protocol.hpp"
#include "quadloco/session.hpp"
#ifndef QUADLOCO_NO_SERVICE
#include "quadloco/service.hpp"
#endif

using namespace quadloco;

struct ql_sequence {
    TrackedSequence seq;
};
struct ql_config {
    SimConfig cfg;
};
struct ql_level {
    LevelSpec level;
};
struct ql_report {
    SessionMetrics metrics;
    std::uint64_t hash = 0;
    double wall_seconds = 0.0;
    std::string level_name;
    SimConfig cfg;
    bool finished = false;
};
#ifndef QUADLOCO_NO_SERVICE
struct ql_service {
    std::unique_ptr<StreamService> service;
    SimConfig cfg;
    std::string level_name;
    std::chrono::steady_clock::time_point started;
};
#else
struct ql_service {};
#endif

namespace {

thread_local std::string g_error;
thread_local int g_error_line = 0;

ql_status fail(ql_status status, std::string message, int line = 0) {
    g_error = std::move(message);
    g_error_line = line;
    return status;
}

template <typename F>
ql_status guarded(F&& f) noexcept {
    try {
        g_error.clear();
        g_error_line = 0;
        f();
        return QL_OK;
    } catch (const Error& e) {
        return fail(static_cast<ql_status>(e.code()), e.what(), e.line());
    } catch (const std::bad_alloc&) {
        return fail(QL_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(QL_INTERNAL, e.what());
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

#define QL_REQUIRE(ptr) \
    if (!(ptr)) return fail(QL_NULL_ARGUMENT, "null argument: " #ptr)

const SimConfig& config_or_default(const ql_config* cfg) {
    static const SimConfig defaults;
    return cfg ? cfg->cfg : defaults;
}

nlohmann::ordered_json report_json(const ql_report& r) {
    nlohmann::ordered_json j;
    j["level"] = r.level_name;
    j["finished"] = r.finished;
    j["completion_time"] = r.metrics.completion_time ? nlohmann::ordered_json(*r.metrics.completion_time) : nullptr;
    j["respawns"] = r.metrics.respawns;
    auto& cps = j["checkpoints"] = nlohmann::ordered_json::array();
    for (const auto& [id, t] : r.metrics.checkpoint_times) cps.push_back({{"id", id}, {"time", t}});
    j["distance"] = r.metrics.distance_travelled;
    j["input_exhausted_before_finish"] = r.metrics.input_exhausted_before_finish;
    j["progress"] = r.metrics.progress;
    j["ticks"] = r.metrics.ticks;
    j["run_hash"] = hash_hex(r.hash);
    j["wall_seconds"] = r.wall_seconds;
    j["ticks_per_second"] = r.wall_seconds > 0 ? static_cast<double>(r.metrics.ticks) / r.wall_seconds : 0.0;
    auto& cfg = j["config"] = nlohmann::ordered_json::object();
    for (std::string_view key : config_keys()) cfg[std::string(key)] = get_config_value(r.cfg, key);
    return j;
}

} // namespace

extern "C" {

const char* ql_last_error(void) { return g_error.c_str(); }
int ql_last_error_line(void) { return g_error_line; }

const char* ql_status_name(ql_status status) {
    switch (status) {
    case QL_OK: return "Ok";
    case QL_NULL_ARGUMENT: return "NullArgument";
    case QL_INTERNAL: return "Internal";
    default: break;
    }
    if (status >= QL_EMPTY_TRACE && status <= QL_UNSUPPORTED) return errc_name(static_cast<Errc>(status));
    return "Unknown";
}

int ql_protocol_version(void) { return kProtocolVersion; }
const char* ql_version(void) { return "0.1.0"; }
void ql_string_free(char* s) { std::free(s); }

ql_status ql_sequence_load(const char* path, ql_sequence** out) {
    QL_REQUIRE(path);
    QL_REQUIRE(out);
    return guarded([&] { *out = new ql_sequence{load_trace(path)}; });
}

ql_status ql_sequence_parse(const char* text, size_t length, ql_sequence** out) {
    QL_REQUIRE(text);
    QL_REQUIRE(out);
    return guarded([&] { *out = new ql_sequence{parse_trace(std::string_view(text, length))}; });
}

ql_status ql_sequence_synth_gait(double frequency, double amplitude, double duration, double rate,
                                 ql_sequence** out) {
    QL_REQUIRE(out);
    return guarded([&] { *out = new ql_sequence{synth_gait(frequency, amplitude, duration, rate)}; });
}

ql_status ql_sequence_synth_jump(double peak_speed, double onset, double duration, double rate, ql_sequence** out) {
    QL_REQUIRE(out);
    return guarded([&] { *out = new ql_sequence{synth_jump(peak_speed, onset, duration, rate)}; });
}

ql_status ql_sequence_with_hold(const ql_sequence* seq, double hold, ql_sequence** out) {
    QL_REQUIRE(seq);
    QL_REQUIRE(out);
    return guarded([&] { *out = new ql_sequence{with_calibration_hold(seq->seq, hold)}; });
}

ql_status ql_sequence_jitter(ql_sequence* seq, double sigma, uint64_t seed) {
    QL_REQUIRE(seq);
    return guarded([&] { add_jitter(seq->seq, sigma, seed); });
}

ql_status ql_sequence_save(const ql_sequence* seq, const char* path) {
    QL_REQUIRE(seq);
    QL_REQUIRE(path);
    return guarded([&] { save_trace(seq->seq, path); });
}

size_t ql_sequence_frame_count(const ql_sequence* seq) { return seq ? seq->seq.frames.size() : 0; }
double ql_sequence_rate(const ql_sequence* seq) { return seq ? seq->seq.nominal_rate : 0.0; }

double ql_sequence_duration(const ql_sequence* seq) {
    if (!seq || seq->seq.frames.empty()) return 0.0;
    return seq->seq.frames.back().timestamp - seq->seq.frames.front().timestamp;
}

void ql_sequence_free(ql_sequence* seq) { delete seq; }

ql_status ql_config_new(ql_config** out) {
    QL_REQUIRE(out);
    return guarded([&] { *out = new ql_config{}; });
}

ql_status ql_config_load(ql_config* cfg, const char* path) {
    QL_REQUIRE(cfg);
    QL_REQUIRE(path);
    return guarded([&] { cfg->cfg = load_config(path, cfg->cfg); });
}

ql_status ql_config_set(ql_config* cfg, const char* key, double value) {
    QL_REQUIRE(cfg);
    QL_REQUIRE(key);
    return guarded([&] { set_config_value(cfg->cfg, key, value); });
}

ql_status ql_config_get(const ql_config* cfg, const char* key, double* value) {
    QL_REQUIRE(cfg);
    QL_REQUIRE(key);
    QL_REQUIRE(value);
    return guarded([&] { *value = get_config_value(cfg->cfg, key); });
}

ql_status ql_config_dump(const ql_config* cfg, char** out) {
    QL_REQUIRE(cfg);
    QL_REQUIRE(out);
    return guarded([&] { *out = dup_string(serialize_config(cfg->cfg)); });
}

void ql_config_free(ql_config* cfg) { delete cfg; }

int ql_level_bundled_count(void) { return bundled_level_count(); }

ql_status ql_level_bundled(int id, ql_level** out) {
    QL_REQUIRE(out);
    return guarded([&] { *out = new ql_level{bundled_level(id)}; });
}

ql_status ql_level_load(const char* path, ql_level** out) {
    QL_REQUIRE(path);
    QL_REQUIRE(out);
    return guarded([&] { *out = new ql_level{load_level(path)}; });
}

ql_status ql_level_dump(const ql_level* level, char** out) {
    QL_REQUIRE(level);
    QL_REQUIRE(out);
    return guarded([&] { *out = dup_string(serialize_level(level->level)); });
}

const char* ql_level_name(const ql_level* level) { return level ? level->level.name.c_str() : ""; }
size_t ql_level_checkpoint_count(const ql_level* level) { return level ? level->level.checkpoints.size() : 0; }
double ql_level_finish_z(const ql_level* level) { return level ? level->level.finish_z : 0.0; }
void ql_level_free(ql_level* level) { delete level; }

ql_run_options ql_run_options_default(void) {
    const HeadlessOptions defaults;
    return {defaults.grace_after_input, defaults.max_ticks, nullptr};
}

ql_status ql_run(const ql_level* level, const ql_sequence* input, const ql_config* cfg,
                 const ql_run_options* options, ql_report** out) {
    QL_REQUIRE(level);
    QL_REQUIRE(input);
    QL_REQUIRE(out);
    return guarded([&] {
        const ql_run_options opts = options ? *options : ql_run_options_default();
        HeadlessOptions headless;
        headless.grace_after_input = opts.grace_after_input;
        headless.max_ticks = opts.max_ticks;
        headless.keep_log = opts.log_path != nullptr;
        const SimConfig& sim = config_or_default(cfg);
        const auto start = std::chrono::steady_clock::now();
        HeadlessResult result = run_headless(level->level, input->seq, sim, headless);
        const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
        if (opts.log_path) write_state_log(result.log, opts.log_path);
        auto report = std::make_unique<ql_report>();
        report->metrics = std::move(result.metrics);
        report->hash = result.hash;
        report->wall_seconds = wall.count();
        report->level_name = level->level.name;
        report->cfg = sim;
        report->finished = report->metrics.completion_time.has_value();
        *out = report.release();
    });
}

ql_status ql_bench(uint64_t ticks, const ql_config* cfg, ql_report** out) {
    QL_REQUIRE(out);
    if (ticks == 0) return fail(QL_INVALID_PARAMS, "ticks must be positive");
    return guarded([&] {
        const SimConfig& sim = config_or_default(cfg);
        // Far enough that the finish plane is never reached.
        const LevelSpec level = endless_flat_level(static_cast<double>(ticks) / kPhysicsRate * 20.0 + 100.0);
        Session session(level, sim);
        SynthInputBridge bridge;
        RunHasher hasher;
        const auto start = std::chrono::steady_clock::now();
        for (uint64_t i = 0; i < ticks; ++i) {
            if (!bridge.paddle_held() && session.phase() == Phase::Running) bridge.hold_paddle(true);
            hasher.add(session.tick(bridge).record);
        }
        const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
        auto report = std::make_unique<ql_report>();
        report->metrics = session.metrics();
        report->hash = hasher.value();
        report->wall_seconds = wall.count();
        report->level_name = level.name;
        report->cfg = sim;
        report->finished = session.phase() == Phase::Finished;
        *out = report.release();
    });
}

int ql_report_finished(const ql_report* r) { return r && r->finished ? 1 : 0; }

int ql_report_completion_time(const ql_report* r, double* seconds) {
    if (!r || !r->metrics.completion_time) return 0;
    if (seconds) *seconds = *r->metrics.completion_time;
    return 1;
}

int ql_report_respawns(const ql_report* r) { return r ? r->metrics.respawns : 0; }
uint64_t ql_report_ticks(const ql_report* r) { return r ? r->metrics.ticks : 0; }
uint64_t ql_report_hash(const ql_report* r) { return r ? r->hash : 0; }
double ql_report_wall_seconds(const ql_report* r) { return r ? r->wall_seconds : 0.0; }
double ql_report_distance(const ql_report* r) { return r ? r->metrics.distance_travelled : 0.0; }
int ql_report_input_exhausted(const ql_report* r) { return r && r->metrics.input_exhausted_before_finish ? 1 : 0; }
size_t ql_report_checkpoint_count(const ql_report* r) { return r ? r->metrics.checkpoint_times.size() : 0; }

ql_status ql_report_checkpoint(const ql_report* r, size_t index, int* id, double* seconds) {
    QL_REQUIRE(r);
    if (index >= r->metrics.checkpoint_times.size()) return fail(QL_INVALID_PARAMS, "checkpoint index out of range");
    if (id) *id = r->metrics.checkpoint_times[index].first;
    if (seconds) *seconds = r->metrics.checkpoint_times[index].second;
    return QL_OK;
}

size_t ql_report_progress_count(const ql_report* r) { return r ? r->metrics.progress.size() : 0; }

double ql_report_progress(const ql_report* r, size_t second) {
    return r && second < r->metrics.progress.size() ? r->metrics.progress[second] : 0.0;
}

ql_status ql_report_json(const ql_report* r, char** out) {
    QL_REQUIRE(r);
    QL_REQUIRE(out);
    return guarded([&] { *out = dup_string(report_json(*r).dump()); });
}

void ql_report_free(ql_report* r) { delete r; }

#ifndef QUADLOCO_NO_SERVICE

ql_status ql_service_start(const char* host, uint16_t port, int level_id, const ql_config* cfg, ql_service** out) {
    QL_REQUIRE(out);
    return guarded([&] {
        ServiceOptions options;
        if (host) options.host = host;
        options.port = port;
        options.level_id = level_id;
        options.config = config_or_default(cfg);
        auto svc = std::make_unique<ql_service>();
        svc->cfg = options.config;
        svc->level_name = bundled_level(level_id).name;
        svc->service = std::make_unique<StreamService>(options);
        svc->service->start();
        svc->started = std::chrono::steady_clock::now();
        *out = svc.release();
    });
}

uint16_t ql_service_port(const ql_service* svc) { return svc ? svc->service->port() : 0; }
uint64_t ql_service_tick(const ql_service* svc) { return svc ? svc->service->tick() : 0; }
size_t ql_service_client_count(const ql_service* svc) { return svc ? svc->service->client_count() : 0; }

ql_status ql_service_report(const ql_service* svc, ql_report** out) {
    QL_REQUIRE(svc);
    QL_REQUIRE(out);
    return guarded([&] {
        auto report = std::make_unique<ql_report>();
        report->metrics = svc->service->metrics();
        report->wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - svc->started).count();
        report->level_name = bundled_level(svc->service->level_id()).name;
        report->cfg = svc->cfg;
        report->finished = report->metrics.completion_time.has_value();
        *out = report.release();
    });
}

void ql_service_stop(ql_service* svc) {
    if (svc) svc->service->stop();
}

void ql_service_free(ql_service* svc) { delete svc; }

#else

ql_status ql_service_start(const char*, uint16_t, int, const ql_config*, ql_service** out) {
    if (out) *out = nullptr;
    return fail(QL_UNSUPPORTED, "built without the streaming service");
}
uint16_t ql_service_port(const ql_service*) { return 0; }
uint64_t ql_service_tick(const ql_service*) { return 0; }
size_t ql_service_client_count(const ql_service*) { return 0; }
ql_status ql_service_report(const ql_service*, ql_report**) {
    return fail(QL_UNSUPPORTED, "built without the streaming service");
}
void ql_service_stop(ql_service*) {}
void ql_service_free(ql_service* svc) { delete svc; }

#endif

} // extern "C"
