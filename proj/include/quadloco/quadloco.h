/* C interface to the quadloco simulation core. */
#ifndef QUADLOCO_H
#define QUADLOCO_H

#include <stddef.h>
#include <stdint.h>

#if defined(QUADLOCO_BUILDING_LIBRARY)
#define QL_API __attribute__((visibility("default")))
#else
#define QL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ql_status {
    QL_OK = 0,
    QL_EMPTY_TRACE = 1,
    QL_NON_MONOTONIC_TIMESTAMPS = 2,
    QL_MALFORMED_RECORD = 3,
    QL_INVALID_PARAMS = 4,
    QL_INSUFFICIENT_FRAMES = 5,
    QL_CALIBRATION_UNSTABLE = 6,
    QL_ZERO_DT = 7,
    QL_INVALID_C = 8,
    QL_INVALID_CONFIG = 9,
    QL_UNKNOWN_KEY = 10,
    QL_INVALID_LEVEL = 11,
    QL_IO = 12,
    QL_BIND_FAILURE = 13,
    QL_MALFORMED_COMMAND = 14,
    QL_UNSUPPORTED = 15,
    QL_NULL_ARGUMENT = 100,
    QL_INTERNAL = 101
} ql_status;

typedef struct ql_sequence ql_sequence;
typedef struct ql_config ql_config;
typedef struct ql_level ql_level;
typedef struct ql_report ql_report;
typedef struct ql_service ql_service;

/* Message of the last failure on the calling thread ("" if none). */
QL_API const char* ql_last_error(void);
/* Input line of the last failure, 0 when not tied to a line. */
QL_API int ql_last_error_line(void);
QL_API const char* ql_status_name(ql_status status);
QL_API int ql_protocol_version(void);
QL_API const char* ql_version(void);
/* Frees strings returned through char** out-parameters. */
QL_API void ql_string_free(char* s);

/* Tracked input sequences */
QL_API ql_status ql_sequence_load(const char* path, ql_sequence** out);
QL_API ql_status ql_sequence_parse(const char* text, size_t length, ql_sequence** out);
QL_API ql_status ql_sequence_synth_gait(double frequency, double amplitude, double duration, double rate,
                                        ql_sequence** out);
QL_API ql_status ql_sequence_synth_jump(double peak_speed, double onset, double duration, double rate,
                                        ql_sequence** out);
/* Prepends a still calibration pose of `hold` seconds. */
QL_API ql_status ql_sequence_with_hold(const ql_sequence* seq, double hold, ql_sequence** out);
QL_API ql_status ql_sequence_jitter(ql_sequence* seq, double sigma, uint64_t seed);
QL_API ql_status ql_sequence_save(const ql_sequence* seq, const char* path);
QL_API size_t ql_sequence_frame_count(const ql_sequence* seq);
QL_API double ql_sequence_rate(const ql_sequence* seq);
QL_API double ql_sequence_duration(const ql_sequence* seq);
QL_API void ql_sequence_free(ql_sequence* seq);

/* Configuration */
QL_API ql_status ql_config_new(ql_config** out);
/* Applies a config file on top of the current values. */
QL_API ql_status ql_config_load(ql_config* cfg, const char* path);
QL_API ql_status ql_config_set(ql_config* cfg, const char* key, double value);
QL_API ql_status ql_config_get(const ql_config* cfg, const char* key, double* value);
QL_API ql_status ql_config_dump(const ql_config* cfg, char** out);
QL_API void ql_config_free(ql_config* cfg);

/* Levels */
QL_API int ql_level_bundled_count(void);
QL_API ql_status ql_level_bundled(int id, ql_level** out);
QL_API ql_status ql_level_load(const char* path, ql_level** out);
QL_API ql_status ql_level_dump(const ql_level* level, char** out);
QL_API const char* ql_level_name(const ql_level* level);
QL_API size_t ql_level_checkpoint_count(const ql_level* level);
QL_API double ql_level_finish_z(const ql_level* level);
QL_API void ql_level_free(ql_level* level);

typedef struct ql_run_options {
    double grace_after_input; /* seconds simulated after input runs out */
    uint64_t max_ticks;
    const char* log_path;     /* state log destination, or NULL */
} ql_run_options;

QL_API ql_run_options ql_run_options_default(void);

/* Headless run. cfg and options may be NULL for defaults. */
QL_API ql_status ql_run(const ql_level* level, const ql_sequence* input, const ql_config* cfg,
                        const ql_run_options* options, ql_report** out);
/* Full pipeline on a held paddle pattern over an endless flat track. */
QL_API ql_status ql_bench(uint64_t ticks, const ql_config* cfg, ql_report** out);

/* Run reports */
QL_API int ql_report_finished(const ql_report* r);
/* Returns 1 and writes the time if the run finished. */
QL_API int ql_report_completion_time(const ql_report* r, double* seconds);
QL_API int ql_report_respawns(const ql_report* r);
QL_API uint64_t ql_report_ticks(const ql_report* r);
QL_API uint64_t ql_report_hash(const ql_report* r);
QL_API double ql_report_wall_seconds(const ql_report* r);
QL_API double ql_report_distance(const ql_report* r);
QL_API int ql_report_input_exhausted(const ql_report* r);
QL_API size_t ql_report_checkpoint_count(const ql_report* r);
QL_API ql_status ql_report_checkpoint(const ql_report* r, size_t index, int* id, double* seconds);
QL_API size_t ql_report_progress_count(const ql_report* r);
QL_API double ql_report_progress(const ql_report* r, size_t second);
QL_API ql_status ql_report_json(const ql_report* r, char** out);
QL_API void ql_report_free(ql_report* r);

/* Live streaming service. host NULL means 127.0.0.1; port 0 picks a free port. */
QL_API ql_status ql_service_start(const char* host, uint16_t port, int level_id, const ql_config* cfg,
                                  ql_service** out);
QL_API uint16_t ql_service_port(const ql_service* svc);
QL_API uint64_t ql_service_tick(const ql_service* svc);
QL_API size_t ql_service_client_count(const ql_service* svc);
QL_API ql_status ql_service_report(const ql_service* svc, ql_report** out);
QL_API void ql_service_stop(ql_service* svc);
QL_API void ql_service_free(ql_service* svc);

#ifdef __cplusplus
}
#endif

#endif
