/* C interface to the reduced-dynamics scenario runner.  All functions are
 * thread-compatible (no shared mutable state); handles are owned by the
 * caller and released with the matching free function. */
#ifndef FANO_C_H
#define FANO_C_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fa_status {
    FA_OK = 0,
    FA_ERR_INVALID_ARGUMENT = 2, /* config/schema problems, bad parameters */
    FA_ERR_RUNTIME = 3,          /* pipeline-level physics or I/O failure */
    FA_ERR_UNSUPPORTED = 4       /* reserved for unsupported-variant requests */
} fa_status;

/* Opaque, schema-validated scenario configuration. */
typedef struct fa_scenario fa_scenario;

/* Parses and validates a config file.  On success *out owns the handle; on
 * failure *out is NULL and a diagnostic is copied into err_buf (when
 * non-NULL), always NUL-terminated. */
fa_status fa_scenario_load(const char* config_path, fa_scenario** out, char* err_buf,
                           size_t err_len);

/* Pipeline name declared by the config; the string is borrowed from the
 * handle and lives until fa_scenario_free. */
const char* fa_scenario_pipeline(const fa_scenario* scenario);

/* Runs the scenario: writes CSV artifacts and manifest.json under out_dir
 * (out_dir NULL or empty falls back to the config's own out_dir).
 * tolerance_profile is "default" or "strict" (NULL means "default");
 * workers = 0 picks a thread count automatically.  On failure the manifest
 * carries an error marker alongside any partial artifacts. */
fa_status fa_scenario_run(const fa_scenario* scenario, const char* out_dir, unsigned workers,
                          const char* tolerance_profile, char* err_buf, size_t err_len);

void fa_scenario_free(fa_scenario* scenario);

/* One-shot convenience: load + run. */
fa_status fa_scenario_run_file(const char* config_path, const char* out_dir, unsigned workers,
                               const char* tolerance_profile, char* err_buf, size_t err_len);

/* Static version string. */
const char* fa_version(void);

#ifdef __cplusplus
}
#endif

#endif /* FANO_C_H */
