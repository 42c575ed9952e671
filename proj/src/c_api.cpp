#include "fano/fano_c.h"

#include <cstring>
#include <new>
#include <string>

#include "fano/scenario.hpp"

struct fa_scenario {
    fano::ScenarioConfig cfg;
};

namespace {

void copy_message(const std::string& msg, char* buf, size_t len) {
    if (!buf || len == 0) return;
    const size_t n = std::min(msg.size(), len - 1);
    std::memcpy(buf, msg.data(), n);
    buf[n] = '\0';
}

fa_status status_from_exit(int code) {
    switch (code) {
        case 0: return FA_OK;
        case 2: return FA_ERR_INVALID_ARGUMENT;
        default: return FA_ERR_RUNTIME;
    }
}

}  // namespace

extern "C" {

fa_status fa_scenario_load(const char* config_path, fa_scenario** out, char* err_buf,
                           size_t err_len) {
    if (out) *out = nullptr;
    if (!config_path || !out) {
        copy_message("config_path and out must be non-NULL", err_buf, err_len);
        return FA_ERR_INVALID_ARGUMENT;
    }
    try {
        auto* handle = new fa_scenario{fano::load_config(config_path)};
        *out = handle;
        return FA_OK;
    } catch (const fano::ConfigError& e) {
        copy_message(e.what(), err_buf, err_len);
        return FA_ERR_INVALID_ARGUMENT;
    } catch (const std::bad_alloc&) {
        copy_message("out of memory", err_buf, err_len);
        return FA_ERR_RUNTIME;
    } catch (const std::exception& e) {
        copy_message(e.what(), err_buf, err_len);
        return FA_ERR_RUNTIME;
    }
}

const char* fa_scenario_pipeline(const fa_scenario* scenario) {
    return scenario ? scenario->cfg.pipeline.c_str() : "";
}

fa_status fa_scenario_run(const fa_scenario* scenario, const char* out_dir, unsigned workers,
                          const char* tolerance_profile, char* err_buf, size_t err_len) {
    if (!scenario) {
        copy_message("scenario handle is NULL", err_buf, err_len);
        return FA_ERR_INVALID_ARGUMENT;
    }
    try {
        const int code = fano::run_scenario(scenario->cfg, out_dir ? out_dir : "", workers,
                                            tolerance_profile ? tolerance_profile : "default");
        if (code != 0)
            copy_message("pipeline failed; see manifest.json in the output directory", err_buf,
                         err_len);
        return status_from_exit(code);
    } catch (const fano::ConfigError& e) {
        copy_message(e.what(), err_buf, err_len);
        return FA_ERR_INVALID_ARGUMENT;
    } catch (const std::exception& e) {
        copy_message(e.what(), err_buf, err_len);
        return FA_ERR_RUNTIME;
    }
}

void fa_scenario_free(fa_scenario* scenario) { delete scenario; }

fa_status fa_scenario_run_file(const char* config_path, const char* out_dir, unsigned workers,
                               const char* tolerance_profile, char* err_buf, size_t err_len) {
    fa_scenario* handle = nullptr;
    const fa_status loaded = fa_scenario_load(config_path, &handle, err_buf, err_len);
    if (loaded != FA_OK) return loaded;
    const fa_status ran =
        fa_scenario_run(handle, out_dir, workers, tolerance_profile, err_buf, err_len);
    fa_scenario_free(handle);
    return ran;
}

const char* fa_version(void) { return "fano 1.0.0"; }

}  // extern "C"
