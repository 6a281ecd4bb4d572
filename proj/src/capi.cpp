#include "icolab.h"

#include <sstream>
#include <string>

#include "ico/errors.hpp"
#include "ico/pipeline.hpp"

struct ico_session {
    bool loaded = false;
    ico::RunConfig config;
    ico::PipelineOverrides overrides;
    std::string result_json;
    std::string worldlines_csv;
    std::string bloch_csv;
    std::string last_error;
};

namespace {

int fail(ico_session* s, ico_status code, const std::string& msg) {
    if (s) s->last_error = msg;
    return code;
}

template <typename Fn>
int guarded(ico_session* s, Fn&& fn) {
    if (!s) return ICO_E_ARGUMENT;
    try {
        return fn();
    } catch (const ico::ConfigError& e) {
        return fail(s, ICO_E_CONFIG, e.what());
    } catch (const ico::NumericError& e) {
        return fail(s, ICO_E_NUMERIC, e.what());
    } catch (const ico::Error& e) {
        // construction / scenario / protocol rejections
        return fail(s, ICO_E_VALIDATION, e.what());
    } catch (const std::exception& e) {
        return fail(s, ICO_E_INTERNAL, e.what());
    }
}

} // namespace

extern "C" {

int ico_api_version(void) { return 1; }

ico_session* ico_session_new(void) { return new ico_session(); }

void ico_session_free(ico_session* s) { delete s; }

int ico_load_config_text(ico_session* s, const char* json_utf8) {
    if (!s) return ICO_E_ARGUMENT;
    if (!json_utf8) return fail(s, ICO_E_ARGUMENT, "null config text");
    return guarded(s, [&] {
        s->config = ico::parse_config_text(json_utf8);
        s->loaded = true;
        s->result_json.clear();
        s->worldlines_csv.clear();
        s->bloch_csv.clear();
        s->last_error.clear();
        return ICO_OK;
    });
}

int ico_load_config_file(ico_session* s, const char* path) {
    if (!s) return ICO_E_ARGUMENT;
    if (!path) return fail(s, ICO_E_ARGUMENT, "null config path");
    return guarded(s, [&] {
        s->config = ico::parse_config_file(path);
        s->loaded = true;
        s->result_json.clear();
        s->worldlines_csv.clear();
        s->bloch_csv.clear();
        s->last_error.clear();
        return ICO_OK;
    });
}

int ico_set_stages(ico_session* s, const char* stages_csv) {
    if (!s) return ICO_E_ARGUMENT;
    if (!stages_csv) return fail(s, ICO_E_ARGUMENT, "null stages string");
    s->overrides.stages.clear();
    std::stringstream ss(stages_csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) s->overrides.stages.push_back(item);
    return ICO_OK;
}

int ico_set_trials(ico_session* s, int trials) {
    if (!s) return ICO_E_ARGUMENT;
    if (trials < 0) return fail(s, ICO_E_ARGUMENT, "trials must be nonnegative");
    s->overrides.trials = trials;
    return ICO_OK;
}

int ico_set_seed(ico_session* s, unsigned long long seed) {
    if (!s) return ICO_E_ARGUMENT;
    s->overrides.seed = static_cast<long long>(seed & 0x7fffffffffffffffULL);
    return ICO_OK;
}

int ico_run(ico_session* s) {
    if (!s) return ICO_E_ARGUMENT;
    if (!s->loaded) return fail(s, ICO_E_ARGUMENT, "no configuration loaded");
    return guarded(s, [&] {
        const ico::PipelineResult res = ico::run_pipeline(s->config, s->overrides);
        s->result_json = res.result.dump(2);
        s->result_json.push_back('\n');
        s->worldlines_csv = res.worldlines_csv;
        s->bloch_csv = res.bloch_csv;
        s->last_error.clear();
        return ICO_OK;
    });
}

const char* ico_result_json(const ico_session* s) { return s ? s->result_json.c_str() : ""; }

const char* ico_worldlines_csv(const ico_session* s) {
    return s ? s->worldlines_csv.c_str() : "";
}

const char* ico_bloch_csv(const ico_session* s) { return s ? s->bloch_csv.c_str() : ""; }

const char* ico_last_error(const ico_session* s) { return s ? s->last_error.c_str() : ""; }

} // extern "C"
