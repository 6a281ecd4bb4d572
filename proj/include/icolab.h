/* icolab shared-library interface.
 *
 * A session owns one parsed configuration and the artifacts of its last run.
 * All functions return an ico_status code; string getters return pointers
 * owned by the session, valid until the next ico_run / ico_load_* call on
 * that session or until the session is freed. Sessions are not thread-safe;
 * use one session per thread.
 */
#ifndef ICOLAB_H
#define ICOLAB_H

#ifdef __cplusplus
extern "C" {
#endif

typedef struct ico_session ico_session;

typedef enum ico_status {
    ICO_OK = 0,
    ICO_E_ARGUMENT = 1,   /* null handle / bad argument */
    ICO_E_CONFIG = 2,     /* malformed config, unknown names */
    ICO_E_VALIDATION = 3, /* scenario/protocol/construction rejected */
    ICO_E_NUMERIC = 4,    /* integrator or solver failure */
    ICO_E_INTERNAL = 5
} ico_status;

int ico_api_version(void);

ico_session* ico_session_new(void);
void ico_session_free(ico_session* s);

int ico_load_config_text(ico_session* s, const char* json_utf8);
int ico_load_config_file(ico_session* s, const char* path);

/* Optional overrides applied on top of the loaded config. `stages_csv` is a
 * comma-separated list out of verdict,align,lightcones,sweep,protocol,all. */
int ico_set_stages(ico_session* s, const char* stages_csv);
int ico_set_trials(ico_session* s, int trials);
int ico_set_seed(ico_session* s, unsigned long long seed);

int ico_run(ico_session* s);

const char* ico_result_json(const ico_session* s);
const char* ico_worldlines_csv(const ico_session* s);
const char* ico_bloch_csv(const ico_session* s);
const char* ico_last_error(const ico_session* s);

#ifdef __cplusplus
}
#endif

#endif /* ICOLAB_H */
