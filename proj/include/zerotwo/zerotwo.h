/* zerotwo: zero-knowledge two-device authentication.
 *
 * Every function returns a zt_status. On failure a message for the calling
 * thread is available from zt_last_error(). Strings handed out through char**
 * parameters are owned by the caller and released with zt_free().
 */
#ifndef ZEROTWO_ZEROTWO_H
#define ZEROTWO_ZEROTWO_H

#include <stddef.h>
#include <stdint.h>

#if defined(ZEROTWO_BUILDING_LIBRARY)
#define ZT_API __attribute__((visibility("default")))
#else
#define ZT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum zt_status {
    ZT_OK = 0,
    ZT_E_INVALID_ARGUMENT = 1,
    ZT_E_ENCODING = 2,
    ZT_E_PARSE = 3,
    ZT_E_INVALID_SECRET = 4,
    ZT_E_PROTOCOL_VIOLATION = 5,
    ZT_E_AUTHENTICATION_FAILED = 6,
    ZT_E_SESSION_EXPIRED = 7,
    ZT_E_DURATION_REJECTED = 8,
    ZT_E_NOT_FOUND = 9,
    ZT_E_CONFLICT = 10,
    ZT_E_GONE = 11,
    ZT_E_DENIED = 12,
    ZT_E_THROTTLED = 13,
    ZT_E_TAMPER_DETECTED = 14,
    ZT_E_ABORTED = 15,
    ZT_E_NETWORK = 16,
    ZT_E_IO = 17,
    ZT_E_CONFIG = 18,
    ZT_E_SCENARIO_FAILED = 19,
    ZT_E_INTERNAL = 20
} zt_status;

ZT_API const char* zt_status_name(zt_status status);
ZT_API const char* zt_last_error(void);
ZT_API const char* zt_version(void);
ZT_API void zt_free(void* p);

/* ---- protocol helpers (production group) ---- */

/* v = g^H(iu, is, secret) as lower-case hex. */
ZT_API zt_status zt_compute_verifier(const char* iu, const char* is, const uint8_t* secret,
                                     size_t secret_len, char** v_hex);
ZT_API zt_status zt_fingerprint(const char* iu, const char* is, const char* b_hex, char** out);
/* Words from the bundled 7776-entry list joined by '-'. */
ZT_API zt_status zt_generate_passphrase(unsigned words, char** out);

/* ---- server ---- */

typedef struct zt_server zt_server;

typedef struct zt_server_options {
    const char* domain;     /* server identifier; default "localhost" */
    const char* public_url; /* base of enrollment URLs */
    const char* store_path; /* NULL keeps everything in memory */
    uint64_t session_cap_seconds;
    int demo; /* nonzero: email ownership checks auto-pass */
} zt_server_options;

ZT_API void zt_server_options_init(zt_server_options* options);
ZT_API zt_status zt_server_create(const zt_server_options* options, zt_server** out);
ZT_API void zt_server_free(zt_server* server);

/* One JSON request through the router. authorization may be NULL. */
ZT_API zt_status zt_server_handle(zt_server* server, const char* method, const char* path,
                                  const char* body, const char* authorization, int* http_status,
                                  char** response_body);
ZT_API zt_status zt_server_sweep(zt_server* server, size_t* swept);

/* Binds host:port (port 0 picks one) and mounts static_dir at /app when
 * given. zt_server_serve blocks until zt_server_stop is called. */
ZT_API zt_status zt_server_listen(zt_server* server, const char* host, int port,
                                  const char* static_dir, int* bound_port);
ZT_API zt_status zt_server_serve(zt_server* server);
ZT_API void zt_server_stop(zt_server* server);

/* ---- authenticator ---- */

typedef enum zt_unlock_kind { ZT_UNLOCK_PASSWORD = 1, ZT_UNLOCK_BIOMETRIC_STUB = 2 } zt_unlock_kind;

typedef struct zt_unlock {
    zt_unlock_kind kind;
    const char* password;   /* ZT_UNLOCK_PASSWORD */
    int biometric_accept;   /* ZT_UNLOCK_BIOMETRIC_STUB */
    const char* device_key; /* ZT_UNLOCK_BIOMETRIC_STUB */
} zt_unlock;

typedef enum zt_kdf_profile { ZT_KDF_HARDENED = 0, ZT_KDF_FAST = 1 } zt_kdf_profile;

/* Receives a JSON description of what is being approved; nonzero means yes. */
typedef int (*zt_confirm_fn)(void* user, const char* prompt_json);

typedef struct zt_auth zt_auth;

ZT_API zt_status zt_store_init(const char* path, const zt_unlock* unlock, zt_kdf_profile kdf);

ZT_API zt_status zt_auth_open(const char* store_path, const zt_unlock* unlock,
                              const char* server_url, zt_confirm_fn confirm, void* user,
                              zt_auth** out);
ZT_API void zt_auth_close(zt_auth* auth);

/* Generates and stores a passphrase. When passphrase is non-NULL it receives
 * the text so it can be shown once. */
ZT_API zt_status zt_auth_new_passphrase(zt_auth* auth, unsigned words, size_t* index,
                                        char** passphrase);
ZT_API zt_status zt_auth_import_secret(zt_auth* auth, const uint8_t* secret, size_t len,
                                       size_t* index);
ZT_API zt_status zt_auth_add_account(zt_auth* auth, const char* label, const char* iu,
                                     const char* is, size_t secret_index);
ZT_API zt_status zt_auth_list_accounts(zt_auth* auth, char** json);
ZT_API zt_status zt_auth_list_sessions(zt_auth* auth, char** json);

ZT_API zt_status zt_auth_enroll(zt_auth* auth, const char* payload, const char* label,
                                size_t secret_index);
/* login is a login id (the challenge is fetched) or a login payload. */
ZT_API zt_status zt_auth_approve(zt_auth* auth, const char* login, uint64_t duration_seconds,
                                 char** session_id);
/* Pending authorizations across all local sessions, as a JSON array. */
ZT_API zt_status zt_auth_list_authz(zt_auth* auth, char** json);
ZT_API zt_status zt_auth_confirm_authz(zt_auth* auth, const char* auth_id);
ZT_API zt_status zt_auth_logout(zt_auth* auth, const char* session_id);
/* Copies the encrypted container verbatim. */
ZT_API zt_status zt_auth_export(zt_auth* auth, const char* destination);

/* ---- simulation ---- */

/* JSON array of {name, summary, deterministic}. */
ZT_API zt_status zt_sim_list(char** json);
/* seed may be NULL for the default tape. */
ZT_API zt_status zt_sim_run(const char* name, const uint8_t* seed, size_t seed_len, int* passed,
                            char** transcript_jsonl, char** summary);

#ifdef __cplusplus
}
#endif

#endif
