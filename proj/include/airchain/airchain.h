// AirChain: permissioned ledger for particulate-matter telemetry
// Copyright 2026 The AirChain Authors.
// SPDX-License-Identifier: Apache-2.0
#ifndef AIRCHAIN_AIRCHAIN_H
#define AIRCHAIN_AIRCHAIN_H

#include <stdint.h>

#if defined(_WIN32)
#define AIRCHAIN_API __declspec(dllexport)
#else
#define AIRCHAIN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/*
 * Every call returns an airchain_status. On failure the calling thread's
 * airchain_last_error() describes what went wrong. Strings returned through
 * `char**` out-parameters are owned by the caller and released with
 * airchain_string_free(). Text payloads use the canonical record encoding
 * (JSON with sorted keys and integer numbers only).
 */
typedef enum airchain_status
{
    AIRCHAIN_OK = 0,
    AIRCHAIN_ERR_INVALID_ARGUMENT = 1,
    AIRCHAIN_ERR_CODEC = 2,
    AIRCHAIN_ERR_CRYPTO = 3,
    AIRCHAIN_ERR_STATE = 4,
    AIRCHAIN_ERR_CONFIG = 5,
    AIRCHAIN_ERR_IO = 6,
    AIRCHAIN_ERR_TRANSPORT = 7,
    AIRCHAIN_ERR_NOT_FOUND = 8,
    AIRCHAIN_ERR_UNAUTHORIZED = 9,
    AIRCHAIN_ERR_INSUFFICIENT_DATA = 10,
    AIRCHAIN_ERR_REJECTED = 11,
    AIRCHAIN_ERR_INTERNAL = 12
} airchain_status;

AIRCHAIN_API const char* airchain_version(void);
AIRCHAIN_API const char* airchain_status_name(airchain_status status);
/* Message for the last failed call on this thread; "" if none. */
AIRCHAIN_API const char* airchain_last_error(void);
AIRCHAIN_API void airchain_string_free(char* s);

/* ----------------------------------------------------------------- keys */

/* Writes a fresh two-line key file (private hex, public hex). */
AIRCHAIN_API airchain_status airchain_keygen(const char* key_file, char** public_key_out);
AIRCHAIN_API airchain_status airchain_key_public(const char* key_file, char** public_key_out);

/* ------------------------------------------------------------- analysis */

AIRCHAIN_API airchain_status airchain_max_faults(int64_t n, int64_t* out);
AIRCHAIN_API airchain_status airchain_sybil_threshold(double n, double* out);
/* Fails with AIRCHAIN_ERR_INSUFFICIENT_DATA below 100 rounds. */
AIRCHAIN_API airchain_status airchain_ztest_winrate(int64_t wins, int64_t rounds, int64_t n, double* z_out,
    int* flagged_out);

/* ------------------------------------------------------------ scenarios */

/*
 * Runs a scenario file to completion. `seed` replaces the file's seed when
 * `override_seed` is nonzero. `ok_out` is 1 when every invariant held.
 * Either report pointer may be NULL.
 */
AIRCHAIN_API airchain_status airchain_scenario_run(const char* scenario_file, int override_seed, uint64_t seed,
    int* ok_out, char** human_report_out, char** canonical_report_out);

/* ----------------------------------------------------------------- nodes */

typedef struct airchain_node airchain_node;

/* Loads a node config file and opens the key, genesis, and store. */
AIRCHAIN_API airchain_status airchain_node_open(const char* config_file, airchain_node** node_out);
/* Binds every endpoint and starts consensus. */
AIRCHAIN_API airchain_status airchain_node_start(airchain_node* node);
/* Stops serving and flushes the store. */
AIRCHAIN_API airchain_status airchain_node_stop(airchain_node* node);
/* {node_id, api_port, internal_port, consensus_port, head_id, head_num, algorithm, peers}. */
AIRCHAIN_API airchain_status airchain_node_info(airchain_node* node, char** info_out);
/* Stops if needed and frees the handle. NULL is ignored. */
AIRCHAIN_API void airchain_node_close(airchain_node* node);

/* ---------------------------------------------------------------- client */

/*
 * One HTTP exchange with a node API. `headers` is a JSON object of header
 * names to values or NULL. Any HTTP status counts as success; only a
 * missing response is AIRCHAIN_ERR_TRANSPORT.
 */
AIRCHAIN_API airchain_status airchain_request(const char* endpoint, const char* method, const char* path,
    const char* body, const char* headers, int timeout_ms, int* http_status_out, char** body_out);

/*
 * Emulates a sensor. `options` is a JSON object with optional keys
 * key_file, seed, count, lat_udeg, lon_udeg, source, pm1_0, pm2_5, pm10_0,
 * temp_c, humidity_pct, start_s, interval_s. Writes {"readings":[...],
 * "rejected":k} where k counts samples the host-side parser or envelope
 * check dropped.
 */
AIRCHAIN_API airchain_status airchain_emulate(const char* options, char** result_out);

/*
 * Signs the readings (a JSON array of reading records; a missing
 * reporter_public_key is filled from the key) into one batch and posts it
 * with retries. Writes the receipt. A rejection returns
 * AIRCHAIN_ERR_UNAUTHORIZED or AIRCHAIN_ERR_REJECTED with the server's body
 * in airchain_last_error().
 */
AIRCHAIN_API airchain_status airchain_submit_readings(const char* endpoint, const char* api_key,
    const char* key_file, const char* readings, char** receipt_out);

#ifdef __cplusplus
}
#endif

#endif
