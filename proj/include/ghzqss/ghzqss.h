// Copyright 2026 The ghzqss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GHZQSS_GHZQSS_H
#define GHZQSS_GHZQSS_H

/*
 * C interface to the ghzqss library: GHZ-state secret sharing and third-man
 * cryptography sessions, the state-vector simulator behind them, the parity
 * reconciliation oracle and one-time-pad file tools.
 *
 * Conventions:
 *  - Every fallible call returns ghz_status; GHZ_OK is zero. On failure
 *    ghz_last_error() describes the problem (thread-local, valid until the
 *    next library call on the same thread). Output parameters are untouched
 *    on failure.
 *  - Objects are opaque handles created by *_create / *_parse / *_load style
 *    calls and released with the matching *_free, which accepts NULL.
 *  - Strings returned through char** are heap-allocated; release them with
 *    ghz_string_free.
 *  - Bit arrays are one uint8_t per bit (0 or 1).
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GHZQSS_API __declspec(dllexport)
#else
#define GHZQSS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ghz_status {
    GHZ_OK = 0,
    GHZ_ERR_INVALID_ARGUMENT = 1,
    GHZ_ERR_IMPOSSIBLE_OUTCOME = 2,
    GHZ_ERR_CONFIG = 3,
    GHZ_ERR_TRANSPORT = 4,
    GHZ_ERR_TIMEOUT = 5,
    GHZ_ERR_PROTOCOL = 6,
    GHZ_ERR_KEY_EXHAUSTED = 7,
    GHZ_ERR_IO = 8,
    GHZ_ERR_INTERNAL = 9
} ghz_status;

typedef enum ghz_basis { GHZ_BASIS_X = 0, GHZ_BASIS_Y = 1, GHZ_BASIS_Z = 2 } ghz_basis;
typedef enum ghz_outcome { GHZ_PLUS = 0, GHZ_MINUS = 1 } ghz_outcome;
typedef enum ghz_role { GHZ_ALICE = 0, GHZ_BOB = 1, GHZ_CHARLIE = 2 } ghz_role;

typedef struct ghz_rng ghz_rng;
typedef struct ghz_state ghz_state;
typedef struct ghz_run_config ghz_run_config;
typedef struct ghz_session ghz_session;
typedef struct ghz_key ghz_key;

GHZQSS_API const char *ghz_version(void);
GHZQSS_API const char *ghz_status_name(ghz_status status);
GHZQSS_API const char *ghz_last_error(void);
GHZQSS_API void ghz_string_free(char *s);

/* Seeded random streams (mt19937_64 based, reproducible across platforms). */
GHZQSS_API ghz_status ghz_rng_create(uint64_t seed, ghz_rng **out);
GHZQSS_API void ghz_rng_free(ghz_rng *rng);

/* State vectors. Qubit 0 is the most significant bit of an amplitude index;
 * |0> is H, |1> is V. */
GHZQSS_API ghz_status ghz_state_ghz(unsigned num_qubits, ghz_state **out);
GHZQSS_API ghz_status ghz_state_basis(ghz_basis basis, ghz_outcome outcome, ghz_state **out);
GHZQSS_API void ghz_state_free(ghz_state *state);
GHZQSS_API unsigned ghz_state_num_qubits(const ghz_state *state);
/* Writes 2 * 2^n doubles (re, im interleaved). */
GHZQSS_API ghz_status ghz_state_amplitudes(const ghz_state *state, double *out,
                                           size_t capacity);
GHZQSS_API ghz_status ghz_outcome_probabilities(const ghz_state *state, unsigned qubit,
                                                ghz_basis basis, double *p_plus,
                                                double *p_minus);
GHZQSS_API ghz_status ghz_project(const ghz_state *state, unsigned qubit, ghz_basis basis,
                                  ghz_outcome outcome, double *probability,
                                  ghz_state **collapsed);
GHZQSS_API ghz_status ghz_measure(const ghz_state *state, unsigned qubit, ghz_basis basis,
                                  ghz_rng *rng, ghz_outcome *outcome, ghz_state **collapsed);
GHZQSS_API ghz_status ghz_expectation(const ghz_state *state, const ghz_basis *bases,
                                      size_t count, double *out);
GHZQSS_API ghz_status ghz_fidelity(const ghz_state *a, const ghz_state *b, double *out);
/* Heralds a three-qubit state from the four-photon GHZ state; *accepted is 1
 * when the trigger photon was found in x+. */
GHZQSS_API ghz_status ghz_four_photon_trigger(ghz_rng *rng, int *accepted, ghz_state **out);

/* Exact three-qubit GHZ correlations for the eight x/y combinations, in the
 * order XXX XXY XYX XYY YXX YXY YYX YYY. Labels are NUL-terminated. */
GHZQSS_API ghz_status ghz_correlation_table(char labels[8][4], double values[8]);

/* Exact single-pass statistics of the block-parity reduction. */
GHZQSS_API ghz_status ghz_oracle_parity(double error_rate, unsigned block_length,
                                        double *kept_fraction, double *residual_qber);

/* Sessions. The run config is the JSON document accepted by `ghzqss run
 * --config`; unknown keys are rejected with GHZ_ERR_CONFIG. */
GHZQSS_API ghz_status ghz_run_config_parse(const char *json, ghz_run_config **out);
GHZQSS_API void ghz_run_config_free(ghz_run_config *config);
/* Runs the whole session in-process, or this process's party over TCP,
 * depending on the config's transport. A QBER abort is not an error; query
 * ghz_session_aborted. */
GHZQSS_API ghz_status ghz_session_run(const ghz_run_config *config, ghz_session **out);
GHZQSS_API void ghz_session_free(ghz_session *session);
GHZQSS_API int ghz_session_aborted(const ghz_session *session);
GHZQSS_API ghz_status ghz_session_report_json(const ghz_session *session, char **out);
/* GHZ_ERR_INVALID_ARGUMENT if this process holds no key for `role`. */
GHZQSS_API ghz_status ghz_session_key_length(const ghz_session *session, ghz_role role,
                                             size_t *out);
GHZQSS_API ghz_status ghz_session_key_bits(const ghz_session *session, ghz_role role,
                                           uint8_t *out, size_t capacity);
/* Writes the key as a packed file plus JSON sidecar. */
GHZQSS_API ghz_status ghz_session_write_key(const ghz_session *session, ghz_role role,
                                            const char *path);

/* Key files and the one-time pad. For binary PBM (P4) inputs only the raster
 * is padded; the header is copied through. */
GHZQSS_API ghz_status ghz_key_load(const char *path, ghz_key **out);
GHZQSS_API ghz_status ghz_key_save_metadata(const ghz_key *key, const char *path);
GHZQSS_API void ghz_key_free(ghz_key *key);
GHZQSS_API size_t ghz_key_bit_length(const ghz_key *key);
GHZQSS_API size_t ghz_key_offset(const ghz_key *key);
/* Consumes key bits (the offset advances). */
GHZQSS_API ghz_status ghz_otp_encrypt_file(const char *in_path, ghz_key *key,
                                           const char *out_path);
GHZQSS_API ghz_status ghz_otp_decrypt_coop_file(const char *in_path, ghz_key *alice_key,
                                                ghz_key *bob_key, const char *out_path);
/* One key only; never advances the offset. */
GHZQSS_API ghz_status ghz_otp_decrypt_single_file(const char *in_path, const ghz_key *key,
                                                  const char *out_path);
/* Bit error rate between the padded portions of two files of equal shape. */
GHZQSS_API ghz_status ghz_bit_error_rate_files(const char *a_path, const char *b_path,
                                               double *out);

#ifdef __cplusplus
}
#endif

#endif /* GHZQSS_GHZQSS_H */
