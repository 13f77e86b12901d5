/* Copyright 2026 The flatexp Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the flatexp core. All structured data crosses the boundary
 * as JSON text; handles are opaque. Every function that can fail returns an
 * error code and leaves a message in fx_last_error() for the calling thread.
 */

#ifndef FLATEXP_FLATEXP_H_
#define FLATEXP_FLATEXP_H_

#ifdef __cplusplus
extern "C" {
#endif

/* Error codes. The CLI reuses them as exit codes. */
#define FX_OK 0         /* success, and for verifiers: all properties hold  */
#define FX_E_PROPERTY 1 /* a verified property failed; report still written */
#define FX_E_INPUT 2    /* malformed input, bad parameter, missing field    */
#define FX_E_NUMERIC 3  /* numeric failure: non-convergence, overflow, ...  */

typedef struct fx_construction fx_construction; /* built approximation      */
typedef struct fx_certificate fx_certificate;   /* sum-of-squares witness   */

const char* fx_version(void);

/* Message for the most recent failing fx_* call on this thread; empty
 * string when the last call succeeded. Owned by the library. */
const char* fx_last_error(void);

/* Frees any char* the library returned through an out-parameter. */
void fx_free(char* p);

/* Computes construction parameters without building anything.
 * request: {"beta": "2", "delta": "2^-8",
 *           "overrides": {"c_ell": "1", "c_s": "1", "c_r": "1", "c_k": "1"},
 *           "paper_constants": false}
 * beta and the rationals accept "3", "-1/4", "0.125"; delta also accepts
 * "2^-n" and "e^-n". Exactly one of overrides / paper_constants.
 * out: parameter JSON augmented with the resulting degree and warnings. */
int fx_select_params(const char* request_json, char** out_json);

/* Builds the approximation for explicit parameters.
 * params: {"beta": ..., "delta": ..., "ell": 6, "s": 280, "r": 60, "k": 360}
 * (the schema fx_select_params emits). All four of ell, s, r, k must be
 * present and even. precision_bits <= 0 selects the default (512). */
int fx_construct(const char* params_json, long precision_bits,
                 fx_construction** out);
void fx_construction_free(fx_construction* c);

/* Serializers for the pieces of a construction. hat: exact rational
 * coefficients. realized: hex-float coefficients of the shifted and scaled
 * polynomial. metadata: degrees, coefficient statistics, and every
 * transcendental constant used, at the construction's precision. */
int fx_construction_params_json(const fx_construction* c, char** out_json);
int fx_construction_hat_json(const fx_construction* c, char** out_json);
int fx_construction_realized_json(const fx_construction* c, char** out_json);
int fx_construction_metadata_json(const fx_construction* c, char** out_json);

/* Rehydrates a construction from the JSON that fx_construction_hat_json
 * produced (exact; the realized polynomial is recomputed). */
int fx_construction_from_hat_json(const char* hat_json, long precision_bits,
                                  fx_construction** out);

/* Runs the inequality verifiers with rigorous enclosures.
 * options (all optional):
 *   {"window_points": 2048, "log_points_per_decade": 512, "tail_factor": 10,
 *    "trunc_points": 1024, "start_prec": 320, "max_prec": 4096,
 *    "certify_roots": true, "checks": ["approx", "trunc", "flat"]}
 * Returns FX_OK when every selected property passes and FX_E_PROPERTY when
 * one fails; the report is written either way. */
int fx_verify(const fx_construction* c, const char* options_json,
              char** report_json);

/* CSV sampling dump over the accuracy window:
 * x,p_hat,exp_neg_x,margin rows, `points` + 1 of them. */
int fx_sample_csv(const fx_construction* c, long points, char** out_csv);

/* Builds the bounded sum-of-squares certificate for the drift polynomial of
 * P: R(x,y) = (x-y)/2 (1 + (x-y)^2/4)(U(x) - U(y)) - (x-y)^2/4000 P(x) with
 * U' = P. poly_json: univariate exact-rational polynomial, even degree,
 * leading coefficient in (0, 1], P > 0 and 99 P > |P'| everywhere. */
int fx_certify_poly(const char* poly_json, long precision_bits,
                    unsigned long long seed, fx_certificate** out);
/* Same, for the exact pre-realization polynomial of a construction;
 * records the construction parameters inside the certificate. */
int fx_certify_construction(const fx_construction* c, long precision_bits,
                            unsigned long long seed, fx_certificate** out);
void fx_certificate_free(fx_certificate* c);

int fx_certificate_to_json(const fx_certificate* c, char** out_json);
int fx_certificate_from_json(const char* json_text, fx_certificate** out);

/* Independent re-check of a certificate: expands the squares, compares
 * against R coefficient-wise and at n_points random points, and re-checks
 * the (k, d, C) bound on every square. FX_OK / FX_E_PROPERTY. */
int fx_certificate_check(const fx_certificate* c, long n_points,
                         unsigned long long seed, long precision_bits,
                         char** report_json);

/* Degree benchmark against the doubling-product baseline.
 * config: {"betas": [1, 2, 3, 4, 5], "eps": "1/1000"}
 * out: {"rows": [{"beta", "eps", "degree_ours", "degree_baseline",
 *                 "margin_ours", "margin_baseline", "params"}, ...]} */
int fx_bench(const char* config_json, char** out_json);

/* Gibbs-state demonstration on a random ring Hamiltonian.
 * config: {"n": 3, "seed": 7, "beta": 1.0, "eps": "1/1000"} with optional
 * "params" (explicit construction parameters; then eps is ignored) and
 * "precision_bits". Report: spectrum, rescale factor, per-eigenvalue
 * errors, trace error, pass/fail. FX_OK / FX_E_PROPERTY. */
int fx_gibbs_demo(const char* config_json, char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* FLATEXP_FLATEXP_H_ */
