#ifndef ALPHASPEC_H
#define ALPHASPEC_H

/*
 * C interface for rational spectral approximation under filter-bank
 * covariance constraints.
 *
 * Conventions:
 *  - All structured inputs and outputs are JSON strings (UTF-8).
 *  - Every function returns an alphaspec_status; on failure,
 *    alphaspec_last_error() describes the problem (thread-local).
 *  - Strings returned through out parameters are heap-allocated and must be
 *    released with alphaspec_string_free().
 *  - A created problem is immutable; all operations on it are const and safe
 *    to call concurrently from multiple threads.
 *
 * JSON shapes:
 *   spectrum       {"kind":"constant","value":v}
 *                  {"kind":"transfer","num":[...],"den":[...]}   |num/den|^2
 *                  {"kind":"laurent","num":[...],"den":[...]}    cosine series
 *   filter bank    {"A":[[...]],"B":[...]} or {"lag_bank":n}
 *   problem config {"prior":spectrum (default constant 1),
 *                   "filterbank":bank,
 *                   "sigma":[[...]] | "identity" (default),
 *                   "grid":2048,"tol":1e-9,"max_iter":200}
 */

#ifdef __cplusplus
extern "C" {
#endif

#ifndef ALPHASPEC_API
#if defined(_WIN32)
#define ALPHASPEC_API __declspec(dllexport)
#else
#define ALPHASPEC_API __attribute__((visibility("default")))
#endif
#endif

typedef enum alphaspec_status {
  ALPHASPEC_OK = 0,
  ALPHASPEC_INVALID_INPUT = 1,
  ALPHASPEC_INFEASIBLE = 2,
  ALPHASPEC_SOLVER_FAILURE = 3,
  ALPHASPEC_INTERNAL_ERROR = 4
} alphaspec_status;

typedef struct alphaspec_problem alphaspec_problem;

ALPHASPEC_API const char* alphaspec_version(void);

/* Message for the most recent failure on this thread; empty after success. */
ALPHASPEC_API const char* alphaspec_last_error(void);

ALPHASPEC_API void alphaspec_string_free(char* text);

/* Builds a problem from a config JSON: validates the bank, evaluates the
 * prior on the grid, checks sigma for feasibility, and prepares the
 * normalized constraint when feasible. Infeasible sigma is not an error
 * here; it surfaces in the feasibility report and when solving. */
ALPHASPEC_API alphaspec_status alphaspec_problem_create(const char* config_json,
                                                        alphaspec_problem** out_problem);

ALPHASPEC_API void alphaspec_problem_free(alphaspec_problem* problem);

/* Feasibility report for the problem's sigma: range membership, positive
 * definiteness, residuals, plus the zeroth-moment constraint value (null
 * when the bank fixes no moment). */
ALPHASPEC_API alphaspec_status alphaspec_problem_feasibility(const alphaspec_problem* problem,
                                                             char** out_json);

/* Solves the dual problem for the given order ("1", "2", ... or "inf") and
 * returns the solution spectrum with solver diagnostics. Fails with
 * ALPHASPEC_INFEASIBLE if sigma is infeasible. */
ALPHASPEC_API alphaspec_status alphaspec_problem_solve(const alphaspec_problem* problem,
                                                       const char* nu, char** out_json);

/* Closed-form solution of the zeroth-order reversed problem for a constant
 * prior on the normalized bank. */
ALPHASPEC_API alphaspec_status alphaspec_problem_kl0(const alphaspec_problem* problem,
                                                     char** out_json);

/* {"spec":spectrum,"grid":n} -> {"theta":[...],"values":[...],"quadrature":q} */
ALPHASPEC_API alphaspec_status alphaspec_eval_spectrum(const char* request_json,
                                                       char** out_json);

/* {"filterbank":bank,"spec":spectrum,"grid":n} -> {"gamma":[[...]]} */
ALPHASPEC_API alphaspec_status alphaspec_gamma_covariance(const char* request_json,
                                                          char** out_json);

/* {"phi":spectrum,"psi":spectrum,"grid":n,
 *  "divergences":[{"family":"alpha","parameter":2.0}, ...]}
 * -> {"rows":[{"family","parameter","value"}...],
 *     "beta_alpha_checks":[{"beta","alpha","relative_gap"}...]}
 * A consistency row appears for each requested beta/alpha pair with
 * alpha = 1/beta. */
ALPHASPEC_API alphaspec_status alphaspec_divergence_table(const char* request_json,
                                                          char** out_json);

/* {"model":{"num":[...],"den":[...],"variance":1.0},
 *  "length":n,"seed":s,"burn_in":1000}
 * -> {"values":[...],"seed":s} */
ALPHASPEC_API alphaspec_status alphaspec_arma_simulate(const char* request_json,
                                                       char** out_json);

/* {"filterbank":bank,"series":[...],"grid":2048}
 * -> {"raw":[[...]],"conditioned":[[...]],"report":{...},"floored":b} */
ALPHASPEC_API alphaspec_status alphaspec_estimate_sigma(const char* request_json,
                                                        char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* ALPHASPEC_H */
