/*
 * polymer_ldp: C API for the directed-polymer lower-tail deviation lab.
 *
 * All functions return a status code (PLDP_OK on success); outputs go
 * through pointers. Handles are opaque and must be released with the
 * matching *_free. Error details for the calling thread are available
 * from pldp_last_error().
 */
#ifndef POLYMER_LDP_H
#define POLYMER_LDP_H

#include <stdint.h>

#ifndef PLDP_API
#define PLDP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pldp_status {
  PLDP_OK = 0,
  PLDP_ERR_INVALID_ARG = 1,
  PLDP_ERR_DOMAIN = 2,
  PLDP_ERR_PARSE = 3,
  PLDP_ERR_GUARD = 4,
  PLDP_ERR_IO = 5,
  PLDP_ERR_INTERNAL = 6,
} pldp_status;

typedef struct pldp_model pldp_model;    /* tail model + constructed law   */
typedef struct pldp_family pldp_family;  /* deterministic path family      */

PLDP_API const char* pldp_version(void);
PLDP_API const char* pldp_status_name(int status);
/* Message for the most recent error on this thread; empty if none. */
PLDP_API const char* pldp_last_error(void);
/* Release strings returned through char** outputs. */
PLDP_API void pldp_string_free(char* s);

/* --- models ------------------------------------------------------------ */

PLDP_API int pldp_model_create_json(const char* spec_json, pldp_model** out);
PLDP_API void pldp_model_free(pldp_model* model);

PLDP_API int pldp_model_g_eval(const pldp_model* model, double x, double* out);
PLDP_API int pldp_model_g_inverse(const pldp_model* model, double z, double* out);
PLDP_API int pldp_model_tail_prob(const pldp_model* model, double x, double* out);
/* Derived constants of the constructed distribution. Any out pointer may
 * be NULL. */
PLDP_API int pldp_model_constants(const pldp_model* model, double* q,
                                  double* eta0, double* v0, double* x_bar);
/* n IID draws under (seed, stream); deterministic in all arguments. */
PLDP_API int pldp_model_sample(const pldp_model* model, uint64_t seed,
                               uint64_t stream, uint64_t n, double* out);
/* Exponential-moment bound check at eta_prime > eta0: log of the bound,
 * log of the quadrature mgf, and whether the bound holds. */
PLDP_API int pldp_model_mgf_check(const pldp_model* model, double eta_prime,
                                  double* log_bound, double* log_mgf,
                                  int* holds);

/* --- polymer kernels ----------------------------------------------------- */

/* ln Z(T) and the last-passage value on one realized field. */
PLDP_API int pldp_log_partition(const pldp_model* model, uint64_t seed,
                                uint64_t stream, int T, double* out);
PLDP_API int pldp_last_passage(const pldp_model* model, uint64_t seed,
                               uint64_t stream, int T, double* out);
PLDP_API int pldp_free_energy(const pldp_model* model, int T, int replicas,
                              uint64_t seed, double* lambda_hat,
                              double* std_error);

/* --- rate functionals ---------------------------------------------------- */

PLDP_API int pldp_rate_big_f(const pldp_model* model, double z, double* out);
PLDP_API int pldp_rate_i_eta_m(const pldp_model* model, double eta, int M,
                               double* out);
PLDP_API int pldp_rate_solve_eta(const pldp_model* model, double T, double c,
                                 double* out);
/* Regime verdict as a JSON document (caller frees with pldp_string_free). */
PLDP_API int pldp_rate_classify(const pldp_model* model, double delta,
                                char** verdict_json);

/* --- path family ---------------------------------------------------------- */

PLDP_API int pldp_family_create(int dim, int M, pldp_family** out);
PLDP_API void pldp_family_free(pldp_family* family);
PLDP_API int pldp_family_frontier_size(const pldp_family* family, int t,
                                       uint64_t* out);
/* Exact counting-bound checks for every t' in 1..max_t_prime; writes the
 * total number of violations (zero means the bounds hold). */
PLDP_API int pldp_family_verify(const pldp_family* family, int max_t_prime,
                                uint64_t* violations);

/* --- experiments ----------------------------------------------------------- */

/* Runs one experiment config (JSON text), writes results + manifest, and
 * returns the manifest as JSON (caller frees). */
PLDP_API int pldp_run_json(const char* config_json, char** manifest_json);
/* Plain-text summary table of a results file (caller frees). */
PLDP_API int pldp_summarize_file(const char* results_path, int as_csv,
                                 char** table);
PLDP_API int pldp_emit_plot_file(const char* results_path, const char* out_path);

#ifdef __cplusplus
}
#endif

#endif /* POLYMER_LDP_H */
