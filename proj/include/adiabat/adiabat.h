#ifndef ADIABAT_H
#define ADIABAT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define ADIABAT_API __declspec(dllexport)
#else
#define ADIABAT_API __attribute__((visibility("default")))
#endif

typedef enum adiabat_status {
  ADIABAT_OK = 0,
  ADIABAT_ERR_INVALID_ARGUMENT = 1,
  ADIABAT_ERR_DIMENSION = 2,
  ADIABAT_ERR_NUMERICAL = 3,
  ADIABAT_ERR_CONFIG = 4,
  ADIABAT_ERR_IO = 5,
  ADIABAT_ERR_INTERNAL = 6
} adiabat_status;

typedef struct adiabat_chain adiabat_chain;
typedef struct adiabat_packet adiabat_packet;
typedef struct adiabat_sampler adiabat_sampler;
typedef struct adiabat_config adiabat_config;
typedef struct adiabat_result adiabat_result;

/* Library version and git description, e.g. "0.1.0 (abc1234)". */
ADIABAT_API const char* adiabat_version(void);

/* Message of the last failed call on this thread ("" if none). */
ADIABAT_API const char* adiabat_last_error(void);

ADIABAT_API const char* adiabat_status_name(adiabat_status status);

/* ---- chain ------------------------------------------------------------ */

/* A chain of n >= 3 particles with fixed ends, quartic coefficient a > 0 and
   inverse temperature beta > 0. The state starts at rest. */
ADIABAT_API adiabat_status adiabat_chain_create(int n, double a, double beta, adiabat_chain** out);
ADIABAT_API void adiabat_chain_free(adiabat_chain* chain);
ADIABAT_API int adiabat_chain_size(const adiabat_chain* chain);

/* p and q hold n values each. */
ADIABAT_API adiabat_status adiabat_chain_set_state(adiabat_chain* chain, const double* p,
                                                   const double* q, size_t n);
ADIABAT_API adiabat_status adiabat_chain_get_state(const adiabat_chain* chain, double* p, double* q,
                                                   size_t n);

ADIABAT_API adiabat_status adiabat_chain_energies(const adiabat_chain* chain, double* h0,
                                                  double* h1, double* h2);

/* Advances the state by `steps` leapfrog steps of size dt. harmonic != 0
   drops the anharmonic forces. */
ADIABAT_API adiabat_status adiabat_chain_integrate(adiabat_chain* chain, double dt, long long steps,
                                                   int harmonic);

/* ---- spectral --------------------------------------------------------- */

/* Orthonormal sine transform (an involution) of n values. */
ADIABAT_API adiabat_status adiabat_sine_transform(const double* in, double* out, size_t n);
ADIABAT_API adiabat_status adiabat_frequencies(int n, double* omega);
ADIABAT_API adiabat_status adiabat_chain_actions(const adiabat_chain* chain, double* actions,
                                                 size_t n);

/* ---- packet ----------------------------------------------------------- */

/* profile_json is a profile object as in experiment configs, e.g.
   {"kind": "bump", "center": 0.5, "half_width": 0.25, "amplitude": 1}. */
ADIABAT_API adiabat_status adiabat_packet_create(const char* profile_json, int n,
                                                 adiabat_packet** out);
ADIABAT_API void adiabat_packet_free(adiabat_packet* packet);
ADIABAT_API adiabat_status adiabat_packet_phi0(const adiabat_packet* packet,
                                               const adiabat_chain* chain, double* out);
ADIABAT_API adiabat_status adiabat_packet_phi1(const adiabat_packet* packet,
                                               const adiabat_chain* chain, double* out);
/* Time derivative of Phi0 + Phi1 along the full flow. */
ADIABAT_API adiabat_status adiabat_packet_phi_dot(const adiabat_packet* packet,
                                                  const adiabat_chain* chain, double* out);
/* |{H0,Phi1} + {H1,Phi0}| relative to the size of its terms. */
ADIABAT_API adiabat_status adiabat_packet_homological_residual(const adiabat_packet* packet,
                                                               const adiabat_chain* chain,
                                                               double* out);

/* ---- sampler ---------------------------------------------------------- */

/* Gibbs sampler for the chain's (n, a, beta), tuned and burnt in on creation.
   Draws are deterministic in the seed. */
ADIABAT_API adiabat_status adiabat_sampler_create(const adiabat_chain* chain, uint64_t seed,
                                                  adiabat_sampler** out);
ADIABAT_API void adiabat_sampler_free(adiabat_sampler* sampler);
/* Writes the next draw into the chain's state. */
ADIABAT_API adiabat_status adiabat_sampler_next(adiabat_sampler* sampler, adiabat_chain* chain);
ADIABAT_API double adiabat_sampler_theta(const adiabat_sampler* sampler);
ADIABAT_API int adiabat_sampler_stride(const adiabat_sampler* sampler);

/* ---- experiments ------------------------------------------------------ */

ADIABAT_API size_t adiabat_experiment_count(void);
/* Name, one-line description and CSV header of experiment i. */
ADIABAT_API adiabat_status adiabat_experiment_info(size_t i, const char** name,
                                                   const char** description,
                                                   const char** csv_header);

ADIABAT_API adiabat_status adiabat_config_parse(const char* json_text, adiabat_config** out);
ADIABAT_API adiabat_status adiabat_config_load(const char* path, adiabat_config** out);
ADIABAT_API void adiabat_config_free(adiabat_config* config);
ADIABAT_API const char* adiabat_config_experiment(const adiabat_config* config);
/* "output" field of the config, "" when absent. */
ADIABAT_API const char* adiabat_config_output(const adiabat_config* config);
/* The config with every default filled in, as JSON. */
ADIABAT_API const char* adiabat_config_resolved(const adiabat_config* config);

ADIABAT_API adiabat_status adiabat_run(const adiabat_config* config, int threads,
                                       adiabat_result** out);
ADIABAT_API void adiabat_result_free(adiabat_result* result);
ADIABAT_API int adiabat_result_passed(const adiabat_result* result);
ADIABAT_API size_t adiabat_result_check_count(const adiabat_result* result);
ADIABAT_API adiabat_status adiabat_result_check(const adiabat_result* result, size_t i,
                                                const char** name, int* criterion, int* passed,
                                                const char** detail);
ADIABAT_API const char* adiabat_result_csv(const adiabat_result* result);
ADIABAT_API const char* adiabat_result_summary(const adiabat_result* result);
/* Writes results.csv, metadata.json and summary.txt into dir. */
ADIABAT_API adiabat_status adiabat_result_write(const adiabat_config* config,
                                                const adiabat_result* result, const char* dir,
                                                double wall_seconds);

#ifdef __cplusplus
}
#endif

#endif
