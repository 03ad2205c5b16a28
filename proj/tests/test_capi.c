/* Exercises the shared library through its C header only. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "adiabat/adiabat.h"

static int failures = 0;

#define EXPECT(cond)                                                   \
  do {                                                                 \
    if (!(cond)) {                                                     \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                      \
    }                                                                  \
  } while (0)

#define N 15

static const char* bump = "{\"kind\": \"bump\", \"center\": 0.5, \"half_width\": 0.25, \"amplitude\": 1}";

static void test_errors(void) {
  adiabat_chain* chain = NULL;
  EXPECT(adiabat_chain_create(2, 1.0, 1.0, &chain) == ADIABAT_ERR_INVALID_ARGUMENT);
  EXPECT(chain == NULL);
  EXPECT(strlen(adiabat_last_error()) > 0);
  EXPECT(adiabat_chain_create(5, 1.0, 1.0, NULL) == ADIABAT_ERR_INVALID_ARGUMENT);
  EXPECT(strcmp(adiabat_status_name(ADIABAT_ERR_CONFIG), "config error") == 0);

  EXPECT(adiabat_chain_create(5, 1.0, 1.0, &chain) == ADIABAT_OK);
  double p[4] = {0}, q[4] = {0};
  EXPECT(adiabat_chain_set_state(chain, p, q, 4) == ADIABAT_ERR_DIMENSION);
  adiabat_packet* packet = NULL;
  EXPECT(adiabat_packet_create("{\"kind\": \"nope\"}", 5, &packet) == ADIABAT_ERR_CONFIG);
  EXPECT(adiabat_packet_create("not json", 5, &packet) == ADIABAT_ERR_CONFIG);
  adiabat_chain_free(chain);
  adiabat_chain_free(NULL);

  adiabat_config* config = NULL;
  EXPECT(adiabat_config_parse("{\"experiment\": \"homological\"}", &config) == ADIABAT_ERR_CONFIG);
  EXPECT(strstr(adiabat_last_error(), "seed") != NULL);
  EXPECT(adiabat_config_load("/nonexistent.json", &config) == ADIABAT_ERR_CONFIG);
}

static void test_chain_and_spectral(void) {
  adiabat_chain* chain = NULL;
  EXPECT(adiabat_chain_create(N, 1.0, 10.0, &chain) == ADIABAT_OK);
  EXPECT(adiabat_chain_size(chain) == N);

  double p[N], q[N], p2[N], q2[N];
  for (int j = 0; j < N; ++j) {
    p[j] = 0.05 * sin(1.0 + j);
    q[j] = 0.05 * cos(2.0 * j);
  }
  EXPECT(adiabat_chain_set_state(chain, p, q, N) == ADIABAT_OK);
  EXPECT(adiabat_chain_get_state(chain, p2, q2, N) == ADIABAT_OK);
  EXPECT(memcmp(p, p2, sizeof p) == 0 && memcmp(q, q2, sizeof q) == 0);

  double h0, h1, h2;
  EXPECT(adiabat_chain_energies(chain, &h0, &h1, &h2) == ADIABAT_OK);
  double kinetic = 0.0;
  for (int j = 0; j < N; ++j) kinetic += 0.5 * p[j] * p[j];
  EXPECT(h0 > kinetic);

  /* Parseval: H0 is the sum of omega_k times the mode actions. */
  double actions[N], omega[N];
  EXPECT(adiabat_chain_actions(chain, actions, N) == ADIABAT_OK);
  EXPECT(adiabat_frequencies(N, omega) == ADIABAT_OK);
  double sum = 0.0;
  for (int k = 0; k < N; ++k) sum += omega[k] * actions[k];
  EXPECT(fabs(sum - h0) < 1e-13 * h0);

  /* Involution. */
  double once[N], twice[N];
  EXPECT(adiabat_sine_transform(q, once, N) == ADIABAT_OK);
  EXPECT(adiabat_sine_transform(once, twice, N) == ADIABAT_OK);
  for (int j = 0; j < N; ++j) EXPECT(fabs(twice[j] - q[j]) < 1e-14);

  /* Energy is conserved up to the leapfrog error. */
  const double e0 = h0 + h1 + h2;
  EXPECT(adiabat_chain_integrate(chain, 0.02, 5000, 0) == ADIABAT_OK);
  EXPECT(adiabat_chain_energies(chain, &h0, &h1, &h2) == ADIABAT_OK);
  EXPECT(fabs(h0 + h1 + h2 - e0) < 1e-3 * e0);

  /* Harmonic flow keeps every action up to the leapfrog error. */
  double before[N], after[N];
  adiabat_chain_actions(chain, before, N);
  EXPECT(adiabat_chain_integrate(chain, 0.02, 1000, 1) == ADIABAT_OK);
  adiabat_chain_actions(chain, after, N);
  for (int k = 0; k < N; ++k) EXPECT(fabs(after[k] - before[k]) < 1e-3 * (before[k] + 1e-6));
  EXPECT(adiabat_chain_integrate(chain, -1.0, 1, 0) == ADIABAT_ERR_INVALID_ARGUMENT);
  adiabat_chain_free(chain);
}

static void test_packet_and_sampler(void) {
  adiabat_chain* chain = NULL;
  adiabat_packet* packet = NULL;
  adiabat_sampler* sampler = NULL;
  EXPECT(adiabat_chain_create(N, 1.0, 50.0, &chain) == ADIABAT_OK);
  EXPECT(adiabat_packet_create(bump, N, &packet) == ADIABAT_OK);
  EXPECT(adiabat_sampler_create(chain, 11, &sampler) == ADIABAT_OK);
  EXPECT(adiabat_sampler_stride(sampler) >= 1);
  EXPECT(adiabat_sampler_theta(sampler) < 0.0);

  double first_q0 = 0.0;
  for (int i = 0; i < 5; ++i) {
    EXPECT(adiabat_sampler_next(sampler, chain) == ADIABAT_OK);
    double p[N], q[N];
    adiabat_chain_get_state(chain, p, q, N);
    if (i == 0) first_q0 = q[0];
    double v0, v1, vdot, res;
    EXPECT(adiabat_packet_phi0(packet, chain, &v0) == ADIABAT_OK);
    EXPECT(adiabat_packet_phi1(packet, chain, &v1) == ADIABAT_OK);
    EXPECT(adiabat_packet_phi_dot(packet, chain, &vdot) == ADIABAT_OK);
    EXPECT(adiabat_packet_homological_residual(packet, chain, &res) == ADIABAT_OK);
    EXPECT(v0 > 0.0);
    EXPECT(isfinite(v1) && isfinite(vdot));
    EXPECT(res < 1e-9);
  }

  /* Same seed, same draws. */
  adiabat_sampler* again = NULL;
  EXPECT(adiabat_sampler_create(chain, 11, &again) == ADIABAT_OK);
  EXPECT(adiabat_sampler_next(again, chain) == ADIABAT_OK);
  double p[N], q[N];
  adiabat_chain_get_state(chain, p, q, N);
  EXPECT(q[0] == first_q0);

  adiabat_chain* other = NULL;
  adiabat_chain_create(N + 1, 1.0, 50.0, &other);
  double out;
  EXPECT(adiabat_packet_phi0(packet, other, &out) == ADIABAT_ERR_DIMENSION);
  EXPECT(adiabat_sampler_next(sampler, other) == ADIABAT_ERR_DIMENSION);

  adiabat_sampler_free(again);
  adiabat_sampler_free(sampler);
  adiabat_packet_free(packet);
  adiabat_chain_free(other);
  adiabat_chain_free(chain);
}

static void test_experiments(void) {
  EXPECT(adiabat_experiment_count() == 8);
  for (size_t i = 0; i < adiabat_experiment_count(); ++i) {
    const char *name, *desc, *header;
    EXPECT(adiabat_experiment_info(i, &name, &desc, &header) == ADIABAT_OK);
    EXPECT(strlen(name) > 0 && strlen(desc) > 0 && strlen(header) > 0);
  }
  EXPECT(adiabat_experiment_info(99, NULL, NULL, NULL) == ADIABAT_ERR_INVALID_ARGUMENT);

  adiabat_config* config = NULL;
  EXPECT(adiabat_config_parse("{\"experiment\": \"theorem2-h1\", \"seed\": 1, \"output\": \"x\","
                              " \"grid_sizes\": [128, 256], \"divergence_grids\": [64, 512]}",
                              &config) == ADIABAT_OK);
  EXPECT(strcmp(adiabat_config_experiment(config), "theorem2-h1") == 0);
  EXPECT(strcmp(adiabat_config_output(config), "x") == 0);
  EXPECT(strstr(adiabat_config_resolved(config), "grid_sizes") != NULL);

  adiabat_result* result = NULL;
  EXPECT(adiabat_run(config, 1, &result) == ADIABAT_OK);
  EXPECT(adiabat_result_passed(result) == 1);
  EXPECT(adiabat_result_check_count(result) > 0);
  const char *name, *detail;
  int criterion, passed;
  EXPECT(adiabat_result_check(result, 0, &name, &criterion, &passed, &detail) == ADIABAT_OK);
  EXPECT(passed == 1);
  EXPECT(adiabat_result_check(result, 1000, &name, &criterion, &passed, &detail) ==
         ADIABAT_ERR_INVALID_ARGUMENT);
  EXPECT(strncmp(adiabat_result_csv(result), "profile,grid_size,", 18) == 0);
  EXPECT(strstr(adiabat_result_summary(result), "RESULT: PASS") != NULL);
  adiabat_result_free(result);
  adiabat_config_free(config);
}

int main(void) {
  EXPECT(strlen(adiabat_version()) > 0);
  test_errors();
  test_chain_and_spectral();
  test_packet_and_sampler();
  test_experiments();
  if (failures) {
    fprintf(stderr, "%d C API expectation(s) failed\n", failures);
    return 1;
  }
  printf("C API: all expectations passed\n");
  return 0;
}
