#include "adiabat/adiabat.h"

#include <exception>
#include <new>
#include <string>

#include "adiabat/chain.hpp"
#include "adiabat/error.hpp"
#include "adiabat/experiments.hpp"
#include "adiabat/gibbs.hpp"
#include "adiabat/packet.hpp"
#include "adiabat/spectral.hpp"

using namespace adiabat;

struct adiabat_chain {
  ChainParams params;
  ChainState state;
};

struct adiabat_packet {
  PacketObservable packet;
};

struct adiabat_sampler {
  ChainParams params;
  SamplerDiagnostics diagnostics;
  BondChain chain;
};

struct adiabat_config {
  ExperimentConfig config;
  std::string resolved;
};

struct adiabat_result {
  ExperimentResult result;
  std::string csv;
  std::string summary;
};

namespace {

thread_local std::string last_error;

adiabat_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return ADIABAT_ERR_INVALID_ARGUMENT;
    case ErrorCode::dimension_mismatch: return ADIABAT_ERR_DIMENSION;
    case ErrorCode::numerical: return ADIABAT_ERR_NUMERICAL;
    case ErrorCode::config: return ADIABAT_ERR_CONFIG;
    case ErrorCode::io: return ADIABAT_ERR_IO;
  }
  return ADIABAT_ERR_INTERNAL;
}

template <class F>
adiabat_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return ADIABAT_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return ADIABAT_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return ADIABAT_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  require(p != nullptr, ErrorCode::invalid_argument, std::string(what) + " must not be null");
}

void need_size(const adiabat_chain* c, size_t n) {
  require(n == c->state.q.size(), ErrorCode::dimension_mismatch,
          "buffer length " + std::to_string(n) + " does not match chain size " +
              std::to_string(c->state.q.size()));
}

template <class F>
adiabat_status packet_value(const adiabat_packet* packet, const adiabat_chain* chain, double* out,
                            F&& f) {
  return guarded([&] {
    need(packet, "packet");
    need(chain, "chain");
    need(out, "out");
    require(packet->packet.size() == chain->params.n, ErrorCode::dimension_mismatch,
            "packet and chain sizes differ");
    *out = f(packet->packet, *chain);
  });
}

adiabat_config* wrap_config(ExperimentConfig c) {
  auto* out = new adiabat_config{std::move(c), {}};
  out->resolved = out->config.echo.dump(2);
  return out;
}

}  // namespace

extern "C" {

const char* adiabat_version(void) { return build_description(); }

const char* adiabat_last_error(void) { return last_error.c_str(); }

const char* adiabat_status_name(adiabat_status status) {
  switch (status) {
    case ADIABAT_OK: return "ok";
    case ADIABAT_ERR_INVALID_ARGUMENT: return "invalid argument";
    case ADIABAT_ERR_DIMENSION: return "dimension mismatch";
    case ADIABAT_ERR_NUMERICAL: return "numerical failure";
    case ADIABAT_ERR_CONFIG: return "config error";
    case ADIABAT_ERR_IO: return "i/o error";
    case ADIABAT_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

adiabat_status adiabat_chain_create(int n, double a, double beta, adiabat_chain** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    ChainParams params{n, a, beta};
    params.validate();
    *out = new adiabat_chain{params, ChainState::zero(n)};
  });
}

void adiabat_chain_free(adiabat_chain* chain) { delete chain; }

int adiabat_chain_size(const adiabat_chain* chain) { return chain ? chain->params.n : 0; }

adiabat_status adiabat_chain_set_state(adiabat_chain* chain, const double* p, const double* q,
                                       size_t n) {
  return guarded([&] {
    need(chain, "chain");
    need(p, "p");
    need(q, "q");
    need_size(chain, n);
    ChainState s{std::vector<double>(p, p + n), std::vector<double>(q, q + n)};
    require(s.finite(), ErrorCode::invalid_argument, "state must be finite");
    chain->state = std::move(s);
  });
}

adiabat_status adiabat_chain_get_state(const adiabat_chain* chain, double* p, double* q, size_t n) {
  return guarded([&] {
    need(chain, "chain");
    need_size(chain, n);
    for (size_t i = 0; i < n; ++i) {
      if (p) p[i] = chain->state.p[i];
      if (q) q[i] = chain->state.q[i];
    }
  });
}

adiabat_status adiabat_chain_energies(const adiabat_chain* chain, double* h0, double* h1, double* h2) {
  return guarded([&] {
    need(chain, "chain");
    const Energies e = energies(chain->state, chain->params);
    if (h0) *h0 = e.h0;
    if (h1) *h1 = e.h1;
    if (h2) *h2 = e.h2;
  });
}

adiabat_status adiabat_chain_integrate(adiabat_chain* chain, double dt, long long steps, int harmonic) {
  return guarded([&] {
    need(chain, "chain");
    require(steps >= 0, ErrorCode::invalid_argument, "steps must be >= 0");
    Integrator integ(chain->state, dt, chain->params, harmonic ? Dynamics::harmonic : Dynamics::full);
    integ.advance(steps);
    require(integ.state().finite(), ErrorCode::numerical, "integration diverged");
    chain->state = integ.state();
  });
}

adiabat_status adiabat_sine_transform(const double* in, double* out, size_t n) {
  return guarded([&] {
    need(in, "in");
    need(out, "out");
    const auto t = sine_transform(std::span<const double>(in, n));
    std::copy(t.begin(), t.end(), out);
  });
}

adiabat_status adiabat_frequencies(int n, double* omega) {
  return guarded([&] {
    need(omega, "omega");
    const auto w = frequencies(n);
    std::copy(w.begin(), w.end(), omega);
  });
}

adiabat_status adiabat_chain_actions(const adiabat_chain* chain, double* out, size_t n) {
  return guarded([&] {
    need(chain, "chain");
    need(out, "actions");
    need_size(chain, n);
    const auto act = actions(chain->state);
    std::copy(act.begin(), act.end(), out);
  });
}

adiabat_status adiabat_packet_create(const char* profile_json, int n, adiabat_packet** out) {
  return guarded([&] {
    need(out, "out");
    need(profile_json, "profile_json");
    *out = nullptr;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(profile_json);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorCode::config, std::string("profile JSON: ") + e.what());
    }
    *out = new adiabat_packet{PacketObservable::build(profile_from_json(j), n)};
  });
}

void adiabat_packet_free(adiabat_packet* packet) { delete packet; }

adiabat_status adiabat_packet_phi0(const adiabat_packet* packet, const adiabat_chain* chain, double* out) {
  return packet_value(packet, chain, out,
                      [](const PacketObservable& p, const adiabat_chain& c) { return phi0(c.state, p); });
}

adiabat_status adiabat_packet_phi1(const adiabat_packet* packet, const adiabat_chain* chain, double* out) {
  return packet_value(packet, chain, out,
                      [](const PacketObservable& p, const adiabat_chain& c) { return phi1(c.state, p); });
}

adiabat_status adiabat_packet_phi_dot(const adiabat_packet* packet, const adiabat_chain* chain,
                                      double* out) {
  return packet_value(packet, chain, out, [](const PacketObservable& p, const adiabat_chain& c) {
    return phi_dot(c.state, p, c.params);
  });
}

adiabat_status adiabat_packet_homological_residual(const adiabat_packet* packet,
                                                   const adiabat_chain* chain, double* out) {
  return packet_value(packet, chain, out, [](const PacketObservable& p, const adiabat_chain& c) {
    return homological_residual(c.state, p);
  });
}

adiabat_status adiabat_sampler_create(const adiabat_chain* chain, uint64_t seed, adiabat_sampler** out) {
  return guarded([&] {
    need(chain, "chain");
    need(out, "out");
    *out = nullptr;
    const SamplerSettings settings;
    const auto diag = tune_sampler(chain->params, settings, seed);
    auto* s = new adiabat_sampler{chain->params, diag,
                                  BondChain(chain->params, diag.proposal_width, make_rng(seed, 1))};
    s->chain.sweeps(settings.burn_in_sweeps);
    *out = s;
  });
}

void adiabat_sampler_free(adiabat_sampler* sampler) { delete sampler; }

adiabat_status adiabat_sampler_next(adiabat_sampler* sampler, adiabat_chain* chain) {
  return guarded([&] {
    need(sampler, "sampler");
    need(chain, "chain");
    require(chain->params.n == sampler->params.n, ErrorCode::dimension_mismatch,
            "sampler and chain sizes differ");
    sampler->chain.sweeps(sampler->diagnostics.stride);
    const auto p = sample_momenta(sampler->chain.rng(), sampler->params.n, sampler->params.beta);
    chain->state = bonds_to_state(sampler->chain.bonds(), p);
  });
}

double adiabat_sampler_theta(const adiabat_sampler* sampler) {
  return sampler ? sampler->diagnostics.theta : 0.0;
}

int adiabat_sampler_stride(const adiabat_sampler* sampler) {
  return sampler ? sampler->diagnostics.stride : 0;
}

size_t adiabat_experiment_count(void) { return experiment_catalog().size(); }

adiabat_status adiabat_experiment_info(size_t i, const char** name, const char** description,
                                       const char** csv_header) {
  return guarded([&] {
    const auto& cat = experiment_catalog();
    require(i < cat.size(), ErrorCode::invalid_argument, "experiment index out of range");
    static const std::vector<std::string> headers = [&] {
      std::vector<std::string> h;
      for (const auto& e : cat) h.push_back(CsvTable{e.columns, {}}.to_string());
      for (auto& s : h) s.pop_back();
      return h;
    }();
    if (name) *name = cat[i].name.c_str();
    if (description) *description = cat[i].description.c_str();
    if (csv_header) *csv_header = headers[i].c_str();
  });
}

adiabat_status adiabat_config_parse(const char* json_text, adiabat_config** out) {
  return guarded([&] {
    need(out, "out");
    need(json_text, "json_text");
    *out = nullptr;
    *out = wrap_config(parse_config(json_text));
  });
}

adiabat_status adiabat_config_load(const char* path, adiabat_config** out) {
  return guarded([&] {
    need(out, "out");
    need(path, "path");
    *out = nullptr;
    *out = wrap_config(load_config(path));
  });
}

void adiabat_config_free(adiabat_config* config) { delete config; }

const char* adiabat_config_experiment(const adiabat_config* config) {
  return config ? config->config.experiment.c_str() : "";
}

const char* adiabat_config_output(const adiabat_config* config) {
  return config ? config->config.output.c_str() : "";
}

const char* adiabat_config_resolved(const adiabat_config* config) {
  return config ? config->resolved.c_str() : "";
}

adiabat_status adiabat_run(const adiabat_config* config, int threads, adiabat_result** out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    *out = nullptr;
    auto* r = new adiabat_result{run_experiment(config->config, threads), {}, {}};
    r->csv = r->result.table.to_string();
    r->summary = summary_text(r->result);
    *out = r;
  });
}

void adiabat_result_free(adiabat_result* result) { delete result; }

int adiabat_result_passed(const adiabat_result* result) {
  return result && result->result.passed() ? 1 : 0;
}

size_t adiabat_result_check_count(const adiabat_result* result) {
  return result ? result->result.checks.size() : 0;
}

adiabat_status adiabat_result_check(const adiabat_result* result, size_t i, const char** name,
                                    int* criterion, int* passed, const char** detail) {
  return guarded([&] {
    need(result, "result");
    require(i < result->result.checks.size(), ErrorCode::invalid_argument, "check index out of range");
    const auto& c = result->result.checks[i];
    if (name) *name = c.name.c_str();
    if (criterion) *criterion = c.criterion;
    if (passed) *passed = c.passed ? 1 : 0;
    if (detail) *detail = c.detail.c_str();
  });
}

const char* adiabat_result_csv(const adiabat_result* result) { return result ? result->csv.c_str() : ""; }

const char* adiabat_result_summary(const adiabat_result* result) {
  return result ? result->summary.c_str() : "";
}

adiabat_status adiabat_result_write(const adiabat_config* config, const adiabat_result* result,
                                    const char* dir, double wall_seconds) {
  return guarded([&] {
    need(config, "config");
    need(result, "result");
    need(dir, "dir");
    write_outputs(config->config, result->result, dir, wall_seconds);
  });
}

}  // extern "C"
