#include "polymer_ldp.h"

#include <cstring>
#include <new>
#include <stdexcept>
#include <string>

#include "polymer/experiment.hpp"
#include "polymer/field.hpp"
#include "polymer/gamma_family.hpp"
#include "polymer/rate_lab.hpp"
#include "polymer/tail_model.hpp"
#include "polymer/transfer.hpp"

struct pldp_model {
  pldp::Distribution dist;
};

struct pldp_family {
  pldp::PathFamily family;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const char* what) {
  g_last_error = what != nullptr ? what : "";
  return code;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(::operator new(s.size() + 1, std::nothrow));
  if (out == nullptr) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Maps C++ exceptions from the core onto status codes.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return PLDP_OK;
  } catch (const std::domain_error& e) {
    return fail(PLDP_ERR_DOMAIN, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(PLDP_ERR_INVALID_ARG, e.what());
  } catch (const std::length_error& e) {
    return fail(PLDP_ERR_GUARD, e.what());
  } catch (const std::out_of_range& e) {
    return fail(PLDP_ERR_DOMAIN, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(PLDP_ERR_PARSE, e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(PLDP_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(PLDP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PLDP_ERR_INTERNAL, "unknown error");
  }
}

int require_arg(bool ok, const char* what) {
  return ok ? PLDP_OK : fail(PLDP_ERR_INVALID_ARG, what);
}

}  // namespace

extern "C" {

const char* pldp_version(void) { return pldp::version_string(); }

const char* pldp_status_name(int status) {
  switch (status) {
    case PLDP_OK: return "ok";
    case PLDP_ERR_INVALID_ARG: return "invalid_argument";
    case PLDP_ERR_DOMAIN: return "domain_error";
    case PLDP_ERR_PARSE: return "parse_error";
    case PLDP_ERR_GUARD: return "guard_exceeded";
    case PLDP_ERR_IO: return "io_error";
    case PLDP_ERR_INTERNAL: return "internal_error";
  }
  return "unknown_status";
}

const char* pldp_last_error(void) { return g_last_error.c_str(); }

void pldp_string_free(char* s) { ::operator delete(s); }

int pldp_model_create_json(const char* spec_json, pldp_model** out) {
  if (int rc = require_arg(spec_json && out, "null argument")) return rc;
  *out = nullptr;
  return guarded([&] {
    const auto spec = nlohmann::json::parse(spec_json);
    auto* handle = new pldp_model{pldp::Distribution(pldp::TailModel::from_json(spec))};
    *out = handle;
  });
}

void pldp_model_free(pldp_model* model) { delete model; }

int pldp_model_g_eval(const pldp_model* model, double x, double* out) {
  if (int rc = require_arg(model && out, "null argument")) return rc;
  return guarded([&] { *out = model->dist.model().g(x); });
}

int pldp_model_g_inverse(const pldp_model* model, double z, double* out) {
  if (int rc = require_arg(model && out, "null argument")) return rc;
  return guarded([&] { *out = model->dist.model().g_inverse(z); });
}

int pldp_model_tail_prob(const pldp_model* model, double x, double* out) {
  if (int rc = require_arg(model && out, "null argument")) return rc;
  return guarded([&] { *out = model->dist.tail_prob(x); });
}

int pldp_model_constants(const pldp_model* model, double* q, double* eta0,
                         double* v0, double* x_bar) {
  if (int rc = require_arg(model != nullptr, "null model")) return rc;
  return guarded([&] {
    if (q) *q = model->dist.q();
    if (eta0) *eta0 = model->dist.eta0();
    if (v0) *v0 = model->dist.v0();
    if (x_bar) *x_bar = model->dist.model().x_bar();
  });
}

int pldp_model_sample(const pldp_model* model, uint64_t seed, uint64_t stream,
                      uint64_t n, double* out) {
  if (int rc = require_arg(model && out, "null argument")) return rc;
  return guarded([&] {
    for (uint64_t i = 0; i < n; ++i) out[i] = model->dist.sample(seed, stream, i);
  });
}

int pldp_model_mgf_check(const pldp_model* model, double eta_prime,
                         double* log_bound, double* log_mgf, int* holds) {
  if (int rc = require_arg(model != nullptr, "null model")) return rc;
  return guarded([&] {
    const auto check = model->dist.mgf_upper_bound_check(eta_prime);
    if (log_bound) *log_bound = check.log_bound;
    if (log_mgf) *log_mgf = check.log_mgf;
    if (holds) *holds = check.holds ? 1 : 0;
  });
}

int pldp_log_partition(const pldp_model* model, uint64_t seed, uint64_t stream,
                       int T, double* out) {
  if (int rc = require_arg(model && out, "null argument")) return rc;
  return guarded([&] {
    pldp::GeneratedField field(model->dist, seed, stream);
    *out = pldp::log_partition(field, T);
  });
}

int pldp_last_passage(const pldp_model* model, uint64_t seed, uint64_t stream,
                      int T, double* out) {
  if (int rc = require_arg(model && out, "null argument")) return rc;
  return guarded([&] {
    pldp::GeneratedField field(model->dist, seed, stream);
    *out = pldp::last_passage(field, T);
  });
}

int pldp_free_energy(const pldp_model* model, int T, int replicas, uint64_t seed,
                     double* lambda_hat, double* std_error) {
  if (int rc = require_arg(model != nullptr, "null model")) return rc;
  return guarded([&] {
    const auto est = pldp::free_energy_estimate(model->dist, T, replicas, seed);
    if (lambda_hat) *lambda_hat = est.lambda_hat;
    if (std_error) *std_error = est.std_error;
  });
}

int pldp_rate_big_f(const pldp_model* model, double z, double* out) {
  if (int rc = require_arg(model && out, "null argument")) return rc;
  return guarded([&] { *out = pldp::big_F(model->dist.model(), z); });
}

int pldp_rate_i_eta_m(const pldp_model* model, double eta, int M, double* out) {
  if (int rc = require_arg(model && out, "null argument")) return rc;
  return guarded([&] { *out = pldp::I_eta_M(model->dist.model(), eta, M); });
}

int pldp_rate_solve_eta(const pldp_model* model, double T, double c, double* out) {
  if (int rc = require_arg(model && out, "null argument")) return rc;
  return guarded([&] { *out = pldp::solve_eta(model->dist.model(), T, c); });
}

int pldp_rate_classify(const pldp_model* model, double delta, char** verdict_json) {
  if (int rc = require_arg(model && verdict_json, "null argument")) return rc;
  *verdict_json = nullptr;
  return guarded([&] {
    const auto verdict = pldp::classify_regime(model->dist.model(), delta);
    *verdict_json = dup_string(verdict.to_json().dump());
    if (*verdict_json == nullptr) throw std::bad_alloc();
  });
}

int pldp_family_create(int dim, int M, pldp_family** out) {
  if (int rc = require_arg(out != nullptr, "null argument")) return rc;
  *out = nullptr;
  return guarded([&] { *out = new pldp_family{pldp::PathFamily::build(dim, M)}; });
}

void pldp_family_free(pldp_family* family) { delete family; }

int pldp_family_frontier_size(const pldp_family* family, int t, uint64_t* out) {
  if (int rc = require_arg(family && out, "null argument")) return rc;
  return guarded([&] {
    if (t < 0 || t > family->family.horizon())
      throw std::invalid_argument("frontier_size: t out of range");
    *out = family->family.frontier_size(t);
  });
}

int pldp_family_verify(const pldp_family* family, int max_t_prime,
                       uint64_t* violations) {
  if (int rc = require_arg(family && violations, "null argument")) return rc;
  return guarded([&] {
    uint64_t total = 0;
    for (int tp = 1; tp <= max_t_prime; ++tp)
      total += family->family.verify_counting_bounds(tp).violations.size();
    *violations = total;
  });
}

int pldp_run_json(const char* config_json, char** manifest_json) {
  if (int rc = require_arg(config_json != nullptr, "null config")) return rc;
  if (manifest_json) *manifest_json = nullptr;
  return guarded([&] {
    const auto cfg =
        pldp::ExperimentConfig::from_json(nlohmann::json::parse(config_json));
    const auto result = pldp::run(cfg);
    if (!result.manifest.invariants_ok)
      throw std::runtime_error("run finished with failed invariant checks");
    if (manifest_json) {
      auto j = result.manifest.to_json();
      j["results_path"] = result.results_path;
      j["manifest_path"] = result.manifest_path;
      *manifest_json = dup_string(j.dump());
      if (*manifest_json == nullptr) throw std::bad_alloc();
    }
  });
}

int pldp_summarize_file(const char* results_path, int as_csv, char** table) {
  if (int rc = require_arg(results_path && table, "null argument")) return rc;
  *table = nullptr;
  return guarded([&] {
    const std::string text = as_csv ? pldp::summarize_csv(results_path)
                                    : pldp::summarize_text(results_path);
    *table = dup_string(text);
    if (*table == nullptr) throw std::bad_alloc();
  });
}

int pldp_emit_plot_file(const char* results_path, const char* out_path) {
  if (int rc = require_arg(results_path && out_path, "null argument")) return rc;
  return guarded([&] { pldp::emit_plot_data(results_path, out_path); });
}

}  // extern "C"
