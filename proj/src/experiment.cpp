#include "polymer/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "polymer/field.hpp"
#include "polymer/gamma_family.hpp"
#include "polymer/lattice.hpp"
#include "polymer/numerics.hpp"
#include "polymer/rare_event.hpp"
#include "polymer/rate_lab.hpp"
#include "polymer/tail_model.hpp"
#include "polymer/transfer.hpp"

namespace fs = std::filesystem;

namespace pldp {

namespace {

std::string fnv1a64_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void reject_unknown_keys(const nlohmann::json& obj,
                         const std::vector<std::string>& known,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw std::invalid_argument(where + ": unknown key '" + it.key() + "'");
  }
}

const std::vector<std::string>& params_whitelist(const std::string& kind) {
  static const std::vector<std::string> simulate = {"T", "replicas", "dump_field"};
  static const std::vector<std::string> rate = {
      "classify", "delta", "big_f", "eta_for", "eta_c",
      "sandwich", "eta_max", "chernoff", "mgf_check"};
  static const std::vector<std::string> gamma = {"dim", "M", "verify",
                                                 "verify_max", "dump_paths"};
  static const std::vector<std::string> rare = {
      "T", "eps", "method", "n", "M", "eta", "a", "lambda_T", "lambda_replicas"};
  static const std::vector<std::string> classify = {"delta"};
  static const std::vector<std::string> asymmetry = {
      "T_grid", "eps", "a", "b", "lambda_T", "lambda_replicas"};
  if (kind == "simulate") return simulate;
  if (kind == "rate") return rate;
  if (kind == "gamma") return gamma;
  if (kind == "rare-event") return rare;
  if (kind == "classify") return classify;
  if (kind == "asymmetry") return asymmetry;
  throw std::invalid_argument("experiment: unknown kind '" + kind + "'");
}

struct RowSink {
  std::vector<std::string> lines;
  void push(const nlohmann::json& row) { lines.push_back(row.dump()); }
};

double estimate_lambda(const Distribution& dist, const nlohmann::json& params,
                       int default_T, std::uint64_t seed, int threads,
                       nlohmann::json& derived) {
  const int lambda_T = params.value("lambda_T", default_T);
  const int lambda_replicas = params.value("lambda_replicas", 200);
  const auto fe =
      free_energy_estimate(dist, lambda_T, lambda_replicas, seed ^ 0x5eedull, threads);
  derived["lambda_hat"] = fe.lambda_hat;
  derived["lambda_stderr"] = fe.std_error;
  derived["lambda_T"] = fe.T;
  derived["lambda_replicas"] = fe.replicas;
  return fe.lambda_hat;
}

void record_model_constants(const Distribution& dist, nlohmann::json& derived) {
  derived["q"] = dist.q();
  derived["eta0"] = dist.eta0();
  derived["v0"] = dist.v0();
  derived["tail_mass"] = dist.tail_mass();
}

// ---------------------------------------------------------------------------
// Experiment bodies. Each returns rows; derived constants and invariant
// status accumulate on the manifest.

void run_simulate(const ExperimentConfig& cfg, const fs::path& dir,
                  RowSink& rows, RunManifest& manifest) {
  const int T = cfg.params.at("T").get<int>();
  const int replicas = cfg.params.value("replicas", 1);
  if (T < 1 || replicas < 1)
    throw std::invalid_argument("simulate: T and replicas must be >= 1");
  Distribution dist{TailModel::from_json(cfg.model)};
  record_model_constants(dist, manifest.derived);

  struct Row {
    double log_z, zeta;
  };
  std::vector<Row> vals(static_cast<std::size_t>(replicas));
  auto work = [&](int lo, int hi) {
    for (int r = lo; r < hi; ++r) {
      GeneratedField field(dist, cfg.seed, static_cast<std::uint64_t>(r));
      vals[static_cast<std::size_t>(r)] = {log_partition(field, T),
                                           last_passage(field, T)};
    }
  };
  if (cfg.threads <= 1) {
    work(0, replicas);
  } else {
    std::vector<std::thread> pool;
    const int nthread = std::min(cfg.threads, replicas);
    for (int i = 0; i < nthread; ++i) {
      const int lo = replicas * i / nthread, hi = replicas * (i + 1) / nthread;
      if (lo < hi) pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  double mean = 0.0;
  for (int r = 0; r < replicas; ++r) {
    const auto& v = vals[static_cast<std::size_t>(r)];
    nlohmann::json row;
    row["replica"] = r;
    row["log_z"] = v.log_z;
    row["zeta"] = v.zeta;
    row["free_energy"] = v.log_z / T;
    rows.push(row);
    mean += v.log_z / T;
    // Penalized-maximum sandwich; holds on every instance.
    if (!(v.log_z <= v.zeta + 1e-9 &&
          v.log_z >= v.zeta - T * std::log(2.0 * dist.model().dim()) - 1e-9))
      manifest.invariants_ok = false;
  }
  mean /= replicas;
  manifest.derived["lambda_hat"] = mean;
  if (replicas >= 2) {
    double ss = 0.0;
    for (const auto& v : vals) ss += (v.log_z / T - mean) * (v.log_z / T - mean);
    manifest.derived["lambda_stderr"] =
        std::sqrt(ss / (replicas - 1)) / std::sqrt(double(replicas));
  }

  if (cfg.params.contains("dump_field")) {
    const fs::path p = dir / cfg.params.at("dump_field").get<std::string>();
    std::ofstream os(p);
    GeneratedField field(dist, cfg.seed, 0);
    dump_field(os, field, T, cfg.seed, 0);
    os.close();
    manifest.files.push_back({p.filename().string(), fs::file_size(p), 0});
  }
}

void run_rate(const ExperimentConfig& cfg, RowSink& rows, RunManifest& manifest) {
  TailModel model = TailModel::from_json(cfg.model);

  if (cfg.params.value("classify", false)) {
    const auto verdict = classify_regime(model, cfg.params.value("delta", 0.5));
    nlohmann::json row;
    row["op"] = "classify";
    row["verdict"] = verdict.to_json();
    rows.push(row);
  }
  if (cfg.params.contains("big_f")) {
    for (const auto& zj : cfg.params.at("big_f")) {
      const double z = zj.get<double>();
      nlohmann::json row;
      row["op"] = "big_f";
      row["z"] = z;
      row["value"] = big_F(model, z);
      rows.push(row);
    }
  }
  if (cfg.params.contains("eta_for")) {
    const double c = cfg.params.value("eta_c", 1.0);
    for (const auto& tj : cfg.params.at("eta_for")) {
      const double T = tj.get<double>();
      const double eta = solve_eta(model, T, c);
      nlohmann::json row;
      row["op"] = "solve_eta";
      row["T"] = T;
      row["c"] = c;
      row["eta"] = eta;
      row["residual"] = std::abs(big_F(model, eta) - c * T) / (c * T);
      rows.push(row);
    }
  }
  if (cfg.params.contains("sandwich")) {
    const auto profile =
        build_rate_profile(model, cfg.params.value("eta_max", 1e6));
    manifest.derived["c0"] = profile.c0;
    manifest.derived["sup_delta"] = profile.sup_delta;
    for (const auto& pair : cfg.params.at("sandwich")) {
      const double eta = pair.at(0).get<double>();
      const int M = pair.at(1).get<int>();
      const auto check = lll_sandwich_check(profile, eta, M);
      nlohmann::json row;
      row["op"] = "sandwich";
      row["eta"] = eta;
      row["M"] = M;
      row["I"] = check.I;
      row["F_eta_M"] = check.F_eta_M;
      row["delta"] = check.delta;
      row["lower_ok"] = check.lower_ok;
      row["upper_ok"] = check.upper_ok;
      row["c0"] = check.c0_used;
      rows.push(row);
      if (!check.lower_ok || !check.upper_ok) manifest.invariants_ok = false;
    }
  }
  if (cfg.params.contains("mgf_check")) {
    Distribution dist{model};
    record_model_constants(dist, manifest.derived);
    for (const auto& fj : cfg.params.at("mgf_check")) {
      const double factor = fj.get<double>();
      const double eta_prime = dist.eta0() * std::max(factor, 1.0 + 1e-9);
      const auto check = dist.mgf_upper_bound_check(eta_prime);
      nlohmann::json row;
      row["op"] = "mgf_check";
      row["eta_prime"] = eta_prime;
      row["log_bound"] = check.log_bound;
      row["log_mgf"] = check.log_mgf;
      row["holds"] = check.holds;
      rows.push(row);
      if (!check.holds) manifest.invariants_ok = false;
    }
  }
  if (cfg.params.contains("chernoff")) {
    const auto& cj = cfg.params.at("chernoff");
    reject_unknown_keys(cj, {"T", "M", "eta_tilde", "eps", "r"}, "chernoff");
    Distribution dist{model};
    record_model_constants(dist, manifest.derived);
    ChernoffParams p;
    p.T = cj.at("T").get<int>();
    p.M = cj.at("M").get<int>();
    p.eta_tilde = cj.at("eta_tilde").get<double>();
    p.eps = cj.at("eps").get<double>();
    p.r = cj.at("r").get<double>();
    nlohmann::json row;
    row["op"] = "chernoff";
    row["T"] = p.T;
    row["M"] = p.M;
    row["eta_tilde"] = p.eta_tilde;
    row["eps"] = p.eps;
    row["r"] = p.r;
    row["log_bound"] = chernoff_log_bound_Ec(dist, p);
    rows.push(row);
  }
}

void run_gamma(const ExperimentConfig& cfg, const fs::path& dir, RowSink& rows,
               RunManifest& manifest) {
  const int dim = cfg.params.at("dim").get<int>();
  const int M = cfg.params.at("M").get<int>();
  const auto family = PathFamily::build(dim, M);

  nlohmann::json facts;
  facts["op"] = "facts";
  facts["dim"] = dim;
  facts["M"] = M;
  facts["sigma"] = family.sigma();
  nlohmann::json sizes = nlohmann::json::array();
  for (int t = 0; t <= M; ++t) sizes.push_back(family.frontier_size(t));
  facts["frontier_sizes"] = sizes;
  rows.push(facts);

  if (cfg.params.value("verify", false)) {
    const int max_tp = cfg.params.value("verify_max", M);
    std::uint64_t checked = 0, violations = 0;
    for (int tp = 1; tp <= max_tp; ++tp) {
      const auto report = family.verify_counting_bounds(tp);
      checked += report.checked;
      violations += report.violations.size();
    }
    nlohmann::json row;
    row["op"] = "verify";
    row["max_t_prime"] = max_tp;
    row["checked"] = checked;
    row["violations"] = violations;
    rows.push(row);
    if (violations != 0) manifest.invariants_ok = false;
  }

  if (cfg.params.contains("dump_paths")) {
    const fs::path p = dir / cfg.params.at("dump_paths").get<std::string>();
    std::ofstream os(p);
    for (const auto& path : family.enumerate_paths()) {
      for (int t = 0; t <= path.steps(); ++t) {
        if (t) os << ',';
        const auto pt = path.at(t);
        for (std::size_t k = 0; k < pt.size(); ++k) {
          if (k) os << ' ';
          os << pt[k];
        }
      }
      os << '\n';
    }
    os.close();
    manifest.files.push_back({p.filename().string(), fs::file_size(p), 0});
  }
}

void run_rare_event(const ExperimentConfig& cfg, RowSink& rows,
                    RunManifest& manifest) {
  const int T = cfg.params.at("T").get<int>();
  const double eps = cfg.params.value("eps", 0.0);
  const std::string method = cfg.params.at("method").get<std::string>();
  Distribution dist{TailModel::from_json(cfg.model)};
  record_model_constants(dist, manifest.derived);

  double lambda_hat = 0.0, a = 0.0;
  if (cfg.params.contains("a")) {
    a = cfg.params.at("a").get<double>();
    manifest.derived["lambda_hat"] = nullptr;
  } else {
    lambda_hat = estimate_lambda(dist, cfg.params, std::max(2 * T, 16), cfg.seed,
                                 cfg.threads, manifest.derived);
    a = lambda_hat - eps;
  }

  nlohmann::json row;
  row["method"] = method;
  row["T"] = T;
  row["a"] = a;
  row["eps"] = eps;
  row["lambda_hat"] = lambda_hat;
  row["seed"] = cfg.seed;
  try {
    const auto verdict = classify_regime(dist.model());
    row["curve"] = predicted_rate_at(verdict, dist.model(), T);
    row["regime"] = to_string(verdict.regime);
  } catch (const std::exception&) {
    // Classification is advisory here; unsupported kinds just omit it.
  }

  if (method == "exact") {
    const double p = exact_lower_tail(dist, T, a);
    row["p_hat"] = p;
    row["neg_log_p"] =
        p > 0.0 ? nlohmann::json(-std::log(p)) : nlohmann::json();
  } else if (method == "mc") {
    LowerTailQuery query{dist, T, a, cfg.params.value("n", 1000), cfg.seed,
                         lambda_hat};
    const auto est = naive_mc_lower_tail(query, cfg.threads);
    row["p_hat"] = est.p_hat;
    row["ci"] = {est.ci.lo, est.ci.hi};
    row["n"] = est.n;
    row["neg_log_p"] =
        est.p_hat > 0.0 ? nlohmann::json(-std::log(est.p_hat)) : nlohmann::json();
  } else if (method == "cone") {
    LowerTailQuery query{dist, T, a, cfg.params.value("n", 1000), cfg.seed,
                         lambda_hat};
    const int M = cfg.params.at("M").get<int>();
    const double eta = cfg.params.at("eta").get<double>();
    const auto bound = cone_conditioned_lower_bound(query, M, eta, cfg.threads);
    row["M"] = M;
    row["eta"] = eta;
    row["log_q_a"] = bound.log_q_a;
    row["cond_p_hat"] = bound.cond_p_hat;
    row["cond_ci"] = {bound.cond_ci.lo, bound.cond_ci.hi};
    row["log_bound"] =
        std::isinf(bound.log_bound) ? nlohmann::json() : nlohmann::json(bound.log_bound);
    row["n"] = bound.n;
  } else {
    throw std::invalid_argument("rare-event: unknown method '" + method + "'");
  }
  rows.push(row);
}

void run_classify(const ExperimentConfig& cfg, RowSink& rows) {
  TailModel model = TailModel::from_json(cfg.model);
  const auto verdict = classify_regime(model, cfg.params.value("delta", 0.5));
  nlohmann::json row;
  row["op"] = "classify";
  row["verdict"] = verdict.to_json();
  rows.push(row);
}

void run_asymmetry(const ExperimentConfig& cfg, RowSink& rows,
                   RunManifest& manifest) {
  const double eps = cfg.params.value("eps", 0.2);
  Distribution dist{TailModel::from_json(cfg.model)};
  record_model_constants(dist, manifest.derived);
  std::vector<int> T_grid;
  for (const auto& tj : cfg.params.at("T_grid")) T_grid.push_back(tj.get<int>());
  if (T_grid.empty()) throw std::invalid_argument("asymmetry: empty T_grid");

  const double lambda_hat =
      estimate_lambda(dist, cfg.params, 2 * T_grid.back() + 16, cfg.seed,
                      cfg.threads, manifest.derived);
  // Explicit thresholds keep the exact-enumeration run fully deterministic;
  // they default to lambda_hat -/+ eps.
  const double a = cfg.params.value("a", lambda_hat - eps);
  const double b = cfg.params.value("b", lambda_hat + eps);

  std::vector<double> lower_ratios, upper_ratios;
  for (int T : T_grid) {
    const auto pair = exact_tail_pair(dist, T, a, b);
    nlohmann::json row;
    row["T"] = T;
    row["p_lower"] = pair.p_lower;
    row["p_upper"] = pair.p_upper;
    const double rl = pair.p_lower > 0.0 ? -std::log(pair.p_lower) / T : kInf;
    const double ru = pair.p_upper > 0.0 ? -std::log(pair.p_upper) / T : kInf;
    row["ratio_lower"] = std::isinf(rl) ? nlohmann::json() : nlohmann::json(rl);
    row["ratio_upper"] = std::isinf(ru) ? nlohmann::json() : nlohmann::json(ru);
    rows.push(row);
    lower_ratios.push_back(rl);
    upper_ratios.push_back(ru);
  }

  bool lower_increasing = true;
  for (std::size_t i = 1; i < lower_ratios.size(); ++i)
    if (!(lower_ratios[i] > lower_ratios[i - 1])) lower_increasing = false;
  double up_min = kInf, up_max = 0.0;
  for (double r : upper_ratios) {
    up_min = std::min(up_min, r);
    up_max = std::max(up_max, r);
  }
  nlohmann::json summary;
  summary["op"] = "summary";
  summary["eps"] = eps;
  summary["a"] = a;
  summary["b"] = b;
  summary["lambda_hat"] = lambda_hat;
  summary["lower_strictly_increasing"] = lower_increasing;
  summary["upper_spread"] =
      up_min > 0.0 && !std::isinf(up_max) ? nlohmann::json(up_max / up_min)
                                          : nlohmann::json();
  rows.push(summary);
}

}  // namespace

const char* version_string() { return "0.1.0"; }

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected an object");
  reject_unknown_keys(j, {"model", "experiment", "params", "seed", "out", "threads"},
                      "config");
  ExperimentConfig cfg;
  cfg.kind = j.at("experiment").get<std::string>();
  cfg.model = j.value("model", nlohmann::json());
  cfg.params = j.value("params", nlohmann::json::object());
  if (!cfg.params.is_object())
    throw std::invalid_argument("config: params must be an object");
  reject_unknown_keys(cfg.params, params_whitelist(cfg.kind), "params");
  cfg.seed = j.value("seed", 0ull);
  cfg.out = j.value("out", std::string("runs"));
  cfg.threads = j.value("threads", 1);
  if (cfg.threads < 1) throw std::invalid_argument("config: threads must be >= 1");
  if (!cfg.model.is_null()) TailModel::from_json(cfg.model);  // validate early
  return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["experiment"] = kind;
  if (!model.is_null()) j["model"] = model;
  j["params"] = params;
  j["seed"] = seed;
  j["out"] = out;
  j["threads"] = threads;
  return j;
}

std::string ExperimentConfig::hash() const { return fnv1a64_hex(to_json().dump()); }

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["version"] = version;
  j["config"] = config;
  j["derived"] = derived;
  j["wall_ms"] = wall_ms;
  j["invariants_ok"] = invariants_ok;
  nlohmann::json fl = nlohmann::json::array();
  for (const auto& f : files) {
    nlohmann::json e;
    e["path"] = f.path;
    e["bytes"] = f.bytes;
    e["runtime_ms"] = f.runtime_ms;
    fl.push_back(e);
  }
  j["files"] = fl;
  return j;
}

RunResult run(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();

  fs::path results_path, manifest_path, dir;
  if (config.out.size() > 6 &&
      config.out.substr(config.out.size() - 6) == ".jsonl") {
    results_path = config.out;
    dir = results_path.parent_path();
    if (dir.empty()) dir = ".";
    manifest_path = results_path;
    manifest_path.replace_extension(".manifest.json");
  } else {
    dir = fs::path(config.out) / config.hash();
    results_path = dir / "results.jsonl";
    manifest_path = dir / "manifest.json";
  }
  fs::create_directories(dir);

  RunManifest manifest;
  manifest.config_hash = config.hash();
  manifest.version = version_string();
  manifest.config = config.to_json();

  RowSink rows;
  if (config.kind == "simulate") {
    run_simulate(config, dir, rows, manifest);
  } else if (config.kind == "rate") {
    run_rate(config, rows, manifest);
  } else if (config.kind == "gamma") {
    run_gamma(config, dir, rows, manifest);
  } else if (config.kind == "rare-event") {
    run_rare_event(config, rows, manifest);
  } else if (config.kind == "classify") {
    run_classify(config, rows);
  } else if (config.kind == "asymmetry") {
    run_asymmetry(config, rows, manifest);
  } else {
    throw std::invalid_argument("experiment: unknown kind '" + config.kind + "'");
  }

  {
    std::ofstream os(results_path);
    if (!os) throw std::runtime_error("run: cannot open " + results_path.string());
    for (const auto& line : rows.lines) os << line << '\n';
  }
  const auto t1 = std::chrono::steady_clock::now();
  manifest.wall_ms = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count());
  manifest.files.insert(
      manifest.files.begin(),
      {results_path.filename().string(), fs::file_size(results_path),
       manifest.wall_ms});
  {
    std::ofstream os(manifest_path);
    os << manifest.to_json().dump(2) << '\n';
  }
  return {manifest, results_path.string(), manifest_path.string()};
}

// ---------------------------------------------------------------------------
// Summaries

namespace {

struct SummaryRow {
  double T = 0.0;
  double estimate = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;
  bool has_ci = false;
  double neg_log_p = 0.0;
  bool has_neg_log = false;
  double curve = 0.0;
  bool has_curve = false;
};

std::vector<SummaryRow> collect_rows(const std::string& results_path) {
  std::ifstream is(results_path);
  if (!is) throw std::runtime_error("summarize: cannot open " + results_path);
  std::vector<SummaryRow> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    if (!j.contains("T")) continue;
    SummaryRow row;
    row.T = j.at("T").get<double>();
    if (j.contains("p_hat")) {
      row.estimate = j.at("p_hat").get<double>();
    } else if (j.contains("p_lower")) {
      row.estimate = j.at("p_lower").get<double>();
    } else if (j.contains("log_bound") && !j.at("log_bound").is_null()) {
      row.estimate = std::exp(j.at("log_bound").get<double>());
    } else {
      continue;
    }
    if (row.estimate > 0.0) {
      row.neg_log_p = -std::log(row.estimate);
      row.has_neg_log = true;
    }
    if (j.contains("ci")) {
      row.ci_lo = j.at("ci").at(0).get<double>();
      row.ci_hi = j.at("ci").at(1).get<double>();
      row.has_ci = true;
    } else if (j.contains("cond_ci")) {
      row.ci_lo = j.at("cond_ci").at(0).get<double>();
      row.ci_hi = j.at("cond_ci").at(1).get<double>();
      row.has_ci = true;
    }
    if (j.contains("curve")) {
      row.curve = j.at("curve").get<double>();
      row.has_curve = true;
    }
    out.push_back(row);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const SummaryRow& a, const SummaryRow& b) { return a.T < b.T; });
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string summarize_text(const std::string& results_path) {
  const auto rows = collect_rows(results_path);
  std::ostringstream os;
  os << "T          estimate     ci_lo        ci_hi        curve        ratio\n";
  for (const auto& r : rows) {
    const double ratio =
        r.has_curve && r.has_neg_log && r.curve > 0.0 ? r.neg_log_p / r.curve : 0.0;
    char line[160];
    std::snprintf(line, sizeof(line), "%-10g %-12s %-12s %-12s %-12s %s\n", r.T,
                  fmt(r.estimate).c_str(), r.has_ci ? fmt(r.ci_lo).c_str() : "-",
                  r.has_ci ? fmt(r.ci_hi).c_str() : "-",
                  r.has_curve ? fmt(r.curve).c_str() : "-",
                  r.has_curve && r.has_neg_log ? fmt(ratio).c_str() : "-");
    os << line;
  }
  return os.str();
}

std::string summarize_csv(const std::string& results_path) {
  const auto rows = collect_rows(results_path);
  std::ostringstream os;
  os << "T,estimate,ci_lo,ci_hi,curve,ratio\n";
  for (const auto& r : rows) {
    os << fmt(r.T) << ',' << fmt(r.estimate) << ',';
    os << (r.has_ci ? fmt(r.ci_lo) : "") << ',' << (r.has_ci ? fmt(r.ci_hi) : "")
       << ',';
    os << (r.has_curve ? fmt(r.curve) : "") << ',';
    os << (r.has_curve && r.has_neg_log && r.curve > 0.0
               ? fmt(r.neg_log_p / r.curve)
               : "")
       << '\n';
  }
  return os.str();
}

void emit_plot_data(const std::string& results_path, const std::string& out_path) {
  const auto rows = collect_rows(results_path);
  std::ofstream os(out_path);
  if (!os) throw std::runtime_error("emit_plot_data: cannot open " + out_path);
  os << "T,neg_log_p,curve,ratio\n";
  for (const auto& r : rows) {
    if (!r.has_neg_log) continue;  // p = 0 rows have no usable -ln p
    os << fmt(r.T) << ',' << fmt(r.neg_log_p) << ',';
    if (r.has_curve && r.curve > 0.0)
      os << fmt(r.curve) << ',' << fmt(r.neg_log_p / r.curve);
    else
      os << ',';
    os << '\n';
  }
}

}  // namespace pldp
