// polymer-ldp: command-line front end over the polymer_ldp shared library.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "polymer_ldp.h"

namespace {

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw CLI::ValidationError("cannot open " + path);
  nlohmann::json j;
  is >> j;
  return j;
}

int run_config(const nlohmann::json& config, bool print_results) {
  char* manifest = nullptr;
  const int rc = pldp_run_json(config.dump().c_str(), &manifest);
  if (rc != PLDP_OK) {
    std::cerr << "error (" << pldp_status_name(rc) << "): " << pldp_last_error()
              << "\n";
    pldp_string_free(manifest);
    return 1;
  }
  const auto m = nlohmann::json::parse(manifest);
  pldp_string_free(manifest);
  const std::string results = m.at("results_path").get<std::string>();
  std::cout << "results:  " << results << "\n";
  std::cout << "manifest: " << m.at("manifest_path").get<std::string>() << "\n";
  if (print_results) {
    std::ifstream is(results);
    std::string line;
    while (std::getline(is, line)) std::cout << line << "\n";
  }
  return 0;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polymer-ldp: directed-polymer lower-tail deviation lab"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string out = "runs";
  int threads = 1;
  app.add_option("--seed", seed, "root seed")->capture_default_str();
  app.add_option("--out", out, "output directory or results.jsonl path")
      ->capture_default_str();
  app.add_option("--threads", threads, "worker threads")->capture_default_str();

  auto make_config = [&](const std::string& kind) {
    nlohmann::json cfg;
    cfg["experiment"] = kind;
    cfg["seed"] = seed;
    cfg["out"] = out;
    cfg["threads"] = threads;
    cfg["params"] = nlohmann::json::object();
    return cfg;
  };

  // --- run ----------------------------------------------------------------
  auto* cmd_run = app.add_subcommand("run", "run an experiment config file");
  std::string config_path;
  cmd_run->add_option("--config", config_path, "config JSON file")->required();

  // --- simulate -------------------------------------------------------------
  auto* cmd_sim = app.add_subcommand("simulate", "realize fields, ln Z and zeta");
  std::string model_path;
  int sim_T = 8, sim_replicas = 1;
  std::string dump_field;
  cmd_sim->add_option("--model", model_path, "model spec JSON file")->required();
  cmd_sim->add_option("--T", sim_T, "horizon")->required();
  cmd_sim->add_option("--replicas", sim_replicas, "independent realizations");
  cmd_sim->add_option("--dump-field", dump_field, "also dump replica-0 field");

  // --- rate -----------------------------------------------------------------
  auto* cmd_rate = app.add_subcommand("rate", "rate functionals and classifier");
  std::string rate_model;
  int rate_dim = 0;
  bool rate_classify = false;
  std::vector<double> eta_for, big_f;
  std::vector<double> sandwich;  // eta M pairs, flattened
  std::vector<double> chernoff;  // T M eta_tilde eps r
  cmd_rate->add_option("--model", rate_model, "model spec JSON file")->required();
  cmd_rate->add_option("--dim", rate_dim, "override model dimension");
  cmd_rate->add_flag("--classify", rate_classify, "classify the rate regime");
  cmd_rate->add_option("--eta-for", eta_for, "solve F(eta) = T for these T");
  cmd_rate->add_option("--big-f", big_f, "evaluate F at these z");
  cmd_rate->add_option("--sandwich", sandwich,
                       "eta M (repeatable pair) for the series/integral sandwich");
  cmd_rate->add_option("--chernoff", chernoff,
                       "T M eta_tilde eps r: analytic bound on Q(E^c)");

  // --- gamma ------------------------------------------------------------------
  auto* cmd_gamma = app.add_subcommand("gamma", "deterministic path family");
  int gamma_dim = 1, gamma_M = 7, gamma_verify_max = -1;
  bool gamma_verify = false;
  std::string dump_paths;
  cmd_gamma->add_option("--dim", gamma_dim, "lattice dimension")->required();
  cmd_gamma->add_option("--M", gamma_M, "horizon")->required();
  cmd_gamma->add_flag("--verify", gamma_verify, "check the counting bounds");
  cmd_gamma->add_option("--verify-max", gamma_verify_max,
                        "verify all t' up to this bound (default M)");
  cmd_gamma->add_option("--dump-paths", dump_paths, "write one path per line");

  // --- rare-event ---------------------------------------------------------------
  auto* cmd_rare = app.add_subcommand("rare-event", "lower-tail estimators");
  std::string rare_model, rare_method = "mc";
  int rare_T = 5, rare_n = 1000, rare_M = 0;
  double rare_eps = 0.1, rare_eta = 0.0;
  double rare_a = std::nan("");
  cmd_rare->add_option("--model", rare_model, "model spec JSON file")->required();
  cmd_rare->add_option("--T", rare_T, "horizon")->required();
  cmd_rare->add_option("--eps", rare_eps, "threshold offset below lambda");
  cmd_rare->add_option("--method", rare_method, "exact | mc | cone")->required();
  cmd_rare->add_option("--n", rare_n, "sample budget");
  cmd_rare->add_option("--M", rare_M, "cone depth (cone method)");
  cmd_rare->add_option("--eta", rare_eta, "cone tilt level (cone method)");
  cmd_rare->add_option("--a", rare_a, "explicit threshold slope (skips lambda)");

  // --- classify -------------------------------------------------------------------
  auto* cmd_classify = app.add_subcommand("classify", "rate-regime verdict");
  std::string classify_model;
  double classify_delta = 0.5;
  cmd_classify->add_option("--model", classify_model, "model spec JSON file")
      ->required();
  cmd_classify->add_option("--delta", classify_delta, "transitional dilation");

  // --- asymmetry -------------------------------------------------------------------
  auto* cmd_asym = app.add_subcommand("asymmetry", "exact upper/lower tail trend");
  std::string asym_model, asym_grid = "3,4,5,6";
  double asym_eps = 0.2;
  cmd_asym->add_option("--model", asym_model, "model spec JSON file")->required();
  cmd_asym->add_option("--T-grid", asym_grid, "comma-separated horizons");
  cmd_asym->add_option("--eps", asym_eps, "threshold offset");

  // --- summarize / plot-data ----------------------------------------------------------
  auto* cmd_sum = app.add_subcommand("summarize", "table from a results file");
  std::string sum_path;
  bool sum_csv = false;
  cmd_sum->add_option("results", sum_path, "results.jsonl path")->required();
  cmd_sum->add_flag("--csv", sum_csv, "emit CSV instead of text");

  auto* cmd_plot = app.add_subcommand("plot-data", "columnar plot data");
  std::string plot_path, plot_out = "plot.csv";
  cmd_plot->add_option("results", plot_path, "results.jsonl path")->required();
  cmd_plot->add_option("--out", plot_out, "output file");

  auto* cmd_version = app.add_subcommand("version", "print version");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_version) {
      std::cout << "polymer-ldp " << pldp_version() << "\n";
      return 0;
    }
    if (*cmd_run) {
      auto cfg = load_json_file(config_path);
      if (app.count("--seed")) cfg["seed"] = seed;
      if (app.count("--out")) cfg["out"] = out;
      if (app.count("--threads")) cfg["threads"] = threads;
      return run_config(cfg, false);
    }
    if (*cmd_sim) {
      auto cfg = make_config("simulate");
      cfg["model"] = load_json_file(model_path);
      cfg["params"]["T"] = sim_T;
      cfg["params"]["replicas"] = sim_replicas;
      if (!dump_field.empty()) cfg["params"]["dump_field"] = dump_field;
      return run_config(cfg, false);
    }
    if (*cmd_rate) {
      auto cfg = make_config("rate");
      auto model = load_json_file(rate_model);
      if (rate_dim > 0) model["dim"] = rate_dim;
      cfg["model"] = model;
      if (rate_classify) cfg["params"]["classify"] = true;
      if (!big_f.empty()) cfg["params"]["big_f"] = big_f;
      if (!eta_for.empty()) cfg["params"]["eta_for"] = eta_for;
      if (!sandwich.empty()) {
        if (sandwich.size() % 2 != 0)
          throw CLI::ValidationError("--sandwich expects eta M pairs");
        nlohmann::json pairs = nlohmann::json::array();
        for (std::size_t i = 0; i < sandwich.size(); i += 2)
          pairs.push_back({sandwich[i], static_cast<int>(sandwich[i + 1])});
        cfg["params"]["sandwich"] = pairs;
      }
      if (!chernoff.empty()) {
        if (chernoff.size() != 5)
          throw CLI::ValidationError("--chernoff expects T M eta_tilde eps r");
        cfg["params"]["chernoff"] = {{"T", static_cast<int>(chernoff[0])},
                                     {"M", static_cast<int>(chernoff[1])},
                                     {"eta_tilde", chernoff[2]},
                                     {"eps", chernoff[3]},
                                     {"r", chernoff[4]}};
      }
      return run_config(cfg, true);
    }
    if (*cmd_gamma) {
      auto cfg = make_config("gamma");
      cfg["params"]["dim"] = gamma_dim;
      cfg["params"]["M"] = gamma_M;
      if (gamma_verify) cfg["params"]["verify"] = true;
      if (gamma_verify_max > 0) cfg["params"]["verify_max"] = gamma_verify_max;
      if (!dump_paths.empty()) cfg["params"]["dump_paths"] = dump_paths;
      return run_config(cfg, true);
    }
    if (*cmd_rare) {
      auto cfg = make_config("rare-event");
      cfg["model"] = load_json_file(rare_model);
      cfg["params"]["T"] = rare_T;
      cfg["params"]["eps"] = rare_eps;
      cfg["params"]["method"] = rare_method;
      cfg["params"]["n"] = rare_n;
      if (rare_M > 0) cfg["params"]["M"] = rare_M;
      if (rare_eta > 0.0) cfg["params"]["eta"] = rare_eta;
      if (!std::isnan(rare_a)) cfg["params"]["a"] = rare_a;
      return run_config(cfg, true);
    }
    if (*cmd_classify) {
      auto cfg = make_config("classify");
      cfg["model"] = load_json_file(classify_model);
      cfg["params"]["delta"] = classify_delta;
      return run_config(cfg, true);
    }
    if (*cmd_asym) {
      auto cfg = make_config("asymmetry");
      cfg["model"] = load_json_file(asym_model);
      cfg["params"]["T_grid"] = parse_int_list(asym_grid);
      cfg["params"]["eps"] = asym_eps;
      return run_config(cfg, true);
    }
    if (*cmd_sum) {
      char* table = nullptr;
      const int rc = pldp_summarize_file(sum_path.c_str(), sum_csv ? 1 : 0, &table);
      if (rc != PLDP_OK) {
        std::cerr << "error (" << pldp_status_name(rc) << "): "
                  << pldp_last_error() << "\n";
        return 1;
      }
      std::cout << table;
      pldp_string_free(table);
      return 0;
    }
    if (*cmd_plot) {
      const int rc = pldp_emit_plot_file(plot_path.c_str(), plot_out.c_str());
      if (rc != PLDP_OK) {
        std::cerr << "error (" << pldp_status_name(rc) << "): "
                  << pldp_last_error() << "\n";
        return 1;
      }
      std::cout << "wrote " << plot_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
