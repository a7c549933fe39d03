#ifndef POLYMER_RATE_LAB_HPP
#define POLYMER_RATE_LAB_HPP

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "polymer/tail_model.hpp"

namespace pldp {

enum class Regime {
  kComparableToTail,   // R ~ T G(T)
  kTransitionalSmall,  // R = o(T G(delta T)) upper bound only
  kFastMaximal,        // R ~ T^{1+d}
  kSubMaximal,         // R ~ T eta(T) with F(eta(T)) ~ T
  kBoundedF,           // R ~ T^{1+d} / ln^d T
};
const char* to_string(Regime r);

// F(z) = z^{1/d} int_{G^inv(1)}^{G^inv(z)} G^{-1/d}(x) dx, z >= 1.
double big_F(const TailModel& model, double z);

// I_eta^M = sum_{t=0}^{M-1} G^inv(eta / (1+t)^d); exact finite sum.
double I_eta_M(const TailModel& model, double eta, int M);

// f^{-1/d}(G^inv(z)) computed through the identity z^{-1/d} G^inv(z).
double f_inv_pow_at_g_inverse(const TailModel& model, double z);

// Delta = f^{-1/d}(G^inv(eta/M^d)) - f^{-1/d}(G^inv(eta)).
double sandwich_delta(const TailModel& model, double eta, int M);

struct RateProfile {
  TailModel model;
  FMonotonicity f_mono;
  std::vector<std::pair<double, double>> f_table;  // (z, F(z)) on a log grid
  double c0 = 0.0;         // upper-sandwich constant over the probed domain
  double sup_delta = 0.0;  // sup of Delta alone, for reference
  double eta_max = 0.0;    // probed domain bound
};
RateProfile build_rate_profile(const TailModel& model, double eta_max = 1e6);

struct SandwichCheck {
  double I = 0.0;
  double F_eta_M = 0.0;
  double delta = 0.0;
  double lower_slack = 0.0;  // I - (F + eta^{1/d} Delta)
  double upper_slack = 0.0;  // F + C0 eta^{1/d} - I
  bool lower_ok = false;
  bool upper_ok = false;
  double c0_used = 0.0;
};
// Verifies F + eta^{1/d} Delta <= I <= F + C0 eta^{1/d}; requires
// 1 <= M^d <= eta (the lemma's stated domain).
SandwichCheck lll_sandwich_check(const RateProfile& profile, double eta, int M);

struct GammaProbe {
  std::vector<std::pair<double, double>> values;  // (y, F(G(y))/y)
  double gamma_hat = 0.0;  // max over the top decade
  bool divergent = false;
  double max_form_gap = 0.0;  // disagreement between the two printed forms
};
// Tabulates F(G(y))/y; the alternate form f^{1/d}(y) int G^{-1/d} is
// computed alongside and must agree. Requires f non-increasing or constant.
GammaProbe gamma_probe(const TailModel& model, std::vector<double> y_grid = {});

struct RhoProbe {
  std::vector<std::pair<double, double>> values;  // (x, -x f'(x)/f(x))
  double rho_hat = 0.0;                           // last-decade median
};
RhoProbe rho_probe(const TailModel& model, std::vector<double> x_grid = {});

// Solves F(eta) = c*T to relative residual 1e-8 by monotone bracketing.
double solve_eta(const TailModel& model, double T, double c = 1.0);

struct RegimeVerdict {
  Regime regime = Regime::kComparableToTail;
  std::string rule;  // decision rule that fired
  FMonotonicity f_mono = FMonotonicity::kConstant;
  bool upper_bound_only = false;
  double delta = 0.5;  // threshold dilation used by the transitional curve
  double gamma_hat = 0.0;
  bool gamma_divergent = false;
  double rho_hat = 0.0;
  bool has_rho = false;
  bool integral_convergent = false;
  bool f_bounded = false;
  std::vector<std::pair<double, double>> gamma_values;
  std::string curve_label() const;
  nlohmann::json to_json() const;
};
RegimeVerdict classify_regime(const TailModel& model, double delta = 0.5);

// Predicted rate curve (up to constants) for the classified regime.
double predicted_rate_at(const RegimeVerdict& verdict, const TailModel& model,
                         double T);
std::vector<std::pair<double, double>> predicted_rate_curve(
    const RegimeVerdict& verdict, const TailModel& model,
    const std::vector<double>& T_grid);

struct ChernoffParams {
  int T = 0;
  int M = 0;
  double eta_tilde = 0.0;
  double eps = 0.0;
  double r = 0.0;
};
// Analytic log-bound on Q(E^c):
//   2^d M^d ln 2 + eta~ I_{eta~}^M - (1-r) eps T eta~ / K,  K = 4 (4d)^{2d}.
// Requires eta~ >= 2 eta0 M^d and r in (0,1).
double chernoff_log_bound_Ec(const Distribution& dist, const ChernoffParams& p);

}  // namespace pldp

#endif
