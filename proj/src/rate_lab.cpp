#include "polymer/rate_lab.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polymer/numerics.hpp"

namespace pldp {

namespace {

void require_exponent(const TailModel& m, const char* who) {
  if (!m.has_tail_exponent())
    throw std::domain_error(std::string(who) + ": model kind has no tail exponent");
}

// int_a^b G(x)^{-1/d} dx with a log substitution: the integrand can span
// decades near G^inv(1) where G^{-1/d} is steep.
double integral_g_pow(const TailModel& m, double a, double b, double rel_tol) {
  if (b <= a) return 0.0;
  const double inv_d = 1.0 / m.dim();
  auto h = [&](double s) {
    const double x = std::exp(s);
    return x * std::pow(m.g(x), -inv_d);
  };
  return integrate(h, std::log(a), std::log(b), rel_tol);
}

std::vector<double> default_log_grid(double lo, double hi, int per_decade) {
  std::vector<double> g;
  const double step = std::log(10.0) / per_decade;
  for (double s = std::log(lo); s <= std::log(hi) * (1.0 + 1e-12); s += step)
    g.push_back(std::exp(s));
  return g;
}

}  // namespace

const char* to_string(Regime r) {
  switch (r) {
    case Regime::kComparableToTail: return "comparable_to_tail";
    case Regime::kTransitionalSmall: return "transitional_small";
    case Regime::kFastMaximal: return "fast_maximal";
    case Regime::kSubMaximal: return "sub_maximal";
    case Regime::kBoundedF: return "bounded_f";
  }
  return "?";
}

double big_F(const TailModel& model, double z) {
  require_exponent(model, "big_F");
  if (!(z >= 1.0)) throw std::domain_error("big_F: z must be >= 1");
  if (z == 1.0) return 0.0;
  const double a = model.g_inverse(1.0);
  const double b = model.g_inverse(z);
  return std::pow(z, 1.0 / model.dim()) * integral_g_pow(model, a, b, 1e-11);
}

double I_eta_M(const TailModel& model, double eta, int M) {
  require_exponent(model, "I_eta_M");
  if (!(eta > 0.0)) throw std::invalid_argument("I_eta_M: eta must be > 0");
  if (M < 1) throw std::invalid_argument("I_eta_M: M must be >= 1");
  double sum = 0.0;
  for (int t = 0; t < M; ++t)
    sum += model.g_inverse(eta / std::pow(1.0 + t, model.dim()));
  return sum;
}

double f_inv_pow_at_g_inverse(const TailModel& model, double z) {
  require_exponent(model, "f_inv_pow_at_g_inverse");
  if (!(z > 0.0)) throw std::domain_error("f_inv_pow_at_g_inverse: z must be > 0");
  return std::pow(z, -1.0 / model.dim()) * model.g_inverse(z);
}

double sandwich_delta(const TailModel& model, double eta, int M) {
  const double md = std::pow(double(M), model.dim());
  return f_inv_pow_at_g_inverse(model, eta / md) -
         f_inv_pow_at_g_inverse(model, eta);
}

RateProfile build_rate_profile(const TailModel& model, double eta_max) {
  require_exponent(model, "build_rate_profile");
  RateProfile profile{model, model.f_monotonicity(), {}, 0.0, 0.0, eta_max};
  for (double z : default_log_grid(1.0, eta_max, 4))
    profile.f_table.emplace_back(z, big_F(model, z));

  // The upper-sandwich constant must absorb both Delta and the G^inv(eta)
  // term, i.e. sup of f^{-1/d}(G^inv(eta/M^d)) over the probed domain.
  double sup_gap = 0.0, sup_delta = 0.0;
  for (double eta : default_log_grid(1.0, eta_max, 2)) {
    for (int M = 1;; M *= 2) {
      if (std::pow(double(M), model.dim()) > eta) break;
      sup_gap = std::max(sup_gap, f_inv_pow_at_g_inverse(
                                      model, eta / std::pow(double(M), model.dim())));
      sup_delta = std::max(sup_delta, sandwich_delta(model, eta, M));
    }
  }
  profile.c0 = 1.1 * sup_gap;
  profile.sup_delta = sup_delta;
  return profile;
}

SandwichCheck lll_sandwich_check(const RateProfile& profile, double eta, int M) {
  const TailModel& m = profile.model;
  if (M < 1) throw std::invalid_argument("sandwich: M must be >= 1");
  const double md = std::pow(double(M), m.dim());
  if (!(1.0 <= md && md <= eta))
    throw std::invalid_argument("sandwich: requires 1 <= M^d <= eta");

  SandwichCheck out;
  out.I = I_eta_M(m, eta, M);
  out.F_eta_M = std::pow(eta, 1.0 / m.dim()) *
                integral_g_pow(m, m.g_inverse(eta / md), m.g_inverse(eta), 1e-12);
  out.delta = sandwich_delta(m, eta, M);
  out.c0_used = profile.c0;
  const double scale = std::pow(eta, 1.0 / m.dim());
  out.lower_slack = out.I - (out.F_eta_M + scale * out.delta);
  out.upper_slack = out.F_eta_M + profile.c0 * scale - out.I;
  out.lower_ok = out.lower_slack >= -1e-9;
  out.upper_ok = out.upper_slack >= -1e-9;
  return out;
}

GammaProbe gamma_probe(const TailModel& model, std::vector<double> y_grid) {
  require_exponent(model, "gamma_probe");
  const auto fm = model.f_monotonicity();
  if (fm != FMonotonicity::kNonIncreasing && fm != FMonotonicity::kConstant)
    throw std::invalid_argument("gamma_probe: requires non-increasing f");
  if (y_grid.empty()) y_grid = default_log_grid(10.0, 1e16, 1);
  if (y_grid.size() < 4)
    throw std::invalid_argument("gamma_probe: grid too small");

  GammaProbe probe;
  const double lo = model.g_inverse(1.0);
  for (double y : y_grid) {
    if (y <= lo) continue;
    const double v = big_F(model, model.g(y)) / y;
    // Alternate printed form: f^{1/d}(y) int_{G^inv(1)}^{y} G^{-1/d}.
    const double w = std::pow(model.f(y), 1.0 / model.dim()) *
                     integral_g_pow(model, lo, y, 1e-11);
    probe.max_form_gap =
        std::max(probe.max_form_gap, std::abs(v - w) / std::max(1e-12, v));
    probe.values.emplace_back(y, v);
  }
  if (probe.values.size() < 4)
    throw std::invalid_argument("gamma_probe: grid too small after clipping");

  const std::size_t n = probe.values.size();
  probe.gamma_hat =
      std::max(probe.values[n - 1].second, probe.values[n - 2].second);

  // Divergence heuristic: strictly increasing over the last half of the
  // grid and still growing > 25% between the midpoint and the end.
  const std::size_t half = n / 2;
  bool increasing = true;
  for (std::size_t i = half + 1; i < n; ++i)
    if (probe.values[i].second <= probe.values[i - 1].second) increasing = false;
  const double growth = probe.values[n - 1].second /
                        std::max(1e-300, probe.values[half].second);
  probe.divergent = increasing && growth > 1.25;
  return probe;
}

RhoProbe rho_probe(const TailModel& model, std::vector<double> x_grid) {
  require_exponent(model, "rho_probe");
  const auto fm = model.f_monotonicity();
  if (fm != FMonotonicity::kNonIncreasing && fm != FMonotonicity::kConstant)
    throw std::invalid_argument("rho_probe: requires non-increasing f");
  if (x_grid.empty()) x_grid = default_log_grid(10.0, 1e12, 2);

  RhoProbe probe;
  const double h = 0.05;  // central difference in ln x
  for (double x : x_grid) {
    const double s = std::log(x);
    const double dlng =
        (std::log(model.g(std::exp(s + h))) - std::log(model.g(std::exp(s - h)))) /
        (2.0 * h);
    probe.values.emplace_back(x, model.dim() - dlng);
  }
  // Median over the last decade of grid points.
  const double x_max = probe.values.back().first;
  std::vector<double> last;
  for (const auto& [x, r] : probe.values)
    if (x >= x_max / 10.0) last.push_back(r);
  std::sort(last.begin(), last.end());
  probe.rho_hat = last[last.size() / 2];
  return probe;
}

double solve_eta(const TailModel& model, double T, double c) {
  require_exponent(model, "solve_eta");
  if (!(T > 0.0) || !(c > 0.0))
    throw std::invalid_argument("solve_eta: T and c must be > 0");
  const auto fm = model.f_monotonicity();
  if (fm != FMonotonicity::kNonDecreasing && fm != FMonotonicity::kConstant)
    throw std::invalid_argument("solve_eta: requires non-decreasing f");
  const double target = c * T;
  auto fn = [&](double z) { return big_F(model, z); };
  const double hi = expand_upper_bracket(fn, target, 2.0, 1e30);
  double eta = solve_increasing(fn, target, 1.0, hi, 1e-12);
  // Polish until the residual meets the contract.
  for (int i = 0; i < 4 && std::abs(big_F(model, eta) - target) > 1e-8 * target;
       ++i)
    eta = solve_increasing(fn, target, eta * 0.5, eta * 2.0, 1e-14);
  return eta;
}

std::string RegimeVerdict::curve_label() const {
  switch (regime) {
    case Regime::kComparableToTail: return "T*G(T)";
    case Regime::kTransitionalSmall: return "T*G(delta*T) upper bound";
    case Regime::kFastMaximal: return "T^(1+d)";
    case Regime::kSubMaximal: return "T*eta(T)";
    case Regime::kBoundedF: return "T^(1+d)/ln^d(T)";
  }
  return "?";
}

nlohmann::json RegimeVerdict::to_json() const {
  nlohmann::json j;
  j["regime"] = to_string(regime);
  j["rule"] = rule;
  j["curve"] = curve_label();
  j["f_monotonicity"] = to_string(f_mono);
  j["upper_bound_only"] = upper_bound_only;
  j["delta"] = delta;
  j["gamma_hat"] = gamma_hat;
  j["gamma_divergent"] = gamma_divergent;
  if (has_rho) j["rho_hat"] = rho_hat;
  j["integral_convergent"] = integral_convergent;
  j["f_bounded"] = f_bounded;
  nlohmann::json gv = nlohmann::json::array();
  for (const auto& [y, v] : gamma_values) gv.push_back({y, v});
  j["gamma_values"] = gv;
  return j;
}

RegimeVerdict classify_regime(const TailModel& model, double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("classify_regime: delta must be in (0,1)");
  RegimeVerdict v;
  v.delta = delta;

  if (model.kind() == TailKind::kDegenerate)
    throw std::domain_error("classify_regime: degenerate model unsupported");

  if (model.kind() == TailKind::kTwoPoint) {
    // Negative part bounded below: the maximal regime.
    v.regime = Regime::kFastMaximal;
    v.rule = "bounded_below";
    v.f_mono = FMonotonicity::kNonMonotone;
    v.integral_convergent = true;
    return v;
  }

  v.f_mono = model.f_monotonicity();

  if (model.g_asymptotically_constant()) {
    // Exponential negative tail: rate comparable to T*G(T) ~ T.
    v.regime = Regime::kComparableToTail;
    v.rule = "exponential_tail";
    return v;
  }
  if (v.f_mono == FMonotonicity::kNonMonotone)
    throw std::domain_error("classify_regime: f is not monotone");

  if (v.f_mono == FMonotonicity::kNonIncreasing) {
    GammaProbe gp = gamma_probe(model);
    v.gamma_hat = gp.gamma_hat;
    v.gamma_divergent = gp.divergent;
    v.gamma_values = gp.values;
    try {
      RhoProbe rp = rho_probe(model);
      v.rho_hat = rp.rho_hat;
      v.has_rho = true;
    } catch (const std::exception&) {
      v.has_rho = false;
    }
    if (gp.divergent) {
      v.regime = Regime::kTransitionalSmall;
      v.rule = "gamma_divergent";
      v.upper_bound_only = true;
    } else {
      v.regime = Regime::kComparableToTail;
      v.rule = "gamma_finite";
    }
    return v;
  }

  // f non-decreasing (or constant).
  v.integral_convergent = model.integral_convergent();
  v.f_bounded = model.f_bounded();
  if (v.integral_convergent) {
    v.regime = Regime::kFastMaximal;
    v.rule = "integral_convergent";
  } else if (v.f_bounded) {
    v.regime = Regime::kBoundedF;
    v.rule = "f_bounded";
  } else {
    v.regime = Regime::kSubMaximal;
    v.rule = "eta_solved";
  }
  return v;
}

double predicted_rate_at(const RegimeVerdict& verdict, const TailModel& model,
                         double T) {
  if (!(T > 1.0)) throw std::invalid_argument("predicted_rate_at: T must be > 1");
  const int d = model.dim();
  switch (verdict.regime) {
    case Regime::kComparableToTail:
      return T * model.g(T);
    case Regime::kTransitionalSmall:
      return T * model.g(verdict.delta * T);
    case Regime::kFastMaximal:
      return std::pow(T, 1 + d);
    case Regime::kBoundedF:
      return std::pow(T, 1 + d) / std::pow(std::log(T), d);
    case Regime::kSubMaximal:
      return T * solve_eta(model, T, 1.0);
  }
  throw std::logic_error("predicted_rate_at: unreachable");
}

std::vector<std::pair<double, double>> predicted_rate_curve(
    const RegimeVerdict& verdict, const TailModel& model,
    const std::vector<double>& T_grid) {
  std::vector<std::pair<double, double>> out;
  out.reserve(T_grid.size());
  for (double T : T_grid) out.emplace_back(T, predicted_rate_at(verdict, model, T));
  return out;
}

double chernoff_log_bound_Ec(const Distribution& dist, const ChernoffParams& p) {
  const TailModel& m = dist.model();
  if (p.T < 1 || p.M < 1)
    throw std::invalid_argument("chernoff: T and M must be >= 1");
  if (!(p.r > 0.0 && p.r < 1.0))
    throw std::invalid_argument("chernoff: r must be in (0,1)");
  if (!(p.eps > 0.0)) throw std::invalid_argument("chernoff: eps must be > 0");
  const int d = m.dim();
  const double md = std::pow(double(p.M), d);
  if (!(p.eta_tilde >= 2.0 * dist.eta0() * md))
    throw std::invalid_argument("chernoff: requires eta~ >= 2 eta0 M^d");
  const double K = 4.0 * std::pow(4.0 * d, 2 * d);
  return std::pow(2.0, d) * md * std::log(2.0) +
         p.eta_tilde * I_eta_M(m, p.eta_tilde, p.M) -
         (1.0 - p.r) * p.eps / K * double(p.T) * p.eta_tilde;
}

}  // namespace pldp
