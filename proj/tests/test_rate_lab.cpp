#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "polymer/rate_lab.hpp"

using namespace pldp;

namespace {

std::vector<std::pair<double, double>> table_of(double lo, double hi, int n,
                                                const std::function<double(double)>& g) {
  std::vector<std::pair<double, double>> tb;
  for (int i = 0; i <= n; ++i) {
    const double x = lo * std::pow(hi / lo, double(i) / n);
    tb.emplace_back(x, g(x));
  }
  return tb;
}

}  // namespace

TEST_CASE("big_F closed forms") {
  const auto gx = TailModel::linear(1.0, 1, 1.0);  // G(x) = x, d = 1
  for (double z = 2.0; z <= 1e6; z *= 4.0) {
    const double expect = z * std::log(z);
    CHECK(std::abs(big_F(gx, z) - expect) <= 1e-8 * expect);
  }
  const auto gx2 = TailModel::power(2.0, 1, 1.0);  // G(x) = x^2, d = 1
  for (double z = 2.0; z <= 1e6; z *= 10.0) {
    const double expect = z - std::sqrt(z);
    CHECK(std::abs(big_F(gx2, z) - expect) <= 1e-8 * expect);
  }
  CHECK(big_F(gx, 1.0) == 0.0);
  CHECK_THROWS_AS(big_F(gx, 0.5), std::domain_error);
}

TEST_CASE("I_eta_M direct sums") {
  const auto gx = TailModel::linear(1.0, 1, 1.0);
  CHECK(I_eta_M(gx, 5.0, 1) == doctest::Approx(5.0));
  CHECK(I_eta_M(gx, 4.0, 2) == doctest::Approx(6.0));
  const auto gx2 = TailModel::power(2.0, 1, 1.0);
  CHECK(I_eta_M(gx2, 9.0, 3) ==
        doctest::Approx(3.0 + 3.0 / std::sqrt(2.0) + std::sqrt(3.0)).epsilon(1e-12));
  CHECK_THROWS_AS(I_eta_M(gx, -1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(I_eta_M(gx, 1.0, 0), std::invalid_argument);
}

TEST_CASE("sandwich: closed-form spot check at G=x, d=1, eta=16, M=2") {
  const auto model = TailModel::linear(1.0, 1, 1.0);
  const auto profile = build_rate_profile(model);
  const auto check = lll_sandwich_check(profile, 16.0, 2);
  CHECK(check.I == doctest::Approx(24.0).epsilon(1e-12));
  CHECK(check.F_eta_M == doctest::Approx(16.0 * std::log(2.0)).epsilon(1e-10));
  CHECK(check.delta == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(check.lower_ok);
  CHECK(check.upper_ok);
}

TEST_CASE("sandwich: Delta <= 0 for non-increasing f, boundary M^d = eta") {
  const auto root = TailModel::power(0.5, 1, 1.0);
  const auto profile = build_rate_profile(root);
  for (double eta : {4.0, 64.0, 4096.0}) {
    for (int M = 1; M * M <= eta; M *= 2) {
      if (M > eta) break;
      const auto check = lll_sandwich_check(profile, eta, M);
      CHECK(check.delta <= 1e-12);
      CHECK(check.lower_ok);
      CHECK(check.upper_ok);
    }
  }
  // Boundary of the stated domain.
  const auto b = lll_sandwich_check(profile, 1.0, 1);
  CHECK(b.lower_ok);
  CHECK_THROWS_AS(lll_sandwich_check(profile, 1.5, 2), std::invalid_argument);
}

TEST_CASE("sandwich grid across kinds and dimensions") {
  std::vector<TailModel> models = {
      TailModel::power(0.5, 1, 1.0), TailModel::linear(1.0, 1, 1.0),
      TailModel::power(2.0, 1, 1.0), TailModel::power(0.5, 2, 1.0),
      TailModel::linear(1.0, 2, 1.0), TailModel::power(2.0, 2, 1.0)};
  for (const auto& m : models) {
    const auto profile = build_rate_profile(m, 1e4);
    for (double eta = 1.0; eta <= 1e4; eta *= 10.0) {
      for (int M = 1; std::pow(double(M), m.dim()) <= eta; M *= 2) {
        const auto check = lll_sandwich_check(profile, eta, M);
        CHECK(check.lower_ok);
        CHECK(check.upper_ok);
      }
    }
  }
}

TEST_CASE("the identity eta^{1/d} Delta = M G^inv(eta/M^d) - G^inv(eta)") {
  for (const auto& m : {TailModel::power(0.5, 1, 1.0), TailModel::power(2.0, 2, 1.0)}) {
    for (double eta : {8.0, 100.0, 1e5}) {
      for (int M : {1, 2, 3}) {
        const double md = std::pow(double(M), m.dim());
        if (md > eta) continue;
        const double lhs = std::pow(eta, 1.0 / m.dim()) * sandwich_delta(m, eta, M);
        const double rhs = M * m.g_inverse(eta / md) - m.g_inverse(eta);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("gamma probe: finite limits, boundary divergence, form agreement") {
  // G = x^{1/2}, d=1: limit d/(d-alpha) = 2.
  const auto root = gamma_probe(TailModel::power(0.5, 1, 1.0));
  CHECK_FALSE(root.divergent);
  CHECK(root.gamma_hat == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(root.max_form_gap <= 1e-6);

  // Gaussian-like in d=2: finite (the verdict is what matters downstream).
  const auto gauss2 = gamma_probe(TailModel::linear(1.0, 2, 1.0));
  CHECK_FALSE(gauss2.divergent);
  CHECK(gauss2.max_form_gap <= 1e-6);

  // Constant-f boundary G = x^d: probe grows like ln y.
  const auto boundary = gamma_probe(TailModel::power(1.0, 1, 1.0));
  CHECK(boundary.divergent);

  // The transitional example kind diverges slowly but detectably.
  const auto trans = gamma_probe(TailModel::log_correction(0.5, 1, 3.0));
  CHECK(trans.divergent);

  CHECK_THROWS_AS(gamma_probe(TailModel::power(3.0, 1, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("rho probe: exact power-law value, transitional decay, constant f") {
  const auto p34 = rho_probe(TailModel::power(0.25, 1, 1.0));
  CHECK(std::abs(p34.rho_hat - 0.75) <= 1e-6);
  const auto p12 = rho_probe(TailModel::power(0.5, 1, 1.0));
  CHECK(std::abs(p12.rho_hat - 0.5) <= 1e-6);
  const auto gauss2 = rho_probe(TailModel::linear(1.0, 2, 1.0));
  CHECK(std::abs(gauss2.rho_hat - 1.0) <= 1e-6);

  const auto trans = rho_probe(TailModel::log_correction(0.5, 1, 3.0));
  CHECK(trans.rho_hat < 0.15);  // beta (ln x)^{beta-1} at the grid end
  // and decaying along the grid:
  CHECK(trans.values.back().second < trans.values.front().second);

  const auto constant = rho_probe(TailModel::linear(1.0, 1, 1.0));
  CHECK(std::abs(constant.rho_hat) <= 1e-9);

  CHECK_THROWS_AS(rho_probe(TailModel::power(3.0, 1, 1.0)), std::invalid_argument);
}

TEST_CASE("solve_eta: quadratic closed form, residuals, monotone growth") {
  const auto gx2 = TailModel::power(2.0, 1, 1.0);
  for (double T : {5.0, 10.0, 100.0, 1e4}) {
    const double s = (1.0 + std::sqrt(1.0 + 4.0 * T)) / 2.0;
    CHECK(solve_eta(gx2, T) == doctest::Approx(s * s).epsilon(1e-7));
  }
  const auto gx = TailModel::linear(1.0, 1, 1.0);
  double prev = 0.0;
  for (double T : {2.0, 4.0, 8.0, 64.0, 512.0}) {
    const double eta = solve_eta(gx, T);
    CHECK(std::abs(big_F(gx, eta) - T) <= 1e-8 * T);
    CHECK(eta > prev);
    prev = eta;
  }
  // Convergent-integral kind: eta(T)/T^d bounded above and below.
  const auto gx3 = TailModel::power(3.0, 1, 1.0);
  for (double T : {8.0, 64.0, 512.0, 4096.0}) {
    const double ratio = solve_eta(gx3, T) / T;
    CHECK(ratio >= 1.0);
    CHECK(ratio <= 4.0);
  }
  CHECK_THROWS_AS(solve_eta(TailModel::power(0.5, 1, 1.0), 10.0),
                  std::invalid_argument);
}

TEST_CASE("classifier reproduces the named verdicts") {
  // Gaussian-like d=1: T^2 / ln T.
  auto v = classify_regime(TailModel::linear(1.0, 1, 1.0));
  CHECK(v.regime == Regime::kBoundedF);
  CHECK(v.rule == "f_bounded");
  // Gaussian-like d=2: T^2 via finite gamma.
  v = classify_regime(TailModel::linear(1.0, 2, 1.0));
  CHECK(v.regime == Regime::kComparableToTail);
  CHECK(v.rule == "gamma_finite");
  // Power tails alpha < d: comparable to the tail.
  for (double alpha : {0.25, 0.5}) {
    v = classify_regime(TailModel::power(alpha, 1, 1.0));
    CHECK(v.regime == Regime::kComparableToTail);
  }
  // Convergent integral: maximal speed.
  v = classify_regime(TailModel::power(3.0, 1, 1.0));
  CHECK(v.regime == Regime::kFastMaximal);
  CHECK(v.integral_convergent);
  // Transitional example kind.
  v = classify_regime(TailModel::log_correction(0.5, 1, 3.0));
  CHECK(v.regime == Regime::kTransitionalSmall);
  CHECK(v.upper_bound_only);
  // Exponential-tail escape hatch.
  v = classify_regime(TailModel::power(0.0, 1, 1.0));
  CHECK(v.regime == Regime::kComparableToTail);
  CHECK(v.rule == "exponential_tail");
  // Bounded-below field.
  v = classify_regime(TailModel::two_point(1.0, 0.5, 1));
  CHECK(v.regime == Regime::kFastMaximal);
  CHECK(v.rule == "bounded_below");
  // Sub-maximal: G = x ln x (tabulated), d = 1.
  const auto submax = TailModel::custom(
      table_of(3.0, 1e8, 300, [](double x) { return x * std::log(x); }), 1, 3.0);
  v = classify_regime(submax);
  CHECK(v.regime == Regime::kSubMaximal);
  CHECK(v.rule == "eta_solved");
  // Degenerate kind is unsupported.
  CHECK_THROWS_AS(classify_regime(TailModel::degenerate(1)), std::domain_error);
}

TEST_CASE("predicted rate curves per regime") {
  const auto gauss1 = TailModel::linear(1.0, 1, 1.0);
  const auto v1 = classify_regime(gauss1);
  CHECK(predicted_rate_at(v1, gauss1, 100.0) ==
        doctest::Approx(100.0 * 100.0 / std::log(100.0)));

  const auto root = TailModel::power(0.5, 1, 1.0);
  const auto v2 = classify_regime(root);
  CHECK(predicted_rate_at(v2, root, 64.0) ==
        doctest::Approx(std::pow(64.0, 1.5)));

  const auto cube = TailModel::power(3.0, 1, 1.0);
  const auto v3 = classify_regime(cube);
  CHECK(predicted_rate_at(v3, cube, 10.0) == doctest::Approx(100.0));

  const auto trans = TailModel::log_correction(0.5, 1, 3.0);
  const auto v4 = classify_regime(trans, 0.5);
  CHECK(predicted_rate_at(v4, trans, 40.0) ==
        doctest::Approx(40.0 * trans.g(20.0)));

  const auto curve = predicted_rate_curve(v2, root, {4.0, 8.0, 16.0});
  REQUIRE(curve.size() == 3);
  CHECK(curve[1].second == doctest::Approx(std::pow(8.0, 1.5)));
}

TEST_CASE("verdict JSON carries the probe data") {
  const auto v = classify_regime(TailModel::power(0.5, 1, 1.0));
  const auto j = v.to_json();
  CHECK(j.at("regime") == "comparable_to_tail");
  CHECK(j.at("rule") == "gamma_finite");
  CHECK(j.contains("gamma_hat"));
  CHECK(j.at("gamma_values").size() > 4);
  CHECK(j.contains("curve"));
}

TEST_CASE("chernoff bound: recomposition, monotonicity, preconditions") {
  Distribution dist{TailModel::linear(1.0, 1, 1.0)};
  const double eta0 = dist.eta0();
  for (int M : {1, 2, 4}) {
    const double eta_tilde = 2.0 * eta0 * M * 1.01;
    for (double eps : {0.5, 1.0}) {
      ChernoffParams p{10, M, eta_tilde, eps, 0.5};
      const double bound = chernoff_log_bound_Ec(dist, p);
      // Recomposed from the pieces.
      const double K = 4.0 * std::pow(4.0, 2.0);
      double I = 0.0;
      for (int t = 0; t < M; ++t)
        I += dist.model().g_inverse(eta_tilde / (1.0 + t));
      const double manual = 2.0 * M * std::log(2.0) + eta_tilde * I -
                            (1.0 - 0.5) * eps / K * 10.0 * eta_tilde;
      CHECK(bound == doctest::Approx(manual).epsilon(1e-12));
    }
    // Non-increasing in eps.
    ChernoffParams lo{10, M, eta_tilde, 0.2, 0.5};
    ChernoffParams hi{10, M, eta_tilde, 1.2, 0.5};
    CHECK(chernoff_log_bound_Ec(dist, hi) <= chernoff_log_bound_Ec(dist, lo));
  }
  CHECK_THROWS_AS(
      chernoff_log_bound_Ec(dist, ChernoffParams{10, 2, eta0 * 0.5, 0.5, 0.5}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      chernoff_log_bound_Ec(dist, ChernoffParams{10, 2, 100.0, 0.5, 1.5}),
      std::invalid_argument);
}
