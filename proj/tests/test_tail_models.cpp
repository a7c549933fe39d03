#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "polymer/numerics.hpp"
#include "polymer/tail_model.hpp"

using namespace pldp;

namespace {

std::vector<std::pair<double, double>> power_table(double p, double lo,
                                                   double hi, int n) {
  std::vector<std::pair<double, double>> tb;
  for (int i = 0; i <= n; ++i) {
    const double x = lo * std::pow(hi / lo, double(i) / n);
    tb.emplace_back(x, std::pow(x, p));
  }
  return tb;
}

}  // namespace

TEST_CASE("g_eval closed forms") {
  CHECK(TailModel::power(1.0, 1, 1.0).g(4.0) == doctest::Approx(4.0));
  CHECK(TailModel::power(2.0, 1, 1.0).g(3.0) == doctest::Approx(9.0));
  // x = e^4, beta = 1/2, d = 1: x e^{-sqrt(ln x)} = e^4 e^{-2} = e^2.
  const auto lc = TailModel::log_correction(0.5, 1, 3.0);
  CHECK(lc.g(std::exp(4.0)) == doctest::Approx(std::exp(2.0)).epsilon(1e-12));
  CHECK(TailModel::linear(2.5, 1, 1.0).g(3.0) == doctest::Approx(7.5));
  CHECK_THROWS_AS(TailModel::power(1.0, 1, 1.0).g(0.0), std::domain_error);
  CHECK_THROWS_AS(TailModel::power(1.0, 1, 1.0).g(-2.0), std::domain_error);
  CHECK_THROWS_AS(TailModel::two_point(1.0, 0.5, 1).g(1.0), std::domain_error);
}

TEST_CASE("g_inverse closed forms and generalized two-point inverse") {
  CHECK(TailModel::power(1.0, 1, 1.0).g_inverse(7.0) == doctest::Approx(7.0));
  CHECK(TailModel::power(0.5, 1, 1.0).g_inverse(3.0) == doctest::Approx(9.0));
  CHECK(TailModel::power(2.0, 1, 1.0).g_inverse(0.0) == 0.0);
  CHECK(TailModel::two_point(2.0, 0.25, 1).g_inverse(5.0) == 2.0);
  CHECK(TailModel::two_point(2.0, 0.25, 1).g_inverse(0.0) == 0.0);
}

TEST_CASE("round trip G(G^inv(z)) = z on a log grid") {
  std::vector<TailModel> models = {
      TailModel::power(0.5, 1, 1.0),
      TailModel::power(2.0, 1, 1.0),
      TailModel::linear(1.0, 2, 1.0),
      TailModel::log_correction(0.5, 1, 3.0),
      TailModel::custom(power_table(1.5, 1e-3, 1e7, 400), 1, 1.0),
  };
  for (const auto& m : models) {
    for (double z = 1e-2; z <= 1e6; z *= 10.0) {
      const double x = m.g_inverse(z);
      CHECK(std::abs(m.g(x) - z) <= 1e-10 * std::max(1.0, z));
    }
  }
}

TEST_CASE("g and g_inverse are strictly increasing") {
  std::vector<TailModel> models = {
      TailModel::power(0.5, 1, 1.0),
      TailModel::log_correction(0.5, 1, 3.0),
      TailModel::custom(power_table(1.5, 1e-3, 1e7, 400), 1, 1.0),
  };
  for (const auto& m : models) {
    double prev_g = 0.0, prev_inv = 0.0;
    for (double x = 0.1; x <= 1e5; x *= 1.7) {
      const double gx = m.g(x);
      CHECK(gx > prev_g);
      prev_g = gx;
      const double ix = m.g_inverse(x);
      CHECK(ix > prev_inv);
      prev_inv = ix;
    }
  }
}

TEST_CASE("f monotonicity matches the declared kind") {
  CHECK(TailModel::power(0.5, 1, 1.0).f_monotonicity() ==
        FMonotonicity::kNonIncreasing);
  CHECK(TailModel::power(3.0, 1, 1.0).f_monotonicity() ==
        FMonotonicity::kNonDecreasing);
  CHECK(TailModel::power(1.0, 1, 1.0).f_monotonicity() == FMonotonicity::kConstant);
  CHECK(TailModel::linear(1.0, 2, 1.0).f_monotonicity() ==
        FMonotonicity::kNonIncreasing);
  CHECK(TailModel::log_correction(0.5, 1, 3.0).f_monotonicity() ==
        FMonotonicity::kNonIncreasing);

  // Numerically: f moves in the declared direction.
  for (const auto& m :
       {TailModel::power(0.5, 1, 1.0), TailModel::power(3.0, 1, 1.0)}) {
    double prev = m.f(1.0);
    bool inc = true, dec = true;
    for (double x = 1.5; x < 1e4; x *= 1.5) {
      const double fx = m.f(x);
      inc = inc && fx >= prev * (1 - 1e-12);
      dec = dec && fx <= prev * (1 + 1e-12);
      prev = fx;
    }
    if (m.f_monotonicity() == FMonotonicity::kNonIncreasing) CHECK(dec);
    if (m.f_monotonicity() == FMonotonicity::kNonDecreasing) CHECK(inc);
  }
}

TEST_CASE("tail probabilities are exact") {
  Distribution d{TailModel::power(1.0, 1, 1.0)};
  CHECK(d.tail_prob(2.0) == doctest::Approx(std::exp(-4.0)).epsilon(1e-14));
  // Below x_bar the whole negative mass sits in the tail.
  CHECK(d.tail_prob(0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(d.tail_prob(0.5) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  for (double x = 1.0; x <= 30.0; x += 0.7)
    CHECK(d.tail_prob(x) == std::exp(-x * d.model().g(x)));

  Distribution tp{TailModel::two_point(1.0, 0.5, 1)};
  CHECK(tp.tail_prob(0.5) == 0.5);
  CHECK(tp.tail_prob(1.0) == 0.0);
  CHECK(tp.tail_prob_at_least(1.0) == 0.5);
}

TEST_CASE("constructed distributions are mean zero (independent recomputation)") {
  std::vector<TailModel> models = {
      TailModel::power(1.0, 1, 1.0),
      TailModel::power(0.5, 1, 1.0),
      TailModel::power(2.0, 1, 0.5),
      TailModel::linear(1.0, 2, 1.0),
      TailModel::log_correction(0.5, 1, 3.0),
      TailModel::custom(power_table(1.5, 1e-3, 1e7, 400), 1, 1.0),
  };
  for (const auto& m : models) {
    Distribution dist{m};
    const double S = dist.tail_mass();
    CHECK(S ==
          doctest::Approx(std::exp(-m.x_bar() * m.g(m.x_bar()))).epsilon(1e-14));
    // Independent route to the negative-part mean.
    const double xb = m.x_bar();
    double hi = xb + 1.0;
    while (hi * m.g(hi) < 200.0) hi *= 2.0;
    const double tail_int =
        integrate([&](double x) { return std::exp(-x * m.g(x)); }, xb, hi, 1e-13);
    const double neg_mean_indep = xb * S + tail_int;
    const double mean = (1.0 - S) * dist.v0() - neg_mean_indep;
    CHECK(std::abs(mean) <= 1e-10);
  }

  Distribution tp{TailModel::two_point(1.0, 0.25, 1)};
  CHECK(0.75 * tp.v0() - 0.25 * 1.0 == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(tp.v0() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("cover constant: tail_prob(t) >= q e^{-t G(t)} out to 10 x_bar") {
  for (const auto& m :
       {TailModel::power(1.0, 1, 1.0), TailModel::power(0.5, 1, 2.0),
        TailModel::log_correction(0.5, 1, 3.0)}) {
    Distribution dist{m};
    const double q = dist.q();
    CHECK(q > 0.0);
    CHECK(q <= 1.0);
    for (int i = 0; i <= 500; ++i) {
      const double t = 10.0 * m.x_bar() * i / 500.0;
      const double lower = q * std::exp(-t * (t == 0.0 ? 0.0 : m.g(t)));
      CHECK(dist.tail_prob(t) >= lower - 1e-15);
    }
    // For this construction q is exactly the tail mass.
    CHECK(q == doctest::Approx(dist.tail_mass()).epsilon(1e-6));
  }
}

TEST_CASE("sampling: determinism, mean band, tail frequency") {
  Distribution tp{TailModel::two_point(1.0, 0.5, 1)};
  const int n = 1000000;
  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += tp.sample(7, 0, static_cast<std::uint64_t>(i));
  mean /= n;
  CHECK(std::abs(mean) <= 3e-3);

  // Fixed seed: bitwise identical sequences.
  Distribution pw{TailModel::power(1.0, 1, 1.0)};
  for (int i = 0; i < 100; ++i)
    CHECK(pw.sample(42, 3, static_cast<std::uint64_t>(i)) ==
          pw.sample(42, 3, static_cast<std::uint64_t>(i)));

  // Empirical frequency of {-V > 2} within 3 sigma of e^{-4}.
  const int m = 300000;
  const double p = std::exp(-4.0);
  int hits = 0;
  for (int i = 0; i < m; ++i)
    if (-pw.sample(11, 1, static_cast<std::uint64_t>(i)) > 2.0) ++hits;
  const double sigma = std::sqrt(p * (1 - p) / m);
  CHECK(std::abs(double(hits) / m - p) <= 3.0 * sigma);
}

TEST_CASE("conditional tail sampling stays above the threshold") {
  Distribution pw{TailModel::power(2.0, 1, 1.0)};
  for (double theta : {0.5, 1.0, 2.5}) {
    for (double u : {1e-6, 0.1, 0.5, 0.9, 1.0 - 1e-12}) {
      const double x = pw.neg_value_from_uniform_conditional(theta, u);
      CHECK(x >= std::max(theta, pw.model().x_bar()) - 1e-12);
    }
  }
  Distribution tp{TailModel::two_point(1.5, 0.3, 1)};
  CHECK(tp.neg_value_from_uniform_conditional(1.0, 0.5) == 1.5);
  CHECK_THROWS_AS(tp.neg_value_from_uniform_conditional(2.0, 0.5),
                  std::domain_error);
}

TEST_CASE("mgf bound: two-point closed form and the swept power model") {
  Distribution tp{TailModel::two_point(1.0, 0.5, 1)};
  for (double ep : {0.5, 1.0, 3.0}) {
    // mgf of V in {-1,+1} w.p. 1/2 each: cosh(eta').
    CHECK(tp.log_mgf(ep) ==
          doctest::Approx(std::log(std::cosh(ep))).epsilon(1e-12));
  }
  Distribution pw{TailModel::power(1.0, 1, 1.0)};
  const double eta0 = pw.eta0();
  CHECK(eta0 > 0.0);
  for (int i = 0; i <= 20; ++i) {
    const double ep = eta0 * (1.0 + 9.0 * i / 20.0) * (1 + 1e-9);
    const auto check = pw.mgf_upper_bound_check(ep);
    CHECK(check.holds);
    CHECK(check.log_mgf <= check.log_bound);
  }
  CHECK_THROWS_AS(pw.mgf_upper_bound_check(eta0 / 2.0), std::invalid_argument);
}

TEST_CASE("mgf quadrature agrees with a direct reference evaluation") {
  Distribution pw{TailModel::power(1.0, 1, 1.0)};
  for (double ep : {0.5, 1.0, 2.0}) {
    const double S = pw.tail_mass();
    double hi = 2.0;
    while (hi * pw.model().g(hi) - ep * hi < 200.0) hi *= 2.0;
    const double tail = integrate(
        [&](double x) { return std::exp(ep * x - x * pw.model().g(x)); }, 1.0,
        hi, 1e-13);
    const double direct =
        (1.0 - S) * std::exp(-ep * pw.v0()) + std::exp(ep) * S + ep * tail;
    CHECK(pw.log_mgf(ep) == doctest::Approx(std::log(direct)).epsilon(1e-9));
  }
}

TEST_CASE("zero-field distribution is the degenerate test model") {
  Distribution z = Distribution::zero_field(1);
  CHECK(z.degenerate());
  CHECK(z.sample(1, 2, 3) == 0.0);
  CHECK(z.tail_prob(0.5) == 0.0);
}

TEST_CASE("model JSON round trip and unknown-key rejection") {
  const auto m = TailModel::log_correction(0.5, 2, 3.0);
  const auto j = m.to_json();
  const auto back = TailModel::from_json(j);
  CHECK(back.kind() == m.kind());
  CHECK(back.beta() == m.beta());
  CHECK(back.dim() == m.dim());
  CHECK(back.to_json() == j);
  CHECK(m.hash() == back.hash());

  auto bad = j;
  bad["typo_key"] = 1;
  CHECK_THROWS_AS(TailModel::from_json(bad), std::invalid_argument);

  const auto tp = TailModel::from_json(
      nlohmann::json{{"kind", "two_point"}, {"a", 1.0}, {"p", 0.5}, {"dim", 1}});
  CHECK(tp.kind() == TailKind::kTwoPoint);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(TailModel::power(-1.0, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(TailModel::power(1.0, 1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(TailModel::two_point(1.0, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(TailModel::log_correction(1.0, 1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(
      TailModel::custom({{1.0, 1.0}, {2.0, 1.0}}, 1, 1.0),  // not increasing
      std::invalid_argument);
  // Constant G cannot back a constructed distribution (no AS3 exponent).
  CHECK_THROWS_AS(Distribution{TailModel::power(0.0, 1, 1.0)},
                  std::invalid_argument);
}
