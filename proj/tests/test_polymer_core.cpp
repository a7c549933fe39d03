#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracle.hpp"
#include "polymer/field.hpp"
#include "polymer/transfer.hpp"

using namespace pldp;

namespace {

// Constant-valued field for closed-form checks.
class ConstField final : public Field {
 public:
  ConstField(int dim, double value) : d_(dim), v_(value) {}
  int dim() const override { return d_; }
  double at(int, std::span<const Coord>) const override { return v_; }

 private:
  int d_;
  double v_;
};

std::vector<Distribution> test_distributions() {
  std::vector<Distribution> out;
  out.emplace_back(TailModel::two_point(1.0, 0.5, 1));
  out.emplace_back(TailModel::power(1.0, 1, 1.0));
  out.emplace_back(TailModel::power(0.5, 1, 1.0));
  out.emplace_back(TailModel::power(2.0, 1, 1.0));
  out.emplace_back(TailModel::log_correction(0.5, 1, 3.0));
  return out;
}

}  // namespace

TEST_CASE("single-step and zero-field partition functions") {
  GeneratedField field(Distribution{TailModel::two_point(1.0, 0.5, 1)}, 5, 0);
  std::vector<Coord> origin{0};
  CHECK(log_partition(field, 1) ==
        doctest::Approx(field.at(0, origin)).epsilon(1e-12));
  ConstField zero(1, 0.0);
  for (int T : {1, 2, 5, 9}) {
    CHECK(log_partition(zero, T) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(last_passage(zero, T) == doctest::Approx(0.0).epsilon(1e-12));
  }
  ConstField c2(2, 0.0);
  CHECK(log_partition(c2, 4) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("two-path closed form at d=1, T=2") {
  MapField f(1);
  const Coord x0[] = {0}, xm[] = {-1}, xp[] = {1};
  f.set(0, x0, 0.3);
  f.set(1, xm, -0.7);
  f.set(1, xp, 1.1);
  const double expect =
      std::log(std::exp(0.3) * (std::exp(-0.7) + std::exp(1.1)) / 2.0);
  CHECK(log_partition(f, 2) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(last_passage(f, 2) == doctest::Approx(0.3 + 1.1).epsilon(1e-13));
}

TEST_CASE("constant field gives c*T for the last-passage value") {
  for (int d : {1, 2}) {
    ConstField f(d, 0.37);
    for (int T : {1, 3, 6}) {
      CHECK(last_passage(f, T) == doctest::Approx(0.37 * T).epsilon(1e-12));
    }
  }
}

TEST_CASE("oracle equivalence: lnZ and zeta vs exhaustive enumeration, d=1") {
  int instance = 0;
  for (const auto& dist : test_distributions()) {
    for (int T = 1; T <= 8; ++T) {
      for (int rep = 0; rep < 25; ++rep) {
        GeneratedField gen(dist, 1000 + instance, static_cast<std::uint64_t>(rep));
        oracle::CachedField field(gen);
        const auto stats = oracle::enumerate_walks(field, T);
        const double lz = log_partition(field, T);
        const double zt = last_passage(field, T);
        CHECK(std::abs(lz - stats.log_z) <=
              1e-10 * std::max(1.0, std::abs(stats.log_z)));
        CHECK(std::abs(zt - stats.zeta) <=
              1e-10 * std::max(1.0, std::abs(stats.zeta)));
        // Penalized-maximum sandwich.
        CHECK(lz <= zt + 1e-10);
        CHECK(lz >= zt - T * std::log(2.0) - 1e-10);
      }
    }
    ++instance;
  }
}

TEST_CASE("oracle equivalence in d=2") {
  Distribution dist{TailModel::two_point(1.0, 0.5, 2)};
  for (int T = 1; T <= 5; ++T) {
    for (int rep = 0; rep < 5; ++rep) {
      GeneratedField gen(dist, 77, static_cast<std::uint64_t>(rep));
      oracle::CachedField field(gen);
      const auto stats = oracle::enumerate_walks(field, T);
      CHECK(log_partition(field, T) ==
            doctest::Approx(stats.log_z).epsilon(1e-10));
      CHECK(last_passage(field, T) == doctest::Approx(stats.zeta).epsilon(1e-10));
    }
  }
}

TEST_CASE("corridor restriction: inactive wide corridor, filtered narrow one") {
  Distribution dist{TailModel::two_point(1.0, 0.5, 1)};
  for (int rep = 0; rep < 20; ++rep) {
    GeneratedField gen(dist, 31, static_cast<std::uint64_t>(rep));
    oracle::CachedField field(gen);
    const int T = 3;
    CHECK(restricted_log_partition(field, T, T) ==
          doctest::Approx(log_partition(field, T)).epsilon(1e-12));
    CHECK(restricted_log_partition(field, T, 10) ==
          doctest::Approx(log_partition(field, T)).epsilon(1e-12));
    // W = 1: enumeration filtered to walks inside {-1,0,1}.
    const auto stats = oracle::enumerate_walks(
        field, T, 0, {}, [](const std::vector<Coord>& w) {
          for (Coord x : w)
            if (std::abs(x) > 1) return false;
          return true;
        });
    CHECK(restricted_log_partition(field, T, 1) ==
          doctest::Approx(stats.log_z).epsilon(1e-10));
    // Monotone in W.
    double prev = kNegInf;
    for (int W = 1; W <= 4; ++W) {
      const double v = restricted_log_partition(field, T, W);
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
  }
  GeneratedField field(dist, 31, 0);
  CHECK_THROWS_AS(restricted_log_partition(field, 3, 0), std::invalid_argument);
}

TEST_CASE("block partition: parity, L = 0, and the two-zigzag closed form") {
  Distribution dist{TailModel::two_point(1.0, 0.5, 1)};
  GeneratedField field(dist, 99, 0);
  const Coord center[] = {2};
  // Odd window or L=0 with t2 > t1: no admissible walk.
  CHECK(block_log_partition(field, 2, 5, 3, center) == kNegInf);
  CHECK(block_log_partition(field, 2, 4, 0, center) == kNegInf);
  CHECK(block_log_partition(field, 3, 3, 2, center) == 0.0);

  // L=1, t2-t1=2: exactly the walks x -> x+-1 -> x.
  const Coord up[] = {3}, down[] = {1};
  const double expect =
      std::log((std::exp(field.at(2, center) + field.at(3, up)) +
                std::exp(field.at(2, center) + field.at(3, down))) /
               4.0);
  CHECK(block_log_partition(field, 2, 4, 1, center) ==
        doctest::Approx(expect).epsilon(1e-12));

  // Value dominated by the corridor-restricted partition centered there.
  for (int rep = 0; rep < 10; ++rep) {
    GeneratedField f(dist, 123, static_cast<std::uint64_t>(rep));
    const Coord origin[] = {0};
    const double blocked = block_log_partition(f, 0, 4, 2, origin);
    const double corridor = restricted_log_partition(f, 4, 2);
    CHECK(blocked <= corridor + 1e-12);
  }
}

TEST_CASE("block partition against filtered enumeration") {
  Distribution dist{TailModel::power(1.0, 1, 1.0)};
  for (int rep = 0; rep < 10; ++rep) {
    GeneratedField gen(dist, 7, static_cast<std::uint64_t>(rep));
    oracle::CachedField field(gen);
    const int t1 = 1, t2 = 5, L = 2;
    const Coord center[] = {1};
    const auto stats = oracle::enumerate_walks(
        field, t2 - t1, t1, center, [&](const std::vector<Coord>& w) {
          const std::size_t last = w.size() - 1;
          if (w[last] != center[0]) return false;
          for (Coord x : w)
            if (std::abs(x - center[0]) > L) return false;
          return true;
        });
    CHECK(block_log_partition(field, t1, t2, L, center) ==
          doctest::Approx(stats.log_z).epsilon(1e-10));
  }
}

TEST_CASE("epsilon-good flag thresholds") {
  ConstField zero(1, 0.0);
  const Coord origin[] = {0};
  // Zero field: block value is ln P(pinned corridor walk), strictly negative.
  const double v = block_log_partition(zero, 0, 4, 2, origin);
  CHECK(v < 0.0);
  CHECK(is_epsilon_good(zero, 0, 4, 2, origin, 0.0, -v / 4 + 0.01));
  CHECK_FALSE(is_epsilon_good(zero, 0, 4, 2, origin, 0.0, -v / 4 - 0.01));
}

TEST_CASE("path energy sums the field along the walk") {
  ConstField zero(1, 0.0);
  LatticePath path{1, 0, {0, 1, 0, -1}};
  CHECK(path_energy(zero, path, 0, 3) == 0.0);

  MapField f(1);
  const Coord a[] = {0}, b[] = {1}, c[] = {0};
  f.set(0, a, 0.5);
  f.set(1, b, -1.5);
  f.set(2, c, 2.0);
  CHECK(path_energy(f, path, 0, 3) == doctest::Approx(1.0));
  // Single step: matches the T=1 partition function.
  CHECK(path_energy(f, path, 0, 1) == doctest::Approx(log_partition(f, 1)));
}

TEST_CASE("missing sites raise errors") {
  MapField f(1);
  const Coord origin[] = {0};
  f.set(0, origin, 1.0);
  CHECK_THROWS_AS(log_partition(f, 2), std::out_of_range);
}

TEST_CASE("field slabs regenerate bitwise and differ across sites") {
  Distribution dist{TailModel::power(1.0, 1, 1.0)};
  GeneratedField f1(dist, 42, 9), f2(dist, 42, 9), f3(dist, 42, 10);
  const Coord a[] = {1}, b[] = {-1};
  CHECK(f1.at(3, a) == f2.at(3, a));
  CHECK(f1.at(3, a) != f3.at(3, a));
  CHECK(f1.at(3, a) != f1.at(3, b));
  CHECK(f1.at(3, a) != f1.at(4, a));
}

TEST_CASE("field dump/load round trip preserves the transfer matrix") {
  Distribution dist{TailModel::two_point(1.0, 0.5, 1)};
  GeneratedField field(dist, 2024, 0);
  const int T = 6;
  std::ostringstream os;
  dump_field(os, field, T, 2024, 0);
  std::istringstream is(os.str());
  MapField loaded = load_field(is);
  CHECK(log_partition(loaded, T) ==
        doctest::Approx(log_partition(field, T)).epsilon(1e-15));
  CHECK(last_passage(loaded, T) ==
        doctest::Approx(last_passage(field, T)).epsilon(1e-15));
}

TEST_CASE("free energy estimate: degenerate field, sign, CLT scaling") {
  Distribution zero = Distribution::zero_field(1);
  const auto fe0 = free_energy_estimate(zero, 6, 10, 1);
  CHECK(fe0.lambda_hat == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fe0.std_error == doctest::Approx(0.0).epsilon(1e-12));

  Distribution tp{TailModel::two_point(1.0, 0.5, 1)};
  const auto fe = free_energy_estimate(tp, 16, 400, 3);
  CHECK(fe.lambda_hat >= -3.0 * fe.std_error);  // lambda >= 0 for mean-zero V

  const auto small = free_energy_estimate(tp, 8, 100, 5);
  const auto large = free_energy_estimate(tp, 8, 10000, 5);
  const double ratio = small.std_error / large.std_error;
  CHECK(ratio >= 5.0);
  CHECK(ratio <= 20.0);

  CHECK_THROWS_AS(free_energy_estimate(tp, 8, 1, 0), std::invalid_argument);
}

TEST_CASE("threaded free energy matches serial bitwise") {
  Distribution tp{TailModel::two_point(1.0, 0.5, 1)};
  const auto serial = free_energy_estimate(tp, 10, 64, 11, 1);
  const auto parallel = free_energy_estimate(tp, 10, 64, 11, 4);
  CHECK(serial.lambda_hat == parallel.lambda_hat);
  CHECK(serial.std_error == parallel.std_error);
}

TEST_CASE("log-sum-exp slices stay finite on wild but finite fields") {
  // Property fuzz: huge magnitudes must not produce NaN/inf.
  for (int rep = 0; rep < 50; ++rep) {
    MapField f(1);
    SiteRng rng(555, static_cast<std::uint64_t>(rep));
    const int T = 6;
    for (int t = 0; t < T; ++t) {
      const auto pts = cone_slice_points(1, t);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const Coord x[] = {pts[i]};
        const double u = rng.uniform(static_cast<std::uint64_t>(t), i);
        f.set(t, x, (u - 0.5) * 2000.0);
      }
    }
    const double lz = log_partition(f, T);
    const double zt = last_passage(f, T);
    CHECK(std::isfinite(lz));
    CHECK(std::isfinite(zt));
    CHECK(lz <= zt + 1e-9);
    CHECK(lz >= zt - T * std::log(2.0) - 1e-9);
  }
}
