#ifndef POLYMER_NUMERICS_HPP
#define POLYMER_NUMERICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace pldp {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// log(e^a + e^b) without leaving log space.
inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = a > b ? a : b;
  return m + std::log1p(std::exp((a > b ? b : a) - m));
}

inline double log_sum_exp(std::span<const double> xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf || std::isinf(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss rule on [-1,1]
// (QUADPACK dqk15 abscissae/weights).
inline constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
inline constexpr double kWgk[8] = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
inline constexpr double kWg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694};

struct Gk15Result {
  double value;
  double error;
};

template <typename F>
Gk15Result gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kXgk[i]);
    fv[14 - i] = f(c + h * kXgk[i]);
  }
  fv[7] = f(c);
  double resk = kWgk[7] * fv[7];
  double resg = kWg[3] * fv[7];
  for (int i = 0; i < 7; ++i) {
    resk += kWgk[i] * (fv[i] + fv[14 - i]);
    if (i % 2 == 1) resg += kWg[i / 2] * (fv[i] + fv[14 - i]);
  }
  return {resk * h, std::abs((resk - resg) * h)};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod integration: always bisect the interval
// with the largest error estimate until the summed error meets the budget.
// Intervals refined to the machine-precision floor of their own mass are
// frozen rather than split further.
template <typename F>
double integrate(const F& f, double a, double b, double rel_tol = 1e-10,
                 double abs_tol = 0.0, int max_depth = 60) {
  if (!(a <= b)) throw std::invalid_argument("integrate: bad interval");
  if (a == b) return 0.0;
  struct Seg {
    double a, b, value, error;
    int depth;
  };
  auto eval = [&](double lo, double hi, int depth) {
    auto r = detail::gk15(f, lo, hi);
    return Seg{lo, hi, r.value, r.error, depth};
  };
  auto by_error = [](const Seg& x, const Seg& y) { return x.error < y.error; };

  std::vector<Seg> heap{eval(a, b, 0)};
  double frozen_value = 0.0;
  double live_value = heap[0].value, live_error = heap[0].error;
  long splits = 0;
  while (!heap.empty()) {
    const double budget =
        std::max(abs_tol, rel_tol * std::abs(frozen_value + live_value));
    if (live_error <= std::max(budget, 1e-300)) break;
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const Seg worst = heap.back();
    heap.pop_back();
    live_value -= worst.value;
    live_error -= worst.error;
    const bool splittable =
        worst.depth < max_depth && splits < 20000 &&
        worst.error > 1e-15 * std::abs(worst.value) + 1e-300;
    if (!splittable) {
      frozen_value += worst.value;
      continue;
    }
    ++splits;
    const double m = 0.5 * (worst.a + worst.b);
    for (const Seg& child : {eval(worst.a, m, worst.depth + 1),
                             eval(m, worst.b, worst.depth + 1)}) {
      live_value += child.value;
      live_error += child.error;
      heap.push_back(child);
      std::push_heap(heap.begin(), heap.end(), by_error);
    }
  }
  double total = frozen_value;
  for (const Seg& s : heap) total += s.value;
  return total;
}

// Bisection for strictly increasing f: returns x in [lo,hi] with
// f(x) = target, assuming f(lo) <= target <= f(hi).
inline double solve_increasing(const std::function<double(double)>& f,
                               double target, double lo, double hi,
                               double rel_tol = 1e-12, int max_iter = 200) {
  double flo = f(lo), fhi = f(hi);
  if (flo > target || fhi < target)
    throw std::invalid_argument("solve_increasing: target not bracketed");
  for (int i = 0; i < max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::max(1.0, std::abs(mid))) return mid;
    if (f(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Expand hi by doubling until f(hi) >= target. f must be increasing.
inline double expand_upper_bracket(const std::function<double(double)>& f,
                                   double target, double hi0,
                                   double hi_guard = 1e300) {
  double hi = std::max(hi0, 1e-30);
  while (f(hi) < target) {
    hi *= 2.0;
    if (hi > hi_guard)
      throw std::runtime_error("expand_upper_bracket: guard exceeded");
  }
  return hi;
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Wilson score interval for a binomial proportion.
inline Interval wilson_ci(std::uint64_t k, std::uint64_t n, double z = 1.96) {
  if (n == 0) throw std::invalid_argument("wilson_ci: n = 0");
  const double p = double(k) / double(n);
  const double z2 = z * z;
  const double denom = 1.0 + z2 / double(n);
  const double center = (p + z2 / (2.0 * double(n))) / denom;
  const double half =
      z *
      std::sqrt(p * (1.0 - p) / double(n) + z2 / (4.0 * double(n) * double(n))) /
      denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace pldp

#endif
