#ifndef POLYMER_RARE_EVENT_HPP
#define POLYMER_RARE_EVENT_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "polymer/numerics.hpp"
#include "polymer/tail_model.hpp"

namespace pldp {

struct LowerTailQuery {
  Distribution dist;
  int T = 1;
  double a = 0.0;  // threshold slope: the event is {ln Z(T) <= a T}
  int n = 100;     // sample budget
  std::uint64_t seed = 0;
  double lambda_hat = 0.0;  // estimate the threshold was derived from
};

// Exact Q(ln Z(T) <= a T) for a two-point field by enumerating every
// configuration on the cone sites t < T. Guarded to 24 sites.
double exact_lower_tail(const Distribution& dist, int T, double a);
double exact_upper_tail(const Distribution& dist, int T, double b);
struct ExactTailPair {
  double p_lower = 0.0;
  double p_upper = 0.0;
};
// Both tails from a single enumeration pass.
ExactTailPair exact_tail_pair(const Distribution& dist, int T, double a,
                              double b);

struct McEstimate {
  double p_hat = 0.0;
  Interval ci;
  std::uint64_t successes = 0;
  std::uint64_t n = 0;
};
McEstimate naive_mc_lower_tail(const LowerTailQuery& query, int threads = 1);

struct ConeBound {
  double log_q_a = 0.0;     // exact ln Q(A) over the conditioned cone
  double cond_p_hat = 0.0;  // MC estimate of Q(lower tail | A)
  Interval cond_ci;
  double log_bound = 0.0;  // ln Q(A) + ln cond_p_hat; a lower bound on ln Q
  std::vector<double> thresholds;
  std::uint64_t n = 0;
};
// Cone-conditioned estimator: forces -V(t,x) >= G^inv(eta/(1+t)^d) on the
// cone slices t < M (event A, with exactly computable probability) and
// measures the lower-tail indicator under the conditional law.
ConeBound cone_conditioned_lower_bound(const LowerTailQuery& query, int M,
                                       double eta, int threads = 1);

// Empirical frequency that the space-time block B_{0,L,W}(0) is eps-good.
McEstimate block_goodness_frequency(const Distribution& dist, int L, int W,
                                    double eps, double lambda_hat, int n,
                                    std::uint64_t seed, int threads = 1);

struct RateFit {
  struct Row {
    double T = 0.0;
    double p_hat = 0.0;
    Interval ci;
    double neg_log_p = 0.0;
  };
  struct CurveFit {
    std::string name;
    std::vector<double> ratios;  // (-ln p) / curve(T), per usable row
    double spread = 0.0;         // max ratio / min ratio
    bool consistent = false;     // spread <= 4
  };
  std::vector<Row> rows;
  std::vector<CurveFit> curves;
  double lambda_hat = 0.0;
};

// MC estimate of the upper-tail rate -ln Q(ln Z >= (lambda+eps)T)/T across
// a horizon grid. lambda_hat NaN means: estimate it here first.
RateFit upper_tail_rate_probe(const Distribution& dist,
                              const std::vector<int>& T_grid, double eps, int n,
                              std::uint64_t seed,
                              double lambda_hat = std::numeric_limits<double>::quiet_NaN(),
                              int threads = 1);

using NamedCurve = std::pair<std::string, std::function<double(double)>>;
// Ratio-stability fit of (T, -ln p) pairs against candidate curves.
// Rows with p = 0 (infinite -ln p) are excluded.
RateFit fit_rate(const std::vector<std::pair<double, double>>& pairs,
                 const std::vector<NamedCurve>& curves);

}  // namespace pldp

#endif
