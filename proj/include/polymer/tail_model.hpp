#ifndef POLYMER_TAIL_MODEL_HPP
#define POLYMER_TAIL_MODEL_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace pldp {

enum class TailKind {
  kPower,          // G(x) = x^alpha
  kLinear,         // G(x) = slope * x
  kLogCorrection,  // G(x) = x^d e^{-(ln x)^beta} past the stitch point
  kTwoPoint,       // V in {-a, +b}, no tail exponent
  kCustom,         // tabulated monotone G, piecewise linear
  kDegenerate,     // V = 0 a.s.; test-only
};

enum class FMonotonicity { kNonIncreasing, kNonDecreasing, kConstant, kNonMonotone };

const char* to_string(TailKind k);
const char* to_string(FMonotonicity m);

// Negative-tail specification: the function G with Q(-V > x) = e^{-xG(x)}
// for x >= x_bar, plus the classification probes derived from it.
class TailModel {
 public:
  static TailModel power(double alpha, int dim, double x_bar);
  static TailModel linear(double slope, int dim, double x_bar);
  static TailModel log_correction(double beta, int dim, double x_bar);
  static TailModel two_point(double a, double p, int dim);
  static TailModel custom(std::vector<std::pair<double, double>> table, int dim,
                          double x_bar);
  static TailModel degenerate(int dim);

  static TailModel from_json(const nlohmann::json& spec);
  nlohmann::json to_json() const;
  std::string hash() const;

  TailKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double x_bar() const { return x_bar_; }
  bool has_tail_exponent() const {
    return kind_ != TailKind::kTwoPoint && kind_ != TailKind::kDegenerate;
  }

  double g(double x) const;
  double g_inverse(double z) const;
  double f(double x) const;

  FMonotonicity f_monotonicity() const;
  bool g_asymptotically_constant() const;
  bool f_bounded() const;
  bool integral_convergent() const;  // whether int^inf G^{-1/d}(x) dx < inf

  double alpha() const { return alpha_; }
  double slope() const { return slope_; }
  double beta() const { return beta_; }
  double atom_a() const { return atom_a_; }
  double atom_p() const { return atom_p_; }
  double stitch_x() const { return stitch_x_; }
  const std::vector<std::pair<double, double>>& table() const { return table_; }

 private:
  TailModel() = default;
  double g_natural(double x) const;  // kLogCorrection formula past the stitch

  TailKind kind_ = TailKind::kPower;
  int dim_ = 1;
  double x_bar_ = 1.0;
  double alpha_ = 0.0;
  double slope_ = 0.0;
  double beta_ = 0.0;
  double atom_a_ = 0.0;
  double atom_p_ = 0.0;
  double stitch_x_ = 0.0;
  std::vector<std::pair<double, double>> table_;
};

struct MgfCheck {
  double log_bound = 0.0;  // 2 eta' G^inv(2 eta')
  double log_mgf = 0.0;    // ln Q(e^{-eta' V}), deterministic quadrature
  bool holds = false;
};

// Mean-zero distribution realizing the model: the entire negative part is
// the exact tail beyond x_bar, the positive part is one atom at v0.
class Distribution {
 public:
  explicit Distribution(TailModel model);
  static Distribution zero_field(int dim);

  const TailModel& model() const { return model_; }
  bool degenerate() const { return model_.kind() == TailKind::kDegenerate; }

  double tail_prob(double x) const;           // Q(-V > x), x >= 0
  double tail_prob_at_least(double x) const;  // Q(-V >= x), x >= 0

  double value_from_uniform(double u) const;  // inverse-CDF draw of V
  // Draw of -V conditioned on {-V >= theta}; theta must be feasible.
  double neg_value_from_uniform_conditional(double theta, double u) const;
  double sample(std::uint64_t seed, std::uint64_t stream,
                std::uint64_t index) const;

  double tail_mass() const { return tail_mass_; }  // S = e^{-x_bar G(x_bar)}
  double v0() const { return v0_; }
  double neg_mean() const { return neg_mean_; }
  double q() const { return q_; }
  double eta0() const { return eta0_; }

  double log_mgf(double eta_prime) const;  // ln Q(e^{-eta' V})
  MgfCheck mgf_upper_bound_check(double eta_prime) const;

 private:
  void derive_constants();

  TailModel model_;
  double tail_mass_ = 0.0;
  double v0_ = 0.0;
  double neg_mean_ = 0.0;
  double q_ = 1.0;
  double eta0_ = 0.0;
};

}  // namespace pldp

#endif
