#include "polymer/tail_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "polymer/numerics.hpp"
#include "polymer/rng.hpp"

namespace pldp {

namespace {

constexpr std::uint64_t kSampleTag = 0x53414D504Cull;

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

const char* to_string(TailKind k) {
  switch (k) {
    case TailKind::kPower: return "power";
    case TailKind::kLinear: return "linear";
    case TailKind::kLogCorrection: return "log_correction";
    case TailKind::kTwoPoint: return "two_point";
    case TailKind::kCustom: return "custom";
    case TailKind::kDegenerate: return "degenerate";
  }
  return "?";
}

const char* to_string(FMonotonicity m) {
  switch (m) {
    case FMonotonicity::kNonIncreasing: return "non_increasing";
    case FMonotonicity::kNonDecreasing: return "non_decreasing";
    case FMonotonicity::kConstant: return "constant";
    case FMonotonicity::kNonMonotone: return "non_monotone";
  }
  return "?";
}

TailModel TailModel::power(double alpha, int dim, double x_bar) {
  require(alpha >= 0.0, "power: alpha must be >= 0");
  require(dim >= 1 && dim <= 8, "power: dim out of range");
  require(x_bar > 0.0, "power: x_bar must be > 0");
  TailModel m;
  m.kind_ = TailKind::kPower;
  m.alpha_ = alpha;
  m.dim_ = dim;
  m.x_bar_ = x_bar;
  return m;
}

TailModel TailModel::linear(double slope, int dim, double x_bar) {
  require(slope > 0.0, "linear: slope must be > 0");
  require(dim >= 1 && dim <= 8, "linear: dim out of range");
  require(x_bar > 0.0, "linear: x_bar must be > 0");
  TailModel m;
  m.kind_ = TailKind::kLinear;
  m.slope_ = slope;
  m.dim_ = dim;
  m.x_bar_ = x_bar;
  return m;
}

TailModel TailModel::log_correction(double beta, int dim, double x_bar) {
  require(beta >= 0.0 && beta < 1.0, "log_correction: beta must be in [0,1)");
  require(dim >= 1 && dim <= 8, "log_correction: dim out of range");
  require(x_bar > 0.0, "log_correction: x_bar must be > 0");
  TailModel m;
  m.kind_ = TailKind::kLogCorrection;
  m.beta_ = beta;
  m.dim_ = dim;
  m.x_bar_ = x_bar;
  // Below stitch_x the natural formula x^d e^{-(ln x)^beta} is not
  // increasing; G is continued linearly through the origin from there.
  m.stitch_x_ =
      beta > 0.0 ? std::exp(std::pow(2.0 * beta / dim, 1.0 / (1.0 - beta)))
                 : 1.0;
  return m;
}

TailModel TailModel::two_point(double a, double p, int dim) {
  require(a > 0.0, "two_point: a must be > 0");
  require(p > 0.0 && p < 1.0, "two_point: p must be in (0,1)");
  require(dim >= 1 && dim <= 8, "two_point: dim out of range");
  TailModel m;
  m.kind_ = TailKind::kTwoPoint;
  m.atom_a_ = a;
  m.atom_p_ = p;
  m.dim_ = dim;
  m.x_bar_ = a;
  return m;
}

TailModel TailModel::custom(std::vector<std::pair<double, double>> table,
                            int dim, double x_bar) {
  require(dim >= 1 && dim <= 8, "custom: dim out of range");
  require(x_bar > 0.0, "custom: x_bar must be > 0");
  require(table.size() >= 2, "custom: table needs at least two knots");
  for (std::size_t i = 0; i < table.size(); ++i) {
    require(table[i].first > 0.0 && table[i].second > 0.0,
            "custom: knots must be positive");
    if (i > 0)
      require(table[i].first > table[i - 1].first &&
                  table[i].second > table[i - 1].second,
              "custom: table must be strictly increasing");
  }
  TailModel m;
  m.kind_ = TailKind::kCustom;
  m.table_ = std::move(table);
  m.dim_ = dim;
  m.x_bar_ = x_bar;
  return m;
}

TailModel TailModel::degenerate(int dim) {
  require(dim >= 1 && dim <= 8, "degenerate: dim out of range");
  TailModel m;
  m.kind_ = TailKind::kDegenerate;
  m.dim_ = dim;
  m.x_bar_ = 1.0;
  return m;
}

double TailModel::g_natural(double x) const {
  const double lx = std::log(x);
  return std::pow(x, dim_) * std::exp(-std::pow(lx, beta_));
}

double TailModel::g(double x) const {
  if (!(x > 0.0)) throw std::domain_error("g: x must be > 0");
  switch (kind_) {
    case TailKind::kPower:
      return std::pow(x, alpha_);
    case TailKind::kLinear:
      return slope_ * x;
    case TailKind::kLogCorrection: {
      if (x >= stitch_x_) return g_natural(x);
      return x * (g_natural(stitch_x_) / stitch_x_);
    }
    case TailKind::kCustom: {
      const auto& tb = table_;
      if (x <= tb.front().first)
        return tb.front().second * (x / tb.front().first);
      if (x >= tb.back().first) {
        const auto& [x1, g1] = tb[tb.size() - 2];
        const auto& [x2, g2] = tb.back();
        return g2 + (g2 - g1) / (x2 - x1) * (x - x2);
      }
      auto it = std::upper_bound(
          tb.begin(), tb.end(), x,
          [](double v, const std::pair<double, double>& k) { return v < k.first; });
      const auto& [x2, g2] = *it;
      const auto& [x1, g1] = *(it - 1);
      return g1 + (g2 - g1) * (x - x1) / (x2 - x1);
    }
    case TailKind::kTwoPoint:
      throw std::domain_error("g: two_point kind has no tail exponent");
    case TailKind::kDegenerate:
      throw std::domain_error("g: degenerate kind has no tail exponent");
  }
  throw std::logic_error("g: unreachable");
}

double TailModel::g_inverse(double z) const {
  if (!(z >= 0.0)) throw std::domain_error("g_inverse: z must be >= 0");
  if (z == 0.0) return 0.0;
  switch (kind_) {
    case TailKind::kPower:
      if (alpha_ == 0.0)
        throw std::domain_error("g_inverse: constant G is not invertible");
      return std::pow(z, 1.0 / alpha_);
    case TailKind::kLinear:
      return z / slope_;
    case TailKind::kTwoPoint:
      // Generalized inverse of the +inf step exponent of a bounded tail:
      // every positive level maps to the negative support bound.
      return atom_a_;
    case TailKind::kDegenerate:
      throw std::domain_error("g_inverse: degenerate kind has no tail exponent");
    case TailKind::kLogCorrection:
    case TailKind::kCustom: {
      auto fn = [this](double x) { return g(x); };
      const double anchor =
          kind_ == TailKind::kLogCorrection ? stitch_x_ : table_.front().first;
      if (z <= g(anchor)) {
        // Linear head segment through the origin inverts in closed form.
        if (kind_ == TailKind::kLogCorrection)
          return z * stitch_x_ / g_natural(stitch_x_);
        return z * table_.front().first / table_.front().second;
      }
      const double hi = expand_upper_bracket(fn, z, 2.0 * anchor);
      return solve_increasing(fn, z, anchor, hi, 1e-12);
    }
  }
  throw std::logic_error("g_inverse: unreachable");
}

double TailModel::f(double x) const { return g(x) / std::pow(x, dim_); }

FMonotonicity TailModel::f_monotonicity() const {
  switch (kind_) {
    case TailKind::kPower:
      if (alpha_ < dim_) return FMonotonicity::kNonIncreasing;
      if (alpha_ > dim_) return FMonotonicity::kNonDecreasing;
      return FMonotonicity::kConstant;
    case TailKind::kLinear:
      return dim_ == 1 ? FMonotonicity::kConstant : FMonotonicity::kNonIncreasing;
    case TailKind::kLogCorrection:
      return beta_ > 0.0 ? FMonotonicity::kNonIncreasing : FMonotonicity::kConstant;
    case TailKind::kCustom: {
      // Detected from the tabulated knots (with slack for interpolation).
      bool non_inc = true, non_dec = true;
      double prev = f(table_.front().first);
      for (std::size_t i = 1; i < table_.size(); ++i) {
        const double cur = f(table_[i].first);
        if (cur > prev * (1.0 + 1e-9)) non_inc = false;
        if (cur < prev * (1.0 - 1e-9)) non_dec = false;
        prev = cur;
      }
      if (non_inc && non_dec) return FMonotonicity::kConstant;
      if (non_inc) return FMonotonicity::kNonIncreasing;
      if (non_dec) return FMonotonicity::kNonDecreasing;
      return FMonotonicity::kNonMonotone;
    }
    case TailKind::kTwoPoint:
    case TailKind::kDegenerate:
      return FMonotonicity::kNonMonotone;
  }
  throw std::logic_error("f_monotonicity: unreachable");
}

bool TailModel::g_asymptotically_constant() const {
  switch (kind_) {
    case TailKind::kPower:
      return alpha_ == 0.0;
    case TailKind::kCustom: {
      const auto& [x1, g1] = table_[table_.size() - 2];
      const auto& [x2, g2] = table_.back();
      // Flat extension slope reads as an exponential negative tail.
      const double rel_slope = (g2 - g1) / (x2 - x1) * (x2 / g2);
      return rel_slope < 1e-6;
    }
    default:
      return false;
  }
}

bool TailModel::f_bounded() const {
  switch (kind_) {
    case TailKind::kPower:
      return alpha_ <= dim_;
    case TailKind::kLinear:
      return dim_ >= 1;
    case TailKind::kLogCorrection:
      return true;
    case TailKind::kCustom: {
      if (f_monotonicity() != FMonotonicity::kNonDecreasing) return true;
      const double mid = std::sqrt(table_.front().first * table_.back().first);
      return f(table_.back().first) <= 1.05 * std::max(f(mid), 1e-300);
    }
    case TailKind::kTwoPoint:
      return false;
    case TailKind::kDegenerate:
      return false;
  }
  throw std::logic_error("f_bounded: unreachable");
}

bool TailModel::integral_convergent() const {
  switch (kind_) {
    case TailKind::kPower:
      return alpha_ > dim_;
    case TailKind::kLinear:
      return false;  // G^{-1/d} ~ x^{-1/d} with d >= 1
    case TailKind::kLogCorrection:
      return false;
    case TailKind::kTwoPoint:
      return true;  // the tail beyond the support bound is identically zero
    case TailKind::kCustom: {
      const auto& [x1, g1] = table_[table_.size() - 2];
      const auto& [x2, g2] = table_.back();
      const double p = (std::log(g2) - std::log(g1)) /
                       (std::log(x2) - std::log(x1));  // local power of G
      // 10% margin: slowly-varying corrections (x^d ln x and the like)
      // push the local slope above d while the integral still diverges.
      return p > dim_ * 1.1;
    }
    case TailKind::kDegenerate:
      return false;
  }
  throw std::logic_error("integral_convergent: unreachable");
}

TailModel TailModel::from_json(const nlohmann::json& spec) {
  require(spec.is_object(), "model spec: expected an object");
  static const std::vector<std::string> known = {
      "kind", "dim", "x_bar", "alpha", "slope", "beta", "a", "p", "table"};
  for (auto it = spec.begin(); it != spec.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw std::invalid_argument("model spec: unknown key '" + it.key() + "'");
  }
  const std::string kind = spec.at("kind").get<std::string>();
  const int dim = spec.value("dim", 1);
  const double x_bar = spec.value("x_bar", 1.0);
  if (kind == "power") return power(spec.at("alpha").get<double>(), dim, x_bar);
  if (kind == "linear") return linear(spec.at("slope").get<double>(), dim, x_bar);
  if (kind == "log_correction")
    return log_correction(spec.at("beta").get<double>(), dim, x_bar);
  if (kind == "two_point")
    return two_point(spec.at("a").get<double>(), spec.at("p").get<double>(), dim);
  if (kind == "custom") {
    std::vector<std::pair<double, double>> tb;
    for (const auto& row : spec.at("table"))
      tb.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
    return custom(std::move(tb), dim, x_bar);
  }
  if (kind == "degenerate") return degenerate(dim);
  throw std::invalid_argument("model spec: unknown kind '" + kind + "'");
}

nlohmann::json TailModel::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind_);
  j["dim"] = dim_;
  switch (kind_) {
    case TailKind::kPower:
      j["alpha"] = alpha_;
      j["x_bar"] = x_bar_;
      break;
    case TailKind::kLinear:
      j["slope"] = slope_;
      j["x_bar"] = x_bar_;
      break;
    case TailKind::kLogCorrection:
      j["beta"] = beta_;
      j["x_bar"] = x_bar_;
      break;
    case TailKind::kTwoPoint:
      j["a"] = atom_a_;
      j["p"] = atom_p_;
      break;
    case TailKind::kCustom: {
      nlohmann::json tb = nlohmann::json::array();
      for (const auto& [x, gx] : table_) tb.push_back({x, gx});
      j["table"] = tb;
      j["x_bar"] = x_bar_;
      break;
    }
    case TailKind::kDegenerate:
      break;
  }
  return j;
}

std::string TailModel::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(to_json().dump())));
  return buf;
}

// ---------------------------------------------------------------------------
// Distribution

namespace {

// ln of int_a^inf e^{phi(x)} dx computed by locating the peak of
// psi(s) = phi(e^s) + s on a scan grid, refining it, and integrating the
// normalized exponential over the region within 100 nats of the peak.
double log_exp_integral(const std::function<double(double)>& phi, double a,
                        double b_hint) {
  const double s_a = std::log(a);
  const double s_b = std::log(b_hint);
  if (!(s_b > s_a)) throw std::logic_error("log_exp_integral: empty range");
  auto psi = [&](double s) { return phi(std::exp(s)) + s; };

  const int kScan = 1500;
  double best_s = s_a, best_v = psi(s_a);
  const double step = (s_b - s_a) / kScan;
  for (int i = 1; i <= kScan; ++i) {
    const double s = s_a + step * i;
    const double v = psi(s);
    if (v > best_v) {
      best_v = v;
      best_s = s;
    }
  }
  // Local refinement of the peak; psi is unimodal at this resolution.
  double lo = std::max(s_a, best_s - 2 * step);
  double hi = std::min(s_b, best_s + 2 * step);
  for (int i = 0; i < 160; ++i) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (psi(m1) < psi(m2))
      lo = m1;
    else
      hi = m2;
  }
  const double s_peak = 0.5 * (lo + hi);
  const double psi_max = std::max(best_v, psi(s_peak));

  // Integration window: everything within 100 nats of the peak.
  const double cut = psi_max - 100.0;
  double s_lo = s_a;
  for (double s = s_peak; s > s_a; s -= step) {
    if (psi(s) < cut) {
      s_lo = s;
      break;
    }
  }
  double s_hi = s_b;
  for (double s = s_peak; s < s_b; s += step) {
    if (psi(s) < cut) {
      s_hi = s;
      break;
    }
  }
  auto h = [&](double s) { return std::exp(psi(s) - psi_max); };
  const double left = integrate(h, s_lo, s_peak, 1e-11);
  const double right = integrate(h, s_peak, s_hi, 1e-11);
  return psi_max + std::log(left + right);
}

}  // namespace

Distribution::Distribution(TailModel model) : model_(std::move(model)) {
  derive_constants();
}

Distribution Distribution::zero_field(int dim) {
  Distribution d{TailModel::degenerate(dim)};
  return d;
}

void Distribution::derive_constants() {
  switch (model_.kind()) {
    case TailKind::kDegenerate:
      tail_mass_ = 0.0;
      v0_ = 0.0;
      neg_mean_ = 0.0;
      q_ = 1.0;
      eta0_ = 0.0;
      return;
    case TailKind::kTwoPoint: {
      const double a = model_.atom_a();
      const double p = model_.atom_p();
      tail_mass_ = p;
      v0_ = p * a / (1.0 - p);  // mean-zero partner atom
      neg_mean_ = p * a;
      q_ = p;
      eta0_ = 2e-3;  // the e^{2 eta' a} bound holds from 0; kept positive
      return;
    }
    default:
      break;
  }

  const double xb = model_.x_bar();
  const double gxb = model_.g(xb);
  if (!(gxb > 0.0))
    throw std::invalid_argument("distribution: G(x_bar) must be positive");
  if (model_.kind() == TailKind::kPower && model_.alpha() == 0.0)
    throw std::invalid_argument(
        "distribution: constant G has no strictly increasing tail exponent");
  tail_mass_ = std::exp(-xb * gxb);

  // E[-V; -V >= x_bar] = x_bar*S + int_{x_bar}^inf e^{-xG(x)} dx.
  auto decay = [this](double x) { return x * model_.g(x); };
  double x_hi = std::max(2.0 * xb, xb + 1.0);
  while (decay(x_hi) < 750.0 && x_hi < 1e12) x_hi *= 2.0;
  const double tail_int = integrate(
      [this](double x) { return std::exp(-x * model_.g(x)); }, xb, x_hi, 1e-13);
  neg_mean_ = xb * tail_mass_ + tail_int;
  v0_ = neg_mean_ / (1.0 - tail_mass_);

  // Cover constant: q = min over [0, x_bar(1+1e-6)] of tail_prob(t)/e^{-tG(t)}.
  const int kGrid = 2000;
  double qmin = 1.0;
  for (int i = 0; i <= kGrid; ++i) {
    const double t = xb * (1.0 + 1e-6) * i / kGrid;
    const double denom = t == 0.0 ? 1.0 : std::exp(-t * model_.g(t));
    qmin = std::min(qmin, tail_prob(t) / denom);
  }
  q_ = qmin;

  // eta0: smallest grid value from which the mgf bound holds at every larger
  // grid point, doubled for margin.
  const double eta_start = std::max(gxb / 2.0, 1e-3);
  const int kEtaPts = 21;
  std::vector<bool> ok(kEtaPts);
  for (int i = 0; i < kEtaPts; ++i) {
    const double eta = eta_start * std::pow(2.0, i);
    const double bound = 2.0 * eta * model_.g_inverse(2.0 * eta);
    ok[i] = log_mgf(eta) <= bound;
  }
  int first = -1;
  for (int i = kEtaPts - 1; i >= 0; --i) {
    if (!ok[i]) break;
    first = i;
  }
  if (first < 0)
    throw std::runtime_error("distribution: mgf bound not attained on grid");
  eta0_ = 2.0 * eta_start * std::pow(2.0, first);
}

double Distribution::tail_prob(double x) const {
  if (!(x >= 0.0)) throw std::domain_error("tail_prob: x must be >= 0");
  switch (model_.kind()) {
    case TailKind::kDegenerate:
      return 0.0;
    case TailKind::kTwoPoint:
      return x < model_.atom_a() ? model_.atom_p() : 0.0;
    default:
      if (x >= model_.x_bar()) return std::exp(-x * model_.g(x));
      return tail_mass_;
  }
}

double Distribution::tail_prob_at_least(double x) const {
  if (!(x >= 0.0)) throw std::domain_error("tail_prob_at_least: x must be >= 0");
  switch (model_.kind()) {
    case TailKind::kDegenerate:
      return x == 0.0 ? 1.0 : 0.0;
    case TailKind::kTwoPoint:
      return x <= model_.atom_a() ? model_.atom_p() : 0.0;
    default:
      if (x <= model_.x_bar()) return tail_mass_;
      return std::exp(-x * model_.g(x));
  }
}

double Distribution::value_from_uniform(double u) const {
  if (!(u > 0.0 && u < 1.0))
    throw std::domain_error("value_from_uniform: u must be in (0,1)");
  switch (model_.kind()) {
    case TailKind::kDegenerate:
      return 0.0;
    case TailKind::kTwoPoint:
      return u < 1.0 - model_.atom_p() ? v0_ : -model_.atom_a();
    default: {
      if (u < 1.0 - tail_mass_) return v0_;
      const double w = (u - (1.0 - tail_mass_)) / tail_mass_;
      return -neg_value_from_uniform_conditional(model_.x_bar(), w == 0.0 ? 1e-17 : w);
    }
  }
}

double Distribution::neg_value_from_uniform_conditional(double theta,
                                                        double u) const {
  if (!(theta > 0.0))
    throw std::domain_error("conditional tail: theta must be > 0");
  if (!(u > 0.0 && u < 1.0))
    throw std::domain_error("conditional tail: u must be in (0,1)");
  switch (model_.kind()) {
    case TailKind::kDegenerate:
      throw std::domain_error("conditional tail: degenerate kind");
    case TailKind::kTwoPoint:
      if (theta > model_.atom_a())
        throw std::domain_error("conditional tail: threshold beyond support");
      return model_.atom_a();
    default: {
      const double base = std::max(theta, model_.x_bar());
      // Solve x G(x) = base G(base) - ln(1-u); exact inverse-CDF, no rejection.
      const double target = base * model_.g(base) - std::log1p(-u);
      auto fn = [this](double x) { return x * model_.g(x); };
      const double hi = expand_upper_bracket(fn, target, 2.0 * base);
      return solve_increasing(fn, target, base, hi, 1e-12);
    }
  }
}

double Distribution::sample(std::uint64_t seed, std::uint64_t stream,
                            std::uint64_t index) const {
  SiteRng rng(seed, stream);
  return value_from_uniform(rng.uniform(index, kSampleTag));
}

double Distribution::log_mgf(double eta_prime) const {
  if (!(eta_prime > 0.0)) throw std::domain_error("log_mgf: eta' must be > 0");
  switch (model_.kind()) {
    case TailKind::kDegenerate:
      return 0.0;
    case TailKind::kTwoPoint: {
      const double a = model_.atom_a();
      const double p = model_.atom_p();
      return log_add(std::log(p) + eta_prime * a,
                     std::log1p(-p) - eta_prime * v0_);
    }
    default: {
      // Q(e^{-eta' V}) = (1-S)e^{-eta' v0} + e^{eta' x_bar} S
      //                  + eta' int_{x_bar}^inf e^{eta' x - x G(x)} dx.
      const double xb = model_.x_bar();
      const double atom = std::log1p(-tail_mass_) - eta_prime * v0_;
      const double boundary = eta_prime * xb + std::log(tail_mass_);
      auto phi = [this, eta_prime](double x) {
        return eta_prime * x - x * model_.g(x);
      };
      // Past G^inv(2 eta') the integrand decays at least like e^{-eta' x};
      // extend until the truncated mass is negligible next to phi(x_bar).
      double x_end = std::max(
          expand_upper_bracket([this](double x) { return model_.g(x); },
                               2.0 * eta_prime + 2.0, std::max(xb, 1.0)),
          2.0 * xb);
      while (phi(x_end) > phi(xb) - 80.0 && x_end < 1e14) x_end *= 2.0;
      const double tail = std::log(eta_prime) + log_exp_integral(phi, xb, x_end);
      return log_add(log_add(atom, boundary), tail);
    }
  }
}

MgfCheck Distribution::mgf_upper_bound_check(double eta_prime) const {
  if (!(eta_prime > eta0_))
    throw std::invalid_argument(
        "mgf_upper_bound_check: eta' must exceed eta0 (bound not asserted below)");
  MgfCheck out;
  out.log_bound = 2.0 * eta_prime * model_.g_inverse(2.0 * eta_prime);
  out.log_mgf = log_mgf(eta_prime);
  out.holds = out.log_mgf <= out.log_bound;
  return out;
}

}  // namespace pldp
