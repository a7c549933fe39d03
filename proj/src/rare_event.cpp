#include "polymer/rare_event.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "polymer/field.hpp"
#include "polymer/lattice.hpp"
#include "polymer/transfer.hpp"

namespace pldp {

namespace {

void run_chunks(int n, int threads, const std::function<void(int, int)>& work) {
  if (threads <= 1 || n < 2 * threads) {
    work(0, n);
    return;
  }
  std::vector<std::thread> pool;
  for (int i = 0; i < threads; ++i) {
    const int lo = n * i / threads, hi = n * (i + 1) / threads;
    if (lo < hi) pool.emplace_back(work, lo, hi);
  }
  for (auto& th : pool) th.join();
}

// Flattened cone geometry for t < T plus the slice-to-slice transitions,
// so the per-configuration transfer matrix is pure array arithmetic.
struct ConeTableau {
  int d = 1;
  int T = 1;
  std::vector<std::vector<Coord>> slices;          // points of L_t, flattened
  std::vector<std::size_t> offsets;                // site id base per slice
  std::size_t total_sites = 0;
  std::vector<std::vector<std::vector<std::size_t>>> sources;
  // sources[t][j] = indices into slice t of neighbors of point j in slice t+1

  ConeTableau(int dim, int horizon) : d(dim), T(horizon) {
    slices.reserve(static_cast<std::size_t>(T) + 1);
    for (int t = 0; t <= T; ++t) slices.push_back(cone_slice_points(d, t));
    offsets.resize(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
      offsets[static_cast<std::size_t>(t)] = total_sites;
      total_sites += slices[static_cast<std::size_t>(t)].size() /
                     static_cast<std::size_t>(d);
    }
    sources.resize(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
      const auto& src = slices[static_cast<std::size_t>(t)];
      const auto& dst = slices[static_cast<std::size_t>(t) + 1];
      const std::size_t ns = src.size() / static_cast<std::size_t>(d);
      const std::size_t nd = dst.size() / static_cast<std::size_t>(d);
      auto& trans = sources[static_cast<std::size_t>(t)];
      trans.resize(nd);
      std::vector<Coord> nb(static_cast<std::size_t>(d));
      for (std::size_t j = 0; j < nd; ++j) {
        for (int k = 0; k < d; ++k) {
          for (int dir = -1; dir <= 1; dir += 2) {
            for (int c = 0; c < d; ++c)
              nb[static_cast<std::size_t>(c)] =
                  dst[j * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)];
            nb[static_cast<std::size_t>(k)] += static_cast<Coord>(dir);
            if (l1_norm(nb) > t || !reachable(t, l1_norm(nb))) continue;
            // Locate nb in slice t.
            for (std::size_t i = 0; i < ns; ++i) {
              bool same = true;
              for (int c = 0; c < d; ++c)
                if (src[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)] !=
                    nb[static_cast<std::size_t>(c)]) {
                  same = false;
                  break;
                }
              if (same) {
                trans[j].push_back(i);
                break;
              }
            }
          }
        }
      }
    }
  }

  // ln Z(T) with site weights e^{V} given per site id; linear-space
  // recursion (callers guard the magnitude).
  double log_partition_linear(const std::vector<double>& exp_v) const {
    std::vector<double> cur{1.0}, next;
    for (int t = 0; t < T; ++t) {
      const auto& trans = sources[static_cast<std::size_t>(t)];
      next.assign(trans.size(), 0.0);
      const std::size_t base = offsets[static_cast<std::size_t>(t)];
      for (std::size_t j = 0; j < trans.size(); ++j)
        for (std::size_t i : trans[j]) next[j] += cur[i] * exp_v[base + i];
      cur.swap(next);
    }
    double z = 0.0;
    for (double v : cur) z += v;
    return std::log(z) - T * std::log(2.0 * d);
  }

  double log_partition_logspace(const std::vector<double>& v) const {
    std::vector<double> cur{0.0}, next;
    for (int t = 0; t < T; ++t) {
      const auto& trans = sources[static_cast<std::size_t>(t)];
      next.assign(trans.size(), kNegInf);
      const std::size_t base = offsets[static_cast<std::size_t>(t)];
      for (std::size_t j = 0; j < trans.size(); ++j)
        for (std::size_t i : trans[j])
          next[j] = log_add(next[j], cur[i] + v[base + i]);
      cur.swap(next);
    }
    return log_sum_exp(cur) - T * std::log(2.0 * d);
  }
};

struct EnumerationResult {
  double p_lower = 0.0;
  double p_upper = 0.0;
};

EnumerationResult enumerate_two_point(const Distribution& dist, int T,
                                      double a_low, double b_up) {
  if (dist.model().kind() != TailKind::kTwoPoint)
    throw std::invalid_argument("exact enumeration: requires a two_point model");
  if (T < 1) throw std::invalid_argument("exact enumeration: T must be >= 1");
  ConeTableau tab(dist.model().dim(), T);
  if (tab.total_sites > 24)
    throw std::length_error("exact enumeration: more than 24 cone sites");

  const double neg = -dist.model().atom_a();
  const double pos = dist.v0();
  const double p = dist.model().atom_p();
  const std::size_t S = tab.total_sites;
  const std::uint64_t n_cfg = 1ull << S;
  const bool linear_ok = std::max(-neg, pos) * T < 300.0;

  // Exact per-count probabilities p^k (1-p)^{S-k}.
  std::vector<double> log_probs(S + 1);
  for (std::size_t k = 0; k <= S; ++k)
    log_probs[k] = double(k) * std::log(p) + double(S - k) * std::log1p(-p);

  double mass_low = 0.0, mass_up = 0.0;
  std::vector<double> w(S);
  const double e_neg = std::exp(neg), e_pos = std::exp(pos);
  for (std::uint64_t cfg = 0; cfg < n_cfg; ++cfg) {
    for (std::size_t s = 0; s < S; ++s)
      w[s] = (cfg >> s) & 1 ? (linear_ok ? e_neg : neg)
                            : (linear_ok ? e_pos : pos);
    const double ln_z = linear_ok ? tab.log_partition_linear(w)
                                  : tab.log_partition_logspace(w);
    const int ones = __builtin_popcountll(cfg);
    const double prob = std::exp(log_probs[static_cast<std::size_t>(ones)]);
    if (ln_z <= a_low * T) mass_low += prob;
    if (ln_z >= b_up * T) mass_up += prob;
  }
  return {mass_low, mass_up};
}

}  // namespace

double exact_lower_tail(const Distribution& dist, int T, double a) {
  return enumerate_two_point(dist, T, a, kInf).p_lower;
}

double exact_upper_tail(const Distribution& dist, int T, double b) {
  return enumerate_two_point(dist, T, kNegInf, b).p_upper;
}

ExactTailPair exact_tail_pair(const Distribution& dist, int T, double a,
                              double b) {
  auto r = enumerate_two_point(dist, T, a, b);
  return {r.p_lower, r.p_upper};
}

McEstimate naive_mc_lower_tail(const LowerTailQuery& query, int threads) {
  if (query.n < 100)
    throw std::invalid_argument("naive_mc_lower_tail: n must be >= 100");
  std::vector<std::uint8_t> hit(static_cast<std::size_t>(query.n), 0);
  run_chunks(query.n, threads, [&](int lo, int hi) {
    for (int r = lo; r < hi; ++r) {
      GeneratedField field(query.dist, query.seed, static_cast<std::uint64_t>(r));
      hit[static_cast<std::size_t>(r)] =
          log_partition(field, query.T) <= query.a * query.T ? 1 : 0;
    }
  });
  McEstimate out;
  out.n = static_cast<std::uint64_t>(query.n);
  for (auto h : hit) out.successes += h;
  out.p_hat = double(out.successes) / double(out.n);
  out.ci = wilson_ci(out.successes, out.n);
  return out;
}

ConeBound cone_conditioned_lower_bound(const LowerTailQuery& query, int M,
                                       double eta, int threads) {
  if (M < 1 || M >= query.T)
    throw std::invalid_argument("cone bound: requires 1 <= M < T");
  if (!(eta > 0.0)) throw std::invalid_argument("cone bound: eta must be > 0");
  const TailModel& model = query.dist.model();
  const int d = model.dim();

  ConeBound out;
  out.thresholds.resize(static_cast<std::size_t>(M));
  out.log_q_a = 0.0;
  for (int t = 0; t < M; ++t) {
    const double theta = model.g_inverse(eta / std::pow(1.0 + t, d));
    out.thresholds[static_cast<std::size_t>(t)] = theta;
    const double prob = query.dist.tail_prob_at_least(theta);
    if (!(prob > 0.0))
      throw std::domain_error("cone bound: threshold beyond tail support");
    out.log_q_a += double(cone_slice_size(d, t)) * std::log(prob);
  }

  std::vector<std::uint8_t> hit(static_cast<std::size_t>(query.n), 0);
  run_chunks(query.n, threads, [&](int lo, int hi) {
    for (int r = lo; r < hi; ++r) {
      ConeConditionedField field(query.dist, query.seed,
                                 static_cast<std::uint64_t>(r), out.thresholds);
      hit[static_cast<std::size_t>(r)] =
          log_partition(field, query.T) <= query.a * query.T ? 1 : 0;
    }
  });
  std::uint64_t k = 0;
  for (auto h : hit) k += h;
  out.n = static_cast<std::uint64_t>(query.n);
  out.cond_p_hat = double(k) / double(out.n);
  out.cond_ci = wilson_ci(k, out.n);
  out.log_bound =
      k == 0 ? kNegInf : out.log_q_a + std::log(out.cond_p_hat);
  return out;
}

McEstimate block_goodness_frequency(const Distribution& dist, int L, int W,
                                    double eps, double lambda_hat, int n,
                                    std::uint64_t seed, int threads) {
  if (L < 2 || L % 2 != 0)
    throw std::invalid_argument("block goodness: L must be even and >= 2");
  if (W < 1) throw std::invalid_argument("block goodness: W must be >= 1");
  if (n < 100) throw std::invalid_argument("block goodness: n must be >= 100");
  const std::vector<Coord> origin(static_cast<std::size_t>(dist.model().dim()), 0);
  std::vector<std::uint8_t> hit(static_cast<std::size_t>(n), 0);
  run_chunks(n, threads, [&](int lo, int hi) {
    for (int r = lo; r < hi; ++r) {
      GeneratedField field(dist, seed, static_cast<std::uint64_t>(r));
      hit[static_cast<std::size_t>(r)] =
          is_epsilon_good(field, 0, L, W, origin, lambda_hat, eps) ? 1 : 0;
    }
  });
  McEstimate out;
  out.n = static_cast<std::uint64_t>(n);
  for (auto h : hit) out.successes += h;
  out.p_hat = double(out.successes) / double(out.n);
  out.ci = wilson_ci(out.successes, out.n);
  return out;
}

RateFit upper_tail_rate_probe(const Distribution& dist,
                              const std::vector<int>& T_grid, double eps, int n,
                              std::uint64_t seed, double lambda_hat,
                              int threads) {
  if (T_grid.empty())
    throw std::invalid_argument("upper_tail_rate_probe: empty grid");
  RateFit fit;
  if (std::isnan(lambda_hat)) {
    const int t_max = *std::max_element(T_grid.begin(), T_grid.end());
    fit.lambda_hat =
        free_energy_estimate(dist, 2 * t_max, std::min(n, 400), seed ^ 0x11ull,
                             threads)
            .lambda_hat;
  } else {
    fit.lambda_hat = lambda_hat;
  }
  for (int T : T_grid) {
    std::vector<std::uint8_t> hit(static_cast<std::size_t>(n), 0);
    run_chunks(n, threads, [&](int lo, int hi) {
      for (int r = lo; r < hi; ++r) {
        GeneratedField field(dist, seed + static_cast<std::uint64_t>(T) * 0x9e37ull,
                             static_cast<std::uint64_t>(r));
        hit[static_cast<std::size_t>(r)] =
            log_partition(field, T) >= (fit.lambda_hat + eps) * T ? 1 : 0;
      }
    });
    std::uint64_t k = 0;
    for (auto h : hit) k += h;
    RateFit::Row row;
    row.T = T;
    row.p_hat = double(k) / double(n);
    row.ci = wilson_ci(k, static_cast<std::uint64_t>(n));
    row.neg_log_p = k == 0 ? kInf : -std::log(row.p_hat);
    fit.rows.push_back(row);
  }
  return fit;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& pairs,
                 const std::vector<NamedCurve>& curves) {
  RateFit fit;
  for (const auto& [T, neg_log_p] : pairs) {
    RateFit::Row row;
    row.T = T;
    row.neg_log_p = neg_log_p;
    row.p_hat = std::exp(-neg_log_p);
    fit.rows.push_back(row);
  }
  for (const auto& [name, curve] : curves) {
    RateFit::CurveFit cf;
    cf.name = name;
    double lo = kInf, hi = 0.0;
    for (const auto& [T, neg_log_p] : pairs) {
      if (std::isinf(neg_log_p)) continue;  // p = 0 rows never enter the fit
      const double c = curve(T);
      if (!(c > 0.0)) throw std::domain_error("fit_rate: curve must be positive");
      const double ratio = neg_log_p / c;
      cf.ratios.push_back(ratio);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    cf.spread = cf.ratios.empty() ? kInf : hi / lo;
    cf.consistent = cf.spread <= 4.0;
    fit.curves.push_back(std::move(cf));
  }
  return fit;
}

}  // namespace pldp
