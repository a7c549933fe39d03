#include "polymer/transfer.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

#include "polymer/numerics.hpp"

namespace pldp {

namespace {

enum class Mode { kLogSum, kMaxPlus };

// One transfer step from the slice at time `t` (box radius r_src, centered
// at `center`) to the slice at time t+1 (radius r_dst). Sites outside the
// stated l1 radius or with wrong parity hold -inf and never contribute.
void step_slice(const Field& field, Mode mode, int t, int t_rel,
                std::span<const Coord> center, const Box& src_box,
                const std::vector<double>& src, const Box& dst_box,
                std::vector<double>& dst) {
  const int d = src_box.dim();
  std::vector<Coord> rel(static_cast<std::size_t>(d));
  std::vector<Coord> abs(static_cast<std::size_t>(d));
  std::vector<Coord> nb(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < src_box.size(); ++i) {
    if (src[i] == kNegInf) continue;
    src_box.decode(i, rel);
    if (l1_norm(rel) > src_box.radius() || !reachable(t_rel, l1_norm(rel)))
      continue;
    for (int k = 0; k < d; ++k) abs[static_cast<std::size_t>(k)] = center[static_cast<std::size_t>(k)] + rel[static_cast<std::size_t>(k)];
    const double w = src[i] + field.at(t, abs);
    for (int k = 0; k < d; ++k) {
      for (int dir = -1; dir <= 1; dir += 2) {
        nb = rel;
        nb[static_cast<std::size_t>(k)] += static_cast<Coord>(dir);
        if (l1_norm(nb) > dst_box.radius()) continue;
        const std::size_t j = dst_box.index(nb);
        if (mode == Mode::kMaxPlus)
          dst[j] = std::max(dst[j], w);
        else
          dst[j] = log_add(dst[j], w);
      }
    }
  }
}

double run_cone(const Field& field, Mode mode, int T, int corridor) {
  if (T < 0) throw std::invalid_argument("transfer: T must be >= 0");
  const int d = field.dim();
  const std::vector<Coord> origin(static_cast<std::size_t>(d), 0);
  if (T == 0) return 0.0;

  auto radius = [&](int t) { return corridor >= 0 ? std::min(t, corridor) : t; };
  Box cur_box(d, radius(0));
  std::vector<double> cur(cur_box.size(), kNegInf);
  cur[cur_box.index(origin)] = 0.0;

  for (int t = 0; t < T; ++t) {
    Box next_box(d, radius(t + 1));
    std::vector<double> next(next_box.size(), kNegInf);
    step_slice(field, mode, t, t, origin, cur_box, cur, next_box, next);
    cur_box = next_box;
    cur = std::move(next);
  }

  if (mode == Mode::kMaxPlus) {
    double best = kNegInf;
    for (double v : cur) best = std::max(best, v);
    return best;
  }
  const double lse = log_sum_exp(cur);
  return lse - T * std::log(2.0 * d);
}

}  // namespace

double log_partition(const Field& field, int T) {
  return run_cone(field, Mode::kLogSum, T, -1);
}

double last_passage(const Field& field, int T) {
  return run_cone(field, Mode::kMaxPlus, T, -1);
}

double restricted_log_partition(const Field& field, int T, int W) {
  if (W < 1) throw std::invalid_argument("restricted_log_partition: W must be >= 1");
  return run_cone(field, Mode::kLogSum, T, W);
}

double block_log_partition(const Field& field, int t1, int t2, int L,
                           std::span<const Coord> center) {
  if (t2 < t1) throw std::invalid_argument("block: t2 must be >= t1");
  if (L < 0) throw std::invalid_argument("block: L must be >= 0");
  const int d = field.dim();
  if (static_cast<int>(center.size()) != d)
    throw std::invalid_argument("block: center dimension mismatch");
  const int S = t2 - t1;
  if (S == 0) return 0.0;
  // A nearest-neighbor walk returns to its start only after an even number
  // of steps, and it cannot stand still.
  if (S % 2 != 0 || L == 0) return kNegInf;

  const std::vector<Coord> origin(static_cast<std::size_t>(d), 0);
  auto radius = [&](int s) { return std::min({s, L, S - s}); };
  Box cur_box(d, radius(0));
  std::vector<double> cur(cur_box.size(), kNegInf);
  cur[cur_box.index(origin)] = 0.0;

  for (int s = 0; s < S; ++s) {
    Box next_box(d, radius(s + 1));
    std::vector<double> next(next_box.size(), kNegInf);
    step_slice(field, Mode::kLogSum, t1 + s, s, center, cur_box, cur, next_box,
               next);
    cur_box = next_box;
    cur = std::move(next);
  }
  const double pinned = cur[cur_box.index(origin)];
  if (pinned == kNegInf) return kNegInf;
  return pinned - S * std::log(2.0 * d);
}

bool is_epsilon_good(const Field& field, int t1, int t2, int L,
                     std::span<const Coord> center, double lambda_hat,
                     double eps) {
  return block_log_partition(field, t1, t2, L, center) >=
         (lambda_hat - eps) * (t2 - t1);
}

double path_energy(const Field& field, const LatticePath& path, int t1, int t2) {
  if (t2 < t1) throw std::invalid_argument("path_energy: t2 must be >= t1");
  if (path.steps() < t2 - t1 - 1)
    throw std::invalid_argument("path_energy: path too short");
  double h = 0.0;
  for (int t = t1; t < t2; ++t) h += field.at(t, path.at(t - t1));
  return h;
}

FreeEnergyEstimate free_energy_estimate(const Distribution& dist, int T,
                                        int replicas, std::uint64_t seed,
                                        int threads) {
  if (replicas < 2)
    throw std::invalid_argument("free_energy_estimate: replicas must be >= 2");
  if (T < 1) throw std::invalid_argument("free_energy_estimate: T must be >= 1");
  std::vector<double> vals(static_cast<std::size_t>(replicas));
  auto work = [&](int lo, int hi) {
    for (int r = lo; r < hi; ++r) {
      GeneratedField field(dist, seed, static_cast<std::uint64_t>(r));
      vals[static_cast<std::size_t>(r)] = log_partition(field, T) / T;
    }
  };
  if (threads <= 1) {
    work(0, replicas);
  } else {
    std::vector<std::thread> pool;
    const int n = std::min(threads, replicas);
    for (int i = 0; i < n; ++i) {
      const int lo = replicas * i / n, hi = replicas * (i + 1) / n;
      pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= replicas;
  double ss = 0.0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (replicas - 1));
  return {mean, sd / std::sqrt(double(replicas)), T, replicas};
}

}  // namespace pldp
