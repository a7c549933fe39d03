#ifndef POLYMER_TRANSFER_HPP
#define POLYMER_TRANSFER_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "polymer/field.hpp"
#include "polymer/lattice.hpp"
#include "polymer/tail_model.hpp"

namespace pldp {

// A nearest-neighbor walk: positions at times t0, t0+1, ..., flattened
// d coordinates per step.
struct LatticePath {
  int dim = 1;
  int t0 = 0;
  std::vector<Coord> points;

  int steps() const {
    return static_cast<int>(points.size() / static_cast<std::size_t>(dim)) - 1;
  }
  std::span<const Coord> at(int i) const {
    return {&points[static_cast<std::size_t>(i) * dim],
            static_cast<std::size_t>(dim)};
  }
};

// ln Z(T) = ln E_0 e^{H(T)}, H(T) = sum_{t<T} V(t, walk(t)).
// Log-sum-exp transfer matrix over the parity cone slices.
double log_partition(const Field& field, int T);

// zeta(T) = sup over walks of H(T); the max-plus analogue.
double last_passage(const Field& field, int T);

// Same recursion with every slice clipped to {|x|_1 <= W}. W >= 1.
double restricted_log_partition(const Field& field, int T, int W);

// ln E_x[e^{H(t1,t2)} 1{walk pinned at x at both ends, |walk-x|_1 <= L}].
// Field rows are absolute times t1..t2-1; walk time is relative.
// Returns -inf when the pinning is parity-infeasible or L = 0 with t2 > t1.
double block_log_partition(const Field& field, int t1, int t2, int L,
                           std::span<const Coord> center);

bool is_epsilon_good(const Field& field, int t1, int t2, int L,
                     std::span<const Coord> center, double lambda_hat,
                     double eps);

// H(t1,t2) along an explicit path (path point i sits at absolute time t1+i).
double path_energy(const Field& field, const LatticePath& path, int t1, int t2);

struct FreeEnergyEstimate {
  double lambda_hat = 0.0;
  double std_error = 0.0;
  int T = 0;
  int replicas = 0;
};

// Mean and standard error of (1/T) ln Z(T) over independent realizations.
FreeEnergyEstimate free_energy_estimate(const Distribution& dist, int T,
                                        int replicas, std::uint64_t seed,
                                        int threads = 1);

}  // namespace pldp

#endif
