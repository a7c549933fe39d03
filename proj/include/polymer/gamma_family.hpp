#ifndef POLYMER_GAMMA_FAMILY_HPP
#define POLYMER_GAMMA_FAMILY_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polymer/lattice.hpp"
#include "polymer/transfer.hpp"

namespace pldp {

// Deterministic origin-rooted path family built by doubling one frontier
// hyperplane per step and shifting the rest away from it. The frontier at
// time d(2^k-1) is a cube with 2^k points per side, and visit counts are
// uniformly spread (the counting bounds below hold exactly).
class PathFamily {
 public:
  static PathFamily build(int dim, int M);

  int dim() const { return d_; }
  int horizon() const { return M_; }

  std::size_t frontier_size(int t) const {
    return frontiers_[static_cast<std::size_t>(t)].size() /
           static_cast<std::size_t>(d_);
  }
  std::span<const Coord> frontier_point(int t, std::size_t i) const {
    return {&frontiers_[static_cast<std::size_t>(t)][i * static_cast<std::size_t>(d_)],
            static_cast<std::size_t>(d_)};
  }
  // parent(t, i): index into frontier t-1 of the parent of point i at t.
  std::size_t parent(int t, std::size_t i) const {
    return parents_[static_cast<std::size_t>(t)][i];
  }

  // Checkpoint times sigma_k = d(2^k - 1) that fit below the horizon.
  const std::vector<int>& sigma() const { return sigma_; }

  // n_{t'}(t, x) for all x in the frontier at t, aligned with frontier order.
  std::vector<std::uint64_t> visit_counts(int t, int t_prime) const;

  struct Violation {
    int which;  // 1, 2 or 3, matching the three counting bounds
    int t;
    std::vector<Coord> x;
  };
  struct BoundsReport {
    int t_prime = 0;
    std::uint64_t checked = 0;
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
  };
  // Exact integer checks of, for every t <= t':
  //   (1) n_{t'}(t,x) * (1+t)^d <= (4+4d)^d * t'^d        (t' >= 1)
  //   (2) |S_t| * (2d)^d >= (t+d)^d
  //   (3) n_{t'}(t,x) * (1+t)^d <= (4d)^{2d} * |S_{t'}|
  BoundsReport verify_counting_bounds(int t_prime) const;

  // Materializes all |S_M| paths; guarded to 2^20 paths.
  std::vector<LatticePath> enumerate_paths() const;

 private:
  PathFamily() = default;
  int d_ = 1;
  int M_ = 0;
  std::vector<std::vector<Coord>> frontiers_;         // frontiers_[t]
  std::vector<std::vector<std::size_t>> parents_;     // parents_[t], t >= 1
  std::vector<int> sigma_;
};

}  // namespace pldp

#endif
