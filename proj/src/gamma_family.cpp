#include "polymer/gamma_family.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace pldp {

namespace {

using U128 = unsigned __int128;

U128 upow(std::uint64_t base, int exp) {
  U128 r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

PathFamily PathFamily::build(int dim, int M) {
  if (dim < 1 || dim > 8) throw std::invalid_argument("path family: dim out of range");
  if (M < 0) throw std::invalid_argument("path family: M must be >= 0");
  PathFamily fam;
  fam.d_ = dim;
  fam.M_ = M;
  fam.frontiers_.resize(static_cast<std::size_t>(M) + 1);
  fam.parents_.resize(static_cast<std::size_t>(M) + 1);
  fam.frontiers_[0] = std::vector<Coord>(static_cast<std::size_t>(dim), 0);

  using Point = std::vector<Coord>;
  int c = 0;          // active coordinate (0-based)
  Coord l = 0;        // hyperplane being doubled
  bool fresh_l = true;  // recompute l as the frontier minimum in coordinate c

  for (int t = 0; t < M; ++t) {
    const auto& cur = fam.frontiers_[static_cast<std::size_t>(t)];
    const std::size_t n = cur.size() / static_cast<std::size_t>(dim);
    if (fresh_l) {
      l = cur[static_cast<std::size_t>(c)];
      for (std::size_t i = 1; i < n; ++i)
        l = std::min(l, cur[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(c)]);
      fresh_l = false;
    }

    // Children: the minimal hyperplane doubles, everything else shifts one
    // step away from it. Each child must have exactly one parent.
    std::map<Point, std::size_t> children;
    std::set<Point> union_form;  // {x^{c,+1}, x^{c,-1} : x in S_t}
    Point p(static_cast<std::size_t>(dim));
    for (std::size_t i = 0; i < n; ++i) {
      for (int k = 0; k < dim; ++k)
        p[static_cast<std::size_t>(k)] = cur[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(k)];
      Point up = p, down = p;
      up[static_cast<std::size_t>(c)] += 1;
      down[static_cast<std::size_t>(c)] -= 1;
      union_form.insert(up);
      union_form.insert(down);
      const Coord xc = p[static_cast<std::size_t>(c)];
      if (xc == l) {
        if (!children.emplace(down, i).second || !children.emplace(up, i).second)
          throw std::logic_error("path family: duplicate child");
      } else {
        Point shifted = xc > l ? up : down;
        if (!children.emplace(shifted, i).second)
          throw std::logic_error("path family: duplicate child");
      }
    }
    // The per-point successors and the union form of step (2) must agree.
    if (children.size() != union_form.size())
      throw std::logic_error("path family: successor forms disagree");
    for (const auto& [pt, idx] : children) {
      (void)idx;
      if (!union_form.count(pt))
        throw std::logic_error("path family: successor forms disagree");
    }

    auto& next = fam.frontiers_[static_cast<std::size_t>(t) + 1];
    auto& par = fam.parents_[static_cast<std::size_t>(t) + 1];
    next.reserve(children.size() * static_cast<std::size_t>(dim));
    par.reserve(children.size());
    Coord maxc = std::numeric_limits<Coord>::min();
    for (const auto& [pt, idx] : children) {
      next.insert(next.end(), pt.begin(), pt.end());
      par.push_back(idx);
      maxc = std::max(maxc, pt[static_cast<std::size_t>(c)]);
    }

    if (l + 3 <= maxc) {
      l += 3;
    } else {
      c = (c + 1) % dim;
      fresh_l = true;
    }
  }

  // sigma_k = d(2^k - 1); the frontier there must be a cube with 2^k points
  // per side.
  for (int k = 0;; ++k) {
    const long long sk = static_cast<long long>(dim) * ((1ll << k) - 1);
    if (sk > M) break;
    fam.sigma_.push_back(static_cast<int>(sk));
    const std::size_t expect = static_cast<std::size_t>(1)
                               << (static_cast<std::size_t>(dim) * k);
    if (fam.frontier_size(static_cast<int>(sk)) != expect)
      throw std::logic_error("path family: frontier at sigma_k is not a cube");
    for (int axis = 0; axis < dim; ++axis) {
      std::set<Coord> vals;
      for (std::size_t i = 0; i < fam.frontier_size(static_cast<int>(sk)); ++i)
        vals.insert(fam.frontier_point(static_cast<int>(sk), i)[static_cast<std::size_t>(axis)]);
      if (vals.size() != (static_cast<std::size_t>(1) << k))
        throw std::logic_error("path family: cube side count mismatch");
    }
  }
  return fam;
}

std::vector<std::uint64_t> PathFamily::visit_counts(int t, int t_prime) const {
  if (t < 0 || t_prime > M_ )
    throw std::invalid_argument("visit_counts: time out of range");
  if (t > t_prime) throw std::invalid_argument("visit_counts: t must be <= t'");
  std::vector<std::uint64_t> counts(frontier_size(t_prime), 1);
  for (int s = t_prime; s > t; --s) {
    std::vector<std::uint64_t> down(frontier_size(s - 1), 0);
    const auto& par = parents_[static_cast<std::size_t>(s)];
    for (std::size_t i = 0; i < counts.size(); ++i) down[par[i]] += counts[i];
    counts = std::move(down);
  }
  return counts;
}

PathFamily::BoundsReport PathFamily::verify_counting_bounds(int t_prime) const {
  if (t_prime < 1 || t_prime > M_)
    throw std::invalid_argument("verify_counting_bounds: t' out of range");
  BoundsReport report;
  report.t_prime = t_prime;
  const std::uint64_t s_tp = frontier_size(t_prime);
  const U128 rhs1_base = upow(static_cast<std::uint64_t>(4 + 4 * d_), d_) *
                         upow(static_cast<std::uint64_t>(t_prime), d_);
  const U128 rhs3_base = upow(static_cast<std::uint64_t>(4 * d_), 2 * d_) * s_tp;

  std::vector<std::uint64_t> counts(s_tp, 1);
  for (int t = t_prime; t >= 0; --t) {
    const std::uint64_t s_t = frontier_size(t);
    // (2): |S_t| (2d)^d >= (t+d)^d
    ++report.checked;
    if (upow(s_t, 1) * upow(static_cast<std::uint64_t>(2 * d_), d_) <
        upow(static_cast<std::uint64_t>(t + d_), d_)) {
      Violation v{2, t, {}};
      report.violations.push_back(std::move(v));
    }
    const U128 weight = upow(static_cast<std::uint64_t>(1 + t), d_);
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const U128 lhs = U128(counts[i]) * weight;
      ++report.checked;
      if (lhs > rhs1_base) {
        auto pt = frontier_point(t, i);
        report.violations.push_back(Violation{1, t, {pt.begin(), pt.end()}});
      }
      ++report.checked;
      if (lhs > rhs3_base) {
        auto pt = frontier_point(t, i);
        report.violations.push_back(Violation{3, t, {pt.begin(), pt.end()}});
      }
    }
    if (t > 0) {
      std::vector<std::uint64_t> down(frontier_size(t - 1), 0);
      const auto& par = parents_[static_cast<std::size_t>(t)];
      for (std::size_t i = 0; i < counts.size(); ++i) down[par[i]] += counts[i];
      counts = std::move(down);
    }
  }
  return report;
}

std::vector<LatticePath> PathFamily::enumerate_paths() const {
  const std::size_t leaves = frontier_size(M_);
  if (leaves > (1u << 20))
    throw std::length_error("enumerate_paths: family too large to list");
  std::vector<LatticePath> out;
  out.reserve(leaves);
  for (std::size_t leaf = 0; leaf < leaves; ++leaf) {
    LatticePath path;
    path.dim = d_;
    path.t0 = 0;
    path.points.resize(static_cast<std::size_t>(M_ + 1) * static_cast<std::size_t>(d_));
    std::size_t idx = leaf;
    for (int t = M_; t >= 0; --t) {
      auto pt = frontier_point(t, idx);
      std::copy(pt.begin(), pt.end(),
                path.points.begin() + static_cast<std::size_t>(t) * static_cast<std::size_t>(d_));
      if (t > 0) idx = parents_[static_cast<std::size_t>(t)][idx];
    }
    out.push_back(std::move(path));
  }
  return out;
}

}  // namespace pldp
