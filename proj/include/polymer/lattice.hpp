#ifndef POLYMER_LATTICE_HPP
#define POLYMER_LATTICE_HPP

#include <cstdint>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <vector>

namespace pldp {

using Coord = std::int32_t;

inline int l1_norm(std::span<const Coord> x) {
  long n = 0;
  for (Coord c : x) n += std::abs(static_cast<long>(c));
  return static_cast<int>(n);
}

// True when a walk started at the origin can occupy x at time t:
// |x|_1 <= t and |x|_1 has the parity of t.
inline bool reachable(int t, int l1) { return l1 <= t && ((l1 ^ t) & 1) == 0; }

inline std::uint64_t zigzag32(Coord v) {
  const std::uint32_t u = static_cast<std::uint32_t>(v);
  return static_cast<std::uint64_t>((u << 1) ^ static_cast<std::uint32_t>(v >> 31));
}

// Injective packing of Z^d into 64 bits (64/d bits per coordinate).
// Keyed RNG streams address sites through this, so the same (t,x) yields
// the same value no matter which window or slice enumerates it.
inline std::uint64_t pack_point(std::span<const Coord> x) {
  const int d = static_cast<int>(x.size());
  if (d < 1 || d > 8) throw std::invalid_argument("pack_point: dim out of range");
  const int bits = 64 / d;
  const std::uint64_t limit = (d == 1) ? 0 : (1ull << bits);
  std::uint64_t packed = 0;
  for (Coord c : x) {
    const std::uint64_t z = zigzag32(c);
    if (d > 1 && z >= limit)
      throw std::out_of_range("pack_point: coordinate too large for packing");
    packed = (d == 1) ? z : ((packed << bits) | z);
  }
  return packed;
}

// Axis-aligned box [-r, r]^d (relative coordinates) with row-major indexing.
class Box {
 public:
  Box(int dim, int radius) : d_(dim), r_(radius) {
    if (dim < 1) throw std::invalid_argument("Box: dim < 1");
    if (radius < 0) throw std::invalid_argument("Box: radius < 0");
    size_ = 1;
    const std::size_t side = 2 * static_cast<std::size_t>(radius) + 1;
    for (int i = 0; i < dim; ++i) size_ *= side;
  }

  int dim() const { return d_; }
  int radius() const { return r_; }
  std::size_t size() const { return size_; }

  std::size_t index(std::span<const Coord> rel) const {
    std::size_t idx = 0;
    const std::size_t side = 2 * static_cast<std::size_t>(r_) + 1;
    for (int i = 0; i < d_; ++i) idx = idx * side + static_cast<std::size_t>(rel[i] + r_);
    return idx;
  }

  void decode(std::size_t idx, std::span<Coord> rel) const {
    const std::size_t side = 2 * static_cast<std::size_t>(r_) + 1;
    for (int i = d_ - 1; i >= 0; --i) {
      rel[i] = static_cast<Coord>(idx % side) - r_;
      idx /= side;
    }
  }

 private:
  int d_;
  int r_;
  std::size_t size_;
};

// Enumerates the cone slice L_t = {x : |x|_1 <= t, |x|_1 == t mod 2},
// optionally clipped to |x|_1 <= corridor. Points come out in box order.
inline std::vector<Coord> cone_slice_points(int dim, int t, int corridor = -1) {
  if (t < 0) throw std::invalid_argument("cone_slice_points: t < 0");
  const int r = (corridor >= 0 && corridor < t) ? corridor : t;
  Box box(dim, r);
  std::vector<Coord> pts;
  std::vector<Coord> rel(dim);
  for (std::size_t i = 0; i < box.size(); ++i) {
    box.decode(i, rel);
    const int n = l1_norm(rel);
    if (n > r || !reachable(t, n)) continue;
    pts.insert(pts.end(), rel.begin(), rel.end());
  }
  return pts;
}

inline std::size_t cone_slice_size(int dim, int t, int corridor = -1) {
  return cone_slice_points(dim, t, corridor).size() / static_cast<std::size_t>(dim);
}

}  // namespace pldp

#endif
