#ifndef POLYMER_RNG_HPP
#define POLYMER_RNG_HPP

#include <cstdint>
#include <utility>

namespace pldp {

// splitmix64 finalizer; used for key derivation only.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// philox2x64-10: a counter-based generator. Each (counter, key) pair maps
// to an independent 128-bit block, so distinct lattice sites get distinct,
// order-independent draws.
struct Philox2x64 {
  static constexpr std::uint64_t kMul = 0xD2B74407B1CE6E93ull;
  static constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ull;

  static std::pair<std::uint64_t, std::uint64_t> block(std::uint64_t c0,
                                                       std::uint64_t c1,
                                                       std::uint64_t key) {
    for (int round = 0; round < 10; ++round) {
      const unsigned __int128 prod = static_cast<unsigned __int128>(kMul) * c0;
      const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
      const std::uint64_t lo = static_cast<std::uint64_t>(prod);
      c0 = hi ^ key ^ c1;
      c1 = lo;
      key += kWeyl;
    }
    return {c0, c1};
  }
};

// Uniform in the open interval (0,1); safe as input to inverse CDFs.
inline double u64_to_unit_open(std::uint64_t v) {
  return (static_cast<double>(v >> 11) + 0.5) * 0x1.0p-53;
}

// Stateless per-(seed, stream) uniform source addressed by a 128-bit counter.
class SiteRng {
 public:
  SiteRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix64(seed ^ mix64(stream))) {}

  double uniform(std::uint64_t c0, std::uint64_t c1) const {
    return u64_to_unit_open(Philox2x64::block(c0, c1, key_).first);
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

}  // namespace pldp

#endif
