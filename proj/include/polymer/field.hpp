#ifndef POLYMER_FIELD_HPP
#define POLYMER_FIELD_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "polymer/lattice.hpp"
#include "polymer/rng.hpp"
#include "polymer/tail_model.hpp"

namespace pldp {

// Space-time environment V(t,x). Implementations must be pure: the same
// (t,x) always returns the same value.
class Field {
 public:
  virtual ~Field() = default;
  virtual int dim() const = 0;
  virtual double at(int t, std::span<const Coord> x) const = 0;
};

// IID field realized on demand from a counter-based stream keyed on
// (seed, stream); the site address is (t, packed coordinates), so any
// window over the same realization sees the same values.
class GeneratedField final : public Field {
 public:
  GeneratedField(Distribution dist, std::uint64_t seed, std::uint64_t stream)
      : dist_(std::move(dist)), rng_(seed, stream) {}

  int dim() const override { return dist_.model().dim(); }
  double at(int t, std::span<const Coord> x) const override {
    return dist_.value_from_uniform(site_uniform(t, x));
  }

  double site_uniform(int t, std::span<const Coord> x) const {
    return rng_.uniform(pack_point(x), static_cast<std::uint64_t>(t));
  }
  const Distribution& distribution() const { return dist_; }

 private:
  Distribution dist_;
  SiteRng rng_;
};

// Realization of the Prop.-2.8-style cone event: on the reachable cone at
// times t < M the field is drawn from the conditional law {-V >= theta_t};
// everywhere else it matches the unconditioned field stream.
class ConeConditionedField final : public Field {
 public:
  ConeConditionedField(Distribution dist, std::uint64_t seed,
                       std::uint64_t stream, std::vector<double> thresholds)
      : base_(std::move(dist), seed, stream), thresholds_(std::move(thresholds)) {}

  int dim() const override { return base_.dim(); }
  double at(int t, std::span<const Coord> x) const override {
    if (t >= 0 && t < static_cast<int>(thresholds_.size()) &&
        reachable(t, l1_norm(x))) {
      const double u = base_.site_uniform(t, x);
      return -base_.distribution().neg_value_from_uniform_conditional(
          thresholds_[static_cast<std::size_t>(t)], u);
    }
    return base_.at(t, x);
  }

 private:
  GeneratedField base_;
  std::vector<double> thresholds_;
};

// Explicit field over a finite site set; missing sites are an error.
class MapField final : public Field {
 public:
  explicit MapField(int dim) : d_(dim) {}

  int dim() const override { return d_; }
  void set(int t, std::span<const Coord> x, double v);
  double at(int t, std::span<const Coord> x) const override;
  std::size_t size() const { return values_.size(); }

 private:
  struct Key {
    std::int64_t t;
    std::uint64_t packed;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return static_cast<std::size_t>(
          mix64(k.packed ^ mix64(static_cast<std::uint64_t>(k.t))));
    }
  };
  int d_;
  std::unordered_map<Key, double, KeyHash> values_;
};

// Text dump of a realized field over the cone slices t < T.
// Header carries dim, horizon, seed/stream and the model hash; rows are
// "t x1 .. xd value" with full round-trip precision.
void dump_field(std::ostream& os, const GeneratedField& field, int T,
                std::uint64_t seed, std::uint64_t stream);
MapField load_field(std::istream& is);

}  // namespace pldp

#endif
