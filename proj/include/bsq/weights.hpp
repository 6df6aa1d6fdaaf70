#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bsq/dyadic.hpp"
#include "bsq/rng.hpp"

namespace bsq {

/// A strictly positive dyadic weight w with cached companions w^(-1/(r-1)).
class WeightFunction {
 public:
  /// Throws std::invalid_argument if any value is not strictly positive.
  explicit WeightFunction(GridFunction base, std::vector<double> cached_r = {2.0});

  const GridFunction& base() const noexcept { return base_; }
  int depth() const noexcept { return base_.depth(); }

  /// Pointwise w^(-1/(r-1)); served from the cache when r was requested up front.
  GridFunction companion(double r) const;

  /// The same weight scaled by lambda > 0.
  WeightFunction scaled(double lambda) const;

 private:
  GridFunction base_;
  std::vector<std::pair<double, GridFunction>> cache_;
};

/// A point (w, v) of the positive quadrant.
struct DomainPoint {
  double w = 1.0;
  double v = 1.0;
};

/// Omega_c^r = {(w, v) : 1 <= w v^(r-1) <= c}.
struct HyperbolicDomain {
  double c = 2.0;
  double r = 2.0;

  double product(const DomainPoint& p) const;
};

bool domain_contains(const HyperbolicDomain& dom, const DomainPoint& pt);

/// Range of t -> w_t v_t^(r-1) along the segment from p to q.
struct SegmentRange {
  double min = 0.0;
  double max = 0.0;
  double argmax = 0.0;  ///< segment parameter in [0, 1]
};

/// The map is log-concave along segments of the positive quadrant, so its
/// minimum sits at an endpoint and it has a single interior maximum. The
/// maximum is found in closed form for r = 2 and by golden-section search
/// (tolerance 1e-12 in t) otherwise.
SegmentRange segment_range(const HyperbolicDomain& dom, const DomainPoint& p, const DomainPoint& q);

/// True iff the whole segment pq stays inside dom.
bool segment_in_domain(const HyperbolicDomain& dom, const DomainPoint& p, const DomainPoint& q);

/// w log-uniform on [1e-3, 1e3], then v chosen so that w v^(r-1) is uniform on [1, c].
DomainPoint sample_domain_point(const HyperbolicDomain& dom, CounterRng& rng);
/// Same w distribution, with w v^(r-1) pinned to `level`.
DomainPoint domain_point_at(const HyperbolicDomain& dom, double w, double level);

struct ApReport {
  double p = 2.0;
  double characteristic = 1.0;  ///< dyadic characteristic
  DyadicInterval witness;

  std::string to_json() const;
};

/// Dyadic A_p characteristic: max over all dyadic I of <w>_I <w^(-1/(p-1))>_I^(p-1).
/// Ties resolve to the coarsest, then leftmost interval.
/// Throws std::invalid_argument for p <= 1.
ApReport dyadic_ap_characteristic(const WeightFunction& w, double p);

struct GeomCounterexample {
  std::uint64_t trial = 0;
  DomainPoint p;
  DomainPoint q;
  double segment_max = 0.0;
};

struct GeomLemmaResult {
  std::uint64_t trials = 0;     ///< admissible (P, Q) pairs examined
  std::uint64_t rejected = 0;   ///< draws whose midpoint left Omega_c^r
  double worst_ratio = 0.0;     ///< largest segment max / c seen (lemma: <= 2)
  std::optional<GeomCounterexample> counterexample;
};

/// Samples P, Q with P, Q and (P + Q)/2 in Omega_c^r and checks that the
/// segment PQ stays in Omega_{2c}^r. Reports the lowest-index failure, if any.
GeomLemmaResult verify_geom_lemma(double c, double r, std::uint64_t trials, std::uint64_t seed);

struct ProbePoint {
  double r = 2.0;
  double characteristic = 1.0;
};

/// r -> dyadic [w]_{A_r} over r_grid; every r must lie in (1, p].
std::vector<ProbePoint> cf_epsilon_probe(const WeightFunction& w, double p, std::span<const double> r_grid);

/// Cell averages of x^alpha on the depth-N grid; alpha > -1.
WeightFunction make_power_weight(double alpha, int depth);
/// Piecewise-constant weight with the given cell values (size a power of two).
WeightFunction make_step_weight(std::span<const double> levels);

}  // namespace bsq
