#include "bsq/weights.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bsq/format.hpp"
#include "bsq/parallel.hpp"

namespace bsq {
namespace {

GridFunction power_of(const GridFunction& f, double exponent) {
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::pow(f[i], exponent);
  return GridFunction(f.depth(), std::move(out));
}

void require_r(double r) {
  if (!(r > 1.0)) throw std::invalid_argument("exponent must exceed 1, got " + fmt17(r));
}

}  // namespace

WeightFunction::WeightFunction(GridFunction base, std::vector<double> cached_r) : base_(std::move(base)) {
  for (double v : base_.values()) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("weight values must be finite and strictly positive, got " + fmt17(v));
    }
  }
  for (double r : cached_r) {
    require_r(r);
    cache_.emplace_back(r, power_of(base_, -1.0 / (r - 1.0)));
  }
}

GridFunction WeightFunction::companion(double r) const {
  require_r(r);
  for (const auto& [cached, values] : cache_) {
    if (cached == r) return values;
  }
  return power_of(base_, -1.0 / (r - 1.0));
}

WeightFunction WeightFunction::scaled(double lambda) const {
  std::vector<double> out(base_.values().begin(), base_.values().end());
  for (double& v : out) v *= lambda;
  std::vector<double> rs;
  for (const auto& entry : cache_) rs.push_back(entry.first);
  return WeightFunction(GridFunction(base_.depth(), std::move(out)), std::move(rs));
}

double HyperbolicDomain::product(const DomainPoint& p) const {
  return r == 2.0 ? p.w * p.v : p.w * std::pow(p.v, r - 1.0);
}

bool domain_contains(const HyperbolicDomain& dom, const DomainPoint& pt) {
  if (!(pt.w > 0.0) || !(pt.v > 0.0)) return false;
  const double s = dom.product(pt);
  return 1.0 <= s && s <= dom.c;
}

SegmentRange segment_range(const HyperbolicDomain& dom, const DomainPoint& p, const DomainPoint& q) {
  const double dw = q.w - p.w;
  const double dv = q.v - p.v;
  const auto at = [&](double t) { return dom.product({p.w + t * dw, p.v + t * dv}); };

  const double fp = dom.product(p);
  const double fq = dom.product(q);
  SegmentRange out{std::min(fp, fq), std::max(fp, fq), fp >= fq ? 0.0 : 1.0};

  if (dom.r == 2.0) {
    // (w0 + a t)(v0 + b t) is a quadratic with leading coefficient a b.
    const double lead = dw * dv;
    if (lead < 0.0) {
      const double t = -(p.w * dv + dw * p.v) / (2.0 * lead);
      if (t > 0.0 && t < 1.0) {
        const double value = at(t);
        if (value > out.max) out = {out.min, value, t};
      }
    }
    return out;
  }

  // Golden-section search on the log-concave profile.
  constexpr double kInvPhi = 0.6180339887498949;
  double lo = 0.0;
  double hi = 1.0;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = at(x1);
  double f2 = at(x2);
  while (hi - lo > 1e-12) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = at(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = at(x1);
    }
  }
  const double t = 0.5 * (lo + hi);
  const double value = at(t);
  if (value > out.max) out = {out.min, value, t};
  return out;
}

bool segment_in_domain(const HyperbolicDomain& dom, const DomainPoint& p, const DomainPoint& q) {
  if (!(p.w > 0.0 && p.v > 0.0 && q.w > 0.0 && q.v > 0.0)) return false;
  const SegmentRange range = segment_range(dom, p, q);
  return 1.0 <= range.min && range.max <= dom.c;
}

DomainPoint domain_point_at(const HyperbolicDomain& dom, double w, double level) {
  const double v = dom.r == 2.0 ? level / w : std::pow(level / w, 1.0 / (dom.r - 1.0));
  return {w, v};
}

DomainPoint sample_domain_point(const HyperbolicDomain& dom, CounterRng& rng) {
  const double w = rng.log_uniform(1e-3, 1e3);
  return domain_point_at(dom, w, rng.uniform(1.0, dom.c));
}

std::string ApReport::to_json() const {
  return "{\"p\": " + fmt17(p) + ", \"characteristic\": " + fmt17(characteristic) +
         ", \"witness_level\": " + std::to_string(witness.level) +
         ", \"witness_index\": " + std::to_string(witness.index) + "}";
}

ApReport dyadic_ap_characteristic(const WeightFunction& w, double p) {
  require_r(p);
  const GridFunction& base = w.base();
  const GridFunction dual = w.companion(p);
  const int depth = base.depth();

  ApReport best{p, -std::numeric_limits<double>::infinity(), {}};
  // Walk levels from the finest up; keep the coarsest/leftmost maximiser.
  std::vector<double> sw(base.values().begin(), base.values().end());
  std::vector<double> sd(dual.values().begin(), dual.values().end());
  std::vector<ApReport> per_level(static_cast<std::size_t>(depth) + 1);
  for (int level = depth; level >= 0; --level) {
    const double inv_count = std::ldexp(1.0, level - depth);
    ApReport lvl{p, -std::numeric_limits<double>::infinity(), {}};
    for (std::size_t j = 0; j < sw.size(); ++j) {
      const double avg_w = sw[j] * inv_count;
      const double avg_d = sd[j] * inv_count;
      const double value = p == 2.0 ? avg_w * avg_d : avg_w * std::pow(avg_d, p - 1.0);
      if (value > lvl.characteristic) lvl = {p, value, {level, static_cast<std::int64_t>(j)}};
    }
    per_level[static_cast<std::size_t>(level)] = lvl;
    if (level > 0) {
      const std::size_t half = sw.size() / 2;
      for (std::size_t j = 0; j < half; ++j) {
        sw[j] = sw[2 * j] + sw[2 * j + 1];
        sd[j] = sd[2 * j] + sd[2 * j + 1];
      }
      sw.resize(half);
      sd.resize(half);
    }
  }
  for (const ApReport& lvl : per_level) {
    if (lvl.characteristic > best.characteristic) best = lvl;
  }
  return best;
}

GeomLemmaResult verify_geom_lemma(double c, double r, std::uint64_t trials, std::uint64_t seed) {
  if (!(c > 1.0)) throw std::invalid_argument("geometric lemma needs c > 1");
  if (!(r > 1.0 && r <= 2.0)) throw std::invalid_argument("geometric lemma needs r in (1, 2]");
  const HyperbolicDomain inner{c, r};
  const HyperbolicDomain outer{2.0 * c, r};

  struct Partial {
    std::uint64_t trials = 0;
    std::uint64_t rejected = 0;
    double worst_ratio = 0.0;
    std::optional<GeomCounterexample> counterexample;
  };

  const auto run_chunk = [&](std::size_t begin, std::size_t end) {
    Partial part;
    for (std::size_t i = begin; i < end; ++i) {
      CounterRng rng(seed, i);
      // Draw until the midpoint is admissible. Three regimes: both points
      // free, P on the upper and Q on the lower boundary (the extremal
      // configuration), and Q a local perturbation of P.
      for (int attempt = 0; attempt < 256; ++attempt) {
        const double mode = rng.uniform();
        DomainPoint p;
        DomainPoint q;
        if (mode < 1.0 / 3.0) {
          p = sample_domain_point(inner, rng);
          q = domain_point_at(inner, p.w * std::exp(rng.uniform(-4.0, 4.0)), rng.uniform(1.0, c));
        } else if (mode < 2.0 / 3.0) {
          p = domain_point_at(inner, rng.log_uniform(1e-3, 1e3), c);
          q = domain_point_at(inner, p.w * std::exp(rng.uniform(-4.0, 4.0)), 1.0);
        } else {
          p = sample_domain_point(inner, rng);
          q = domain_point_at(inner, p.w * std::exp(rng.uniform(-0.5, 0.5)), rng.uniform(1.0, c));
        }
        if (rng.uniform() < 0.5) std::swap(p, q);
        const DomainPoint mid{0.5 * (p.w + q.w), 0.5 * (p.v + q.v)};
        if (!domain_contains(inner, mid)) {
          ++part.rejected;
          continue;
        }
        ++part.trials;
        const SegmentRange range = segment_range(outer, p, q);
        part.worst_ratio = std::max(part.worst_ratio, range.max / c);
        if (!(range.min >= 1.0 - 1e-12 && range.max <= outer.c * (1.0 + 1e-12)) && !part.counterexample) {
          part.counterexample = GeomCounterexample{i, p, q, range.max};
        }
        break;
      }
    }
    return part;
  };

  const Partial total = chunked_reduce(
      static_cast<std::size_t>(trials), 4096, Partial{}, run_chunk, [](Partial acc, Partial next) {
        acc.trials += next.trials;
        acc.rejected += next.rejected;
        acc.worst_ratio = std::max(acc.worst_ratio, next.worst_ratio);
        if (!acc.counterexample) acc.counterexample = next.counterexample;
        return acc;
      });
  return {total.trials, total.rejected, total.worst_ratio, total.counterexample};
}

std::vector<ProbePoint> cf_epsilon_probe(const WeightFunction& w, double p, std::span<const double> r_grid) {
  require_r(p);
  std::vector<ProbePoint> curve;
  curve.reserve(r_grid.size());
  for (double r : r_grid) {
    if (!(r > 1.0 && r <= p)) {
      throw std::invalid_argument("probe exponent " + fmt17(r) + " outside (1, " + fmt17(p) + "]");
    }
    curve.push_back({r, dyadic_ap_characteristic(w, r).characteristic});
  }
  return curve;
}

WeightFunction make_power_weight(double alpha, int depth) {
  if (!(alpha > -1.0)) throw std::invalid_argument("power weight needs alpha > -1, got " + fmt17(alpha));
  if (alpha == 0.0) return WeightFunction(GridFunction::constant(depth, 1.0));
  const std::size_t n = std::size_t{1} << depth;
  std::vector<double> values(n);
  const double h = std::ldexp(1.0, -depth);
  for (std::size_t j = 0; j < n; ++j) {
    const double a = static_cast<double>(j) * h;
    const double b = a + h;
    values[j] = (std::pow(b, alpha + 1.0) - std::pow(a, alpha + 1.0)) / ((alpha + 1.0) * h);
  }
  return WeightFunction(GridFunction(depth, std::move(values)));
}

WeightFunction make_step_weight(std::span<const double> levels) {
  if (levels.empty() || !std::has_single_bit(levels.size())) {
    throw std::invalid_argument("step weight needs a power-of-two number of cells");
  }
  const int depth = std::countr_zero(levels.size());
  return WeightFunction(GridFunction(depth, std::vector<double>(levels.begin(), levels.end())));
}

}  // namespace bsq
