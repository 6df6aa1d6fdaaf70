#include "bsq/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

#include "bsq/format.hpp"
#include "bsq/parallel.hpp"
#include "bsq/rng.hpp"

namespace bsq {
namespace {

// levels[n] = cell averages at level n, built bottom-up.
std::vector<std::vector<double>> average_pyramid(const GridFunction& g) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(g.depth()) + 1);
  out[g.depth()].assign(g.values().begin(), g.values().end());
  for (int n = g.depth() - 1; n >= 0; --n) {
    const auto& fine = out[n + 1];
    auto& coarse = out[n];
    coarse.resize(fine.size() / 2);
    for (std::size_t j = 0; j < coarse.size(); ++j) coarse[j] = 0.5 * (fine[2 * j] + fine[2 * j + 1]);
  }
  return out;
}

StatePoint state_at(const LevelState& lvl, std::size_t j) { return {lvl.x[j], lvl.y[j], lvl.w[j], lvl.v[j]}; }

double bellman_exponent(const BellmanKind& kind) { return kind.family == BellmanFamily::ar ? kind.r : 2.0; }

}  // namespace

DyadicSequences build_sequences(const GridFunction& f, const WeightFunction& w, double r) {
  if (f.depth() != w.depth()) {
    throw std::invalid_argument("function depth " + std::to_string(f.depth()) + " differs from weight depth " +
                                std::to_string(w.depth()));
  }
  if (!(r > 1.0 && r <= 2.0)) throw std::invalid_argument("exponent must lie in (1, 2], got " + fmt17(r));
  const int depth = f.depth();
  auto xs = average_pyramid(f);
  auto ws = average_pyramid(w.base());
  auto vs = average_pyramid(w.companion(r));

  DyadicSequences seq;
  seq.depth = depth;
  seq.r = r;
  seq.levels.resize(static_cast<std::size_t>(depth) + 1);
  for (int n = 0; n <= depth; ++n) {
    LevelState& lvl = seq.levels[n];
    lvl.x = std::move(xs[n]);
    lvl.w = std::move(ws[n]);
    lvl.v = std::move(vs[n]);
    lvl.y.resize(lvl.x.size());
  }
  seq.levels[0].y[0] = seq.levels[0].x[0] * seq.levels[0].x[0];
  for (int n = 0; n < depth; ++n) {
    const LevelState& parent = seq.levels[n];
    LevelState& child = seq.levels[n + 1];
    for (std::size_t j = 0; j < parent.x.size(); ++j) {
      const double a = seq.step(n, j);
      child.y[2 * j] = child.y[2 * j + 1] = parent.y[j] + a * a;
    }
  }
  return seq;
}

InductionTrace verify_monotonicity(const BellmanKind& kind, const GridFunction& f, const WeightFunction& w,
                                   double slack) {
  const double r = bellman_exponent(kind);
  const double characteristic = dyadic_ap_characteristic(w, r).characteristic;
  if (kind.c < 2.0 * characteristic * (1.0 - 1e-12)) {
    throw std::invalid_argument("Bellman parameter c = " + fmt17(kind.c) + " is below twice the characteristic " +
                                fmt17(characteristic));
  }
  const DyadicSequences seq = build_sequences(f, w, r);

  InductionTrace trace;
  trace.kind = kind;
  trace.characteristic = characteristic;
  trace.integrals.resize(static_cast<std::size_t>(seq.depth) + 1);
  std::vector<double> scales(trace.integrals.size());
  std::vector<std::vector<double>> values(trace.integrals.size());
  for (int n = 0; n <= seq.depth; ++n) {
    const LevelState& lvl = seq.levels[n];
    const double cell = std::ldexp(1.0, -n);
    values[n].resize(lvl.x.size());
    double sum = 0.0;
    double scale = 0.0;
    for (std::size_t j = 0; j < lvl.x.size(); ++j) {
      const StatePoint s = state_at(lvl, j);
      values[n][j] = eval(kind, s);
      sum += values[n][j];
      scale += eval_magnitude(kind, s);
    }
    trace.integrals[n] = sum * cell;
    scales[n] = scale * cell;
  }

  for (int n = 0; n < seq.depth; ++n) {
    const double rise = trace.integrals[n + 1] - trace.integrals[n];
    const double scale = std::max(scales[n], scales[n + 1]);
    const double scaled = scale > 0.0 ? rise / scale : rise;
    trace.worst_step = std::max(trace.worst_step, scaled);
    if (scaled > slack) trace.pass = false;

    if (trace.first_violation) continue;
    const LevelState& parent = seq.levels[n];
    const LevelState& child = seq.levels[n + 1];
    for (std::size_t j = 0; j < parent.x.size(); ++j) {
      const double defect = values[n][j] - 0.5 * (values[n + 1][2 * j] + values[n + 1][2 * j + 1]);
      const double atom_scale = eval_magnitude(kind, state_at(parent, j)) +
                                0.5 * (eval_magnitude(kind, state_at(child, 2 * j)) +
                                       eval_magnitude(kind, state_at(child, 2 * j + 1)));
      const double scaled_defect = atom_scale > 0.0 ? defect / atom_scale : defect;
      if (scaled_defect < -slack) {
        trace.first_violation = AtomViolation{n,
                                              static_cast<std::int64_t>(j),
                                              state_at(parent, j),
                                              seq.step(n, j),
                                              child.w[2 * j + 1] - parent.w[j],
                                              child.v[2 * j + 1] - parent.v[j],
                                              scaled_defect};
        trace.pass = false;
        break;
      }
    }
  }
  if (trace.integrals[0] > slack * scales[0]) trace.pass = false;
  return trace;
}

double final_level_majorant(const BellmanKind& kind, const GridFunction& f, const WeightFunction& w) {
  const DyadicSequences seq = build_sequences(f, w, bellman_exponent(kind));
  const LevelState& last = seq.levels.back();
  double sum = 0.0;
  for (std::size_t j = 0; j < last.x.size(); ++j) sum += lower_majorant(kind, state_at(last, j));
  return sum * std::ldexp(1.0, -seq.depth);
}

Inequality Inequality::upper_ar(double r) {
  if (!(r > 1.0 && r < 2.0)) throw std::invalid_argument("upper_ar needs r in (1, 2), got " + fmt17(r));
  return {InequalityId::upper_ar, r};
}

double Inequality::constant() const {
  switch (id) {
    case InequalityId::lower160: return 160.0;
    case InequalityId::upper128: return 128.0;
    case InequalityId::upper_ar: return 2.0 * r / (2.0 - r);
  }
  return 0.0;
}

std::string Inequality::name() const {
  switch (id) {
    case InequalityId::lower160: return "lower160";
    case InequalityId::upper128: return "upper128";
    case InequalityId::upper_ar: return "upper_ar";
  }
  return "unknown";
}

Inequality Inequality::parse(const std::string& name, double r) {
  if (name == "lower160") return lower160();
  if (name == "upper128") return upper128();
  if (name == "upper_ar") return upper_ar(r);
  throw std::invalid_argument("unknown inequality '" + name + "' (expected lower160, upper128 or upper_ar)");
}

namespace {

struct Sides {
  double lhs;
  double rhs_without_constant;
  double characteristic;
};

Sides both_sides(const GridFunction& f, const WeightFunction& w, const Inequality& which) {
  if (f.depth() != w.depth()) throw std::invalid_argument("function and weight depths differ");
  const double characteristic = dyadic_ap_characteristic(w, which.exponent()).characteristic;
  const double norm_f = f.weighted_norm2_squared(w.base());
  const double norm_s = square_function(f).weighted_norm2_squared(w.base());
  switch (which.id) {
    case InequalityId::lower160: return {norm_f, characteristic * norm_s, characteristic};
    case InequalityId::upper128: return {norm_s, characteristic * characteristic * norm_f, characteristic};
    case InequalityId::upper_ar: return {norm_s, characteristic * norm_f, characteristic};
  }
  return {0.0, 0.0, characteristic};
}

}  // namespace

VerificationOutcome verify_inequality(const GridFunction& f, const WeightFunction& w, const Inequality& which) {
  const Sides s = both_sides(f, w, which);
  VerificationOutcome out;
  out.lhs = s.lhs;
  out.constant_used = which.constant();
  out.rhs = out.constant_used * s.rhs_without_constant;
  out.characteristic = s.characteristic;
  out.pass = out.lhs <= out.rhs * (1.0 + 1e-12);
  return out;
}

double observed_ratio(const GridFunction& f, const WeightFunction& w, const Inequality& which) {
  const Sides s = both_sides(f, w, which);
  if (s.rhs_without_constant == 0.0) return s.lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return s.lhs / s.rhs_without_constant;
}

std::string verification_json(const Inequality& which, int depth, const VerificationOutcome& out,
                              const std::vector<double>& trace) {
  nlohmann::ordered_json j;
  j["which"] = which.name();
  if (which.id == InequalityId::upper_ar) j["r"] = which.r;
  j["depth"] = depth;
  j["characteristic"] = out.characteristic;
  j["constant"] = out.constant_used;
  j["lhs"] = out.lhs;
  j["rhs"] = out.rhs;
  j["pass"] = out.pass;
  j["trace"] = trace;
  return j.dump();
}

std::string outcomes_json(const std::vector<NamedOutcome>& outcomes) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const NamedOutcome& o : outcomes) {
    nlohmann::ordered_json j;
    j["name"] = o.name;
    j["lhs"] = o.outcome.lhs;
    j["rhs"] = o.outcome.rhs;
    j["constant"] = o.outcome.constant_used;
    j["characteristic"] = o.outcome.characteristic;
    j["pass"] = o.outcome.pass;
    arr.push_back(j);
  }
  return arr.dump();
}

RandomInstance random_instance(int depth, std::uint64_t seed, std::uint64_t index, double max_characteristic) {
  CounterRng rng(seed, index);
  // f: random Haar expansion with a random decay rate across levels.
  HaarCoefficients coeffs = HaarCoefficients::zeros(depth);
  coeffs.mean = rng.normal();
  const double decay = rng.uniform(-0.5, 1.5);
  for (int k = 0; k < depth; ++k) {
    const double amp = std::exp2(-0.5 * decay * k);
    for (double& a : coeffs.detail[k]) a = amp * rng.normal();
  }
  GridFunction f = haar_synthesize(coeffs, depth);

  // log w: a dyadic random walk with a random step size.
  const double sigma = rng.uniform(0.0, 1.2);
  std::vector<double> logw{0.0};
  for (int k = 0; k < depth; ++k) {
    std::vector<double> next(logw.size() * 2);
    for (std::size_t j = 0; j < logw.size(); ++j) {
      const double step = sigma * rng.normal();
      next[2 * j] = logw[j] + step;
      next[2 * j + 1] = logw[j] - step;
    }
    logw = std::move(next);
  }
  for (double shrink = 1.0;; shrink *= 0.5) {
    std::vector<double> values(logw.size());
    for (std::size_t j = 0; j < values.size(); ++j) values[j] = std::exp(shrink * logw[j]);
    GridFunction w(depth, std::move(values));
    if (dyadic_ap_characteristic(WeightFunction(w), 2.0).characteristic <= max_characteristic) {
      return {std::move(f), std::move(w)};
    }
  }
}

HarnessReport run_inequality_harness(const Inequality& which, int max_depth, std::uint64_t instances,
                                     std::uint64_t seed) {
  if (max_depth < 0 || max_depth > kMaxDepth) throw std::invalid_argument("depth out of range");
  const auto run_chunk = [&](std::size_t begin, std::size_t end) {
    HarnessReport part;
    for (std::size_t i = begin; i < end; ++i) {
      const int depth = max_depth == 0 ? 0 : 1 + static_cast<int>(i % static_cast<std::size_t>(max_depth));
      const RandomInstance inst = random_instance(depth, seed, i);
      const WeightFunction w(inst.w, {2.0, which.exponent()});
      const VerificationOutcome out = verify_inequality(inst.f, w, which);
      ++part.instances;
      if (!out.pass) ++part.failures;
      const double ratio = out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
      if (ratio > part.worst_ratio || part.instances == 1) {
        part.worst_ratio = ratio;
        part.worst_index = i;
      }
      part.max_characteristic = std::max(part.max_characteristic, out.characteristic);
    }
    return part;
  };
  return chunked_reduce(static_cast<std::size_t>(instances), 16, HarnessReport{}, run_chunk,
                        [](HarnessReport acc, HarnessReport next) {
                          if (next.instances > 0 && (acc.instances == 0 || next.worst_ratio > acc.worst_ratio)) {
                            acc.worst_ratio = next.worst_ratio;
                            acc.worst_index = next.worst_index;
                          }
                          acc.instances += next.instances;
                          acc.failures += next.failures;
                          acc.max_characteristic = std::max(acc.max_characteristic, next.max_characteristic);
                          return acc;
                        });
}

ExtremizerResult extremizer_search(const Inequality& which, int depth, std::uint64_t budget, std::uint64_t seed,
                                   const std::optional<GridFunction>& fixed_weight) {
  if (budget == 0) throw std::invalid_argument("extremizer search needs a positive budget");
  if (fixed_weight && fixed_weight->depth() != depth) throw std::invalid_argument("fixed weight has the wrong depth");

  const RandomInstance start = random_instance(depth, seed, 0);
  HaarCoefficients coeffs = haar_analyze(start.f);
  std::vector<double> logw;
  if (fixed_weight) {
    (void)WeightFunction(*fixed_weight);  // validates positivity
  } else {
    for (double v : start.w.values()) logw.push_back(std::log(v));
  }
  const std::vector<double> exps = {2.0, which.exponent()};

  const auto weight_of = [&](const std::vector<double>& lw) {
    if (fixed_weight) return *fixed_weight;
    std::vector<double> values(lw.size());
    for (std::size_t j = 0; j < values.size(); ++j) values[j] = std::exp(lw[j]);
    return GridFunction(depth, std::move(values));
  };
  const auto score = [&](const HaarCoefficients& c, const GridFunction& w) {
    return observed_ratio(haar_synthesize(c, depth), WeightFunction(w, exps), which);
  };

  ExtremizerResult best;
  best.f = haar_synthesize(coeffs, depth);
  best.w = weight_of(logw);
  best.best_ratio = score(coeffs, best.w);
  best.evaluations = 1;

  double step = 1.0;
  for (std::uint64_t it = 1; it < budget; ++it) {
    CounterRng rng(seed ^ 0x5eedULL, it);
    HaarCoefficients trial_c = coeffs;
    std::vector<double> trial_w = logw;
    if (!fixed_weight && rng.uniform() < 0.5) {
      // Shift log w on one dyadic atom.
      const int level = static_cast<int>(rng.uniform() * (depth + 1));
      const std::size_t atoms = std::size_t{1} << level;
      const std::size_t j = std::min(atoms - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(atoms)));
      const std::size_t width = trial_w.size() / atoms;
      const double delta = step * rng.normal();
      for (std::size_t i = j * width; i < (j + 1) * width; ++i) trial_w[i] += delta;
    } else {
      const int level = static_cast<int>(rng.uniform() * (depth + 1)) - 1;
      if (level < 0) {
        trial_c.mean += step * rng.normal();
      } else {
        auto& row = trial_c.detail[level];
        const std::size_t j = std::min(row.size() - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(row.size())));
        row[j] += step * rng.normal();
      }
    }
    const GridFunction w = weight_of(trial_w);
    ++best.evaluations;
    if (!fixed_weight && dyadic_ap_characteristic(WeightFunction(w), 2.0).characteristic > 1e6) {
      step = std::max(1e-3, step * 0.98);
      continue;
    }
    const double ratio = score(trial_c, w);
    if (ratio > best.best_ratio) {
      best.best_ratio = ratio;
      coeffs = std::move(trial_c);
      logw = std::move(trial_w);
      best.w = w;
      step = std::min(10.0, step * 1.1);
    } else {
      step = std::max(1e-3, step * 0.98);
    }
  }
  best.f = haar_synthesize(coeffs, depth);
  return best;
}

}  // namespace bsq
