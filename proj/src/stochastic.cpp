#include "bsq/stochastic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

#include "bsq/format.hpp"
#include "bsq/parallel.hpp"
#include "bsq/rng.hpp"

namespace bsq {

void PathConfig::validate() const {
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("horizon T must be positive, got " + fmt17(T));
  if (steps < 2 || !std::has_single_bit(steps)) {
    throw std::invalid_argument("steps must be a power of two >= 2, got " + std::to_string(steps));
  }
  if (steps > (std::uint64_t{1} << 24)) throw std::invalid_argument("steps above 2^24 are not supported");
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
}

PathEnsemble::PathEnsemble(PathConfig cfg) : cfg_(cfg) { cfg_.validate(); }

std::vector<double> PathEnsemble::path(std::uint64_t index) const {
  const std::size_t n = static_cast<std::size_t>(cfg_.steps);
  std::vector<double> b(n + 1, 0.0);
  CounterRng rng(cfg_.seed, index);
  b[n] = std::sqrt(cfg_.T) * rng.normal();
  // Fill midpoints level by level; the conditional variance of a midpoint
  // given both ends of an interval of length L is L / 4.
  for (std::size_t span = n; span >= 2; span /= 2) {
    const double sd = std::sqrt(cfg_.T * static_cast<double>(span) / static_cast<double>(n) / 4.0);
    for (std::size_t left = 0; left < n; left += span) {
      const std::size_t right = left + span;
      b[left + span / 2] = 0.5 * (b[left] + b[right]) + sd * rng.normal();
    }
  }
  return b;
}

std::vector<double> PathEnsemble::increments(std::uint64_t index) const {
  const std::vector<double> b = path(index);
  std::vector<double> db(b.size() - 1);
  for (std::size_t k = 0; k < db.size(); ++k) db[k] = b[k + 1] - b[k];
  return db;
}

PathEnsemble simulate_paths(const PathConfig& cfg) { return PathEnsemble(cfg); }

double ExpWeightSpec::a2_characteristic(double T) const { return std::exp(lambda * lambda * T); }

double ExpWeightSpec::ar_characteristic(double r, double T) const {
  if (!(r > 1.0)) throw std::invalid_argument("exponent must exceed 1, got " + fmt17(r));
  return std::exp(lambda * lambda * T * r / (2.0 * (r - 1.0)));
}

namespace {

WeightTrajectory weight_along(const ExpWeightSpec& spec, const std::vector<double>& b, double T, double dt) {
  const double l = spec.lambda;
  WeightTrajectory out;
  out.y.resize(b.size());
  out.z.resize(b.size());
  for (std::size_t k = 0; k < b.size(); ++k) {
    const double t = static_cast<double>(k) * dt;
    out.y[k] = std::exp(l * b[k] - 0.5 * l * l * t);
    out.z[k] = std::exp(-l * b[k] + 0.5 * l * l * t + l * l * (T - t));
  }
  return out;
}

TransformedPath transform_along(const std::vector<double>& b, Integrand rule) {
  TransformedPath out;
  for (std::size_t k = 0; k + 1 < b.size(); ++k) {
    double h = 0.0;
    switch (rule) {
      case Integrand::zero: h = 0.0; break;
      case Integrand::one: h = 1.0; break;
      case Integrand::sign_b: h = b[k] >= 0.0 ? 1.0 : -1.0; break;
      case Integrand::alternating: h = (k % 2 == 0) ? 1.0 : -1.0; break;
      case Integrand::sign_next_increment: break;
    }
    const double db = b[k + 1] - b[k];
    out.x_T += h * db;
    out.bracket_T += h * h * db * db;
  }
  return out;
}

}  // namespace

WeightTrajectory exp_weight(const ExpWeightSpec& spec, const PathEnsemble& e, std::uint64_t index) {
  return weight_along(spec, e.path(index), e.config().T, e.config().dt());
}

double nested_ar_characteristic(const ExpWeightSpec& spec, double T, double r, std::uint64_t outer,
                                std::uint64_t inner, std::uint64_t seed) {
  if (!(r > 1.0)) throw std::invalid_argument("exponent must exceed 1, got " + fmt17(r));
  if (outer == 0 || inner == 0) throw std::invalid_argument("nested estimate needs samples");
  const double l = spec.lambda;
  const double q = 1.0 / (r - 1.0);
  double best = 0.0;
  for (int quarter = 0; quarter < 4; ++quarter) {
    const double t = T * quarter / 4.0;
    double sum = 0.0;
    for (std::uint64_t i = 0; i < outer; ++i) {
      CounterRng rng(seed + static_cast<std::uint64_t>(quarter), i);
      const double bt = std::sqrt(t) * rng.normal();
      const double yt = std::exp(l * bt - 0.5 * l * l * t);
      double cond = 0.0;
      for (std::uint64_t j = 0; j < inner; ++j) {
        const double bT = bt + std::sqrt(T - t) * rng.normal();
        cond += std::exp(-q * (l * bT - 0.5 * l * l * T));
      }
      cond /= static_cast<double>(inner);
      sum += yt * std::pow(cond, r - 1.0);
    }
    best = std::max(best, sum / static_cast<double>(outer));
  }
  return best;
}

Integrand parse_integrand(const std::string& name) {
  if (name == "zero") return Integrand::zero;
  if (name == "one") return Integrand::one;
  if (name == "sign_b") return Integrand::sign_b;
  if (name == "alternating") return Integrand::alternating;
  if (name == "sign_next_increment") return Integrand::sign_next_increment;
  throw std::invalid_argument("unknown integrand '" + name + "'");
}

std::string integrand_name(Integrand rule) {
  switch (rule) {
    case Integrand::zero: return "zero";
    case Integrand::one: return "one";
    case Integrand::sign_b: return "sign_b";
    case Integrand::alternating: return "alternating";
    case Integrand::sign_next_increment: return "sign_next_increment";
  }
  return "unknown";
}

bool is_predictable(Integrand rule) { return rule != Integrand::sign_next_increment; }

TransformedPath transform(const PathEnsemble& e, std::uint64_t index, Integrand rule) {
  if (!is_predictable(rule)) {
    throw std::invalid_argument("integrand '" + integrand_name(rule) + "' is not predictable");
  }
  return transform_along(e.path(index), rule);
}

namespace {

constexpr int kChecks = 4;

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double v) {
    sum += v;
    sum_sq += v * v;
  }
  Moments& operator+=(const Moments& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    return *this;
  }
  Estimate estimate(double n) const {
    const double mean = sum / n;
    const double var = n > 1.0 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
    return {mean, std::sqrt(var / n)};
  }
};

struct SimPartial {
  Moments x2;
  Moments qv;
  Moments y;
  Moments diff[kChecks];
  double max_product = 0.0;
};

}  // namespace

SimReport verify_contmart(const PathConfig& cfg, const ExpWeightSpec& spec, Integrand rule) {
  if (!is_predictable(rule)) throw std::invalid_argument("integrand '" + integrand_name(rule) + "' is not predictable");
  const PathEnsemble ens(cfg);
  const double T = cfg.T;
  const double l = spec.lambda;
  const double c = spec.a2_characteristic(T);

  double best_r = 2.0;
  double best_ar = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 19; ++i) {
    const double r = 1.0 + 0.05 * i;
    const double k = r / (2.0 - r) * spec.ar_characteristic(r, T);
    if (k < best_ar) {
      best_ar = k;
      best_r = r;
    }
  }

  struct Spec {
    const char* name;
    double constant;
    double r;
    bool bracket_on_left;
  };
  const Spec specs[kChecks] = {
      {"x2_le_80c_bracket", 80.0 * c, 2.0, false},
      {"bracket_le_32c2_x2", 32.0 * c * c, 2.0, true},
      {"bracket_le_ar_family_x2", best_ar, best_r, true},
      {"bracket_le_2^3.5c2_x2", std::pow(2.0, 3.5) * c * c, 2.0, true},
  };

  const auto run_chunk = [&](std::size_t begin, std::size_t end) {
    SimPartial part;
    for (std::size_t i = begin; i < end; ++i) {
      const std::vector<double> b = ens.path(i);
      const TransformedPath tp = transform_along(b, rule);
      const WeightTrajectory wt = weight_along(spec, b, T, cfg.dt());
      const double yT = wt.y.back();
      const double x2 = tp.x_T * tp.x_T;
      part.x2.add(x2 * yT);
      part.qv.add(tp.bracket_T * yT);
      part.y.add(yT);
      for (int k = 0; k < kChecks; ++k) {
        const double lhs = specs[k].bracket_on_left ? tp.bracket_T : x2;
        const double rhs = specs[k].bracket_on_left ? x2 : tp.bracket_T;
        part.diff[k].add((lhs - specs[k].constant * rhs) * yT);
      }
      for (std::size_t t = 0; t < wt.y.size(); ++t) part.max_product = std::max(part.max_product, wt.y[t] * wt.z[t]);
    }
    return part;
  };
  const SimPartial total = chunked_reduce(static_cast<std::size_t>(cfg.trials), 1024, SimPartial{}, run_chunk,
                                          [](SimPartial acc, const SimPartial& next) {
                                            acc.x2 += next.x2;
                                            acc.qv += next.qv;
                                            acc.y += next.y;
                                            for (int k = 0; k < kChecks; ++k) acc.diff[k] += next.diff[k];
                                            acc.max_product = std::max(acc.max_product, next.max_product);
                                            return acc;
                                          });

  const double n = static_cast<double>(cfg.trials);
  SimReport rep;
  rep.cfg = cfg;
  rep.lambda = l;
  rep.integrand = rule;
  rep.c_mart = c;
  rep.e_q_x2 = total.x2.estimate(n);
  rep.e_q_qv = total.qv.estimate(n);
  rep.e_p_y = total.y.estimate(n);
  rep.max_product_ratio = total.max_product / c;
  for (int k = 0; k < kChecks; ++k) {
    SimCheck chk;
    chk.name = specs[k].name;
    chk.constant = specs[k].constant;
    chk.r = specs[k].r;
    const Estimate& lhs = specs[k].bracket_on_left ? rep.e_q_qv : rep.e_q_x2;
    const Estimate& rhs = specs[k].bracket_on_left ? rep.e_q_x2 : rep.e_q_qv;
    chk.lhs = lhs.mean;
    chk.rhs = specs[k].constant * rhs.mean;
    const Estimate d = total.diff[k].estimate(n);
    chk.sigma = d.stderr_;
    chk.pass = d.mean <= 3.0 * d.stderr_;
    rep.pass = rep.pass && chk.pass;
    rep.checks.push_back(chk);
  }
  rep.pass = rep.pass && rep.max_product_ratio <= 1.0 + 1e-12;
  return rep;
}

std::string SimReport::to_json() const {
  nlohmann::ordered_json j;
  j["lambda"] = lambda;
  j["T"] = cfg.T;
  j["steps"] = cfg.steps;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["integrand"] = integrand_name(integrand);
  j["c_mart"] = c_mart;
  j["E_Q_X2"] = e_q_x2.mean;
  j["E_Q_X2_se"] = e_q_x2.stderr_;
  j["E_Q_QV"] = e_q_qv.mean;
  j["E_Q_QV_se"] = e_q_qv.stderr_;
  j["E_P_Y"] = e_p_y.mean;
  j["E_P_Y_se"] = e_p_y.stderr_;
  j["max_product_ratio"] = max_product_ratio;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const SimCheck& chk : checks) {
    nlohmann::ordered_json cj;
    cj["name"] = chk.name;
    cj["lhs"] = chk.lhs;
    cj["rhs"] = chk.rhs;
    cj["sigma"] = chk.sigma;
    cj["constant"] = chk.constant;
    cj["r"] = chk.r;
    cj["pass"] = chk.pass;
    arr.push_back(cj);
  }
  j["checks"] = arr;
  j["pass"] = pass;
  return j.dump();
}

}  // namespace bsq
