#include "bsq/bellman.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "json.hpp"

#include "bsq/format.hpp"
#include "bsq/parallel.hpp"

namespace bsq {
namespace {

constexpr double kDomainSlack = 1e-12;
constexpr std::size_t kMaxListedViolations = 16;

void require_c(double c) {
  if (!(c > 1.0) || !std::isfinite(c)) throw std::invalid_argument("Bellman parameter c must exceed 1, got " + fmt17(c));
}

void require_t(double t, double c) {
  if (!(t >= 1.0 - kDomainSlack && t <= c * (1.0 + kDomainSlack))) {
    throw std::domain_error("t = " + fmt17(t) + " outside [1, " + fmt17(c) + "]");
  }
}

// t = w v^(r-1), validated against the kind's domain.
double checked_level(const BellmanKind& kind, const StatePoint& s) {
  if (!(s.y >= 0.0)) throw std::domain_error("y must be nonnegative, got " + fmt17(s.y));
  if (!(s.w > 0.0) || !(s.v > 0.0)) throw std::domain_error("w and v must be positive");
  const double t = kind.domain().product({s.w, s.v});
  require_t(t, kind.c);
  return t;
}

// b = x^2 w h(t) with t = wv; Hessian in (x, w, v).
Sym3 product_hessian(double x, double w, double v, double h, double h1, double h2) {
  const double t = w * v;
  Sym3 m;
  m(0, 0) = 2.0 * w * h;
  m(0, 1) = m(1, 0) = 2.0 * x * (h + t * h1);
  m(0, 2) = m(2, 0) = 2.0 * x * w * w * h1;
  m(1, 1) = x * x * v * (2.0 * h1 + t * h2);
  m(1, 2) = m(2, 1) = x * x * w * (2.0 * h1 + t * h2);
  m(2, 2) = x * x * w * w * w * h2;
  return m;
}

struct SweepPartial {
  std::uint64_t samples = 0;
  double worst = -std::numeric_limits<double>::infinity();
  StatePoint worst_point;
  std::vector<Violation> violations;
  std::uint64_t violation_count = 0;
};

struct SampleOutcome {
  double statistic;
  StatePoint point;
};

// Runs `draw(index, rng)` for every sample and aggregates the statistic.
template <class Draw>
CertReport sweep(std::string check, const BellmanKind& kind, std::uint64_t samples, std::uint64_t seed, double tol,
                 Draw draw) {
  const auto run_chunk = [&](std::size_t begin, std::size_t end) {
    SweepPartial part;
    for (std::size_t i = begin; i < end; ++i) {
      CounterRng rng(seed, i);
      const SampleOutcome out = draw(static_cast<std::uint64_t>(i), rng);
      ++part.samples;
      if (out.statistic > part.worst || std::isnan(out.statistic)) {
        part.worst = std::isnan(out.statistic) ? std::numeric_limits<double>::infinity() : out.statistic;
        part.worst_point = out.point;
      }
      if (!(out.statistic <= tol)) {
        ++part.violation_count;
        if (part.violations.size() < kMaxListedViolations) part.violations.push_back({i, out.point, out.statistic});
      }
    }
    return part;
  };
  const SweepPartial total = chunked_reduce(
      static_cast<std::size_t>(samples), 4096, SweepPartial{}, run_chunk, [](SweepPartial acc, SweepPartial next) {
        acc.samples += next.samples;
        if (next.worst > acc.worst) {
          acc.worst = next.worst;
          acc.worst_point = next.worst_point;
        }
        for (const Violation& v : next.violations) {
          if (acc.violations.size() < kMaxListedViolations) acc.violations.push_back(v);
        }
        acc.violation_count += next.violation_count;
        return acc;
      });

  CertReport report;
  report.check = std::move(check);
  report.kind = kind;
  report.samples = total.samples;
  report.max_eigenvalue = total.worst;
  report.tolerance = tol;
  report.worst_point = total.worst_point;
  report.violations = total.violations;
  report.violation_count = total.violation_count;
  report.pass = total.violation_count == 0;
  return report;
}

double ratio_or_value(double value, double scale) { return scale > 0.0 ? value / scale : value; }

}  // namespace

BellmanKind BellmanKind::main(double c) {
  require_c(c);
  return {BellmanFamily::main, c, 2.0};
}

BellmanKind BellmanKind::ar(double c, double r) {
  require_c(c);
  if (!(r > 1.0 && r < 2.0)) throw std::invalid_argument("A_r Bellman function needs r in (1, 2), got " + fmt17(r));
  return {BellmanFamily::ar, c, r};
}

BellmanKind BellmanKind::alt(double c) {
  require_c(c);
  return {BellmanFamily::alt, c, 2.0};
}

BellmanKind BellmanKind::with_c(double new_c) const {
  switch (family) {
    case BellmanFamily::main: return main(new_c);
    case BellmanFamily::ar: return ar(new_c, r);
    case BellmanFamily::alt: return alt(new_c);
  }
  return *this;
}

std::string BellmanKind::name() const {
  switch (family) {
    case BellmanFamily::main: return "main";
    case BellmanFamily::ar: return "ar";
    case BellmanFamily::alt: return "alt";
  }
  return "unknown";
}

double phi(double t, double c) {
  require_t(t, c);
  return 2.0 - 1.0 / t - std::log(t) / (2.0 * c);
}

double phi_d1(double t, double c) {
  require_t(t, c);
  return (2.0 * c - t) / (2.0 * c * t * t);
}

double phi_d2(double t, double c) {
  require_t(t, c);
  return -(4.0 * c - t) / (2.0 * c * t * t * t);
}

double eval(const BellmanKind& kind, const StatePoint& s) {
  const double t = checked_level(kind, s);
  const double x2 = s.x * s.x;
  switch (kind.family) {
    case BellmanFamily::main:
      return x2 * s.w * phi(t, kind.c) - 40.0 * kind.c * s.y * s.w;
    case BellmanFamily::ar:
      return s.y * s.w - kind.ar_coefficient() * x2 * std::pow(s.v, 1.0 - kind.r);
    case BellmanFamily::alt:
      return s.y * s.w - 16.0 * kind.c * kind.c * x2 * s.w * std::pow(t - 0.5, -kind.alpha());
  }
  return 0.0;
}

double eval_magnitude(const BellmanKind& kind, const StatePoint& s) {
  const double t = checked_level(kind, s);
  const double x2 = s.x * s.x;
  switch (kind.family) {
    case BellmanFamily::main:
      return x2 * s.w * (2.0 + 1.0 / t + std::log(t) / (2.0 * kind.c)) + 40.0 * kind.c * s.y * s.w;
    case BellmanFamily::ar:
      return s.y * s.w + kind.ar_coefficient() * x2 * std::pow(s.v, 1.0 - kind.r);
    case BellmanFamily::alt:
      return s.y * s.w + 16.0 * kind.c * kind.c * x2 * s.w * std::pow(t - 0.5, -kind.alpha());
  }
  return 0.0;
}

Sym3 matrix_A(const BellmanKind& kind, const StatePoint& s) {
  const double t = checked_level(kind, s);
  const double c = kind.c;
  switch (kind.family) {
    case BellmanFamily::main: {
      Sym3 m = product_hessian(s.x, s.w, s.v, phi(t, c), phi_d1(t, c), phi_d2(t, c));
      m(0, 0) -= 80.0 * c * s.w;
      return m;
    }
    case BellmanFamily::ar: {
      // b = -K x^2 v^(1-r) does not depend on w, so the middle row vanishes.
      const double k = kind.ar_coefficient();
      const double r = kind.r;
      Sym3 m;
      m(0, 0) = -2.0 * k * std::pow(s.v, 1.0 - r) + 2.0 * s.w;
      m(0, 2) = m(2, 0) = 2.0 * k * (r - 1.0) * s.x * std::pow(s.v, -r);
      m(2, 2) = -k * r * (r - 1.0) * s.x * s.x * std::pow(s.v, -r - 1.0);
      return m;
    }
    case BellmanFamily::alt: {
      const double a = kind.alpha();
      const double u = t - 0.5;
      const double h = -std::pow(u, -a);
      const double h1 = a * std::pow(u, -a - 1.0);
      const double h2 = -a * (a + 1.0) * std::pow(u, -a - 2.0);
      Sym3 m = product_hessian(s.x, s.w, s.v, h, h1, h2);
      m(0, 0) += 2.0 * s.w / (16.0 * c * c);
      return m;
    }
  }
  return {};
}

SylvesterQuantities check_sylvester(const BellmanKind& kind, const StatePoint& s) {
  if (kind.family != BellmanFamily::main) throw std::invalid_argument("Sylvester quantities exist for the main kind only");
  const double t = checked_level(kind, s);
  const double c = kind.c;
  const double p0 = phi(t, c);
  const double p1 = phi_d1(t, c);
  const double p2 = phi_d2(t, c);
  const double mixed = 2.0 * p1 + t * p2;
  SylvesterQuantities q;
  q.corner = s.x * s.x * s.w * s.w * s.w * p2;
  q.minor_factor = 2.0 * p1 * mixed;
  q.reduced_det = 4.0 * s.w * ((2.0 * p1 * p1 - p0 * p2) * (p0 + t * p1) + 40.0 * c * p1 * mixed);
  return q;
}

std::string CertReport::to_json() const {
  nlohmann::ordered_json j;
  j["check"] = check;
  j["kind"] = kind.name();
  nlohmann::ordered_json params;
  params["c"] = kind.c;
  if (kind.family == BellmanFamily::ar) params["r"] = kind.r;
  if (kind.family == BellmanFamily::alt) params["alpha"] = kind.alpha();
  j["params"] = params;
  j["samples"] = samples;
  if (std::isfinite(max_eigenvalue)) {
    j["max_eigenvalue"] = max_eigenvalue;
  } else {
    j["max_eigenvalue"] = nullptr;
  }
  j["tolerance"] = tolerance;
  j["worst_point"] = {worst_point.x, worst_point.y, worst_point.w, worst_point.v};
  j["violation_count"] = violation_count;
  nlohmann::ordered_json listed = nlohmann::ordered_json::array();
  for (const Violation& v : violations) {
    listed.push_back({{"sample", v.sample}, {"point", {v.point.x, v.point.y, v.point.w, v.point.v}}, {"value", v.value}});
  }
  j["violations"] = listed;
  j["pass"] = pass;
  return j.dump();
}

StatePoint sample_state(const BellmanKind& kind, std::uint64_t index, CounterRng& rng) {
  const HyperbolicDomain dom = kind.domain();
  StatePoint s;
  s.x = rng.sign() * rng.log_uniform(1e-3, 10.0);
  s.y = rng.uniform() < 0.1 ? 0.0 : rng.log_uniform(1e-3, 10.0);
  const double w = rng.log_uniform(1e-3, 1e3);
  double level;
  switch (index % 10) {
    case 0: level = 1.0; break;
    case 1: level = dom.c; break;
    default: level = rng.uniform(1.0, dom.c); break;
  }
  const DomainPoint p = domain_point_at(dom, w, level);
  s.w = p.w;
  s.v = p.v;
  return s;
}

CertReport certify_nsd(const BellmanKind& kind, std::uint64_t samples, std::uint64_t seed, double tol) {
  return sweep("nsd", kind, samples, seed, tol, [&](std::uint64_t i, CounterRng& rng) {
    const StatePoint s = sample_state(kind, i, rng);
    const Sym3 m = matrix_A(kind, s);
    return SampleOutcome{eigenvalues(m)[2] / (1.0 + m.max_abs_entry()), s};
  });
}

CertReport check_majorization_initial(const BellmanKind& kind, std::uint64_t samples, std::uint64_t seed, double tol) {
  return sweep("majorization_initial", kind, samples, seed, tol, [&](std::uint64_t i, CounterRng& rng) {
    StatePoint s = sample_state(kind, i, rng);
    s.y = s.x * s.x;
    return SampleOutcome{ratio_or_value(eval(kind, s), eval_magnitude(kind, s)), s};
  });
}

double lower_majorant(const BellmanKind& kind, const StatePoint& s) {
  const double x2 = s.x * s.x;
  switch (kind.family) {
    case BellmanFamily::main: return 0.5 * s.w * (x2 - 80.0 * kind.c * s.y);
    case BellmanFamily::ar: return s.y * s.w - kind.ar_coefficient() * x2 * s.w;
    case BellmanFamily::alt: return s.y * s.w - 32.0 * kind.c * kind.c * x2 * s.w;
  }
  return 0.0;
}

CertReport check_majorization_lower(const BellmanKind& kind, std::uint64_t samples, std::uint64_t seed, double tol) {
  return sweep("majorization_lower", kind, samples, seed, tol, [&](std::uint64_t i, CounterRng& rng) {
    const StatePoint s = sample_state(kind, i, rng);
    const double scale = eval_magnitude(kind, s) + std::abs(lower_majorant(kind, s));
    return SampleOutcome{ratio_or_value(lower_majorant(kind, s) - eval(kind, s), scale), s};
  });
}

double concavity_defect(const BellmanKind& kind, const StatePoint& s, double d, double e, double f) {
  const double y = s.y + d * d;
  return 2.0 * eval(kind, s) - eval(kind, {s.x - d, y, s.w - e, s.v - f}) - eval(kind, {s.x + d, y, s.w + e, s.v + f});
}

CertReport check_concavity(const BellmanKind& kind, std::uint64_t samples, std::uint64_t seed, double tol) {
  const HyperbolicDomain dom = kind.domain();
  return sweep("concavity", kind, samples, seed, tol, [&](std::uint64_t i, CounterRng& rng) {
    const StatePoint s = sample_state(kind, i, rng);
    double e = 0.0;
    double f = 0.0;
    for (int attempt = 0; attempt < 64; ++attempt) {
      const double rho = rng.log_uniform(1e-4, 1.0);
      const double te = rho * s.w * rng.uniform(-1.0, 1.0);
      const double tf = rho * s.v * rng.uniform(-1.0, 1.0);
      if (segment_in_domain(dom, {s.w - te, s.v - tf}, {s.w + te, s.v + tf})) {
        e = te;
        f = tf;
        break;
      }
    }
    const double d = rng.sign() * rng.uniform(0.0, std::abs(s.x) + 1.0);
    const double y = s.y + d * d;
    const StatePoint lo{s.x - d, y, s.w - e, s.v - f};
    const StatePoint hi{s.x + d, y, s.w + e, s.v + f};
    const double scale = 2.0 * eval_magnitude(kind, s) + eval_magnitude(kind, lo) + eval_magnitude(kind, hi);
    return SampleOutcome{ratio_or_value(-concavity_defect(kind, s, d, e, f), scale), s};
  });
}

}  // namespace bsq
