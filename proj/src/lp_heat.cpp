#include "bsq/lp_heat.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "bsq/fft.hpp"
#include "bsq/format.hpp"
#include "bsq/parallel.hpp"

namespace bsq {
namespace {

using Spectrum = std::vector<std::complex<double>>;

// Angular frequency of DFT bin m on the periodic window.
double frequency(const HeatGrid& g, std::size_t m) {
  const long k = m <= g.size / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(g.size);
  return 2.0 * std::numbers::pi * static_cast<double>(k) / (g.h * static_cast<double>(g.size));
}

void require_size(const HeatGrid& g, std::span<const double> v) {
  if (v.size() != g.size) {
    throw std::invalid_argument("grid vector has " + std::to_string(v.size()) + " entries, expected " +
                                std::to_string(g.size));
  }
}

Spectrum spectrum_of(const Fft& fft, std::span<const double> v) {
  Spectrum s(v.begin(), v.end());
  fft.forward(s);
  return s;
}

// Applies exp(-t xi^2 / 2), times i xi when `derivative`, and returns the real part.
std::vector<double> apply(const HeatGrid& g, const Fft& fft, const Spectrum& spec, double t, bool derivative) {
  Spectrum s(spec.size());
  for (std::size_t m = 0; m < s.size(); ++m) {
    const double xi = frequency(g, m);
    std::complex<double> mult = std::exp(-0.5 * t * xi * xi);
    if (derivative) mult *= (2 * m == g.size) ? std::complex<double>(0.0) : std::complex<double>(0.0, xi);
    s[m] = spec[m] * mult;
  }
  fft.inverse(s);
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = s[i].real();
  return out;
}

}  // namespace

HeatGrid HeatGrid::make(double L, double h, double t_max, int octaves, int per_octave) {
  if (!(L > 0.0) || !(h > 0.0) || !(t_max > 0.0)) throw std::invalid_argument("heat grid needs positive L, h, t_max");
  if (octaves < 1 || per_octave < 1) throw std::invalid_argument("heat grid needs at least one time node per octave");
  const double cells = std::round(L / h);
  if (std::abs(cells * h - L) > 1e-12 * L) throw std::invalid_argument("L must be a multiple of h");

  HeatGrid g;
  g.L = L;
  g.h = h;
  g.t_max = t_max;
  g.octaves = octaves;
  g.per_octave = per_octave;
  // Twelve standard deviations of p_{t_max} between the data and the wrap point.
  const double needed = 2.0 * (L + 12.0 * std::sqrt(t_max)) / h;
  g.size = std::bit_ceil(static_cast<std::size_t>(std::ceil(needed)));
  g.X = 0.5 * h * static_cast<double>(g.size);
  g.core_begin = static_cast<std::size_t>(std::llround((g.X - L) / h));
  g.core_end = static_cast<std::size_t>(std::llround((g.X + L) / h)) + 1;

  const double t_min = g.t_min();
  g.t.push_back(0.5 * t_min);
  g.t_weight.push_back(t_min);
  const double step = std::log(2.0) / per_octave;
  for (int k = 0; k < octaves * per_octave; ++k) {
    const double node = t_min * std::exp((k + 0.5) * step);
    g.t.push_back(node);
    g.t_weight.push_back(node * step);
  }
  return g;
}

double HeatGrid::integral(std::span<const double> values) const {
  return h * compensated_sum(std::vector<double>(values.begin(), values.end()));
}

double HeatGrid::integral(std::span<const double> a, std::span<const double> b) const {
  if (a.size() != b.size()) throw std::invalid_argument("integrand sizes differ");
  std::vector<double> prod(a.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = a[i] * b[i];
  return h * compensated_sum(prod);
}

std::vector<double> heat_extension(const HeatGrid& grid, std::span<const double> f, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("heat extension needs t > 0, got " + fmt17(t));
  require_size(grid, f);
  const Fft fft(grid.size);
  return apply(grid, fft, spectrum_of(fft, f), t, false);
}

std::vector<double> heat_gradient(const HeatGrid& grid, std::span<const double> f, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("heat gradient needs t > 0, got " + fmt17(t));
  require_size(grid, f);
  const Fft fft(grid.size);
  return apply(grid, fft, spectrum_of(fft, f), t, true);
}

double heat_energy(const HeatGrid& grid, std::span<const double> f, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("heat energy needs t >= 0");
  require_size(grid, f);
  const Fft fft(grid.size);
  const Spectrum s = spectrum_of(fft, f);
  std::vector<double> terms(s.size());
  for (std::size_t m = 0; m < s.size(); ++m) {
    const double xi = frequency(grid, m);
    terms[m] = std::norm(s[m]) * std::exp(-t * xi * xi);
  }
  return grid.h / static_cast<double>(grid.size) * compensated_sum(terms);
}

HeatSquareFunctions heat_square_functions(const HeatGrid& grid, std::span<const double> f, double alpha) {
  require_size(grid, f);
  if (!(alpha > 0.0)) throw std::invalid_argument("aperture must be positive");
  const Fft fft(grid.size);
  const Spectrum spec = spectrum_of(fft, f);
  const std::size_t n = grid.size;

  struct Partial {
    std::vector<double> g2, gstar2, area2;
  };
  const auto run_chunk = [&](std::size_t begin, std::size_t end) {
    Partial part{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
    std::vector<double> prefix(n + 1);
    for (std::size_t k = begin; k < end; ++k) {
      const double t = grid.t[k];
      const double weight = grid.t_weight[k];
      std::vector<double> d = apply(grid, fft, spec, t, true);
      for (double& v : d) v *= v;
      const std::vector<double> smoothed = apply(grid, fft, spectrum_of(fft, d), t, false);

      prefix[0] = 0.0;
      for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + d[i];
      // Nodes strictly inside |z - x| < alpha sqrt(t).
      const double reach = alpha * std::sqrt(t) / grid.h;
      std::size_t half = static_cast<std::size_t>(std::floor(reach));
      if (static_cast<double>(half) == reach && half > 0) --half;
      const double area_weight = weight * grid.h / std::sqrt(t);

      for (std::size_t i = 0; i < n; ++i) {
        part.g2[i] += weight * d[i];
        part.gstar2[i] += weight * smoothed[i];
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(n, i + half + 1);
        part.area2[i] += area_weight * (prefix[hi] - prefix[lo]);
      }
    }
    return part;
  };
  Partial total = chunked_reduce(grid.t.size(), 8, Partial{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                                                              std::vector<double>(n, 0.0)},
                                 run_chunk, [](Partial acc, const Partial& next) {
                                   for (std::size_t i = 0; i < acc.g2.size(); ++i) {
                                     acc.g2[i] += next.g2[i];
                                     acc.gstar2[i] += next.gstar2[i];
                                     acc.area2[i] += next.area2[i];
                                   }
                                   return acc;
                                 });
  HeatSquareFunctions out;
  out.g2 = std::move(total.g2);
  out.gstar2 = std::move(total.gstar2);
  out.area2 = std::move(total.area2);
  out.tail = heat_energy(grid, f, grid.t_max);
  return out;
}

HeatDomination heat_domination(const HeatSquareFunctions& sf, double alpha, double rel_floor) {
  HeatDomination out;
  out.g_bound = std::sqrt(2.0);
  out.area_bound = std::pow(2.0 * std::numbers::pi, 0.25) * std::exp(alpha * alpha / 4.0);
  double top = 0.0;
  for (double v : sf.gstar2) top = std::max(top, v);
  const double floor = rel_floor * std::sqrt(top);
  for (std::size_t i = 0; i < sf.gstar2.size(); ++i) {
    const double gs = std::sqrt(std::max(0.0, sf.gstar2[i]));
    const double g = std::sqrt(std::max(0.0, sf.g2[i]));
    const double a = std::sqrt(std::max(0.0, sf.area2[i]));
    if (g > out.g_bound * gs + floor || a > out.area_bound * gs + floor) out.pass = false;
    if (gs > floor) {
      out.g_ratio = std::max(out.g_ratio, g / gs);
      out.area_ratio = std::max(out.area_ratio, a / gs);
    }
  }
  return out;
}

double heat_ap(const HeatGrid& grid, std::span<const double> w, double p) {
  require_size(grid, w);
  if (!(p > 1.0)) throw std::invalid_argument("exponent must exceed 1, got " + fmt17(p));
  std::vector<double> dual(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0) || !std::isfinite(w[i])) throw std::invalid_argument("weight must be positive");
    dual[i] = std::pow(w[i], -1.0 / (p - 1.0));
  }
  const auto value = [p](double a, double b) { return p == 2.0 ? a * b : a * std::pow(b, p - 1.0); };
  const Fft fft(grid.size);
  const Spectrum sw = spectrum_of(fft, w);
  const Spectrum sd = spectrum_of(fft, dual);

  const auto run_chunk = [&](std::size_t begin, std::size_t end) {
    double best = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      const std::vector<double> pw = apply(grid, fft, sw, grid.t[k], false);
      const std::vector<double> pd = apply(grid, fft, sd, grid.t[k], false);
      for (std::size_t i = grid.core_begin; i < grid.core_end; ++i) best = std::max(best, value(pw[i], pd[i]));
    }
    return best;
  };
  double best = chunked_reduce(grid.t.size(), 8, 0.0, run_chunk, [](double a, double b) { return std::max(a, b); });

  const double wl = w[grid.core_begin];
  const double wr = w[grid.core_end - 1];
  const double dl = dual[grid.core_begin];
  const double dr = dual[grid.core_end - 1];
  best = std::max(best, value(0.5 * (wl + wr), 0.5 * (dl + dr)));
  // t -> 0 recovers w itself, where the product is exactly 1.
  return std::max(best, 1.0);
}

double classical_a2(const HeatGrid& grid, std::span<const double> w) {
  require_size(grid, w);
  const std::size_t n = grid.core_end - grid.core_begin;
  std::vector<double> sw(n + 1, 0.0);
  std::vector<double> sd(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = w[grid.core_begin + i];
    if (!(v > 0.0)) throw std::invalid_argument("weight must be positive");
    sw[i + 1] = sw[i] + v;
    sd[i + 1] = sd[i] + 1.0 / v;
  }
  double best = 1.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b <= n; ++b) {
      const double len = static_cast<double>(b - a);
      best = std::max(best, (sw[b] - sw[a]) * (sd[b] - sd[a]) / (len * len));
    }
  }
  const double wl = w[grid.core_begin];
  const double wr = w[grid.core_end - 1];
  return std::max(best, 0.25 * (wl + wr) * (1.0 / wl + 1.0 / wr));
}

A2Comparison compare_a2_classical_heat(const HeatGrid& grid, std::span<const double> w) {
  A2Comparison out;
  out.heat = heat_a2(grid, w);
  out.classical = classical_a2(grid, w);
  out.ratio = out.heat / out.classical;
  return out;
}

std::vector<NamedOutcome> verify_thm_heat(const HeatGrid& grid, std::span<const double> f, std::span<const double> w,
                                          double slack) {
  require_size(grid, f);
  require_size(grid, w);
  const HeatSquareFunctions sf = heat_square_functions(grid, f);
  std::vector<double> f2(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) f2[i] = f[i] * f[i];
  const double norm_f = grid.integral(f2, w);
  const double norm_g = grid.integral(sf.gstar2, w);
  const std::vector<double> pf = heat_extension(grid, f, grid.t_max);
  const std::vector<double> pw = heat_extension(grid, w, grid.t_max);
  std::vector<double> pf2(pf.size());
  for (std::size_t i = 0; i < pf.size(); ++i) pf2[i] = pf[i] * pf[i];
  const double start_term = 2.0 * grid.integral(pf2, pw);
  const double a2 = heat_a2(grid, w);

  const auto outcome = [&](double lhs, double constant, double characteristic, double rhs) {
    return VerificationOutcome{lhs, rhs, constant, characteristic, lhs <= rhs * (1.0 + slack)};
  };
  std::vector<NamedOutcome> out;
  out.push_back({"lower_160", outcome(norm_f, 160.0, a2, 160.0 * a2 * norm_g + start_term)});

  double best_rhs = std::numeric_limits<double>::infinity();
  double best_const = 0.0;
  double best_char = 0.0;
  for (int i = 1; i <= 9; ++i) {
    const double r = 1.0 + 0.1 * i;
    const double ar = heat_ap(grid, w, r);
    const double k = r / (2.0 - r);
    if (k * ar * norm_f < best_rhs) {
      best_rhs = k * ar * norm_f;
      best_const = k;
      best_char = ar;
    }
  }
  out.push_back({"upper_ar_family", outcome(norm_g, best_const, best_char, best_rhs)});
  const double c3 = std::pow(2.0, 3.5);
  out.push_back({"upper_2^3.5", outcome(norm_g, c3, a2, c3 * a2 * a2 * norm_f)});
  return out;
}

}  // namespace bsq
