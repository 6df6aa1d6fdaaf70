#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "bsq/certify.hpp"

namespace bsq {

/// Space-time grid for the heat semigroup P_t = exp(t/2 d^2/dx^2) on R.
///
/// Data live on [-L, L] with spacing h. Convolutions are spectral on a
/// periodic window [-X, X) wide enough that nothing wraps around for
/// t <= t_max. Time nodes are log-spaced, `per_octave` per doubling, placed
/// at log-midpoints of their cells; one extra node covers (0, t_min].
struct HeatGrid {
  double L = 16.0;
  double h = 1.0 / 64.0;
  double t_max = 64.0;
  int octaves = 16;
  int per_octave = 12;

  // Derived by make().
  double X = 0.0;
  std::size_t size = 0;       ///< nodes in the periodic window
  std::size_t core_begin = 0; ///< first node with x >= -L
  std::size_t core_end = 0;   ///< one past the last node with x <= L
  std::vector<double> t;
  std::vector<double> t_weight;

  static HeatGrid make(double L = 16.0, double h = 1.0 / 64.0, double t_max = 64.0, int octaves = 16,
                       int per_octave = 12);

  double t_min() const { return t_max * std::exp2(-octaves); }
  double x(std::size_t i) const { return -X + h * static_cast<double>(i); }

  /// fn on [-L, L], zero elsewhere.
  template <class Fn>
  std::vector<double> sample_function(Fn&& fn) const {
    std::vector<double> v(size, 0.0);
    for (std::size_t i = core_begin; i < core_end; ++i) v[i] = fn(x(i));
    return v;
  }
  /// fn on [-L, L], continued by its edge values.
  template <class Fn>
  std::vector<double> sample_weight(Fn&& fn) const {
    std::vector<double> v(size);
    const double left = fn(x(core_begin));
    const double right = fn(x(core_end - 1));
    for (std::size_t i = 0; i < size; ++i) {
      v[i] = i < core_begin ? left : (i >= core_end ? right : fn(x(i)));
    }
    return v;
  }

  /// h * sum, compensated.
  double integral(std::span<const double> values) const;
  /// h * sum of a * b.
  double integral(std::span<const double> a, std::span<const double> b) const;
};

/// P_t f on the grid (exact spectral Gaussian multiplier; conserves mass).
std::vector<double> heat_extension(const HeatGrid& grid, std::span<const double> f, double t);
/// d/dx P_t f on the grid.
std::vector<double> heat_gradient(const HeatGrid& grid, std::span<const double> f, double t);
/// ||P_t f||^2 from the Fourier side.
double heat_energy(const HeatGrid& grid, std::span<const double> f, double t);

struct HeatSquareFunctions {
  std::vector<double> g2;      ///< G(f)^2, time integral truncated at t_max
  std::vector<double> gstar2;  ///< G_*(f)^2, truncated at t_max
  std::vector<double> area2;   ///< parabolic Lusin area function squared
  double tail = 0.0;           ///< ||P_{t_max} f||^2, the energy beyond t_max
};

HeatSquareFunctions heat_square_functions(const HeatGrid& grid, std::span<const double> f, double alpha = 1.0);

/// Pointwise G <= sqrt(2) G_* and area <= (2 pi)^(1/4) e^(alpha^2/4) G_* at
/// every grid node, up to an absolute round-off floor of rel_floor * max G_*.
struct HeatDomination {
  double g_ratio = 0.0;     ///< max G / G_* over nodes with G_* above the floor
  double area_ratio = 0.0;  ///< same for the area function
  double g_bound = 0.0;
  double area_bound = 0.0;
  bool pass = true;
};
HeatDomination heat_domination(const HeatSquareFunctions& sf, double alpha, double rel_floor = 1e-10);

/// sup over core x and grid t of P_t w (P_t w^(-1/(p-1)))^(p-1), including
/// the t -> infinity limit of the edge-continued weight.
double heat_ap(const HeatGrid& grid, std::span<const double> w, double p);
inline double heat_a2(const HeatGrid& grid, std::span<const double> w) { return heat_ap(grid, w, 2.0); }

/// max over intervals made of core grid cells of <w><w^-1>, together with
/// the limit of arbitrarily long intervals.
double classical_a2(const HeatGrid& grid, std::span<const double> w);

struct A2Comparison {
  double heat = 1.0;
  double classical = 1.0;
  double ratio = 1.0;  ///< heat / classical
};
A2Comparison compare_a2_classical_heat(const HeatGrid& grid, std::span<const double> w);

/// The three weighted G_* inequalities with `slack` relative tolerance:
///   ||f||^2_w   <= 160 [w]_2 ||G_* f||^2_w + 2 integral (P_T f)^2 P_T w
///   ||G_* f||^2_w <= min_r r/(2-r) [w]_r ||f||^2_w,  r in {1.1, ..., 1.9}
///   ||G_* f||^2_w <= 2^(7/2) [w]_2^2 ||f||^2_w
/// with G_* truncated at T = t_max and [w]_p the heat characteristic.
std::vector<NamedOutcome> verify_thm_heat(const HeatGrid& grid, std::span<const double> f, std::span<const double> w,
                                          double slack = 0.02);

}  // namespace bsq
