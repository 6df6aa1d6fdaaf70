#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bsq/certify.hpp"
#include "bsq/rng.hpp"

namespace bsq {

/// Real trigonometric polynomial f(theta) = sum_{|k| <= K} c_k e^{ik theta}
/// with c_{-k} = conj(c_k); stored as c_0..c_K.
class TrigPoly {
 public:
  TrigPoly() = default;
  /// Throws std::invalid_argument if c_0 is not real or the list is empty.
  explicit TrigPoly(std::vector<std::complex<double>> coeffs);

  static TrigPoly constant(double value);
  /// amp cos(k theta)
  static TrigPoly cosine(int k, double amp);
  /// amp sin(k theta)
  static TrigPoly sine(int k, double amp);
  /// Independent normal coefficients up to the given degree.
  static TrigPoly random(int degree, CounterRng& rng);

  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<std::complex<double>>& coeffs() const noexcept { return coeffs_; }
  TrigPoly operator+(const TrigPoly& other) const;

  double operator()(double theta) const;
  double mean() const noexcept { return coeffs_[0].real(); }
  /// (1/2pi) integral of f^2 = c_0^2 + 2 sum |c_k|^2.
  double norm2_squared() const;

  /// u_f(z) = Re G(z) with G(z) = c_0 + 2 sum_{k >= 1} c_k z^k.
  double harmonic_extension(std::complex<double> z) const;
  /// G'(z); |grad u_f|^2 = |G'(z)|^2.
  std::complex<double> extension_derivative(std::complex<double> z) const;

  std::string to_json() const;
  static TrigPoly from_json(std::string_view text);

 private:
  std::vector<std::complex<double>> coeffs_{0.0};
};

/// |grad u_f(z)|^2. Throws std::domain_error for |z| >= 1.
double poisson_grad_sq(const TrigPoly& f, std::complex<double> z);

/// Radial Gauss-Legendre nodes in u with r = u^2 (the substitution smooths
/// r log(1/r) at the origin) times M uniform angles.
struct DiscGrid {
  std::vector<double> u;
  std::vector<double> u_weight;
  std::size_t angular = 1024;

  static DiscGrid make(int radial = 64, std::size_t angular = 1024);

  std::size_t radial() const noexcept { return u.size(); }
  double radius(std::size_t i) const { return u[i] * u[i]; }
  /// Weight of node i in a rule for integral_0^1 F(r) dr.
  double radial_weight(std::size_t i) const { return 2.0 * u[i] * u_weight[i]; }
  double theta(std::size_t k) const;
  /// Polynomials in u up to this degree are integrated exactly.
  int exactness_degree() const { return 2 * static_cast<int>(u.size()) - 1; }
  /// Quadrature value of the integral of log(1/|z|) over the disc (exact: pi/2).
  double log_area_integral() const;
};

/// A positive weight on the circle sampled at M uniform angles.
class CircleWeight {
 public:
  /// Throws std::invalid_argument unless every value is finite and positive and size >= 2.
  explicit CircleWeight(std::vector<double> values);

  template <class Fn>
  static CircleWeight sample(Fn&& fn, std::size_t m) {
    std::vector<double> v(m);
    for (std::size_t k = 0; k < m; ++k) v[k] = fn(theta_of(k, m));
    return CircleWeight(std::move(v));
  }
  static double theta_of(std::size_t k, std::size_t m);

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  double mean() const;
  /// Pointwise w^e.
  CircleWeight power(double e) const;
  CircleWeight scaled(double lambda) const;

  /// Poisson integral u_w(z) from the discrete Fourier coefficients.
  double extension(std::complex<double> z) const;
  /// u_w(r e^{i theta_k}) at all M angles.
  std::vector<double> extension_ring(double r) const;

  std::string to_csv() const;
  /// Values separated by commas, whitespace or newlines.
  static CircleWeight from_csv(std::string_view text);

 private:
  std::vector<double> values_;
  std::vector<std::complex<double>> modes_;  ///< DFT of values_ (unnormalised)
};

/// g_*^2 at the grid's M angles: the area integral of
/// (1/pi) P_z(e^{i theta}) log(1/|z|) |grad u_f(z)|^2.
std::vector<double> gstar_sq_disc(const TrigPoly& f, const DiscGrid& grid);

/// (1/2pi) integral of values * w over the circle; values sampled at w's angles.
double circle_mean(const std::vector<double>& values, const CircleWeight& w);

/// Lusin area function over the Stoltz region with vertex e^{i theta} and
/// aperture alpha (the convex hull of the disc of radius alpha and the vertex).
double lusin_area_disc(const TrigPoly& f, double alpha, double theta, int nodes = 64);
/// (integral_0^1 (1 - r) |grad u_f(r e^{i theta})|^2 dr)^(1/2).
double g_disc(const TrigPoly& f, double theta, int nodes = 64);

struct DominationRatios {
  double g_over_gstar = 0.0;
  double area_over_gstar = 0.0;
};
/// Largest g / g_* and A_alpha / g_* over `samples` equally spaced angles
/// (samples must divide the grid's angular count).
DominationRatios domination_ratios_disc(const TrigPoly& f, double alpha, const DiscGrid& grid, std::size_t samples = 64);

struct PoissonApEstimate {
  double value = 1.0;
  double r = 0.0;
  double theta = 0.0;
};
/// sup over the disc of u_w (u_{w^(-1/(p-1))})^(p-1): scanned on `radii` rings
/// at all M angles, then refined around the best point.
PoissonApEstimate poisson_ap_disc(const CircleWeight& w, double p, int radii = 256);

/// The three weighted g_* inequalities on the circle with `slack` relative tolerance:
///   ||f - u_f(0)||^2_w <= 80 [w]_2 ||g_* f||^2_w
///   ||g_* f||^2_w      <= min_r r/(2-r) [w]_r ||f||^2_w,  r in {1.1, ..., 1.9}
///   ||g_* f||^2_w      <= 2^(7/2) [w]_2^2 ||f||^2_w
std::vector<NamedOutcome> verify_thm_disc(const TrigPoly& f, const CircleWeight& w, const DiscGrid& grid,
                                          double slack = 0.01);

}  // namespace bsq
