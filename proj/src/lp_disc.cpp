#include "bsq/lp_disc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "bsq/fft.hpp"
#include "bsq/format.hpp"
#include "bsq/quadrature.hpp"

namespace bsq {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Signed frequency of DFT bin m out of n.
long signed_frequency(std::size_t m, std::size_t n) {
  return m <= n / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(n);
}

// Damps DFT bins by r^|m|; the Nyquist bin of an even transform is real and
// carries both +-n/2, which share the same factor.
void poisson_damp(std::vector<std::complex<double>>& bins, double r) {
  const std::size_t n = bins.size();
  for (std::size_t m = 0; m < n; ++m) {
    const long k = signed_frequency(m, n);
    bins[m] *= r == 0.0 ? (k == 0 ? 1.0 : 0.0) : std::pow(r, static_cast<double>(std::labs(k)));
  }
}

}  // namespace

TrigPoly::TrigPoly(std::vector<std::complex<double>> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw std::invalid_argument("trigonometric polynomial needs c_0");
  if (coeffs_[0].imag() != 0.0) throw std::invalid_argument("c_0 must be real for a real-valued polynomial");
  for (const auto& c : coeffs_) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw std::invalid_argument("non-finite coefficient");
  }
}

TrigPoly TrigPoly::constant(double value) { return TrigPoly(std::vector<std::complex<double>>{{value, 0.0}}); }

TrigPoly TrigPoly::cosine(int k, double amp) {
  if (k < 0) throw std::invalid_argument("frequency must be nonnegative");
  std::vector<std::complex<double>> c(static_cast<std::size_t>(k) + 1, 0.0);
  c[k] += k == 0 ? amp : 0.5 * amp;
  return TrigPoly(std::move(c));
}

TrigPoly TrigPoly::sine(int k, double amp) {
  if (k < 1) throw std::invalid_argument("sine frequency must be positive");
  std::vector<std::complex<double>> c(static_cast<std::size_t>(k) + 1, 0.0);
  c[k] = {0.0, -0.5 * amp};
  return TrigPoly(std::move(c));
}

TrigPoly TrigPoly::random(int degree, CounterRng& rng) {
  if (degree < 0) throw std::invalid_argument("degree must be nonnegative");
  std::vector<std::complex<double>> c(static_cast<std::size_t>(degree) + 1);
  c[0] = rng.normal();
  for (int k = 1; k <= degree; ++k) c[k] = {rng.normal(), rng.normal()};
  return TrigPoly(std::move(c));
}

TrigPoly TrigPoly::operator+(const TrigPoly& other) const {
  std::vector<std::complex<double>> c(std::max(coeffs_.size(), other.coeffs_.size()), 0.0);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) c[k] += coeffs_[k];
  for (std::size_t k = 0; k < other.coeffs_.size(); ++k) c[k] += other.coeffs_[k];
  return TrigPoly(std::move(c));
}

double TrigPoly::operator()(double theta) const {
  double sum = coeffs_[0].real();
  for (std::size_t k = 1; k < coeffs_.size(); ++k) {
    sum += 2.0 * (coeffs_[k] * std::polar(1.0, static_cast<double>(k) * theta)).real();
  }
  return sum;
}

double TrigPoly::norm2_squared() const {
  double sum = coeffs_[0].real() * coeffs_[0].real();
  for (std::size_t k = 1; k < coeffs_.size(); ++k) sum += 2.0 * std::norm(coeffs_[k]);
  return sum;
}

double TrigPoly::harmonic_extension(std::complex<double> z) const {
  std::complex<double> acc = 0.0;
  for (std::size_t k = coeffs_.size() - 1; k >= 1; --k) acc = (acc + 2.0 * coeffs_[k]) * z;
  return coeffs_[0].real() + acc.real();
}

std::complex<double> TrigPoly::extension_derivative(std::complex<double> z) const {
  std::complex<double> acc = 0.0;
  for (std::size_t k = coeffs_.size() - 1; k >= 1; --k) {
    acc = acc * z + 2.0 * static_cast<double>(k) * coeffs_[k];
  }
  return acc;
}

std::string TrigPoly::to_json() const {
  nlohmann::ordered_json j;
  j["K"] = degree();
  std::vector<double> re;
  std::vector<double> im;
  for (const auto& c : coeffs_) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  j["re"] = re;
  j["im"] = im;
  return j.dump();
}

TrigPoly TrigPoly::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed trigonometric polynomial JSON: ") + e.what());
  }
  if (!j.contains("re")) throw std::invalid_argument("trigonometric polynomial JSON needs \"re\"");
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.contains("im") ? j.at("im").get<std::vector<double>>() : std::vector<double>(re.size(), 0.0);
  if (re.size() != im.size()) throw std::invalid_argument("\"re\" and \"im\" differ in length");
  if (j.contains("K") && j.at("K").get<long>() + 1 != static_cast<long>(re.size())) {
    throw std::invalid_argument("\"K\" does not match the coefficient count");
  }
  std::vector<std::complex<double>> c(re.size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = {re[k], im[k]};
  return TrigPoly(std::move(c));
}

double poisson_grad_sq(const TrigPoly& f, std::complex<double> z) {
  if (!(std::abs(z) < 1.0)) throw std::domain_error("point outside the open unit disc");
  return std::norm(f.extension_derivative(z));
}

DiscGrid DiscGrid::make(int radial, std::size_t angular) {
  if (angular < 4) throw std::invalid_argument("need at least 4 angular nodes");
  const QuadratureRule rule = gauss_legendre(radial, 0.0, 1.0);
  DiscGrid g;
  g.u = rule.nodes;
  g.u_weight = rule.weights;
  g.angular = angular;
  return g;
}

double DiscGrid::theta(std::size_t k) const { return CircleWeight::theta_of(k, angular); }

double DiscGrid::log_area_integral() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < radial(); ++i) {
    const double r = radius(i);
    sum += radial_weight(i) * r * -std::log(r);
  }
  return kTwoPi * sum;
}

CircleWeight::CircleWeight(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) throw std::invalid_argument("circle weight needs at least two samples");
  for (double v : values_) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("circle weight must be positive, got " + fmt17(v));
  }
  modes_.assign(values_.begin(), values_.end());
  Fft(values_.size()).forward(modes_);
}

double CircleWeight::theta_of(std::size_t k, std::size_t m) {
  return kTwoPi * static_cast<double>(k) / static_cast<double>(m);
}

double CircleWeight::mean() const { return compensated_sum(values_) / static_cast<double>(values_.size()); }

CircleWeight CircleWeight::power(double e) const {
  std::vector<double> v(values_.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::pow(values_[k], e);
  return CircleWeight(std::move(v));
}

CircleWeight CircleWeight::scaled(double lambda) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= lambda;
  return CircleWeight(std::move(v));
}

double CircleWeight::extension(std::complex<double> z) const {
  const double r = std::abs(z);
  if (!(r < 1.0)) throw std::domain_error("point outside the open unit disc");
  const double theta = std::arg(z);
  const std::size_t n = modes_.size();
  double sum = modes_[0].real();
  double rk = 1.0;
  for (std::size_t m = 1; m <= n / 2; ++m) {
    rk *= r;
    if (rk < 1e-18) break;
    const std::complex<double> term = modes_[m] * std::polar(1.0, static_cast<double>(m) * theta);
    // bins m and n - m are conjugate; the Nyquist bin appears once.
    sum += (2 * m == n ? 1.0 : 2.0) * rk * term.real();
  }
  return sum / static_cast<double>(n);
}

std::vector<double> CircleWeight::extension_ring(double r) const {
  std::vector<std::complex<double>> bins(modes_);
  poisson_damp(bins, r);
  Fft(bins.size()).inverse(bins);
  std::vector<double> out(bins.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = bins[k].real();
  return out;
}

std::string CircleWeight::to_csv() const {
  std::string out;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (k) out += ',';
    out += fmt17(values_[k]);
  }
  out += '\n';
  return out;
}

CircleWeight CircleWeight::from_csv(std::string_view text) {
  std::string s(text);
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<double> v;
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed weight value '" + token + "'");
    }
  }
  return CircleWeight(std::move(v));
}

std::vector<double> gstar_sq_disc(const TrigPoly& f, const DiscGrid& grid) {
  const std::size_t m = grid.angular;
  const Fft fft(m);
  std::vector<std::complex<double>> acc(m, 0.0);
  std::vector<std::complex<double>> ring(m);
  for (std::size_t i = 0; i < grid.radial(); ++i) {
    const double r = grid.radius(i);
    for (std::size_t k = 0; k < m; ++k) ring[k] = std::norm(f.extension_derivative(std::polar(r, grid.theta(k))));
    fft.forward(ring);
    poisson_damp(ring, r);
    // g_*^2 = 2 integral_0^1 r log(1/r) [Poisson average of |grad u|^2 on the ring] dr
    const double weight = 2.0 * grid.radial_weight(i) * r * -std::log(r);
    for (std::size_t k = 0; k < m; ++k) acc[k] += weight * ring[k];
  }
  fft.inverse(acc);
  std::vector<double> out(m);
  for (std::size_t k = 0; k < m; ++k) out[k] = acc[k].real();
  return out;
}

double circle_mean(const std::vector<double>& values, const CircleWeight& w) {
  if (values.size() != w.size()) throw std::invalid_argument("sample count differs from the weight's");
  std::vector<double> prod(values.size());
  for (std::size_t k = 0; k < prod.size(); ++k) prod[k] = values[k] * w.values()[k];
  return compensated_sum(prod) / static_cast<double>(prod.size());
}

double lusin_area_disc(const TrigPoly& f, double alpha, double theta, int nodes) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("aperture must lie in (0, 1)");
  const double beta = std::acos(alpha);
  const QuadratureRule unit = gauss_legendre(nodes, 0.0, 1.0);
  // Integral over rho in [0, R] of |grad u|^2 rho along direction theta + phi.
  const auto ray = [&](double phi, double R) {
    double sum = 0.0;
    for (std::size_t j = 0; j < unit.nodes.size(); ++j) {
      const double rho = R * unit.nodes[j];
      sum += unit.weights[j] * rho * std::norm(f.extension_derivative(std::polar(rho, theta + phi)));
    }
    return R * sum;
  };
  const auto tangent_radius = [&](double phi) { return alpha / std::cos(beta - std::abs(phi)); };
  const QuadratureRule cap_left = gauss_legendre(nodes, -beta, 0.0);
  const QuadratureRule cap_right = gauss_legendre(nodes, 0.0, beta);
  const QuadratureRule rest = gauss_legendre(nodes, beta, kTwoPi - beta);
  double total = 0.0;
  total += cap_left.integrate([&](double phi) { return ray(phi, tangent_radius(phi)); });
  total += cap_right.integrate([&](double phi) { return ray(phi, tangent_radius(phi)); });
  total += rest.integrate([&](double phi) { return ray(phi, alpha); });
  return std::sqrt(total);
}

double g_disc(const TrigPoly& f, double theta, int nodes) {
  const QuadratureRule rule = gauss_legendre(nodes, 0.0, 1.0);
  const double sum = rule.integrate(
      [&](double r) { return (1.0 - r) * std::norm(f.extension_derivative(std::polar(r, theta))); });
  return std::sqrt(sum);
}

DominationRatios domination_ratios_disc(const TrigPoly& f, double alpha, const DiscGrid& grid, std::size_t samples) {
  if (samples == 0 || grid.angular % samples != 0) throw std::invalid_argument("samples must divide the angular count");
  const std::vector<double> g2 = gstar_sq_disc(f, grid);
  const std::size_t stride = grid.angular / samples;
  DominationRatios out;
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t k = s * stride;
    if (!(g2[k] > 0.0)) continue;
    const double gs = std::sqrt(g2[k]);
    out.g_over_gstar = std::max(out.g_over_gstar, g_disc(f, grid.theta(k)) / gs);
    out.area_over_gstar = std::max(out.area_over_gstar, lusin_area_disc(f, alpha, grid.theta(k)) / gs);
  }
  return out;
}

PoissonApEstimate poisson_ap_disc(const CircleWeight& w, double p, int radii) {
  if (!(p > 1.0)) throw std::invalid_argument("exponent must exceed 1, got " + fmt17(p));
  if (radii < 2) throw std::invalid_argument("need at least two rings");
  const CircleWeight dual = w.power(-1.0 / (p - 1.0));
  const auto value = [&](double uw, double ud) {
    if (!(uw > 0.0 && ud > 0.0)) return -std::numeric_limits<double>::infinity();
    return p == 2.0 ? uw * ud : uw * std::pow(ud, p - 1.0);
  };

  PoissonApEstimate best{value(w.mean(), dual.mean()), 0.0, 0.0};
  double spacing = 1.0;
  for (int k = 1; k < radii; ++k) {
    // Rings accumulate quadratically towards the boundary.
    const double s = 1.0 - static_cast<double>(k) / radii;
    const double r = 1.0 - s * s;
    const std::vector<double> uw = w.extension_ring(r);
    const std::vector<double> ud = dual.extension_ring(r);
    for (std::size_t j = 0; j < uw.size(); ++j) {
      const double v = value(uw[j], ud[j]);
      if (v > best.value) {
        best = {v, r, CircleWeight::theta_of(j, w.size())};
        spacing = 2.0 * s / radii;
      }
    }
  }

  // Pattern search around the best grid point.
  double dr = spacing;
  double dt = kTwoPi / static_cast<double>(w.size());
  const auto eval_at = [&](double r, double t) {
    r = std::clamp(r, 0.0, 1.0 - 1e-12);
    const std::complex<double> z = std::polar(r, t);
    return value(w.extension(z), dual.extension(z));
  };
  for (int iter = 0; iter < 200 && (dr > 1e-12 || dt > 1e-12); ++iter) {
    bool moved = false;
    const double cand[4][2] = {{best.r + dr, best.theta}, {best.r - dr, best.theta}, {best.r, best.theta + dt},
                               {best.r, best.theta - dt}};
    for (const auto& c : cand) {
      const double r = std::clamp(c[0], 0.0, 1.0 - 1e-12);
      const double v = eval_at(r, c[1]);
      if (v > best.value) {
        best = {v, r, c[1]};
        moved = true;
      }
    }
    if (!moved) {
      dr *= 0.5;
      dt *= 0.5;
    }
  }
  best.theta = std::remainder(best.theta, kTwoPi);
  if (best.theta < 0.0) best.theta += kTwoPi;
  return best;
}

std::vector<NamedOutcome> verify_thm_disc(const TrigPoly& f, const CircleWeight& w, const DiscGrid& grid,
                                          double slack) {
  if (w.size() != grid.angular) throw std::invalid_argument("weight must be sampled at the grid's angles");
  const std::size_t m = grid.angular;
  std::vector<double> fv(m);
  std::vector<double> centred(m);
  std::vector<double> sq(m);
  for (std::size_t k = 0; k < m; ++k) {
    fv[k] = f(grid.theta(k));
    centred[k] = (fv[k] - f.mean()) * (fv[k] - f.mean());
    sq[k] = fv[k] * fv[k];
  }
  const double norm_centred = circle_mean(centred, w);
  const double norm_f = circle_mean(sq, w);
  const double norm_g = circle_mean(gstar_sq_disc(f, grid), w);
  const double a2 = poisson_ap_disc(w, 2.0).value;

  const auto outcome = [&](double lhs, double constant, double characteristic, double rhs) {
    return VerificationOutcome{lhs, rhs, constant, characteristic, lhs <= rhs * (1.0 + slack)};
  };
  std::vector<NamedOutcome> out;
  out.push_back({"lower_80", outcome(norm_centred, 80.0, a2, 80.0 * a2 * norm_g)});

  double best_rhs = std::numeric_limits<double>::infinity();
  double best_const = 0.0;
  double best_char = 0.0;
  for (int i = 1; i <= 9; ++i) {
    const double r = 1.0 + 0.1 * i;
    const double ar = poisson_ap_disc(w, r).value;
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
