#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bsq/rng.hpp"
#include "bsq/sym3.hpp"
#include "bsq/weights.hpp"

namespace bsq {

enum class BellmanFamily {
  main,  ///< x^2 w phi(wv) - 40 c y w on R x [0,inf) x Omega_c^2
  ar,    ///< y w - (r c / (2 - r)) x^2 / v^(r-1) on R x [0,inf) x Omega_c^r
  alt,   ///< y w - 16 c^2 x^2 w / (wv - 1/2)^alpha, alpha = 1 - 1/(4c)
};

struct BellmanKind {
  BellmanFamily family = BellmanFamily::main;
  double c = 2.0;
  double r = 2.0;

  static BellmanKind main(double c);
  static BellmanKind ar(double c, double r);
  static BellmanKind alt(double c);

  /// Exponent alpha = 1 - 1/(4c) of the alternative function.
  double alpha() const { return 1.0 - 1.0 / (4.0 * c); }
  /// Coefficient r c / (2 - r) of the A_r function.
  double ar_coefficient() const { return r * c / (2.0 - r); }
  /// Omega_c^r on which the function lives (r = 2 except for the A_r family).
  HyperbolicDomain domain() const { return {c, r}; }
  /// Same family with parameter c replaced.
  BellmanKind with_c(double new_c) const;

  std::string name() const;
};

/// Evaluation point (x, y, w, v).
struct StatePoint {
  double x = 0.0;
  double y = 0.0;
  double w = 1.0;
  double v = 1.0;
};

// phi(t) = 2 - 1/t - ln(t)/(2c) on [1, c] and its first two derivatives.
// Arguments outside [1, c] (beyond a 1e-12 relative slack) throw std::domain_error.
double phi(double t, double c);
double phi_d1(double t, double c);
double phi_d2(double t, double c);

/// B(x, y, w, v). Throws std::domain_error when y < 0 or (w, v) is outside
/// the kind's domain (1e-12 relative slack on both boundaries).
double eval(const BellmanKind& kind, const StatePoint& s);

/// Sum of the absolute values of the terms of B; the rounding scale of eval.
double eval_magnitude(const BellmanKind& kind, const StatePoint& s);

/// Hessian of the x/w/v part of B in (x, w, v), corrected by the diagonal
/// term contributed by the y-part along a concavity step:
///   main: D^2 b - diag(80 c w, 0, 0)
///   ar:   D^2 b + diag(2 w, 0, 0)
///   alt:  D^2 b + diag(2 w / (16 c^2), 0, 0), with B = 16 c^2 (y w / 16 c^2 + b)
Sym3 matrix_A(const BellmanKind& kind, const StatePoint& s);

/// Sign conditions behind the negative semidefiniteness of the main kind.
struct SylvesterQuantities {
  double corner = 0.0;       ///< x^2 w^3 phi''(t), must be <= 0
  double minor_factor = 0.0; ///< 2 phi'(t) (2 phi'(t) + t phi''(t)), must be <= 0
  double reduced_det = 0.0;  ///< 4w[(2phi'^2 - phi phi'')(phi + t phi') + 40 c phi'(2phi' + t phi'')], <= 0

  bool signs_ok() const { return corner <= 0.0 && minor_factor <= 0.0 && reduced_det <= 0.0; }
};

/// Only defined for the main family; throws std::invalid_argument otherwise.
/// det(matrix_A) = x^4 w^2 reduced_det and the lower-right 2x2 minor equals
/// -x^4 w^2 minor_factor.
SylvesterQuantities check_sylvester(const BellmanKind& kind, const StatePoint& s);

struct Violation {
  std::uint64_t sample = 0;
  StatePoint point;
  double value = 0.0;  ///< normalised defect that exceeded the tolerance
};

/// Outcome of a sampled certification sweep.
struct CertReport {
  std::string check;
  BellmanKind kind;
  std::uint64_t samples = 0;
  /// Largest normalised statistic seen: lambda_max / (1 + max|A_ij|) for
  /// "nsd", the largest scaled defect for the inequality checks. -inf when
  /// no sample was drawn.
  double max_eigenvalue = 0.0;
  double tolerance = 0.0;
  StatePoint worst_point;
  std::vector<Violation> violations;  ///< first few, in sample order
  std::uint64_t violation_count = 0;
  bool pass = true;

  std::string to_json() const;
};

/// Sampling plan shared by every sweep: x = +-loguniform[1e-3, 10],
/// y = loguniform[1e-3, 10] (10% exactly 0), w = loguniform[1e-3, 1e3],
/// w v^(r-1) = 1 on 10% of samples, = c on another 10%, uniform on [1, c] otherwise.
StatePoint sample_state(const BellmanKind& kind, std::uint64_t index, CounterRng& rng);

CertReport certify_nsd(const BellmanKind& kind, std::uint64_t samples, std::uint64_t seed, double tol = 1e-9);

/// B(x, x^2, w, v) <= 0.
CertReport check_majorization_initial(const BellmanKind& kind, std::uint64_t samples, std::uint64_t seed,
                                      double tol = 1e-12);

/// The kind's lower majorant: main 1/2 w (x^2 - 80 c y); ar y w - (r c/(2-r)) x^2 w;
/// alt y w - 32 c^2 x^2 w.
double lower_majorant(const BellmanKind& kind, const StatePoint& s);

CertReport check_majorization_lower(const BellmanKind& kind, std::uint64_t samples, std::uint64_t seed,
                                    double tol = 1e-12);

/// 2B(x, y, w, v) - B(x - d, y + d^2, w - e, v - f) - B(x + d, y + d^2, w + e, v + f).
double concavity_defect(const BellmanKind& kind, const StatePoint& s, double d, double e, double f);

/// Draws admissible septuples (segment (w +- e, v +- f) inside the domain)
/// and checks that the concavity defect is >= -tol * scale.
CertReport check_concavity(const BellmanKind& kind, std::uint64_t samples, std::uint64_t seed, double tol = 1e-9);

}  // namespace bsq
