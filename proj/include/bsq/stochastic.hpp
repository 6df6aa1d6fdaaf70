#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bsq {

struct PathConfig {
  double T = 1.0;
  std::uint64_t steps = 256;  ///< power of two, >= 2
  std::uint64_t trials = 100000;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
  double dt() const { return T / static_cast<double>(steps); }
};

/// Brownian paths on [0, T] sampled at steps + 1 equally spaced times.
///
/// Paths are generated on demand from (seed, path index) by dyadic Brownian
/// bridge refinement, so the ensemble costs no memory and a path sampled
/// with 2 * steps contains the path with `steps` at its even indices.
class PathEnsemble {
 public:
  explicit PathEnsemble(PathConfig cfg);

  const PathConfig& config() const noexcept { return cfg_; }
  std::uint64_t size() const noexcept { return cfg_.trials; }

  /// B at t_k = k T / steps, k = 0..steps; B(0) = 0.
  std::vector<double> path(std::uint64_t index) const;
  /// B(t_{k+1}) - B(t_k), k = 0..steps-1.
  std::vector<double> increments(std::uint64_t index) const;

 private:
  PathConfig cfg_;
};

PathEnsemble simulate_paths(const PathConfig& cfg);

/// The exponential martingale weight Y_t = exp(lambda B_t - lambda^2 t / 2).
struct ExpWeightSpec {
  double lambda = 0.0;

  /// sup_t Y_t E[Y_T^(-1) | F_t] = exp(lambda^2 T).
  double a2_characteristic(double T) const;
  /// sup_t Y_t E[Y_T^(-1/(r-1)) | F_t]^(r-1) = exp(lambda^2 T r / (2 (r - 1))).
  double ar_characteristic(double r, double T) const;
};

struct WeightTrajectory {
  std::vector<double> y;  ///< Y at t_k
  std::vector<double> z;  ///< E[Y_T^(-1) | F_{t_k}], closed form
};

WeightTrajectory exp_weight(const ExpWeightSpec& spec, const PathEnsemble& e, std::uint64_t index);

/// Estimate of sup over t in {0, T/4, T/2, 3T/4} of Y_t E[Y_T^(-1/(r-1)) | F_t]^(r-1)
/// by nested Monte Carlo: `outer` paths, each with `inner` conditional samples of B_T.
/// The inner estimate is averaged over the outer paths before taking the supremum.
double nested_ar_characteristic(const ExpWeightSpec& spec, double T, double r, std::uint64_t outer,
                                std::uint64_t inner, std::uint64_t seed);

enum class Integrand {
  zero,                 ///< H = 0
  one,                  ///< H = 1, so X = B
  sign_b,               ///< H_t = sgn(B_t), sgn(0) = +1
  alternating,          ///< H = +1, -1, +1, ... by step
  sign_next_increment,  ///< H_t = sgn(B_{t+dt} - B_t); looks ahead, rejected by transform
};

Integrand parse_integrand(const std::string& name);
std::string integrand_name(Integrand rule);
/// True iff H on [t_k, t_{k+1}) uses only B up to time t_k.
bool is_predictable(Integrand rule);

struct TransformedPath {
  double x_T = 0.0;        ///< sum of H dB
  double bracket_T = 0.0;  ///< sum of H^2 dB^2
};

/// Discretised Ito integral of the rule along one path. Throws
/// std::invalid_argument for non-predictable rules.
TransformedPath transform(const PathEnsemble& e, std::uint64_t index, Integrand rule);

struct SimCheck {
  std::string name;
  double lhs = 0.0;    ///< estimate of the left side
  double rhs = 0.0;    ///< constant times the estimate of the right side
  double sigma = 0.0;  ///< standard error of lhs - rhs
  double constant = 0.0;
  double r = 2.0;      ///< exponent behind the constant
  bool pass = true;    ///< lhs - rhs <= 3 sigma
};

struct Estimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct SimReport {
  PathConfig cfg;
  double lambda = 0.0;
  Integrand integrand = Integrand::one;
  double c_mart = 1.0;
  Estimate e_q_x2;  ///< E_P[X_T^2 Y_T]
  Estimate e_q_qv;  ///< E_P[<X>_T Y_T]
  Estimate e_p_y;   ///< E_P[Y_T]
  double max_product_ratio = 0.0;  ///< max over paths and times of Y_t Z_t / c_mart
  std::vector<SimCheck> checks;
  bool pass = true;

  std::string to_json() const;
};

/// Runs the four weighted martingale inequalities with 3-sigma slack:
///   E_Q X^2   <= 80 c E_Q <X>
///   E_Q <X>   <= 32 c^2 E_Q X^2
///   E_Q <X>   <= min_r r/(2-r) c_r E_Q X^2 over r in {1.05, 1.10, ..., 1.95}
///   E_Q <X>   <= 2^(7/2) c^2 E_Q X^2
/// with c = exp(lambda^2 T) and E_Q[F] = E_P[F Y_T].
SimReport verify_contmart(const PathConfig& cfg, const ExpWeightSpec& spec, Integrand rule);

}  // namespace bsq
