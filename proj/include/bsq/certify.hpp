#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bsq/bellman.hpp"
#include "bsq/dyadic.hpp"
#include "bsq/weights.hpp"

namespace bsq {

/// Values of the four sequences on the 2^n atoms of one level.
struct LevelState {
  std::vector<double> x;  ///< averages of f
  std::vector<double> y;  ///< S_n(f)^2
  std::vector<double> w;  ///< averages of w
  std::vector<double> v;  ///< averages of w^(-1/(r-1))
};

struct DyadicSequences {
  int depth = 0;
  double r = 2.0;
  std::vector<LevelState> levels;  ///< levels[n] has 2^n atoms, n = 0..depth

  /// Haar coefficient of f on atom (n, j): x at the left child minus x at the parent.
  double step(int n, std::size_t j) const { return levels[n + 1].x[2 * j] - levels[n].x[j]; }
};

/// Throws std::invalid_argument on depth mismatch or r outside (1, 2].
DyadicSequences build_sequences(const GridFunction& f, const WeightFunction& w, double r);

struct AtomViolation {
  int level = 0;
  std::int64_t index = 0;
  StatePoint parent;
  double d = 0.0;
  double e = 0.0;
  double f = 0.0;
  double defect = 0.0;  ///< B(parent) - (B(left) + B(right)) / 2, scaled
};

struct InductionTrace {
  BellmanKind kind;
  double characteristic = 1.0;
  std::vector<double> integrals;  ///< integral of B over the unit interval at each level
  double worst_step = 0.0;        ///< largest scaled increase integrals[n+1] - integrals[n]
  std::optional<AtomViolation> first_violation;
  bool pass = true;
};

/// Evaluates the level integrals of B along the sequences and checks that
/// they do not increase, level by level and atom by atom.
///
/// The kind's c must be at least twice the dyadic characteristic of w for
/// the kind's exponent (2 for main/alt, r for A_r); throws otherwise.
InductionTrace verify_monotonicity(const BellmanKind& kind, const GridFunction& f, const WeightFunction& w,
                                   double slack = 1e-10);

/// Integral of the kind's lower majorant at the deepest level.
double final_level_majorant(const BellmanKind& kind, const GridFunction& f, const WeightFunction& w);

enum class InequalityId { lower160, upper128, upper_ar };

struct Inequality {
  InequalityId id = InequalityId::lower160;
  double r = 2.0;  ///< exponent for upper_ar

  static Inequality lower160() { return {InequalityId::lower160, 2.0}; }
  static Inequality upper128() { return {InequalityId::upper128, 2.0}; }
  static Inequality upper_ar(double r);

  /// Exponent of the characteristic used on the right-hand side.
  double exponent() const { return id == InequalityId::upper_ar ? r : 2.0; }
  /// 160, 128 or 2r/(2-r).
  double constant() const;
  std::string name() const;
  static Inequality parse(const std::string& name, double r);
};

struct VerificationOutcome {
  double lhs = 0.0;
  double rhs = 0.0;
  double constant_used = 0.0;
  double characteristic = 1.0;
  bool pass = true;
};

/// One named inequality out of a group checked together.
struct NamedOutcome {
  std::string name;
  VerificationOutcome outcome;
};

/// JSON array of {"name","lhs","rhs","constant","characteristic","pass"}.
std::string outcomes_json(const std::vector<NamedOutcome>& outcomes);

///   lower160:  ||f||^2_w  <= 160 [w]_2 ||Sf||^2_w
///   upper128:  ||Sf||^2_w <= 128 [w]_2^2 ||f||^2_w
///   upper_ar:  ||Sf||^2_w <= 2r/(2-r) [w]_r ||f||^2_w
VerificationOutcome verify_inequality(const GridFunction& f, const WeightFunction& w, const Inequality& which);

/// lhs / (rhs with the numeric constant removed); 0 when both sides vanish.
double observed_ratio(const GridFunction& f, const WeightFunction& w, const Inequality& which);

std::string verification_json(const Inequality& which, int depth, const VerificationOutcome& out,
                              const std::vector<double>& trace);

/// A random pair at the given depth whose dyadic A_2 characteristic is at most max_characteristic.
struct RandomInstance {
  GridFunction f;
  GridFunction w;
};
RandomInstance random_instance(int depth, std::uint64_t seed, std::uint64_t index, double max_characteristic = 100.0);

struct HarnessReport {
  std::uint64_t instances = 0;
  std::uint64_t failures = 0;
  double worst_ratio = 0.0;      ///< largest lhs / rhs seen
  std::uint64_t worst_index = 0;
  double max_characteristic = 0.0;
};

/// Runs verify_inequality on `instances` random pairs with depths cycling through [1, max_depth].
HarnessReport run_inequality_harness(const Inequality& which, int max_depth, std::uint64_t instances,
                                     std::uint64_t seed);

struct ExtremizerResult {
  double best_ratio = 0.0;
  GridFunction f;
  GridFunction w;
  std::uint64_t evaluations = 0;
};

/// Hill climbing over the Haar coefficients of f and the log-values of w
/// (w is held fixed when `fixed_weight` is given). Deterministic in seed.
ExtremizerResult extremizer_search(const Inequality& which, int depth, std::uint64_t budget, std::uint64_t seed,
                                   const std::optional<GridFunction>& fixed_weight = std::nullopt);

}  // namespace bsq
