#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bsq {

/// Deepest grid supported by the dyadic layer (2^20 cells).
inline constexpr int kMaxDepth = 20;

/// The dyadic interval [index * 2^-level, (index + 1) * 2^-level).
struct DyadicInterval {
  int level = 0;
  std::int64_t index = 0;

  double left() const noexcept;
  double right() const noexcept;
  double measure() const noexcept;
  DyadicInterval parent() const;
  DyadicInterval left_child() const noexcept { return {level + 1, 2 * index}; }
  DyadicInterval right_child() const noexcept { return {level + 1, 2 * index + 1}; }
  bool contains(double x) const noexcept { return left() <= x && x < right(); }

  friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;
};

/// A real function on [0,1) that is constant on each of the 2^depth cells of
/// the depth-N dyadic grid.
class GridFunction {
 public:
  GridFunction() = default;
  /// Throws std::invalid_argument unless values.size() == 2^depth.
  GridFunction(int depth, std::vector<double> values);

  static GridFunction constant(int depth, double value);

  int depth() const noexcept { return depth_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double cell_measure() const noexcept;

  /// Lebesgue integral over [0,1) (exact finite sum).
  double integral() const;
  double mean() const { return integral(); }
  /// (integral of f^2)
  double norm2_squared() const;
  /// (integral of f^2 w); w must share the depth.
  double weighted_norm2_squared(const GridFunction& weight) const;

  GridFunction map(double (*fn)(double)) const;

  // Serialization. Doubles are printed with 17 significant digits.
  std::string to_csv() const;
  std::string to_json() const;
  static GridFunction from_csv(std::string_view line);
  static GridFunction from_json(std::string_view text);

  friend bool operator==(const GridFunction&, const GridFunction&) = default;

 private:
  int depth_ = 0;
  std::vector<double> values_{0.0};
};

/// Haar coefficients a_I = <f, h_I> / |I| for all dyadic I of level < depth,
/// plus the coefficient of the indicator h_0 (the mean).
///
/// detail[k][j] belongs to the interval (level k, index j); h_I is +1 on the
/// left half of I and -1 on the right half.
struct HaarCoefficients {
  int depth = 0;
  double mean = 0.0;
  std::vector<std::vector<double>> detail;

  static HaarCoefficients zeros(int depth);
  double at(const DyadicInterval& interval) const;
  /// mean^2 + sum a_I^2 |I|; equals the squared L2 norm of the function.
  double parseval_sum() const;
  /// Flat enumeration h_0, h_1, h_2, ... (level-major, left to right).
  std::vector<double> flat() const;

  friend bool operator==(const HaarCoefficients&, const HaarCoefficients&) = default;
};

HaarCoefficients haar_analyze(const GridFunction& f);

/// Inverse of haar_analyze. Throws std::invalid_argument when the coefficient
/// tree does not have the requested depth.
GridFunction haar_synthesize(const HaarCoefficients& c, int depth);

/// Conditional expectation onto the level-n dyadic sigma-algebra, returned at
/// the depth of f (constant on level-n cells). Throws if n > depth(f).
GridFunction project(const GridFunction& f, int n);

/// Cell averages of f at level n (2^n values).
std::vector<double> level_averages(const GridFunction& f, int n);

/// S(f)(x) = (sum over Haar functions whose support contains x of a_I^2)^(1/2),
/// the h_0 term included.
GridFunction square_function(const GridFunction& f);

/// S_n(f) = S(project(f, n)).
GridFunction truncated_square_function(const GridFunction& f, int n);

}  // namespace bsq
