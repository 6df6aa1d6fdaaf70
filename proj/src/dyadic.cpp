#include "bsq/dyadic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "bsq/format.hpp"
#include "json.hpp"

namespace bsq {
namespace {

void check_depth(int depth) {
  if (depth < 0 || depth > kMaxDepth) {
    throw std::invalid_argument("dyadic depth must lie in [0, " + std::to_string(kMaxDepth) +
                                "], got " + std::to_string(depth));
  }
}

// Level-k cell sums of f, for k = depth down to n.
std::vector<double> level_sums(std::span<const double> values, int depth, int n) {
  std::vector<double> sums(values.begin(), values.end());
  for (int k = depth; k > n; --k) {
    const std::size_t half = sums.size() / 2;
    for (std::size_t j = 0; j < half; ++j) sums[j] = sums[2 * j] + sums[2 * j + 1];
    sums.resize(half);
  }
  return sums;
}

}  // namespace

double DyadicInterval::left() const noexcept { return std::ldexp(static_cast<double>(index), -level); }
double DyadicInterval::right() const noexcept {
  return std::ldexp(static_cast<double>(index + 1), -level);
}
double DyadicInterval::measure() const noexcept { return std::ldexp(1.0, -level); }

DyadicInterval DyadicInterval::parent() const {
  if (level == 0) throw std::invalid_argument("the unit interval has no parent");
  return {level - 1, index / 2};
}

GridFunction::GridFunction(int depth, std::vector<double> values) : depth_(depth), values_(std::move(values)) {
  check_depth(depth);
  if (values_.size() != (std::size_t{1} << depth)) {
    throw std::invalid_argument("grid function of depth " + std::to_string(depth) + " needs " +
                                std::to_string(std::size_t{1} << depth) + " values, got " +
                                std::to_string(values_.size()));
  }
}

GridFunction GridFunction::constant(int depth, double value) {
  check_depth(depth);
  return GridFunction(depth, std::vector<double>(std::size_t{1} << depth, value));
}

double GridFunction::cell_measure() const noexcept { return std::ldexp(1.0, -depth_); }

double GridFunction::integral() const { return level_sums(values_, depth_, 0)[0] * cell_measure(); }

double GridFunction::norm2_squared() const {
  std::vector<double> sq(values_.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = values_[i] * values_[i];
  return level_sums(sq, depth_, 0)[0] * cell_measure();
}

double GridFunction::weighted_norm2_squared(const GridFunction& weight) const {
  if (weight.depth_ != depth_) throw std::invalid_argument("weight depth differs from function depth");
  std::vector<double> sq(values_.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = values_[i] * values_[i] * weight.values_[i];
  return level_sums(sq, depth_, 0)[0] * cell_measure();
}

GridFunction GridFunction::map(double (*fn)(double)) const {
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(values_[i]);
  return GridFunction(depth_, std::move(out));
}

std::string GridFunction::to_csv() const {
  std::string out = std::to_string(depth_);
  for (double v : values_) {
    out += ',';
    out += fmt17(v);
  }
  return out;
}

std::string GridFunction::to_json() const {
  std::string out = "{\"depth\": " + std::to_string(depth_) + ", \"values\": [";
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (i) out += ", ";
    out += fmt17(values_[i]);
  }
  return out + "]}";
}

GridFunction GridFunction::from_csv(std::string_view line) {
  std::stringstream in{std::string(line)};
  std::string field;
  if (!std::getline(in, field, ',')) throw std::invalid_argument("empty grid function CSV");
  const int depth = std::stoi(field);
  std::vector<double> values;
  while (std::getline(in, field, ',')) values.push_back(std::stod(field));
  return GridFunction(depth, std::move(values));
}

GridFunction GridFunction::from_json(std::string_view text) {
  const auto doc = nlohmann::json::parse(text);
  return GridFunction(doc.at("depth").get<int>(), doc.at("values").get<std::vector<double>>());
}

HaarCoefficients HaarCoefficients::zeros(int depth) {
  check_depth(depth);
  HaarCoefficients c;
  c.depth = depth;
  c.detail.resize(static_cast<std::size_t>(depth));
  for (int k = 0; k < depth; ++k) c.detail[k].assign(std::size_t{1} << k, 0.0);
  return c;
}

double HaarCoefficients::at(const DyadicInterval& interval) const {
  return detail.at(static_cast<std::size_t>(interval.level)).at(static_cast<std::size_t>(interval.index));
}

double HaarCoefficients::parseval_sum() const {
  double total = mean * mean;
  for (std::size_t k = 0; k < detail.size(); ++k) {
    double level = 0.0;
    for (double a : detail[k]) level += a * a;
    total += std::ldexp(level, -static_cast<int>(k));
  }
  return total;
}

std::vector<double> HaarCoefficients::flat() const {
  std::vector<double> out{mean};
  for (const auto& level : detail) out.insert(out.end(), level.begin(), level.end());
  return out;
}

HaarCoefficients haar_analyze(const GridFunction& f) {
  const int depth = f.depth();
  HaarCoefficients c = HaarCoefficients::zeros(depth);
  // Averages at the current level, coarsened one level per pass.
  std::vector<double> avg(f.values().begin(), f.values().end());
  for (int k = depth - 1; k >= 0; --k) {
    const std::size_t n = std::size_t{1} << k;
    for (std::size_t j = 0; j < n; ++j) {
      const double lo = avg[2 * j];
      const double hi = avg[2 * j + 1];
      c.detail[k][j] = 0.5 * (lo - hi);
      avg[j] = 0.5 * (lo + hi);
    }
    avg.resize(n);
  }
  c.mean = avg[0];
  return c;
}

GridFunction haar_synthesize(const HaarCoefficients& c, int depth) {
  if (c.depth != depth || c.detail.size() != static_cast<std::size_t>(depth)) {
    throw std::invalid_argument("Haar coefficient tree has depth " + std::to_string(c.depth) +
                                ", requested " + std::to_string(depth));
  }
  std::vector<double> avg{c.mean};
  for (int k = 0; k < depth; ++k) {
    if (c.detail[k].size() != (std::size_t{1} << k)) {
      throw std::invalid_argument("Haar level " + std::to_string(k) + " has the wrong size");
    }
    std::vector<double> next(avg.size() * 2);
    for (std::size_t j = 0; j < avg.size(); ++j) {
      next[2 * j] = avg[j] + c.detail[k][j];
      next[2 * j + 1] = avg[j] - c.detail[k][j];
    }
    avg = std::move(next);
  }
  return GridFunction(depth, std::move(avg));
}

std::vector<double> level_averages(const GridFunction& f, int n) {
  if (n < 0 || n > f.depth()) {
    throw std::invalid_argument("projection level " + std::to_string(n) + " outside [0, " +
                                std::to_string(f.depth()) + "]");
  }
  auto sums = level_sums(f.values(), f.depth(), n);
  const double scale = std::ldexp(1.0, n - f.depth());
  for (double& s : sums) s *= scale;
  return sums;
}

GridFunction project(const GridFunction& f, int n) {
  const auto avg = level_averages(f, n);
  const std::size_t run = std::size_t{1} << (f.depth() - n);
  std::vector<double> out(f.size());
  for (std::size_t j = 0; j < avg.size(); ++j) {
    for (std::size_t i = 0; i < run; ++i) out[j * run + i] = avg[j];
  }
  return GridFunction(f.depth(), std::move(out));
}

namespace {

// sqrt(mean^2 + sum over levels k < n of a_{I_k(x)}^2), at the depth of c.
GridFunction square_function_from(const HaarCoefficients& c, int n) {
  const int depth = c.depth;
  std::vector<double> acc(std::size_t{1} << depth, c.mean * c.mean);
  for (int k = 0; k < n; ++k) {
    const std::size_t run = std::size_t{1} << (depth - k);
    for (std::size_t j = 0; j < c.detail[k].size(); ++j) {
      const double a2 = c.detail[k][j] * c.detail[k][j];
      for (std::size_t i = 0; i < run; ++i) acc[j * run + i] += a2;
    }
  }
  for (double& v : acc) v = std::sqrt(v);
  return GridFunction(depth, std::move(acc));
}

}  // namespace

GridFunction square_function(const GridFunction& f) {
  return square_function_from(haar_analyze(f), f.depth());
}

GridFunction truncated_square_function(const GridFunction& f, int n) {
  if (n < 0 || n > f.depth()) {
    throw std::invalid_argument("truncation level " + std::to_string(n) + " outside [0, " +
                                std::to_string(f.depth()) + "]");
  }
  // The Haar coefficients of project(f, n) are those of f below level n.
  return square_function_from(haar_analyze(f), n);
}

}  // namespace bsq
