#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "bsq/certify.hpp"

using namespace bsq;

namespace {

double mean_of(std::span<const double> v, std::size_t lo, std::size_t hi) {
  double s = 0.0;
  for (std::size_t i = lo; i < hi; ++i) s += v[i];
  return s / static_cast<double>(hi - lo);
}

// Weighted norms of f and of its square function from brute-force sums.
struct Norms {
  double f2w = 0.0;
  double s2w = 0.0;
};

Norms brute_norms(const GridFunction& f, const GridFunction& w) {
  const int depth = f.depth();
  const std::size_t n = f.size();
  Norms out;
  for (std::size_t x = 0; x < n; ++x) {
    const double m = mean_of(f.values(), 0, n);
    double s2 = m * m;
    for (int k = 0; k < depth; ++k) {
      const std::size_t len = n >> k;
      const std::size_t lo = (x / len) * len;
      const double a = 0.5 * (mean_of(f.values(), lo, lo + len / 2) - mean_of(f.values(), lo + len / 2, lo + len));
      s2 += a * a;
    }
    out.f2w += f[x] * f[x] * w[x] / static_cast<double>(n);
    out.s2w += s2 * w[x] / static_cast<double>(n);
  }
  return out;
}

BellmanKind kind_for(const Inequality& which, const WeightFunction& w) {
  switch (which.id) {
    case InequalityId::lower160: return BellmanKind::main(2.0 * dyadic_ap_characteristic(w, 2.0).characteristic);
    case InequalityId::upper128: return BellmanKind::alt(2.0 * dyadic_ap_characteristic(w, 2.0).characteristic);
    case InequalityId::upper_ar:
      return BellmanKind::ar(2.0 * dyadic_ap_characteristic(w, which.r).characteristic, which.r);
  }
  return BellmanKind::main(2.0);
}

}  // namespace

TEST_CASE("inequality metadata") {
  CHECK(Inequality::lower160().constant() == 160.0);
  CHECK(Inequality::upper128().constant() == 128.0);
  CHECK(Inequality::upper_ar(1.5).constant() == doctest::Approx(6.0));
  CHECK(Inequality::upper_ar(1.5).exponent() == 1.5);
  CHECK(Inequality::parse("upper_ar", 1.25).r == 1.25);
  CHECK(Inequality::parse("lower160", 0.0).name() == "lower160");
  CHECK_THROWS_AS(Inequality::parse("nope", 2.0), std::invalid_argument);
  CHECK_THROWS_AS(Inequality::upper_ar(2.0), std::invalid_argument);
}

TEST_CASE("sequences hold averages and truncated square functions") {
  const RandomInstance inst = random_instance(6, 21, 0);
  const WeightFunction w(inst.w, {2.0, 1.5});
  const DyadicSequences seq = build_sequences(inst.f, w, 1.5);
  REQUIRE(seq.levels.size() == 7);
  const GridFunction v = w.companion(1.5);
  for (int n = 0; n <= 6; ++n) {
    const std::size_t len = std::size_t{64} >> n;
    const GridFunction sn = truncated_square_function(inst.f, n);
    for (std::size_t j = 0; j < (std::size_t{1} << n); ++j) {
      CHECK(seq.levels[n].x[j] == doctest::Approx(mean_of(inst.f.values(), j * len, (j + 1) * len)));
      CHECK(seq.levels[n].w[j] == doctest::Approx(mean_of(inst.w.values(), j * len, (j + 1) * len)));
      CHECK(seq.levels[n].v[j] == doctest::Approx(mean_of(v.values(), j * len, (j + 1) * len)));
      CHECK(seq.levels[n].y[j] == doctest::Approx(sn[j * len] * sn[j * len]).epsilon(1e-12));
    }
  }
  for (int n = 0; n < 6; ++n) {
    for (std::size_t j = 0; j < (std::size_t{1} << n); ++j) {
      const double step = seq.step(n, j);
      CHECK(seq.levels[n + 1].x[2 * j + 1] == doctest::Approx(seq.levels[n].x[j] - step));
    }
  }
  CHECK_THROWS_AS(build_sequences(inst.f, WeightFunction(GridFunction::constant(5, 1.0)), 2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_sequences(inst.f, w, 2.5), std::invalid_argument);
}

TEST_CASE("random instances respect the characteristic cap and are reproducible") {
  for (std::uint64_t i = 0; i < 50; ++i) {
    const int depth = 1 + static_cast<int>(i % 12);
    const RandomInstance a = random_instance(depth, 9, i, 20.0);
    const RandomInstance b = random_instance(depth, 9, i, 20.0);
    CHECK(a.f == b.f);
    CHECK(a.w == b.w);
    CHECK(dyadic_ap_characteristic(WeightFunction(a.w), 2.0).characteristic <= 20.0);
  }
}

TEST_CASE("verification sides match brute force") {
  for (std::uint64_t i = 0; i < 30; ++i) {
    const RandomInstance inst = random_instance(1 + static_cast<int>(i % 7), 4, i);
    const WeightFunction w(inst.w, {2.0, 1.5});
    const Norms nb = brute_norms(inst.f, inst.w);
    const double a2 = dyadic_ap_characteristic(w, 2.0).characteristic;
    const double a15 = dyadic_ap_characteristic(w, 1.5).characteristic;

    const VerificationOutcome lo = verify_inequality(inst.f, w, Inequality::lower160());
    CHECK(lo.lhs == doctest::Approx(nb.f2w).epsilon(1e-12));
    CHECK(lo.rhs == doctest::Approx(160.0 * a2 * nb.s2w).epsilon(1e-12));
    CHECK(lo.pass);

    const VerificationOutcome up = verify_inequality(inst.f, w, Inequality::upper128());
    CHECK(up.lhs == doctest::Approx(nb.s2w).epsilon(1e-12));
    CHECK(up.rhs == doctest::Approx(128.0 * a2 * a2 * nb.f2w).epsilon(1e-12));
    CHECK(up.pass);

    const VerificationOutcome ar = verify_inequality(inst.f, w, Inequality::upper_ar(1.5));
    CHECK(ar.rhs == doctest::Approx(6.0 * a15 * nb.f2w).epsilon(1e-12));
    CHECK(ar.characteristic == doctest::Approx(a15));
    CHECK(ar.pass);

    CHECK(observed_ratio(inst.f, w, Inequality::lower160()) == doctest::Approx(lo.lhs / (lo.rhs / 160.0)));
  }
}

TEST_CASE("unweighted case is the isometry") {
  const RandomInstance inst = random_instance(8, 2, 0);
  const WeightFunction one(GridFunction::constant(8, 1.0));
  const VerificationOutcome out = verify_inequality(inst.f, one, Inequality::upper128());
  CHECK(out.characteristic == doctest::Approx(1.0));
  CHECK(std::abs(out.lhs - inst.f.norm2_squared()) <= 1e-12 * out.lhs);
  CHECK(observed_ratio(inst.f, one, Inequality::upper128()) == doctest::Approx(1.0).epsilon(1e-12));
  const GridFunction zero = GridFunction::constant(8, 0.0);
  CHECK(observed_ratio(zero, one, Inequality::lower160()) == 0.0);
}

TEST_CASE("induction trace does not increase") {
  const Inequality all[] = {Inequality::lower160(), Inequality::upper128(), Inequality::upper_ar(1.5),
                            Inequality::upper_ar(1.9)};
  for (const auto& which : all) {
    for (std::uint64_t i = 0; i < 60; ++i) {
      const RandomInstance inst = random_instance(1 + static_cast<int>(i % 10), 31, i);
      const WeightFunction w(inst.w, {2.0, which.exponent()});
      const BellmanKind kind = kind_for(which, w);
      const InductionTrace tr = verify_monotonicity(kind, inst.f, w);
      CAPTURE(which.name());
      CAPTURE(i);
      CHECK(tr.pass);
      CHECK_FALSE(tr.first_violation.has_value());
      CHECK(tr.integrals.size() == static_cast<std::size_t>(inst.f.depth()) + 1);
      const DyadicSequences seq = build_sequences(inst.f, w, which.exponent());
      const auto& top = seq.levels[0];
      CHECK(tr.integrals[0] == doctest::Approx(eval(kind, {top.x[0], top.y[0], top.w[0], top.v[0]})));
      const double last = tr.integrals.back();
      CHECK(final_level_majorant(kind, inst.f, w) <= last + 1e-10 * (1.0 + std::abs(last)));
    }
  }
}

TEST_CASE("induction refuses a parameter below twice the characteristic") {
  const std::vector<double> levels{1.0, 1.0, 4.0, 4.0};
  const WeightFunction w = make_step_weight(levels);
  const GridFunction f(2, {1.0, -1.0, 2.0, 0.5});
  CHECK_THROWS_AS(verify_monotonicity(BellmanKind::main(2.0), f, w), std::invalid_argument);
  CHECK(verify_monotonicity(BellmanKind::main(2.0 * 25.0 / 16.0), f, w).pass);
}

TEST_CASE("harness finds no counterexample") {
  const Inequality all[] = {Inequality::lower160(), Inequality::upper128(), Inequality::upper_ar(1.25)};
  for (const auto& which : all) {
    const HarnessReport h = run_inequality_harness(which, 8, 100, 12);
    CHECK(h.instances == 100);
    CHECK(h.failures == 0);
    CHECK(h.worst_ratio <= 1.0);
    CHECK(h.worst_ratio > 0.0);
    // The cap is on the A_2 characteristic; A_r for r < 2 can be larger.
    if (which.exponent() == 2.0) CHECK(h.max_characteristic <= 100.0 + 1e-9);
  }
}

TEST_CASE("extremizer search is deterministic and respects the constant") {
  const ExtremizerResult a = extremizer_search(Inequality::upper128(), 4, 300, 5);
  const ExtremizerResult b = extremizer_search(Inequality::upper128(), 4, 300, 5);
  CHECK(a.best_ratio == b.best_ratio);
  CHECK(a.f == b.f);
  CHECK(a.evaluations == 300);
  CHECK(a.best_ratio <= 128.0);
  CHECK(a.best_ratio == doctest::Approx(observed_ratio(a.f, WeightFunction(a.w), Inequality::upper128())));

  const RandomInstance start = random_instance(4, 5, 0);
  const ExtremizerResult one = extremizer_search(Inequality::upper128(), 4, 1, 5);
  CHECK(one.best_ratio == doctest::Approx(observed_ratio(start.f, WeightFunction(start.w), Inequality::upper128())));
  CHECK(a.best_ratio >= one.best_ratio);

  const GridFunction flat = GridFunction::constant(4, 1.0);
  const ExtremizerResult fixed = extremizer_search(Inequality::lower160(), 4, 200, 5, flat);
  CHECK(fixed.w == flat);
  CHECK_THROWS_AS(extremizer_search(Inequality::lower160(), 4, 0, 5), std::invalid_argument);
  CHECK_THROWS_AS(extremizer_search(Inequality::lower160(), 3, 10, 5, flat), std::invalid_argument);
}

TEST_CASE("json helpers") {
  const RandomInstance inst = random_instance(3, 1, 1);
  const WeightFunction w(inst.w);
  const VerificationOutcome out = verify_inequality(inst.f, w, Inequality::lower160());
  const auto j = nlohmann::json::parse(verification_json(Inequality::lower160(), 3, out, {1.0, 0.5}));
  CHECK(j["which"] == "lower160");
  CHECK(j["constant"] == 160.0);
  CHECK(j["pass"] == true);
  CHECK(j["trace"].size() == 2);
  const auto k = nlohmann::json::parse(outcomes_json({{"a", out}}));
  CHECK(k.size() == 1);
  CHECK(k[0]["name"] == "a");
}
