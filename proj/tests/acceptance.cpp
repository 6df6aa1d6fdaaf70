// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "bsq/bellman.hpp"
#include "bsq/certify.hpp"
#include "bsq/cli.hpp"
#include "bsq/dyadic.hpp"
#include "bsq/lp_disc.hpp"
#include "bsq/lp_heat.hpp"
#include "bsq/rng.hpp"
#include "bsq/stochastic.hpp"
#include "bsq/weights.hpp"

using namespace bsq;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

// Collects failure messages; the first few end up in the detail column.
class Ledger {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) messages_ += (messages_.empty() ? "" : "; ") + what;
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : ", ") + s; }
  Verdict verdict() const {
    std::string d = std::to_string(checks_) + " checks";
    if (!notes_.empty()) d += ", " + notes_;
    if (failures_) d += ", " + std::to_string(failures_) + " failed: " + messages_;
    return {failures_ == 0, d};
  }

 private:
  long checks_ = 0;
  long failures_ = 0;
  std::string messages_;
  std::string notes_;
};

std::string num(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<BellmanKind> bellman_plan() {
  std::vector<BellmanKind> kinds;
  for (double c : {1.1, 2.0, 10.0, 100.0}) kinds.push_back(BellmanKind::main(c));
  for (double c : {1.1, 2.0, 10.0, 100.0}) kinds.push_back(BellmanKind::alt(c));
  for (double c : {1.1, 2.0, 10.0})
    for (double r : {1.25, 1.5, 1.9}) kinds.push_back(BellmanKind::ar(c, r));
  return kinds;
}

constexpr std::uint64_t kBellmanSamples = 100000;

Verdict criterion_nsd() {
  Ledger led;
  double worst = -std::numeric_limits<double>::infinity();
  double family_time[3] = {0.0, 0.0, 0.0};
  for (const auto& kind : bellman_plan()) {
    const auto t0 = std::chrono::steady_clock::now();
    const CertReport rep = certify_nsd(kind, kBellmanSamples, 1, 1e-9);
    family_time[static_cast<int>(kind.family)] += seconds_since(t0);
    led.expect(rep.samples == kBellmanSamples, kind.name() + " sample count");
    led.expect(rep.pass && rep.violation_count == 0, kind.name() + " max eigenvalue " + num(rep.max_eigenvalue));
    worst = std::max(worst, rep.max_eigenvalue);
  }
  for (int f = 0; f < 3; ++f) led.expect(family_time[f] < 60.0, "family runtime " + num(family_time[f]) + " s");
  led.note("worst normalised eigenvalue " + num(worst));
  led.note("slowest family " + num(*std::max_element(family_time, family_time + 3), 3) + " s");
  return led.verdict();
}

Verdict criterion_majorization() {
  Ledger led;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& kind : bellman_plan()) {
    const CertReport init = check_majorization_initial(kind, kBellmanSamples, 2, 1e-12);
    const CertReport lower = check_majorization_lower(kind, kBellmanSamples, 3, 1e-12);
    led.expect(init.pass && init.violation_count == 0, kind.name() + " initial " + num(init.max_eigenvalue));
    led.expect(lower.pass && lower.violation_count == 0, kind.name() + " lower " + num(lower.max_eigenvalue));
    worst = std::max({worst, init.max_eigenvalue, lower.max_eigenvalue});
  }
  led.note("worst scaled defect " + num(worst));
  return led.verdict();
}

Verdict criterion_concavity() {
  Ledger led;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& kind : bellman_plan()) {
    const CertReport rep = check_concavity(kind, kBellmanSamples, 4, 1e-9);
    led.expect(rep.samples == kBellmanSamples, kind.name() + " sample count");
    led.expect(rep.pass && rep.violation_count == 0, kind.name() + " concavity " + num(rep.max_eigenvalue));
    worst = std::max(worst, rep.max_eigenvalue);
  }
  const BellmanKind k = BellmanKind::main(2.0);
  const double lhs = 2.0 * eval(k, {1.0, 0.0, 1.5, 1.0});
  const double rhs = eval(k, {0.9, 0.01, 1.4, 1.0}) + eval(k, {1.1, 0.01, 1.6, 1.0});
  // Reference six-digit values, relative tolerance 1e-5.
  led.expect(std::abs(lhs - 3.695902) <= 1e-5 * 3.695902, "worked example LHS " + num(lhs, 10));
  led.expect(std::abs(rhs - 1.397117) <= 1e-5 * 1.397117, "worked example RHS " + num(rhs, 10));
  led.expect(lhs > rhs, "worked example inequality");
  led.expect(std::abs(concavity_defect(k, {1.0, 0.0, 1.5, 1.0}, 0.1, 0.1, 0.0) - (lhs - rhs)) <= 1e-12,
             "worked example defect");
  led.note("worst scaled defect " + num(worst));
  led.note("example " + num(lhs, 7) + " >= " + num(rhs, 7));
  return led.verdict();
}

Verdict criterion_segment_lemma() {
  Ledger led;
  double worst = 0.0;
  for (double c : {1.5, 2.0, 10.0}) {
    for (double r : {1.5, 2.0}) {
      const GeomLemmaResult g = verify_geom_lemma(c, r, 1000000, 5);
      led.expect(g.trials == 1000000, "trial count at c=" + num(c) + " r=" + num(r));
      led.expect(!g.counterexample.has_value(), "counterexample at c=" + num(c) + " r=" + num(r));
      worst = std::max(worst, g.worst_ratio);
    }
  }
  led.note("largest segment product / c " + num(worst));
  return led.verdict();
}

BellmanKind induction_kind(const Inequality& which, const WeightFunction& w) {
  const double a = dyadic_ap_characteristic(w, which.exponent()).characteristic;
  switch (which.id) {
    case InequalityId::lower160: return BellmanKind::main(2.0 * a);
    case InequalityId::upper128: return BellmanKind::alt(2.0 * a);
    case InequalityId::upper_ar: return BellmanKind::ar(2.0 * a, which.r);
  }
  return BellmanKind::main(2.0 * a);
}

Verdict criterion_dyadic() {
  Ledger led;
  const Inequality all[] = {Inequality::lower160(), Inequality::upper128(), Inequality::upper_ar(1.5)};
  double worst_ratio = 0.0;
  double worst_iso = 0.0;
  double max_char = 0.0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const int depth = 1 + static_cast<int>(i % 12);
    const RandomInstance inst = random_instance(depth, 6, i, 100.0);
    const WeightFunction w(inst.w, {2.0, 1.5});
    const double a2 = dyadic_ap_characteristic(w, 2.0).characteristic;
    max_char = std::max(max_char, a2);
    led.expect(a2 <= 100.0 * (1.0 + 1e-12), "instance " + std::to_string(i) + " characteristic " + num(a2));
    for (const auto& which : all) {
      const InductionTrace tr = verify_monotonicity(induction_kind(which, w), inst.f, w, 1e-10);
      led.expect(tr.pass, which.name() + " induction at instance " + std::to_string(i));
      const VerificationOutcome out = verify_inequality(inst.f, w, which);
      led.expect(out.pass, which.name() + " inequality at instance " + std::to_string(i));
      if (out.rhs > 0.0) worst_ratio = std::max(worst_ratio, out.lhs / out.rhs);
    }
    const double s = std::sqrt(square_function(inst.f).norm2_squared());
    const double f = std::sqrt(inst.f.norm2_squared());
    const double rel = std::abs(s - f) / f;
    worst_iso = std::max(worst_iso, rel);
    led.expect(rel <= 1e-12, "isometry at instance " + std::to_string(i) + " off by " + num(rel));
  }
  led.note("largest lhs/rhs " + num(worst_ratio));
  led.note("largest A2 " + num(max_char));
  led.note("isometry error " + num(worst_iso, 3));
  return led.verdict();
}

Verdict criterion_haar() {
  Ledger led;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const int depth = 1 + static_cast<int>(i % 12);
    CounterRng rng(7, i);
    std::vector<double> v(std::size_t{1} << depth);
    double scale = 0.0;
    for (double& x : v) {
      x = rng.normal() * std::exp(rng.uniform(-3.0, 3.0));
      scale = std::max(scale, std::abs(x));
    }
    const GridFunction f(depth, v);
    const HaarCoefficients c = haar_analyze(f);
    const GridFunction back = haar_synthesize(c, depth);
    double err = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) err = std::max(err, std::abs(back[k] - f[k]));
    const double parseval = std::abs(c.parseval_sum() - f.norm2_squared()) / f.norm2_squared();
    worst = std::max({worst, err / scale, parseval});
    led.expect(err <= 1e-12 * scale, "roundtrip at function " + std::to_string(i));
    led.expect(parseval <= 1e-12, "Parseval at function " + std::to_string(i));
  }
  const GridFunction ex(2, {1.0, 2.0, 3.0, 4.0});
  const std::vector<double> coeffs = haar_analyze(ex).flat();
  led.expect(coeffs == std::vector<double>{2.5, -1.0, -0.5, -0.5}, "depth-2 coefficients");
  led.expect(square_function(ex).map([](double s) { return s * s; }).integral() == 7.5, "depth-2 square integral");
  led.note("worst relative error " + num(worst, 3));
  return led.verdict();
}

Verdict criterion_stochastic() {
  Ledger led;
  const auto t0 = std::chrono::steady_clock::now();
  for (double lambda : {0.3, 0.5, 0.7}) {
    for (Integrand rule : {Integrand::one, Integrand::sign_b}) {
      PathConfig cfg;
      cfg.steps = 1024;
      cfg.trials = 100000;
      cfg.T = 1.0;
      cfg.seed = 8;
      const SimReport rep = verify_contmart(cfg, ExpWeightSpec{lambda}, rule);
      const std::string tag = "lambda=" + num(lambda) + " " + integrand_name(rule);
      led.expect(std::abs(rep.e_p_y.mean - 1.0) <= 3.0 * rep.e_p_y.stderr_,
                 tag + " E[Y_T]=" + num(rep.e_p_y.mean));
      led.expect(std::abs(rep.max_product_ratio - 1.0) <= 1e-12,
                 tag + " max Y Z / c = " + num(rep.max_product_ratio, 17));
      for (const auto& chk : rep.checks) led.expect(chk.pass, tag + " " + chk.name);
      led.expect(rep.pass, tag + " report");
      if (lambda == 0.5 && rule == Integrand::one) {
        led.expect(std::abs(rep.e_q_x2.mean - 1.25) <= 3.0 * rep.e_q_x2.stderr_,
                   "Q-mean of X_T^2 " + num(rep.e_q_x2.mean));
        led.note("Q-mean of X_T^2 " + num(rep.e_q_x2.mean) + " +- " + num(rep.e_q_x2.stderr_, 2));
      }
    }
  }
  const double secs = seconds_since(t0);
  led.expect(secs < 120.0, "runtime " + num(secs) + " s");
  led.note(num(secs, 3) + " s");
  return led.verdict();
}

Verdict criterion_disc() {
  Ledger led;
  const DiscGrid grid = DiscGrid::make(64, 1024);
  double worst_identity = 0.0;
  for (std::uint64_t i = 0; i < 9; ++i) {
    CounterRng rng(9, i);
    const TrigPoly f = TrigPoly::random(static_cast<int>(i), rng);
    const std::vector<double> g2 = gstar_sq_disc(f, grid);
    double mean = 0.0;
    for (double v : g2) mean += v / static_cast<double>(g2.size());
    const double expected = f.norm2_squared() - f.mean() * f.mean();
    const double gap = std::abs(mean - expected);
    led.expect(gap <= 0.01 * expected + 1e-14, "identity at degree " + std::to_string(i));
    if (expected > 0.0) worst_identity = std::max(worst_identity, gap / expected);
  }
  {
    const std::vector<double> g2 = gstar_sq_disc(TrigPoly::cosine(1, std::sqrt(2.0)), grid);
    double mean = 0.0;
    for (double v : g2) mean += v / static_cast<double>(g2.size());
    led.expect(std::abs(mean - 1.0) <= 0.01, "first harmonic mean " + num(mean));
    led.note("first harmonic mean " + num(mean, 10));
  }
  for (double beta : {0.0, 0.3, 0.6, 0.9}) {
    const CircleWeight w = CircleWeight::sample([&](double t) { return 1.0 + beta * std::cos(t); }, grid.angular);
    for (std::uint64_t i = 0; i < 3; ++i) {
      CounterRng rng(10, i);
      const TrigPoly f = TrigPoly::random(8, rng);
      for (const auto& o : verify_thm_disc(f, w, grid, 0.01)) {
        led.expect(o.outcome.pass, o.name + " at beta=" + num(beta));
      }
    }
  }
  led.note("worst identity gap " + num(worst_identity, 3));
  return led.verdict();
}

Verdict criterion_heat() {
  Ledger led;
  const HeatGrid grid = HeatGrid::make();
  double worst_identity = 0.0;
  double worst_g = 0.0;
  double worst_area = 0.0;
  const double widths[] = {0.5, 1.0, 2.0};
  const double centers[] = {0.0, 1.5};
  for (double width : widths) {
    for (double center : centers) {
      const std::vector<double> f = grid.sample_function(
          [&](double x) { return std::exp(-(x - center) * (x - center) / (2.0 * width * width)); });
      double norm = 0.0;
      for (double v : f) norm += v * v;
      norm *= grid.h;
      for (double alpha : {0.5, 1.0, 2.0}) {
        const HeatSquareFunctions sf = heat_square_functions(grid, f, alpha);
        if (alpha == 1.0) {
          const double gap = std::abs(grid.integral(sf.gstar2) + sf.tail - norm) / norm;
          worst_identity = std::max(worst_identity, gap);
          led.expect(gap <= 0.02, "identity for width " + num(width) + " off by " + num(gap));
        }
        const HeatDomination d = heat_domination(sf, alpha);
        led.expect(d.pass, "domination at alpha=" + num(alpha) + " width " + num(width));
        worst_g = std::max(worst_g, d.g_ratio / d.g_bound);
        worst_area = std::max(worst_area, d.area_ratio / d.area_bound);
      }
    }
  }
  const std::vector<double> f = grid.sample_function([](double x) { return std::exp(-x * x / 2.0); });
  for (double beta : {0.0, 0.5, 0.9}) {
    const std::vector<double> w = grid.sample_weight([&](double x) { return 1.0 + beta * std::tanh(x); });
    for (const auto& o : verify_thm_heat(grid, f, w, 0.02)) led.expect(o.outcome.pass, o.name + " at beta=" + num(beta));
  }
  led.note("worst identity gap " + num(worst_identity, 3));
  led.note("G/G* at " + num(worst_g, 4) + " of bound");
  led.note("area/G* at " + num(worst_area, 4) + " of bound");
  return led.verdict();
}

Verdict criterion_weights() {
  Ledger led;
  for (std::uint64_t i = 0; i < 50; ++i) {
    CounterRng rng(11, i);
    const int depth = 1 + static_cast<int>(i % 10);
    std::vector<double> levels(std::size_t{1} << depth);
    for (double& x : levels) x = std::exp(rng.uniform(-3.0, 3.0));
    const WeightFunction w = make_step_weight(levels);
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 40; ++k) {
      const double p = 1.0 + 0.1 * k;
      const double a = dyadic_ap_characteristic(w, p).characteristic;
      led.expect(a <= prev * (1.0 + 1e-12), "weight " + std::to_string(i) + " increases at p=" + num(p));
      prev = a;
    }
  }
  for (double alpha : {-0.5, 0.9, 3.0}) {
    const WeightFunction w = make_power_weight(alpha, 10);
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 40; ++k) {
      const double a = dyadic_ap_characteristic(w, 1.0 + 0.1 * k).characteristic;
      led.expect(a <= prev * (1.0 + 1e-12), "power weight " + num(alpha) + " increases in p");
      prev = a;
    }
  }
  const std::vector<double> two_step{1.0, 1.0, 4.0, 4.0};
  const double a = dyadic_ap_characteristic(make_step_weight(two_step), 2.0).characteristic;
  led.expect(a == 25.0 / 16.0, "two-step characteristic " + num(a, 17));
  std::string growth;
  double prev = 0.0;
  for (int depth = 4; depth <= 12; ++depth) {
    const double v = dyadic_ap_characteristic(make_power_weight(0.9, depth), 2.0).characteristic;
    led.expect(v > prev, "power weight not increasing at depth " + std::to_string(depth));
    growth += (growth.empty() ? "" : " ") + num(v, 5);
    prev = v;
  }
  led.note("two-step " + num(a, 17));
  led.note("alpha 0.9 depths 4-12: " + growth);
  return led.verdict();
}

std::string read_all(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict criterion_reproducible() {
  Ledger led;
  const std::vector<std::vector<std::string>> suites{
      {"certify-bellman", "--kind", "main", "--c", "2", "--samples", "20000", "--seed", "7"},
      {"certify-bellman", "--kind", "ar", "--c", "10", "--r", "1.25", "--samples", "20000", "--seed", "7"},
      {"verify-dyadic", "--which", "upper128", "--depth", "8", "--instances", "100", "--seed", "1"},
      {"geom-lemma", "--c", "2", "--r", "1.5", "--trials", "100000", "--seed", "3"},
      {"simulate-martingale", "--lambda", "0.5", "--steps", "256", "--trials", "20000", "--seed", "4",
       "--integrand", "sign_b"},
      {"lp-disc", "--degree", "6", "--beta", "0.6", "--angular", "512", "--seed", "5"},
      {"lp-heat", "--beta", "0.5", "--L", "8", "--spacing", "0.03125"},
      {"search-extremizer", "--which", "upper_ar", "--r", "1.5", "--depth", "5", "--samples", "500", "--seed", "6"},
      {"ap-probe", "--alpha", "0.9", "--depth", "10"},
  };
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "bsq_acceptance";
  std::filesystem::create_directories(dir);
  int n = 0;
  for (const auto& base : suites) {
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "2", "4"}) {
      ::setenv("BSQ_THREADS", threads, 1);
      const auto path = dir / (base[0] + "_" + std::to_string(n) + "_" + threads + ".json");
      std::vector<std::string> args(base);
      args.insert(args.end(), {"--out", path.string()});
      const int code = bsq::cli::run(args);
      led.expect(code == 0, base[0] + " exited with " + std::to_string(code));
      outputs.push_back(read_all(path));
    }
    ::unsetenv("BSQ_THREADS");
    led.expect(!outputs[0].empty(), base[0] + " wrote nothing");
    led.expect(outputs[0] == outputs[1] && outputs[0] == outputs[2], base[0] + " differs across thread counts");
    ++n;
  }
  led.note(std::to_string(suites.size()) + " suites at 1, 2 and 4 threads");
  return led.verdict();
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "Bellman matrix negative semidefinite", criterion_nsd},
      {2, "Bellman majorization", criterion_majorization},
      {3, "Bellman concavity and worked example", criterion_concavity},
      {4, "segment lemma sampling", criterion_segment_lemma},
      {5, "dyadic induction and inequalities", criterion_dyadic},
      {6, "Haar roundtrip and Parseval", criterion_haar},
      {7, "weighted martingale simulation", criterion_stochastic},
      {8, "disc g_* identities and inequalities", criterion_disc},
      {9, "heat G_* identity, domination and inequalities", criterion_heat},
      {10, "A_p characteristic", criterion_weights},
      {11, "reproducibility across thread counts", criterion_reproducible},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  %2d  %s (%.1f s): %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, seconds_since(t0),
                v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
