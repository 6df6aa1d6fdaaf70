#include "bsq/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"

#include "bsq/bellman.hpp"
#include "bsq/certify.hpp"
#include "bsq/format.hpp"
#include "bsq/lp_disc.hpp"
#include "bsq/lp_heat.hpp"
#include "bsq/parallel.hpp"
#include "bsq/stochastic.hpp"
#include "bsq/weights.hpp"

namespace bsq::cli {

using nlohmann::ordered_json;

bool SuiteReport::pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

std::string SuiteReport::to_json() const {
  ordered_json j;
  j["schema"] = kSchemaVersion;
  j["tool"] = "bsq";
  j["version"] = kToolVersion;
  j["subcommand"] = subcommand;
  j["config"] = config;
  ordered_json rows = ordered_json::array();
  for (const auto& c : checks) {
    ordered_json row;
    row["name"] = c.name;
    row["lhs"] = c.lhs;
    row["rhs"] = c.rhs;
    row["margin"] = c.rhs - c.lhs;
    row["pass"] = c.pass;
    rows.push_back(std::move(row));
  }
  j["checks"] = std::move(rows);
  j["pass"] = pass();
  j["details"] = details.is_null() ? ordered_json::object() : details;
  return j.dump(2) + "\n";
}

std::string SuiteReport::to_csv() const {
  std::string out = "check,lhs,rhs,margin,pass\n";
  for (const auto& c : checks) {
    out += c.name + "," + fmt17(c.lhs) + "," + fmt17(c.rhs) + "," + fmt17(c.rhs - c.lhs) + "," +
           (c.pass ? "true" : "false") + "\n";
  }
  return out;
}

namespace {

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
};

void add_common(CLI::App* sub, Common& common) {
  sub->add_option("--seed", common.seed, "RNG seed");
  sub->add_option("--out", common.out, "Write the report here instead of stdout");
  sub->add_option("--format", common.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ordered_json parsed(const std::string& text) { return ordered_json::parse(text); }

BellmanKind parse_kind(const std::string& name, double c, double r) {
  if (name == "main") return BellmanKind::main(c);
  if (name == "ar") return BellmanKind::ar(c, r);
  if (name == "alt") return BellmanKind::alt(c);
  throw std::invalid_argument("unknown kind '" + name + "' (expected main, ar or alt)");
}

CheckRecord cert_record(const CertReport& rep) {
  return {rep.check, rep.max_eigenvalue, rep.tolerance, rep.pass};
}

// certify-bellman

struct CertifyOpts {
  std::string kind = "main";
  double c = 2.0;
  double r = 1.5;
  std::uint64_t samples = 100000;
  double tol = 1e-9;
};

SuiteReport certify_bellman(const CertifyOpts& o, const Common& common) {
  const BellmanKind kind = parse_kind(o.kind, o.c, o.r);
  SuiteReport rep;
  rep.config = {{"kind", o.kind}, {"c", o.c}, {"r", o.r}, {"samples", o.samples}, {"tol", o.tol},
                {"seed", common.seed}};
  const CertReport reports[] = {
      certify_nsd(kind, o.samples, common.seed, o.tol),
      check_majorization_initial(kind, o.samples, common.seed),
      check_majorization_lower(kind, o.samples, common.seed),
      check_concavity(kind, o.samples, common.seed),
  };
  rep.details["reports"] = ordered_json::array();
  for (const auto& r : reports) {
    rep.checks.push_back(cert_record(r));
    rep.details["reports"].push_back(parsed(r.to_json()));
  }
  return rep;
}

// verify-dyadic

struct DyadicOpts {
  std::string which = "lower160";
  double r = 1.5;
  int depth = 10;
  std::uint64_t instances = 100;
};

BellmanKind induction_kind(const Inequality& which, const WeightFunction& w) {
  switch (which.id) {
    case InequalityId::lower160: return BellmanKind::main(2.0 * dyadic_ap_characteristic(w, 2.0).characteristic);
    case InequalityId::upper128: return BellmanKind::alt(2.0 * dyadic_ap_characteristic(w, 2.0).characteristic);
    case InequalityId::upper_ar:
      return BellmanKind::ar(2.0 * dyadic_ap_characteristic(w, which.r).characteristic, which.r);
  }
  throw std::logic_error("unreachable");
}

SuiteReport verify_dyadic(const DyadicOpts& o, const Common& common) {
  const Inequality which = Inequality::parse(o.which, o.r);
  if (o.depth < 1 || o.depth > kMaxDepth) throw std::invalid_argument("depth must lie in [1, 20]");
  SuiteReport rep;
  rep.config = {{"which", o.which}, {"r", which.r}, {"depth", o.depth}, {"instances", o.instances},
                {"seed", common.seed}};
  const HarnessReport h = run_inequality_harness(which, o.depth, o.instances, common.seed);
  rep.checks.push_back({which.name(), h.worst_ratio, 1.0, h.failures == 0});

  struct Trace {
    double worst_step = 0.0;
    std::uint64_t failures = 0;
    std::uint64_t first_failure = std::numeric_limits<std::uint64_t>::max();
  };
  const auto depth_of = [&](std::size_t i) { return 1 + static_cast<int>(i % static_cast<std::size_t>(o.depth)); };
  const Trace t = chunked_reduce(
      static_cast<std::size_t>(o.instances), 16, Trace{},
      [&](std::size_t begin, std::size_t end) {
        Trace part;
        for (std::size_t i = begin; i < end; ++i) {
          const RandomInstance inst = random_instance(depth_of(i), common.seed, i);
          const WeightFunction w(inst.w, {2.0, which.exponent()});
          const InductionTrace tr = verify_monotonicity(induction_kind(which, w), inst.f, w);
          part.worst_step = std::max(part.worst_step, tr.worst_step);
          if (!tr.pass) {
            ++part.failures;
            part.first_failure = std::min<std::uint64_t>(part.first_failure, i);
          }
        }
        return part;
      },
      [](Trace a, const Trace& b) {
        a.worst_step = std::max(a.worst_step, b.worst_step);
        a.failures += b.failures;
        a.first_failure = std::min(a.first_failure, b.first_failure);
        return a;
      });
  rep.checks.push_back({"induction_monotone", t.worst_step, 1e-10, t.failures == 0});

  rep.details["instances"] = h.instances;
  rep.details["failures"] = h.failures;
  rep.details["worst_ratio"] = h.worst_ratio;
  rep.details["worst_index"] = h.worst_index;
  rep.details["max_characteristic"] = h.max_characteristic;
  rep.details["induction_failures"] = t.failures;
  if (h.failures > 0 || t.failures > 0) {
    const std::uint64_t idx = h.failures > 0 ? h.worst_index : t.first_failure;
    const RandomInstance inst = random_instance(depth_of(idx), common.seed, idx);
    rep.details["witness"] = {{"index", idx}, {"f", parsed(inst.f.to_json())}, {"w", parsed(inst.w.to_json())}};
  }
  return rep;
}

// geom-lemma

struct GeomOpts {
  double c = 2.0;
  double r = 2.0;
  std::uint64_t trials = 1000000;
};

SuiteReport geom_lemma(const GeomOpts& o, const Common& common) {
  SuiteReport rep;
  rep.config = {{"c", o.c}, {"r", o.r}, {"trials", o.trials}, {"seed", common.seed}};
  const GeomLemmaResult g = verify_geom_lemma(o.c, o.r, o.trials, common.seed);
  rep.checks.push_back({"segment_in_doubled_domain", g.worst_ratio, 2.0, !g.counterexample});
  rep.details["trials"] = g.trials;
  rep.details["rejected"] = g.rejected;
  if (g.counterexample) {
    const auto& ce = *g.counterexample;
    rep.details["witness"] = {{"trial", ce.trial},
                              {"p", {ce.p.w, ce.p.v}},
                              {"q", {ce.q.w, ce.q.v}},
                              {"segment_max", ce.segment_max}};
  }
  return rep;
}

// simulate-martingale

struct MartOpts {
  double lambda = 0.5;
  double T = 1.0;
  std::uint64_t steps = 1024;
  std::uint64_t trials = 100000;
  std::string integrand = "one";
};

SuiteReport simulate_martingale(const MartOpts& o, const Common& common) {
  PathConfig cfg;
  cfg.T = o.T;
  cfg.steps = o.steps;
  cfg.trials = o.trials;
  cfg.seed = common.seed;
  const Integrand rule = parse_integrand(o.integrand);
  SuiteReport rep;
  rep.config = {{"lambda", o.lambda}, {"T", o.T},          {"steps", o.steps},
                {"trials", o.trials}, {"integrand", o.integrand}, {"seed", common.seed}};
  const SimReport sim = verify_contmart(cfg, ExpWeightSpec{o.lambda}, rule);
  for (const auto& c : sim.checks) rep.checks.push_back({c.name, c.lhs, c.rhs, c.pass});
  rep.checks.push_back({"product_le_c", sim.max_product_ratio, 1.0 + 1e-12, sim.max_product_ratio <= 1.0 + 1e-12});
  rep.details = parsed(sim.to_json());
  return rep;
}

// lp-disc

struct DiscOpts {
  std::string poly;
  int degree = 8;
  double beta = 0.6;
  std::string weight_file;
  int radial = 64;
  std::size_t angular = 1024;
  double alpha = 0.5;
  double tol = 0.01;
};

SuiteReport lp_disc(const DiscOpts& o, const Common& common) {
  TrigPoly f;
  if (!o.poly.empty()) {
    f = TrigPoly::from_json(o.poly.front() == '{' ? o.poly : read_file(o.poly));
  } else {
    CounterRng rng(common.seed, 0);
    f = TrigPoly::random(o.degree, rng);
  }
  const DiscGrid grid = DiscGrid::make(o.radial, o.angular);
  const CircleWeight w = o.weight_file.empty()
                             ? CircleWeight::sample([&](double th) { return 1.0 + o.beta * std::cos(th); }, o.angular)
                             : CircleWeight::from_csv(read_file(o.weight_file));
  if (w.size() != grid.angular) throw std::invalid_argument("weight sample count must equal --angular");

  SuiteReport rep;
  rep.config = {{"poly", parsed(f.to_json())},
                {"weight", o.weight_file.empty() ? "1+beta*cos" : o.weight_file},
                {"beta", o.beta},
                {"radial", o.radial},
                {"angular", o.angular},
                {"alpha", o.alpha},
                {"tol", o.tol},
                {"seed", common.seed}};

  const std::vector<double> g2 = gstar_sq_disc(f, grid);
  double mean = 0.0;
  for (double v : g2) mean += v;
  mean /= static_cast<double>(g2.size());
  const double expected = f.norm2_squared() - f.mean() * f.mean();
  const double gap = std::abs(mean - expected);
  rep.checks.push_back({"energy_identity", gap, o.tol * expected, gap <= o.tol * expected + 1e-14});
  for (const auto& n : verify_thm_disc(f, w, grid, o.tol)) {
    rep.checks.push_back({n.name, n.outcome.lhs, n.outcome.rhs * (1.0 + o.tol), n.outcome.pass});
  }
  rep.details["outcomes"] = parsed(outcomes_json(verify_thm_disc(f, w, grid, o.tol)));
  const PoissonApEstimate a2 = poisson_ap_disc(w, 2.0);
  rep.details["a2"] = {{"value", a2.value}, {"r", a2.r}, {"theta", a2.theta}};
  const DominationRatios dr = domination_ratios_disc(f, o.alpha, grid);
  rep.details["g_over_gstar"] = dr.g_over_gstar;
  rep.details["area_over_gstar"] = dr.area_over_gstar;
  return rep;
}

// lp-heat

struct HeatOpts {
  double beta = 0.5;
  double width = 1.0;
  double center = 0.0;
  double alpha = 1.0;
  double tol = 0.02;
  double L = 16.0;
  double h = 1.0 / 64.0;
};

SuiteReport lp_heat(const HeatOpts& o, const Common& common) {
  if (!(std::abs(o.beta) < 1.0)) throw std::invalid_argument("--beta must lie in (-1, 1)");
  if (!(o.width > 0.0)) throw std::invalid_argument("--width must be positive");
  const HeatGrid grid = HeatGrid::make(o.L, o.h);
  const std::vector<double> f =
      grid.sample_function([&](double x) { return std::exp(-(x - o.center) * (x - o.center) / (2.0 * o.width * o.width)); });
  const std::vector<double> w = grid.sample_weight([&](double x) { return 1.0 + o.beta * std::tanh(x); });

  SuiteReport rep;
  rep.config = {{"f", "exp(-(x-center)^2/(2 width^2))"},
                {"weight", "1+beta*tanh(x)"},
                {"beta", o.beta},
                {"width", o.width},
                {"center", o.center},
                {"alpha", o.alpha},
                {"tol", o.tol},
                {"L", o.L},
                {"spacing", o.h},
                {"seed", common.seed}};

  const HeatSquareFunctions sf = heat_square_functions(grid, f, o.alpha);
  std::vector<double> f2(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) f2[i] = f[i] * f[i];
  const double norm = grid.integral(f2);
  const double energy = grid.integral(sf.gstar2) + sf.tail;
  const double gap = std::abs(energy - norm);
  rep.checks.push_back({"energy_identity", gap, o.tol * norm, gap <= o.tol * norm});

  const HeatDomination dom = heat_domination(sf, o.alpha);
  rep.checks.push_back({"g_le_sqrt2_gstar", dom.g_ratio, dom.g_bound, dom.pass});
  rep.checks.push_back({"area_le_const_gstar", dom.area_ratio, dom.area_bound, dom.pass});

  const auto outcomes = verify_thm_heat(grid, f, w, o.tol);
  for (const auto& n : outcomes) {
    rep.checks.push_back({n.name, n.outcome.lhs, n.outcome.rhs * (1.0 + o.tol), n.outcome.pass});
  }
  rep.details["outcomes"] = parsed(outcomes_json(outcomes));
  const A2Comparison cmp = compare_a2_classical_heat(grid, w);
  rep.details["a2"] = {{"heat", cmp.heat}, {"classical", cmp.classical}, {"ratio", cmp.ratio}};
  rep.details["tail"] = sf.tail;
  return rep;
}

// search-extremizer

struct SearchOpts {
  std::string which = "lower160";
  double r = 1.5;
  int depth = 6;
  std::uint64_t budget = 2000;
};

SuiteReport search_extremizer(const SearchOpts& o, const Common& common) {
  const Inequality which = Inequality::parse(o.which, o.r);
  if (o.depth < 1 || o.depth > kMaxDepth) throw std::invalid_argument("depth must lie in [1, 20]");
  SuiteReport rep;
  rep.config = {{"which", o.which}, {"r", which.r}, {"depth", o.depth}, {"samples", o.budget}, {"seed", common.seed}};
  const ExtremizerResult ex = extremizer_search(which, o.depth, o.budget, common.seed);
  rep.checks.push_back({which.name(), ex.best_ratio, which.constant(), ex.best_ratio <= which.constant()});
  rep.details["evaluations"] = ex.evaluations;
  rep.details["best_ratio"] = ex.best_ratio;
  rep.details["f"] = parsed(ex.f.to_json());
  rep.details["w"] = parsed(ex.w.to_json());
  return rep;
}

// ap-probe

struct ApOpts {
  double alpha = 0.9;
  int depth = 10;
  double p = 2.0;
  std::string weight_file;
  double tol = 1e-12;
};

SuiteReport ap_probe(const ApOpts& o, const Common& common) {
  if (!(o.p > 1.0)) throw std::invalid_argument("--p must exceed 1");
  const WeightFunction w = o.weight_file.empty() ? make_power_weight(o.alpha, o.depth)
                                                 : WeightFunction(GridFunction::from_csv(read_file(o.weight_file)));
  std::vector<double> grid;
  for (int i = 1; 1.0 + 0.05 * i < o.p + 1e-12; ++i) grid.push_back(1.0 + 0.05 * i);
  if (grid.empty() || grid.back() < o.p) grid.push_back(o.p);
  const std::vector<ProbePoint> probe = cf_epsilon_probe(w, o.p, grid);

  SuiteReport rep;
  rep.config = {{"weight", o.weight_file.empty() ? "power" : o.weight_file},
                {"alpha", o.alpha},
                {"depth", w.depth()},
                {"p", o.p},
                {"tol", o.tol},
                {"seed", common.seed}};
  double worst = 0.0;
  for (std::size_t i = 1; i < probe.size(); ++i) {
    worst = std::max(worst, (probe[i].characteristic - probe[i - 1].characteristic) / probe[i - 1].characteristic);
  }
  rep.checks.push_back({"ap_nonincreasing_in_p", worst, o.tol, worst <= o.tol});
  ordered_json rows = ordered_json::array();
  for (const auto& pt : probe) rows.push_back({{"r", pt.r}, {"characteristic", pt.characteristic}});
  rep.details["probe"] = std::move(rows);
  return rep;
}

void emit(const SuiteReport& rep, const Common& common) {
  const std::string text = common.format == "csv" ? rep.to_csv() : rep.to_json();
  if (common.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(common.out);
  if (!out) throw std::invalid_argument("cannot write '" + common.out + "'");
  out << text;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Numerical checks for weighted square-function inequalities", "bsq"};
  app.require_subcommand(1);
  Common common;

  CertifyOpts certify;
  auto* c1 = app.add_subcommand("certify-bellman", "Sample NSD, majorization and concavity of a Bellman function");
  add_common(c1, common);
  c1->add_option("--kind", certify.kind)->check(CLI::IsMember({"main", "ar", "alt"}));
  c1->add_option("--c", certify.c);
  c1->add_option("--r", certify.r);
  c1->add_option("--samples,--trials", certify.samples);
  c1->add_option("--tol", certify.tol);

  DyadicOpts dyadic;
  auto* c2 = app.add_subcommand("verify-dyadic", "Check a dyadic inequality and its induction on random instances");
  add_common(c2, common);
  c2->add_option("--which", dyadic.which)->check(CLI::IsMember({"lower160", "upper128", "upper_ar"}));
  c2->add_option("--r", dyadic.r);
  c2->add_option("--depth", dyadic.depth);
  c2->add_option("--instances,--samples", dyadic.instances);

  GeomOpts geom;
  auto* c3 = app.add_subcommand("geom-lemma", "Sample the segment lemma for hyperbolic domains");
  add_common(c3, common);
  c3->add_option("--c", geom.c);
  c3->add_option("--r", geom.r);
  c3->add_option("--trials,--samples", geom.trials);

  MartOpts mart;
  auto* c4 = app.add_subcommand("simulate-martingale", "Monte Carlo check of the weighted martingale inequalities");
  add_common(c4, common);
  c4->add_option("--lambda", mart.lambda);
  c4->add_option("--T", mart.T);
  c4->add_option("--steps", mart.steps);
  c4->add_option("--trials,--samples", mart.trials);
  c4->add_option("--integrand", mart.integrand);

  DiscOpts disc;
  auto* c5 = app.add_subcommand("lp-disc", "Littlewood-Paley g_* checks on the unit disc");
  add_common(c5, common);
  c5->add_option("--poly", disc.poly, "Trigonometric polynomial as JSON text or a JSON file");
  c5->add_option("--degree", disc.degree, "Degree of the random polynomial used without --poly");
  c5->add_option("--beta", disc.beta, "Weight 1 + beta cos(theta)");
  c5->add_option("--weight", disc.weight_file, "CSV file of weight samples");
  c5->add_option("--radial", disc.radial);
  c5->add_option("--angular", disc.angular);
  c5->add_option("--alpha", disc.alpha, "Stoltz aperture for the reported area ratio");
  c5->add_option("--tol", disc.tol);

  HeatOpts heat;
  auto* c6 = app.add_subcommand("lp-heat", "Heat semigroup G_* checks on the line");
  add_common(c6, common);
  c6->add_option("--beta", heat.beta, "Weight 1 + beta tanh(x)");
  c6->add_option("--width", heat.width);
  c6->add_option("--center", heat.center);
  c6->add_option("--alpha", heat.alpha, "Parabolic cone aperture");
  c6->add_option("--tol", heat.tol);
  c6->add_option("--L", heat.L);
  c6->add_option("--spacing", heat.h, "Grid spacing");

  SearchOpts search;
  auto* c7 = app.add_subcommand("search-extremizer", "Hill-climb the ratio of a dyadic inequality");
  add_common(c7, common);
  c7->add_option("--which", search.which)->check(CLI::IsMember({"lower160", "upper128", "upper_ar"}));
  c7->add_option("--r", search.r);
  c7->add_option("--depth", search.depth);
  c7->add_option("--samples,--trials", search.budget);

  ApOpts ap;
  auto* c8 = app.add_subcommand("ap-probe", "Dyadic A_r characteristic of a weight across r");
  add_common(c8, common);
  c8->add_option("--alpha", ap.alpha, "Exponent of the power weight x^alpha");
  c8->add_option("--depth", ap.depth);
  c8->add_option("--p", ap.p);
  c8->add_option("--weight", ap.weight_file, "CSV file of cell values");
  c8->add_option("--tol", ap.tol);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;
    std::cerr << app.help();
    return 2;
  }

  const auto start = std::chrono::steady_clock::now();
  SuiteReport rep;
  try {
    if (*c1) rep = certify_bellman(certify, common);
    else if (*c2) rep = verify_dyadic(dyadic, common);
    else if (*c3) rep = geom_lemma(geom, common);
    else if (*c4) rep = simulate_martingale(mart, common);
    else if (*c5) rep = lp_disc(disc, common);
    else if (*c6) rep = lp_heat(heat, common);
    else if (*c7) rep = search_extremizer(search, common);
    else rep = ap_probe(ap, common);
    rep.subcommand = app.get_subcommands().front()->get_name();
    rep.config["format"] = common.format;
    emit(rep, common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::fprintf(stderr, "%s: %s in %.3f s (%d threads)\n", rep.subcommand.c_str(), rep.pass() ? "PASS" : "FAIL", secs,
               thread_count());
  return rep.pass() ? 0 : 1;
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("bsq");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace bsq::cli
