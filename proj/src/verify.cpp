#include "vkplate/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>

namespace vkplate {

namespace {

struct Check {
  std::ostringstream detail;
  bool ok = true;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << "[violated] " << what << "; ";
    }
  }
};

double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

GridPtr grid_for(const VerifyContext& ctx, const PlateConfig& cfg) { return make_grid(ctx.M, ctx.N, cfg); }

SolverOptions twenty_starts(const VerifyContext& ctx) {
  SolverOptions o = ctx.solver;
  o.n_starts = std::max(o.n_starts, 20);
  return o;
}

std::string describe(const Equilibrium& e) {
  std::ostringstream os;
  os.precision(6);
  os << "(J=" << e.energy << ", (u,e1)*=" << e.amplitude << ", |u|*=" << norm_star(e.u) << ", "
     << to_string(e.stability.tag) << ")";
  return os.str();
}

// J(t sin x) for a large t, which exposes the unbounded direction when
// lambda > 1.
std::string cylinder_note(const Functional& J) {
  const Field cyl = Field::from_profile(
      J.grid_ptr(), 1, [](double) { return 1.0; }, [](double) { return 0.0; });
  std::ostringstream os;
  os.precision(4);
  os << "d(sin x)=" << J.ops().d(cyl) << ", J(1e6 sin x)=" << J.energy(1e6 * cyl);
  return os.str();
}

void suite_lambda1(const VerifyContext& ctx, Check& c) {
  const PlateConfig& cfg = ctx.plate;
  const double l1 = lambda1_value(cfg);
  const double res = std::abs(char_lambda1(l1, cfg));
  const double s = cfg.sigma;
  c.detail.precision(15);
  c.detail << "lambda1=" << l1 << " |char|=" << res << "; ";
  c.expect(res < 1e-12, "|char_lambda1(lambda1)| < 1e-12");
  c.expect((1 - s) * (1 - s) < l1 && l1 < 1.0, "lambda1 in ((1-sigma)^2, 1)");
  c.expect(std::abs(l1 - (1 - s * s)) < 1e-3, "|lambda1 - (1 - sigma^2)| < 1e-3");
}

void suite_spectrum(const VerifyContext& ctx, Check& c) {
  const PlateConfig& cfg = ctx.plate;
  const GridPtr g = grid_for(ctx, cfg);
  double lam_max = 40.0;
  std::vector<EigenMode> an = enumerate_spectrum(cfg, lam_max);
  while (an.size() < 5) {
    lam_max *= 2.0;
    an = enumerate_spectrum(cfg, lam_max);
  }
  const DiscreteSpectrum ds = discrete_spectrum(g, 5);
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) worst = std::max(worst, rel_diff(an[i].lambda, ds.values[i]));
  const Lambda1 l1 = lambda1(cfg, g);
  const double align = std::abs(inner_star(ds.fields[0], l1.e1));
  c.detail.precision(6);
  c.detail << "max rel diff of 5 smallest=" << worst << ", |(f1,e1)*|=1-" << (1.0 - align) << "; ";
  c.expect(worst < 1e-5, "analytic vs discrete eigenvalues within 1e-5");
  c.expect(align > 1.0 - 1e-6, "first discrete eigenfield aligned with e1 to 1-1e-6");
}

void suite_trilinear(const VerifyContext& ctx, Check& c) {
  const GridPtr g = grid_for(ctx, ctx.plate);
  const auto ops = AiryOps::for_grid(g);
  std::mt19937_64 rng(ctx.solver.seed);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const Field v = random_field(g, rng), w = random_field(g, rng);
    const Field p = random_field(g, rng, Space::StarStar);
    const double base = trilinear(v, w, p);
    const double vals[] = {trilinear(v, p, w), trilinear(p, w, v), inner_biharm(ops->B(v, w), p),
                           inner_star(ops->C(v, p), w), inner_star(ops->C(w, p), v)};
    for (double x : vals) worst = std::max(worst, rel_diff(base, x));
  }
  c.detail.precision(3);
  c.detail << "10 triples, max rel deviation=" << worst << "; ";
  c.expect(worst < 1e-8, "trilinear and operator identities within 1e-8");
}

void suite_dfunctional(const VerifyContext& ctx, Check& c) {
  const GridPtr g = grid_for(ctx, ctx.plate);
  const auto ops = AiryOps::for_grid(g);
  std::mt19937_64 rng(ctx.solver.seed + 1);
  double min_d = 1.0, scal = 0.0, quart = 0.0, fd = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Field v = random_field(g, rng);
    const double dv = ops->d(v);
    min_d = std::min(min_d, dv);
    for (double r : {1.7, -0.3}) scal = std::max(scal, rel_diff(ops->d(r * v), r * r * r * r * dv));
    quart = std::max(quart, rel_diff(dv, 0.25 * inner_star(ops->D(v), v)));
    if (t < 10) {
      const Field w = random_field(g, rng);
      const double h = 1e-4;
      const double num = (ops->d(v + h * w) - ops->d(v - h * w)) / (2 * h);
      fd = std::max(fd, rel_diff(num, inner_star(ops->D(v), w)));
    }
  }
  c.detail.precision(3);
  c.detail << "min d=" << min_d << ", scaling=" << scal << ", quarter-norm=" << quart << ", derivative=" << fd
           << "; ";
  c.expect(min_d >= 0.0, "d >= 0 on 100 random fields");
  c.expect(scal < 1e-10, "quartic scaling within 1e-10");
  c.expect(quart < 1e-9, "d = 1/4 (D(v), v)* within 1e-9");
  c.expect(fd < 1e-6, "<d'(v), w> = (D(v), w)* within 1e-6 of finite differences");
}

void suite_gradient(const VerifyContext& ctx, Check& c) {
  PlateConfig cfg = ctx.plate;
  cfg.k = 5.0;
  cfg.delta = 1e-2;
  cfg.lambda = 0.5 * lambda1_value(cfg);
  const GridPtr g = grid_for(ctx, cfg);
  const Functional J(g, cfg, LoadSpec::sin_x(0.3));
  std::mt19937_64 rng(ctx.solver.seed + 2);
  double worst = 0.0;
  int accepted = 0, tries = 0;
  while (accepted < 20 && tries < 400) {
    ++tries;
    Field u = random_field(g, rng);
    u *= std::exp(std::uniform_real_distribution<double>(0.0, std::log(100.0))(rng)) / norm_star(u);
    // keep away from the kink set u = 0 inside the hanger strips
    const Mat U = hanger_samples(u);
    const Vec& mask = g->hanger_mask();
    double umin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < g->N(); ++j)
      if (mask(j) > 0.0) umin = std::min(umin, U.col(j).cwiseAbs().minCoeff());
    if (umin < 1e-3 * U.cwiseAbs().maxCoeff()) continue;
    const Field w = random_field(g, rng);
    const double h = 1e-5 * norm_star(u) / norm_star(w);
    const double num = (J.energy(u + h * w) - J.energy(u - h * w)) / (2 * h);
    const double an = inner_star(J.gradient(u), w);
    worst = std::max(worst, rel_diff(num, an));
    ++accepted;
  }
  c.detail.precision(3);
  c.detail << accepted << " pairs (k=5, delta=1e-2, f=0.3 sin x), max rel error=" << worst << "; ";
  c.expect(accepted == 20, "20 admissible pairs drawn");
  c.expect(worst < 1e-6, "gradient matches central differences within 1e-6");
}

void suite_uniqueness(const VerifyContext& ctx, Check& c) {
  PlateConfig cfg = ctx.plate;
  const double l1 = lambda1_value(cfg);
  const GridPtr g = grid_for(ctx, cfg);
  const SolverOptions o = twenty_starts(ctx);
  const std::pair<const char*, double> cases[] = {{"0", 0.0}, {"0.5 lambda1", 0.5 * l1}, {"lambda1", l1}};
  for (const auto& [label, lam] : cases) {
    cfg.lambda = lam;
    const Functional J(g, cfg);
    const auto ms = multistart(J, o, default_starts(J, o));
    double max_norm = 0.0;
    for (const auto& s : ms.solutions) max_norm = std::max(max_norm, norm_star(s.u));
    c.detail.precision(3);
    c.detail << "lambda=" << label << ": " << ms.solutions.size() << " equilibria, max |u|*=" << max_norm << "; ";
    c.expect(ms.solutions.size() == 1 && max_norm < 1e-8,
             std::string("only the trivial solution at lambda=") + label);
  }
}

void suite_pitchfork(const VerifyContext& ctx, Check& c) {
  PlateConfig cfg = ctx.plate;
  const double l1 = lambda1_value(cfg);
  cfg.lambda = 1.05 * l1;
  const GridPtr g = grid_for(ctx, cfg);
  const Functional J(g, cfg);
  const double d1 = J.ops().d(J.first_mode().e1);
  const double tstar = std::sqrt((cfg.lambda / l1 - 1.0) / (4.0 * d1));
  const SolverOptions o = twenty_starts(ctx);
  c.detail.precision(6);
  c.detail << "lambda=1.05 lambda1=" << cfg.lambda << ", t*=" << tstar << ", " << cylinder_note(J) << "; ";
  std::vector<Equilibrium> sols;
  try {
    sols = multistart(J, o, default_starts(J, o)).solutions;
  } catch (const NumericalError& e) {
    c.detail << e.what() << "; ";
  }
  for (const auto& s : sols) c.detail << describe(s) << " ";
  int trivial_unstable = 0, plus = 0, minus = 0;
  for (const auto& s : sols) {
    if (norm_star(s.u) < 1e-8) {
      trivial_unstable += s.stability.tag == Stability::Unstable;
      continue;
    }
    const bool near = std::abs(std::abs(s.amplitude) - tstar) <= 0.1 * tstar;
    if (s.stability.tag == Stability::Stable && near) (s.amplitude > 0 ? plus : minus) += 1;
  }
  c.detail << "; ";
  c.expect(sols.size() == 3, "exactly three equilibria");
  c.expect(trivial_unstable == 1, "trivial equilibrium UNSTABLE");
  c.expect(plus == 1 && minus == 1, "+-u* STABLE with |(u*,e1)*| within 10% of t*");
}

void report(Check& c, const TheoremReport& r) {
  c.detail << r.name << " " << (r.passed ? "ok" : "not met") << " [" << r.hypothesis << "] count=" << r.count;
  for (const auto& s : r.solutions) c.detail << " " << describe(s);
  for (const auto& n : r.notes) c.detail << "; " << n;
  c.detail << "; ";
}

void suite_multiplicity(const VerifyContext& ctx, Check& c) {
  PlateConfig cfg = ctx.plate;
  const auto spec = enumerate_spectrum(cfg, 40.0);
  if (spec.size() < 3) throw NumericalError("fewer than three eigenvalues below 40");
  const double lam = 1.01 * spec[1].lambda;
  c.detail.precision(8);
  c.detail << "lambda=1.01 lambda2=" << lam << " (lambda3=" << spec[2].lambda << "); ";
  c.expect(lam < spec[2].lambda, "1.01 lambda2 below lambda3");
  cfg.lambda = lam;
  const TheoremReport r = theorem_suite("T2ii", grid_for(ctx, cfg), cfg, twenty_starts(ctx));
  report(c, r);
  c.expect(r.passed, "at least two nontrivial +- pairs");
}

void suite_loaded(const VerifyContext& ctx, Check& c) {
  PlateConfig cfg = ctx.plate;
  const double l1 = lambda1_value(cfg);
  const GridPtr g = grid_for(ctx, cfg);
  cfg.lambda = 0.5 * l1;
  const TheoremReport below = theorem_suite("T2iii", g, cfg, twenty_starts(ctx));
  report(c, below);
  c.expect(below.passed, "lambda < lambda1: unique solution inside the a priori ball");
  cfg.lambda = 1.05 * l1;
  const TheoremReport above = theorem_suite("T2iv", g, cfg, twenty_starts(ctx));
  report(c, above);
  c.expect(above.passed, "lambda = 1.05 lambda1: >= 3 solutions with a mountain-pass saddle above both minima");
}

void suite_hangers(const VerifyContext& ctx, Check& c) {
  PlateConfig cfg = ctx.plate;
  cfg.k = 0.1;
  cfg.delta = 1e-6;
  const GridPtr g = grid_for(ctx, cfg);
  const Functional J0(g, cfg);
  const double l1 = J0.first_mode().lambda;
  const double lbar = J0.lambda_bar();
  const auto spec = enumerate_spectrum(cfg, 10.0);
  const double l2 = spec.at(1).lambda;
  // J is unbounded below along y-independent fields once lambda > 1, so both
  // test loads stay below 1.
  const double top = std::min(l2, 1.0);
  c.detail.precision(8);
  c.detail << "k=0.1, delta=1e-6, alpha=" << J0.alpha() << ", lambda_bar=" << lbar << ", lambda2=" << l2 << "; ";
  c.expect(lbar < l2, "lambda_bar < lambda2");
  cfg.lambda = l1 + 0.5 * (lbar - l1);
  const TheoremReport r2 = theorem_suite("T3ii", g, cfg, twenty_starts(ctx));
  c.detail << "lambda=" << cfg.lambda << ": ";
  report(c, r2);
  c.expect(r2.passed, "f=0, lambda1 < lambda < lambda_bar: trivial UNSTABLE, minimizer with (u,e1)* < 0 and J < 0");
  cfg.lambda = lbar + 0.5 * (top - lbar);
  const TheoremReport r3 = theorem_suite("T3iii", g, cfg, twenty_starts(ctx));
  c.detail << "lambda=" << cfg.lambda << ": ";
  report(c, r3);
  c.expect(r3.passed, "lambda_bar < lambda < lambda2, small f: two STABLE of opposite sign and one UNSTABLE");
}

void suite_poincare(const VerifyContext& ctx, Check& c) {
  const PlateConfig& cfg = ctx.plate;
  const GridPtr g = grid_for(ctx, cfg);
  const Lambda1 L = lambda1(cfg, g);
  const double l2 = enumerate_spectrum(cfg, 10.0).at(1).lambda;
  const DiscreteSpectrum ds = discrete_spectrum(g, 2);
  std::mt19937_64 rng(ctx.solver.seed + 3);
  const double slack = 1.0 + 1e-8;
  double r1 = 0.0, r0 = 0.0, r2 = 0.0;
  for (int t = 0; t < 100; ++t) {
    Field v = random_field(g, rng);
    // a quarter of the fields sit close to each extremal direction
    if (t % 4 == 0) v = L.e1 + (1e-3 / norm_star(v)) * v;
    if (t % 4 == 1) v = ds.fields[1] + (1e-3 / norm_star(v)) * v;
    const double s = inner_star(v, v);
    r1 = std::max(r1, L.lambda * inner_dx(v, v) / s);
    r0 = std::max(r0, L.lambda * inner_l2(v, v) / s);
    const Field p = v - inner_star(v, L.e1) * L.e1;
    r2 = std::max(r2, l2 * inner_dx(p, p) / inner_star(p, p));
  }
  c.detail.precision(12);
  c.detail << "max lambda1|v_x|^2/|v|*^2=" << r1 << ", max lambda1|v|^2/|v|*^2=" << r0
           << ", max lambda2|v_x|^2/|v|*^2 on e1-perp=" << r2 << "; ";
  c.expect(r1 <= slack && r0 <= slack, "Poincare inequalities with slack 1e-8");
  c.expect(r2 <= slack, "improved Poincare on the complement of e1 with slack 1e-8");
}

using SuiteFn = std::function<void(const VerifyContext&, Check&)>;

const std::map<std::string, std::pair<int, SuiteFn>>& registry() {
  static const std::map<std::string, std::pair<int, SuiteFn>> r{
      {"lambda1", {1, suite_lambda1}},         {"spectrum", {2, suite_spectrum}},
      {"trilinear", {3, suite_trilinear}},     {"dfunctional", {4, suite_dfunctional}},
      {"gradient", {5, suite_gradient}},       {"uniqueness", {6, suite_uniqueness}},
      {"pitchfork", {7, suite_pitchfork}},     {"multiplicity", {8, suite_multiplicity}},
      {"loaded", {9, suite_loaded}},           {"hangers", {10, suite_hangers}},
      {"poincare", {11, suite_poincare}},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"lambda1",    "spectrum",     "trilinear", "dfunctional",
                                              "gradient",   "uniqueness",   "pitchfork", "multiplicity",
                                              "loaded",     "hangers",      "poincare"};
  return names;
}

SuiteResult run_suite(const std::string& name, const VerifyContext& ctx) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw ParameterError("unknown verification suite '" + name + "'");
  SuiteResult res;
  res.name = name;
  res.criterion = it->second.first;
  const auto t0 = std::chrono::steady_clock::now();
  Check c;
  try {
    it->second.second(ctx, c);
  } catch (const NumericalError& e) {
    c.ok = false;
    c.detail << "numerical error: " << e.what();
  } catch (const DomainError& e) {
    c.ok = false;
    c.detail << "domain error: " << e.what();
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.passed = c.ok;
  res.detail = c.detail.str();
  return res;
}

}  // namespace vkplate
