#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vkplate/equilibrium.hpp"

using namespace vkplate;

namespace {

GridPtr small_grid(const PlateConfig& cfg) { return make_grid(6, 32, cfg); }

SolverOptions quick_options() {
  SolverOptions o;
  o.n_starts = 6;
  o.eigen_starts = 2;
  return o;
}

}  // namespace

TEST_CASE("energy along e1 is the reduced quartic") {
  PlateConfig cfg;
  cfg.lambda = 0.7;
  auto g = small_grid(cfg);
  const Functional J(g, cfg);
  const Field& e1 = J.first_mode().e1;
  const double d1 = J.ops().d(e1);
  const double l1 = J.first_mode().lambda;
  for (double t : {1e-2, 1.0, 50.0, 3000.0}) {
    const double exact = 0.5 * (1.0 - cfg.lambda * inner_dx(e1, e1)) * t * t + d1 * t * t * t * t;
    CHECK(J.energy(t * e1) == doctest::Approx(exact).epsilon(1e-12));
    // ||e1_x||^2 = 1/lambda1 up to sampling error of the closed form.
    const double reduced = 0.5 * (1.0 - cfg.lambda / l1) * t * t + d1 * t * t * t * t;
    CHECK(J.energy(t * e1) == doctest::Approx(reduced).epsilon(1e-8));
  }
}

TEST_CASE("d(sin x) = 0 makes J unbounded below for lambda > 1") {
  PlateConfig cfg;
  cfg.lambda = 1.2;
  auto g = small_grid(cfg);
  const Functional J(g, cfg);
  const Field s = Field::from_profile(g, 1, [](double) { return 1.0; }, [](double) { return 0.0; });
  CHECK(J.ops().d(s) == 0.0);
  // ||sin x||_*^2 = int (sin x)_xx^2 = pi ell; the energy is pi ell (1 - lambda) t^2 / 2.
  const double t = 1e4;
  CHECK(J.energy(t * s) == doctest::Approx(std::numbers::pi * cfg.ell * (1.0 - cfg.lambda) * t * t / 2).epsilon(1e-10));
  CHECK(J.energy(t * s) < 0.0);
}

TEST_CASE("gradient matches central differences of the energy") {
  PlateConfig cfg;
  cfg.lambda = 0.4;
  cfg.k = 2.0;
  cfg.delta = 0.5;
  auto g = small_grid(cfg);
  const Functional J(g, cfg, LoadSpec::sin_x(0.2));
  std::mt19937_64 rng(19);
  const Field u = 3.0 * random_field(g, rng);
  const Field w = random_field(g, rng);
  const double h = 1e-5;
  const double fd = (J.energy(u + h * w) - J.energy(u - h * w)) / (2 * h);
  CHECK(inner_star(J.gradient(u), w) == doctest::Approx(fd).epsilon(1e-6));
  // Hessian against differences of the gradient.
  const Field hv = J.hessian_apply(u, w);
  const Field dg = (1.0 / (2 * h)) * (J.gradient(u + h * w) - J.gradient(u - h * w));
  CHECK(norm_star(hv - dg) < 1e-5 * norm_star(hv));
}

TEST_CASE("small load at lambda = 0 gives the linear response") {
  PlateConfig cfg;
  auto g = small_grid(cfg);
  const double c = 1e-3;
  const Functional J(g, cfg, LoadSpec::sin_x(c));
  const Equilibrium e = solve_from(Field(g), J);
  REQUIRE(e.converged);
  const Field linear = J.ops().star().solve(load_from_field(J.load()));
  CHECK(norm_star(e.u - linear) < 1e-6 * norm_star(linear));
  CHECK(e.stability.tag == Stability::Stable);
}

TEST_CASE("below lambda1 the trivial solution is the only equilibrium") {
  PlateConfig cfg;
  cfg.lambda = 0.5;
  auto g = small_grid(cfg);
  const Functional J(g, cfg);
  const auto opts = quick_options();
  const auto r = multistart(J, opts, default_starts(J, opts));
  REQUIRE(r.solutions.size() == 1);
  CHECK(norm_star(r.solutions[0].u) < 1e-8);
  CHECK(r.solutions[0].stability.tag == Stability::Stable);
}

TEST_CASE("pitchfork branch is symmetric with a saddle at zero") {
  PlateConfig cfg;
  cfg.lambda = 0.965;
  auto g = small_grid(cfg);
  const Functional J(g, cfg);
  const auto opts = quick_options();
  const auto r = multistart(J, opts, default_starts(J, opts));
  REQUIRE(r.solutions.size() == 3);
  const Equilibrium& a = r.solutions[0];
  const Equilibrium& b = r.solutions[1];
  CHECK(a.energy == doctest::Approx(b.energy).epsilon(1e-10));
  CHECK(norm_star(a.u + b.u) < 1e-6 * norm_star(a.u));
  CHECK(a.stability.tag == Stability::Stable);
  CHECK(r.solutions[2].stability.tag == Stability::Unstable);
  CHECK(norm_star(r.solutions[2].u) < 1e-8);

  // Close to onset the amplitude follows the reduced quartic.
  const double l1 = J.first_mode().lambda;
  const double tstar = std::sqrt((cfg.lambda / l1 - 1.0) / (4.0 * J.ops().d(J.first_mode().e1)));
  CHECK(std::abs(std::abs(a.amplitude) - tstar) < 0.1 * tstar);

  const Equilibrium& lo = a.amplitude < 0 ? a : b;
  const Equilibrium& hi = a.amplitude < 0 ? b : a;
  const Equilibrium s = mountain_pass(lo, hi, J, opts);
  CHECK(s.converged);
  CHECK(norm_star(s.u) < 1e-6 * norm_star(a.u));
  CHECK(s.energy > a.energy);
}

TEST_CASE("mode-restricted descent stays in its invariant subspace") {
  PlateConfig cfg;
  cfg.lambda = 0.9;
  auto g = small_grid(cfg);
  const Functional J(g, cfg);
  std::mt19937_64 rng(2);
  SolverOptions opts;
  opts.mode_stride = 2;
  const Equilibrium e = solve_from(random_field(g, rng), J, opts);
  REQUIRE(e.converged);
  for (int m = 1; m <= g->M(); m += 2) CHECK(e.u.coeffs().row(m - 1).isZero(0.0));
}

TEST_CASE("hangers shift the threshold and break the symmetry") {
  PlateConfig cfg;
  cfg.k = 0.1;
  cfg.delta = 1e-6;
  auto g = small_grid(cfg);
  cfg.lambda = 0.0;
  const Functional J0(g, cfg);
  // Node-sampled strip indicator: within one edge node spacing of the
  // exact value int Upsilon e1^2 = 0.1388918228805628.
  CHECK(J0.alpha() == doctest::Approx(0.1388918228805628).epsilon(0.12));
  CHECK(J0.lambda_bar() > J0.first_mode().lambda);

  cfg.lambda = 0.5 * (J0.first_mode().lambda + J0.lambda_bar());
  const Functional J(g, cfg);
  const auto opts = quick_options();
  const auto r = multistart(J, opts, default_starts(J, opts));
  REQUIRE(r.solutions.size() >= 2);
  const Equilibrium& best = r.solutions.front();
  CHECK(best.energy < 0.0);
  CHECK(best.amplitude < 0.0);
  // Upward buckling is penalised by the cables, so +-u are no longer paired.
  for (const auto& s : r.solutions) CHECK(norm_star(s.u + best.u) > 1e-3 * norm_star(best.u));
}

TEST_CASE("continuation detects the pitchfork between neighbouring lambdas") {
  PlateConfig cfg;
  auto g = small_grid(cfg);
  SolverOptions opts = quick_options();
  opts.n_starts = 3;
  const auto res = continuation(g, cfg, LoadSpec::zero(), 0.94, 0.98, 5, opts);
  REQUIRE_FALSE(res.bifurcations.empty());
  const double l1 = lambda1_value(cfg);
  for (const auto& b : res.bifurcations) {
    CHECK(b.lambda_previous < l1);
    CHECK(b.lambda >= l1);
  }
}

TEST_CASE("no converged start raises NoConvergenceError") {
  PlateConfig cfg;
  cfg.lambda = 0.5;
  auto g = small_grid(cfg);
  const Functional J(g, cfg);
  SolverOptions opts;
  opts.max_iter = 1;
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(multistart(J, opts, {1e3 * random_field(g, rng)}), NoConvergenceError);
}
