#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vkplate/airy.hpp"

using namespace vkplate;

namespace {

GridPtr grid() {
  PlateConfig cfg;
  return make_grid(5, 24, cfg);
}

Field sin_x(const GridPtr& g, double c) {
  return Field::from_profile(g, 1, [c](double) { return c; }, [](double) { return 0.0; });
}

}  // namespace

TEST_CASE("B is the weak inverse of the clamped biharmonic on brackets") {
  auto g = grid();
  std::mt19937_64 rng(7);
  const Field u = random_field(g, rng);
  const Field v = random_field(g, rng);
  const Field b = opB(u, v);
  for (int i = 0; i < 3; ++i) {
    const Field phi = random_field(g, rng, Space::StarStar);
    const double lhs = inner_biharm(b, phi);
    const double rhs = trilinear(u, v, phi);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("the trilinear form is symmetric when one slot is clamped") {
  auto g = grid();
  std::mt19937_64 rng(11);
  const Field u = random_field(g, rng);
  const Field v = random_field(g, rng);
  const Field w = random_field(g, rng, Space::StarStar);
  const double a = trilinear(u, v, w);
  CHECK(trilinear(v, u, w) == doctest::Approx(a).epsilon(1e-10));
  CHECK(trilinear(u, w, v) == doctest::Approx(a).epsilon(1e-8));
}

TEST_CASE("d is quartic, nonnegative and 1/4 (D(v), v)") {
  auto g = grid();
  std::mt19937_64 rng(3);
  for (int i = 0; i < 4; ++i) {
    const Field v = random_field(g, rng);
    const double d = d_func(v);
    CHECK(d >= 0.0);
    CHECK(d_func(2.5 * v) == doctest::Approx(std::pow(2.5, 4) * d).epsilon(1e-10));
    CHECK(0.25 * inner_star(opD(v), v) == doctest::Approx(d).epsilon(1e-9));
  }
}

TEST_CASE("d vanishes on y-independent fields") {
  // [u, u] = 2 (u_xx u_yy - u_xy^2) is zero when u does not depend on y.
  auto g = grid();
  const Field u = sin_x(g, 3.0);
  CHECK(d_func(u) == doctest::Approx(0.0).epsilon(1e-30));
  CHECK(norm_star(opB(u, u)) < 1e-20);
}

TEST_CASE("the Airy stress solves the clamped problem with the opposite sign") {
  auto g = grid();
  std::mt19937_64 rng(5);
  const Field u = random_field(g, rng);
  const Field phi = airy_of(u);
  CHECK(phi.space() == Space::StarStar);
  const Field b = opB(u, u);
  CHECK(norm_star(phi + b) < 1e-12 * (1.0 + norm_star(b)));
  // Clamped: value and slope vanish at both edges.
  for (double x : {0.4, 1.3, 2.2}) {
    const double ell = g->ell();
    CHECK(std::abs(phi.value(x, ell)) < 1e-12 * (1.0 + norm_star(phi)));
    CHECK(std::abs(phi.value(x, -ell, 0, 1)) < 1e-8 * (1.0 + norm_star(phi)));
  }
}
