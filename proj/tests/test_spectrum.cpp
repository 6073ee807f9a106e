#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vkplate/spectrum.hpp"

using namespace vkplate;

namespace {

// High-precision roots of the characteristic equations for sigma = 0.2,
// ell = pi/200 (independent mpmath evaluation, 25 digits).
constexpr double kLambda1 = 0.9600052629232998066583193;
constexpr double kLambda2 = 3.840084165246241263657;
constexpr double kLambda3 = 8.640425736645882488007;

}  // namespace

TEST_CASE("lambda1 matches the high-precision oracle") {
  PlateConfig cfg;
  CHECK(std::abs(lambda1_value(cfg) - kLambda1) < 1e-13);
  // The characteristic function changes sign across the root.
  CHECK(char_lambda1(kLambda1 - 1e-9, cfg) * char_lambda1(kLambda1 + 1e-9, cfg) < 0.0);
}

TEST_CASE("lowest three eigenvalues match the oracle") {
  PlateConfig cfg;
  const auto s = enumerate_spectrum(cfg, 10.0);
  REQUIRE(s.size() >= 3);
  CHECK(s[0].m == 1);
  CHECK(s[1].m == 2);
  CHECK(s[2].m == 3);
  CHECK(std::abs(s[1].lambda - kLambda2) < 1e-10 * kLambda2);
  CHECK(std::abs(s[2].lambda - kLambda3) < 1e-10 * kLambda3);
  for (const auto& e : s) {
    CHECK(e.lambda < 10.0);
    CHECK(e.lambda > (1.0 - cfg.sigma) * (1.0 - cfg.sigma) * e.m * e.m);
  }
}

TEST_CASE("eigenprofiles satisfy the ODE and free-edge conditions") {
  PlateConfig cfg;
  for (const auto& e : enumerate_spectrum(cfg, 30.0)) {
    const auto c = check_profile(e, cfg);
    CHECK(c.ode < 1e-7);
    CHECK(c.bc < 1e-7);
  }
}

TEST_CASE("enumeration is monotone in lam_max") {
  PlateConfig cfg;
  const auto a = enumerate_spectrum(cfg, 12.0);
  const auto b = enumerate_spectrum(cfg, 40.0);
  REQUIRE(b.size() >= a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].m == b[i].m);
    CHECK(a[i].lambda == doctest::Approx(b[i].lambda).epsilon(1e-12));
  }
  for (size_t i = 1; i < b.size(); ++i) CHECK(b[i - 1].lambda <= b[i].lambda);
}

TEST_CASE("Galerkin eigenvalues converge to the analytic ones") {
  PlateConfig cfg;
  auto g = make_grid(6, 40, cfg);
  const auto d = discrete_spectrum(g, 3);
  CHECK(std::abs(d.values[0] - kLambda1) < 1e-5);
  CHECK(std::abs(d.values[1] - kLambda2) < 1e-5);
  CHECK(std::abs(d.values[2] - kLambda3) < 1e-5);
  // e1 is normalized in the star norm and agrees with the closed form.
  const auto l1 = lambda1(cfg, g);
  CHECK(norm_star(l1.e1) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(inner_star(l1.e1, d.fields[0])) > 1.0 - 1e-6);
}

TEST_CASE("invalid plate parameters are rejected") {
  PlateConfig cfg;
  cfg.sigma = 0.6;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
  cfg = PlateConfig{};
  cfg.eps = 2 * cfg.ell;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
  cfg = PlateConfig{};
  cfg.k = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
}
