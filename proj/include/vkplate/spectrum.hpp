#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "vkplate/field.hpp"

namespace vkplate {

/// Regime of a mode relative to m^2 and the parity of its y-profile.
enum class ModeCase { SubEven, SubOdd, Critical, SuperEven, SuperOdd };

const char* to_string(ModeCase c);

/// One analytic eigenpair of the buckling problem with x-wavenumber m.
///
/// The y-profile is h(y) = a f0(y) + b f1(y) + c f2(y) + d f3(y) with
///   sub (m^2 > lambda):   cosh(beta y), sinh(beta y), cosh(gamma y), sinh(gamma y)
///   critical (m^2 = lambda): cosh(beta y), sinh(beta y), 1, y
///   super (m^2 < lambda): cosh(beta y), sinh(beta y), cos(gamma y), sin(gamma y)
/// where beta^2 = m sqrt(lambda) + m^2 and gamma^2 = |m^2 - m sqrt(lambda)|.
struct EigenMode {
  int m = 1;
  double lambda = 0.0;
  ModeCase kind = ModeCase::SubEven;
  double beta = 0.0;
  double gamma = 0.0;
  std::array<double, 4> coeffs{};  ///< (a, b, c, d)

  /// r-th y-derivative of the profile, r = 0..4.
  double profile(double y, int r = 0) const;
};

/// Characteristic function of the first eigenvalue on ((1 - sigma)^2, 1); its unique root
/// is lambda_1.
double char_lambda1(double lam, const PlateConfig& cfg);

/// lambda_1 by bisection on char_lambda1.
double lambda1_value(const PlateConfig& cfg);

struct Lambda1 {
  double lambda;
  EigenMode mode;
  Field e1;  ///< unit H^2_* norm, positive
};

/// lambda_1 together with its closed-form eigenfunction sampled on `grid`.
Lambda1 lambda1(const PlateConfig& cfg, const GridPtr& grid);

struct CharResiduals {
  double even = 0.0;
  double odd = 0.0;
  bool super = false;  ///< m^2 < lambda: values are 2x2 determinants
  bool pole = false;   ///< a denominator vanished; the affected value is +-inf
};

/// Residuals of the even and odd characteristic equations for mode m.
/// Throws DomainError when lambda is within the guard band of m^2.
CharResiduals characteristic_residuals(int m, double lam, const PlateConfig& cfg);

/// Root of tanh(s) = (sigma / (2 - sigma))^2 s.
double critical_s(const PlateConfig& cfg);

/// The m^2 = lambda eigenmode, present only when s / (ell sqrt 2) is an
/// integer to within 1e-9.
std::optional<EigenMode> critical_mode(const PlateConfig& cfg);

struct SpectrumOptions {
  double points_per_unit = 2000.0;  ///< scan density in lambda
  double guard = 1e-8;              ///< excluded band around m^2
};

/// All eigenvalues below lam_max, ascending.
std::vector<EigenMode> enumerate_spectrum(const PlateConfig& cfg, double lam_max,
                                          const SpectrumOptions& opts = {});

/// Sign changes of one residual family for mode m on [lo, hi], located by
/// dense scan (used by tests and the spectrum command).
std::vector<double> residual_roots(int m, bool odd, double lo, double hi, const PlateConfig& cfg,
                                   const SpectrumOptions& opts = {});

/// Builds the null-vector profile of the boundary system at an eigenvalue.
EigenMode make_mode(int m, double lam, ModeCase kind, const PlateConfig& cfg);

/// Largest relative residual of the ODE at `samples` interior points and of
/// the two free-edge conditions at both ends.
struct ProfileCheck {
  double ode = 0.0;
  double bc = 0.0;
};
ProfileCheck check_profile(const EigenMode& mode, const PlateConfig& cfg, int samples = 64);

/// Mode sampled on the grid, scaled to unit H^2_* norm with a positive
/// largest nodal value.
Field mode_field(const EigenMode& mode, const GridPtr& grid);

struct DiscreteSpectrum {
  std::vector<double> values;
  std::vector<int> modes;  ///< x-wavenumber of each value
  std::vector<Field> fields;  ///< unit H^2_* norm
};

/// K smallest eigenvalues of the Galerkin problem (u, v)_* = lambda int u_x v_x
/// on the grid's space.
DiscreteSpectrum discrete_spectrum(const GridPtr& grid, int K);

}  // namespace vkplate
