#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace vkplate {

/// Invalid sizes, mismatched grids, out-of-range physical parameters.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain where a formula is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Solver breakdown, non-convergence, missing sign change.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Physical and geometric parameters of the normalized deck plate
/// Omega = (0, pi) x (-ell, ell).
struct PlateConfig {
  double ell = std::numbers::pi / 200.0;  ///< half-width of the deck
  double sigma = 0.2;                     ///< Poisson ratio, 0 < sigma < 1/2
  double eps = std::numbers::pi / 1500.0; ///< width of each hanger strip
  double k = 0.0;                         ///< hanger Hooke constant
  double delta = 0.0;                     ///< cable nonlinearity
  double lambda = 0.0;                    ///< buckling load

  /// Throws ParameterError naming the first violated inequality.
  /// ell << pi is recommended but not enforced.
  void validate() const;

  [[nodiscard]] bool has_hangers() const { return k > 0.0 || delta > 0.0; }
};

}  // namespace vkplate
