#include "vkplate/config.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace vkplate {

void PlateConfig::validate() const {
  auto fail = [](const std::string& what) { throw ParameterError(what); };
  if (!(std::isfinite(ell) && ell > 0.0 && ell < std::numbers::pi)) {
    fail("plate half-width must satisfy 0 < ell < pi");
  }
  if (!(sigma > 0.0 && sigma < 0.5)) {
    std::ostringstream os;
    os << "Poisson ratio must satisfy 0 < sigma < 1/2 (got " << sigma << ")";
    fail(os.str());
  }
  if (!(eps > 0.0 && eps < ell)) {
    fail("hanger strip width must satisfy 0 < eps < ell");
  }
  if (!(k >= 0.0 && std::isfinite(k))) fail("hanger constant k must be >= 0");
  if (!(delta >= 0.0 && std::isfinite(delta))) fail("cable nonlinearity delta must be >= 0");
  if (!(lambda >= 0.0 && std::isfinite(lambda))) fail("buckling load lambda must be >= 0");
}

}  // namespace vkplate
