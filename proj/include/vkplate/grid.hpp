#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "vkplate/config.hpp"

namespace vkplate {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

namespace legendre {

/// Values of P_0..P_kmax and their first `max_deriv` derivatives at s.
/// Row r of the result holds d^r/ds^r P_k(s) for k = 0..kmax.
Mat table(double s, int kmax, int max_deriv);

/// Gauss-Legendre nodes (ascending) and weights on [-1, 1].
void gauss(int n, Vec& nodes, Vec& weights);

/// Coefficients of the antiderivative of a Legendre series (one degree up).
Vec integrate(const Vec& coeffs);

/// Coefficients of the derivative of a Legendre series (same length).
Vec differentiate(const Vec& coeffs);

}  // namespace legendre

/// Discretization of functions on Omega.
///
/// x: sine modes sin(m x), m = 1..M. y: polynomials of degree < N on
/// [-ell, ell], stored per mode as coefficients in the basis
///   chi_0 = 1, chi_1 = s, chi_{k+2} = n_k * (double antiderivative of P_k)(s)
/// with s = y / ell and n_k chosen so that int chi_{k+2}''(s)^2 ds = 1.
/// Second derivatives therefore never mix with the affine part, which keeps
/// the H^2 forms well conditioned even for ell ~ 1e-2.
///
/// Collocation nodes are Chebyshev-Gauss-Lobatto points; bilinear and
/// trilinear forms use a Gauss-Legendre rule of Q points that integrates
/// the relevant polynomial products exactly.
class Grid {
 public:
  Grid(int M, int N, const PlateConfig& cfg);

  int M() const { return M_; }
  int N() const { return N_; }
  int Q() const { return Q_; }
  double ell() const { return ell_; }
  double sigma() const { return sigma_; }
  double eps() const { return eps_; }

  /// Number of equispaced x samples used for quadratic products (>= 2M+1).
  int dealias_points() const { return P_ + 1; }
  /// Number of midpoint x samples used for the hanger term.
  int hanger_x_points() const { return Ph_; }

  const Vec& y_nodes() const { return y_nodes_; }
  /// Clenshaw-Curtis weights on the nodes (exact for degree < N).
  const Vec& quad_weights() const { return cc_weights_; }
  /// Nodal differentiation matrix of order 1..4.
  const Mat& diff_op(int order) const { return diff_ops_.at(order - 1); }

  const Vec& gl_y() const { return gl_y_; }
  const Vec& gl_w() const { return gl_w_; }
  /// chi basis (columns) and y-derivatives (r = 0, 1, 2) at the GL points.
  const Mat& basis_gl(int r) const { return basis_gl_.at(r); }
  /// chi basis and y-derivatives (r = 0..4) at the nodes.
  const Mat& basis_nodes(int r) const { return basis_nodes_.at(r); }

  /// chi basis and y-derivatives (r = 0..4) at an arbitrary y in [-ell, ell].
  Mat basis_at(double y, int max_deriv) const;

  /// (pi/2) * int chi_a chi_b dy.
  const Mat& mass() const { return mass_; }
  /// Per-mode H^2_* form (pi/2) int [h''g'' - sigma m^2 (h g'' + h'' g)
  /// + m^4 h g + 2 (1 - sigma) m^2 h' g'] dy, m = 1..M.
  const Mat& star_form(int m) const { return star_forms_.at(m - 1); }
  /// Per-mode biharmonic form (pi/2) int (h'' - m^2 h)(g'' - m^2 g) dy.
  const Mat& biharm_form(int m) const { return biharm_forms_.at(m - 1); }

  /// Columns: chi coefficients of a basis of {h : h(+-ell) = h'(+-ell) = 0}.
  const Mat& clamped_basis() const { return clamped_; }

  /// Legendre coefficients (in s) -> chi coefficients.
  Vec legendre_to_chi(const Vec& leg) const;
  /// Nodal values -> chi coefficients (polynomial interpolation).
  Vec nodal_to_chi(const Vec& values) const;
  /// Nodal values -> Legendre coefficients in s.
  Vec nodal_to_legendre(const Vec& values) const;
  /// chi coefficients of the function whose second s-derivative has the
  /// given Legendre coefficients and whose affine part is zero. Entries of
  /// degree > N-3 are dropped.
  Vec curvature_to_chi(const Vec& leg_ss) const;
  /// P_k(s_q) at the GL points, Q x N.
  const Mat& legendre_gl() const { return legendre_gl_; }

  /// x samples pi*i/P, i = 0..P, for quadratic products.
  const Vec& x_samples() const { return x_samples_; }
  /// sin(m x_i) and cos(m x_i), (P+1) x M.
  const Mat& sin_table() const { return sin_x_; }
  const Mat& cos_table() const { return cos_x_; }
  /// Maps samples of a cosine series of degree <= P to its L^2(0,pi)
  /// projection on sin(m x), m = 1..M. M x (P+1).
  const Mat& cos_samples_to_sine() const { return proj_; }

  /// Midpoint x samples and sin(m x) there, for the hanger quadrature.
  const Vec& hanger_x() const { return hanger_x_; }
  const Mat& hanger_sin_table() const { return hanger_sin_; }
  /// Indicator of the strips |y| > ell - eps sampled at the nodes.
  const Vec& hanger_mask() const { return hanger_mask_; }

  bool same_as(const Grid& other) const;

 private:
  int M_, N_, Q_, P_, Ph_;
  double ell_, sigma_, eps_;
  Vec s_nodes_, y_nodes_, cc_weights_;
  std::array<Mat, 4> diff_ops_;
  Vec gl_s_, gl_y_, gl_w_;
  Mat legendre_gl_;
  std::array<Mat, 3> basis_gl_;
  std::array<Mat, 5> basis_nodes_;
  Mat chi_legendre_;  // Legendre coefficients of chi_a in column a
  Eigen::PartialPivLU<Mat> vandermonde_lu_;
  Mat mass_;
  std::vector<Mat> star_forms_, biharm_forms_;
  Mat clamped_;
  Vec x_samples_;
  Mat sin_x_, cos_x_, proj_;
  Vec hanger_x_;
  Mat hanger_sin_;
  Vec hanger_mask_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// M >= 1, N >= 4. The clamped subspace has dimension N - 4.
GridPtr make_grid(int M, int N, const PlateConfig& cfg);

}  // namespace vkplate
