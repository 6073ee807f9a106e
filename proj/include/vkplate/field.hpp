#pragma once

#include <functional>
#include <iosfwd>
#include <random>

#include "vkplate/grid.hpp"

namespace vkplate {

/// Boundary-condition family a field claims to belong to.
///   Star:     hinged on x = 0, pi (automatic with sine modes), free in y.
///   StarStar: additionally h = h' = 0 at y = +-ell.
///   Raw:      no boundary claim (brackets, loads).
enum class Space { Star, StarStar, Raw };

const char* to_string(Space s);

/// u(x, y) = sum_m h_m(y) sin(m x), with h_m stored as chi-basis
/// coefficients in row m-1 of coeffs().
class Field {
 public:
  explicit Field(GridPtr grid, Space space = Space::Star);
  Field(GridPtr grid, Mat coeffs, Space space);

  /// From an M x N table of nodal values h_m(y_j).
  static Field from_nodal(GridPtr grid, const Mat& values, Space space);

  /// h(y) sin(m x). The second derivative h_yy is sampled separately so the
  /// curvature part of h is not lost to rounding on narrow strips.
  static Field from_profile(GridPtr grid, int m, const std::function<double(double)>& h,
                            const std::function<double(double)>& h_yy, Space space = Space::Star);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const Mat& coeffs() const { return coeffs_; }
  Mat& coeffs() { return coeffs_; }
  Space space() const { return space_; }
  void set_space(Space s) { space_ = s; }

  /// M x N table of h_m(y_j).
  Mat nodal_values() const;
  /// h_m and its y-derivatives (r = 0..2) at the GL points, M x Q.
  Mat gl_values(int r) const;
  /// d^dx/dx^dx d^dy/dy^dy u at (x, y); dx <= 4, dy <= 4.
  double value(double x, double y, int dx = 0, int dy = 0) const;

  bool is_zero() const { return coeffs_.isZero(0.0); }

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double a);
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double a, Field f) { return f *= a; }
  friend Field operator*(Field f, double a) { return f *= a; }
  Field operator-() const { return -1.0 * (*this); }

 private:
  GridPtr grid_;
  Mat coeffs_;
  Space space_;
};

/// Throws ParameterError unless both fields live on equivalent grids.
void require_same_grid(const Field& a, const Field& b);

/// Random field with geometrically decaying Legendre content per mode.
/// StarStar fields are drawn from the clamped subspace.
Field random_field(GridPtr grid, std::mt19937_64& rng, Space space = Space::Star, int max_mode = 0);

/// (u, v)_* = int (Du Dv - (1 - sigma)[u, v]).
double inner_star(const Field& u, const Field& v);
double norm_star(const Field& u);
/// (u, v)_** = int Du Dv.
double inner_biharm(const Field& u, const Field& v);
/// int u_x v_x.
double inner_dx(const Field& u, const Field& v);
/// int u v.
double inner_l2(const Field& u, const Field& v);
double norm_l2(const Field& u);
/// int_Omega u.
double integrate(const Field& u);

/// Monge-Ampere bracket u_xx v_yy + u_yy v_xx - 2 u_xy v_xy projected on
/// sin(m x), m <= M, at the GL points (M x Q). Exact: products are formed on
/// 2M+1 equispaced x samples and transformed back without aliasing.
Mat bracket_gl(const Field& u, const Field& v);

/// Same as bracket_gl but returned as a Raw field (L^2 projection in y
/// onto degree < N).
Field bracket(const Field& u, const Field& v);

/// [F, u] for an x-independent F given through F_yy. Equals F_yy u_xx.
Field bracket_with_profile(const std::function<double(double)>& F_yy, const Field& u);

/// Converts values b_m(y_q) at the GL points (M x Q) into the load vector of
/// the functional w -> int b w over the chi basis (M x N).
Mat load_from_gl(const Grid& g, const Mat& b);

/// Load vector of w -> int f w for a field f (M x N).
Mat load_from_field(const Field& f);

/// int b(x, y) phi(x, y) for b given by bracket_gl.
double pair_gl(const Grid& g, const Mat& b, const Field& phi);

/// Hanger strip indicator sampled at the collocation nodes.
struct HangerWeight {
  Vec y_nodes;
  Vec mask;     ///< 1 where |y| > ell - eps
  Vec weights;  ///< quadrature weight times mask
};
HangerWeight hanger_weight(const Grid& g);

/// Values of u at the hanger quadrature points (x midpoints x nodes),
/// Ph x N.
Mat hanger_samples(const Field& u);

/// int Upsilon(y) G(u) over Omega with the hanger quadrature.
double hanger_integral(const Field& u, const std::function<double(double)>& G);

/// Writes "m,j,y,value" rows (nodal values), one header line first.
void write_columns(std::ostream& os, const Field& u);

}  // namespace vkplate
