#include "vkplate/field.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

namespace vkplate {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

Eigen::DiagonalMatrix<double, Eigen::Dynamic> mode_diag(int M, int power) {
  Vec d(M);
  for (int m = 1; m <= M; ++m) d(m - 1) = std::pow(double(m), power);
  return Eigen::DiagonalMatrix<double, Eigen::Dynamic>(d);
}

Space combine(Space a, Space b) {
  if (a == Space::Raw || b == Space::Raw) return Space::Raw;
  if (a == Space::Star || b == Space::Star) return Space::Star;
  return Space::StarStar;
}

}  // namespace

const char* to_string(Space s) {
  switch (s) {
    case Space::Star: return "star";
    case Space::StarStar: return "starstar";
    case Space::Raw: return "raw";
  }
  return "?";
}

Field::Field(GridPtr grid, Space space)
    : grid_(std::move(grid)), coeffs_(Mat::Zero(grid_->M(), grid_->N())), space_(space) {}

Field::Field(GridPtr grid, Mat coeffs, Space space)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)), space_(space) {
  if (coeffs_.rows() != grid_->M() || coeffs_.cols() != grid_->N()) {
    throw ParameterError("coefficient table does not match the grid size");
  }
}

Field Field::from_nodal(GridPtr grid, const Mat& values, Space space) {
  if (values.rows() != grid->M() || values.cols() != grid->N()) {
    throw ParameterError("nodal table does not match the grid size");
  }
  Mat c(grid->M(), grid->N());
  for (int m = 0; m < grid->M(); ++m) c.row(m) = grid->nodal_to_chi(values.row(m).transpose()).transpose();
  return Field(std::move(grid), std::move(c), space);
}

Field Field::from_profile(GridPtr grid, int m, const std::function<double(double)>& h,
                          const std::function<double(double)>& h_yy, Space space) {
  const Grid& g = *grid;
  if (m < 1 || m > g.M()) throw ParameterError("mode index outside 1..M");
  const double ell = g.ell();
  Vec curv(g.N());
  for (int j = 0; j < g.N(); ++j) curv(j) = ell * ell * h_yy(g.y_nodes()(j));
  Vec c = g.curvature_to_chi(g.nodal_to_legendre(curv));
  // affine part from the end values
  const auto& B0 = g.basis_nodes(0);
  const double rm = h(-ell) - B0.row(0).dot(c);
  const double rp = h(ell) - B0.row(g.N() - 1).dot(c);
  c(0) = 0.5 * (rp + rm);
  c(1) = 0.5 * (rp - rm);
  Field f(std::move(grid), space);
  f.coeffs_.row(m - 1) = c.transpose();
  return f;
}

Mat Field::nodal_values() const { return coeffs_ * grid_->basis_nodes(0).transpose(); }

Mat Field::gl_values(int r) const { return coeffs_ * grid_->basis_gl(r).transpose(); }

double Field::value(double x, double y, int dx, int dy) const {
  const Mat b = grid_->basis_at(y, dy);
  const Vec prof = coeffs_ * b.row(dy).transpose();
  double acc = 0.0;
  for (int m = 1; m <= grid_->M(); ++m) {
    const double fm = std::pow(double(m), dx) * std::sin(m * x + dx * kHalfPi);
    acc += fm * prof(m - 1);
  }
  return acc;
}

Field& Field::operator+=(const Field& o) {
  require_same_grid(*this, o);
  coeffs_ += o.coeffs_;
  space_ = combine(space_, o.space_);
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_same_grid(*this, o);
  coeffs_ -= o.coeffs_;
  space_ = combine(space_, o.space_);
  return *this;
}

Field& Field::operator*=(double a) {
  coeffs_ *= a;
  return *this;
}

void require_same_grid(const Field& a, const Field& b) {
  if (!a.grid().same_as(b.grid())) throw ParameterError("fields live on different grids");
}

Field random_field(GridPtr grid, std::mt19937_64& rng, Space space, int max_mode) {
  const Grid& g = *grid;
  const int mm = (max_mode <= 0) ? g.M() : std::min(max_mode, g.M());
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat c = Mat::Zero(g.M(), g.N());
  for (int m = 1; m <= mm; ++m) {
    const double amp = 1.0 / (double(m) * m);
    if (space == Space::StarStar) {
      const Mat& Z = g.clamped_basis();
      Vec r(Z.cols());
      for (int k = 0; k < r.size(); ++k) r(k) = nd(rng) * std::pow(0.6, k);
      c.row(m - 1) = amp * (Z * r).transpose();
    } else {
      Vec leg(g.N());
      for (int k = 0; k < g.N(); ++k) leg(k) = nd(rng) * std::pow(0.5, k);
      c.row(m - 1) = amp * g.legendre_to_chi(leg).transpose();
    }
  }
  return Field(std::move(grid), std::move(c), space);
}

double inner_star(const Field& u, const Field& v) {
  require_same_grid(u, v);
  const Grid& g = u.grid();
  double acc = 0.0;
  for (int m = 1; m <= g.M(); ++m) {
    acc += (u.coeffs().row(m - 1) * g.star_form(m) * v.coeffs().row(m - 1).transpose()).value();
  }
  return acc;
}

double norm_star(const Field& u) { return std::sqrt(std::max(inner_star(u, u), 0.0)); }

double inner_biharm(const Field& u, const Field& v) {
  require_same_grid(u, v);
  const Grid& g = u.grid();
  double acc = 0.0;
  for (int m = 1; m <= g.M(); ++m) {
    acc += (u.coeffs().row(m - 1) * g.biharm_form(m) * v.coeffs().row(m - 1).transpose()).value();
  }
  return acc;
}

double inner_dx(const Field& u, const Field& v) {
  require_same_grid(u, v);
  const Grid& g = u.grid();
  double acc = 0.0;
  for (int m = 1; m <= g.M(); ++m) {
    acc += double(m) * m * (u.coeffs().row(m - 1) * g.mass() * v.coeffs().row(m - 1).transpose()).value();
  }
  return acc;
}

double inner_l2(const Field& u, const Field& v) {
  require_same_grid(u, v);
  const Grid& g = u.grid();
  return (u.coeffs() * g.mass()).cwiseProduct(v.coeffs()).sum();
}

double norm_l2(const Field& u) { return std::sqrt(std::max(inner_l2(u, u), 0.0)); }

double integrate(const Field& u) {
  const Grid& g = u.grid();
  const Vec colint = g.basis_gl(0).transpose() * g.gl_w();  // int chi_a dy
  const Vec prof = u.coeffs() * colint;
  double acc = 0.0;
  for (int m = 1; m <= g.M(); m += 2) acc += 2.0 / m * prof(m - 1);
  return acc;
}

Mat bracket_gl(const Field& u, const Field& v) {
  require_same_grid(u, v);
  const Grid& g = u.grid();
  const auto m1 = mode_diag(g.M(), 1);
  const auto m2 = mode_diag(g.M(), 2);
  const Mat& S = g.sin_table();
  const Mat& C = g.cos_table();
  const Mat uxx = -(S * (m2 * u.gl_values(0)));
  const Mat uyy = S * u.gl_values(2);
  const Mat uxy = C * (m1 * u.gl_values(1));
  const Mat vxx = -(S * (m2 * v.gl_values(0)));
  const Mat vyy = S * v.gl_values(2);
  const Mat vxy = C * (m1 * v.gl_values(1));
  const Mat prod = uxx.cwiseProduct(vyy) + uyy.cwiseProduct(vxx) - 2.0 * uxy.cwiseProduct(vxy);
  return g.cos_samples_to_sine() * prod;
}

namespace {

Field raw_from_gl(const GridPtr& grid, const Mat& b) {
  const Grid& g = *grid;
  const Vec ws = g.gl_w() / g.ell();
  Mat c(g.M(), g.N());
  for (int m = 0; m < g.M(); ++m) {
    Vec leg = g.legendre_gl().transpose() * ws.cwiseProduct(b.row(m).transpose());
    for (int k = 0; k < g.N(); ++k) leg(k) *= (2.0 * k + 1.0) / 2.0;
    c.row(m) = g.legendre_to_chi(leg).transpose();
  }
  return Field(grid, std::move(c), Space::Raw);
}

}  // namespace

Field bracket(const Field& u, const Field& v) { return raw_from_gl(u.grid_ptr(), bracket_gl(u, v)); }

Field bracket_with_profile(const std::function<double(double)>& F_yy, const Field& u) {
  const Grid& g = u.grid();
  Vec fyy(g.Q());
  for (int q = 0; q < g.Q(); ++q) fyy(q) = F_yy(g.gl_y()(q));
  const Mat b = -(mode_diag(g.M(), 2) * u.gl_values(0)) * fyy.asDiagonal();
  return raw_from_gl(u.grid_ptr(), b);
}

Mat load_from_gl(const Grid& g, const Mat& b) {
  return kHalfPi * (b * g.gl_w().asDiagonal()) * g.basis_gl(0);
}

Mat load_from_field(const Field& f) { return f.coeffs() * f.grid().mass(); }

double pair_gl(const Grid& g, const Mat& b, const Field& phi) {
  const Mat p = phi.gl_values(0);
  return kHalfPi * (b.cwiseProduct(p) * g.gl_w()).sum();
}

HangerWeight hanger_weight(const Grid& g) {
  HangerWeight hw;
  hw.y_nodes = g.y_nodes();
  hw.mask = g.hanger_mask();
  hw.weights = g.quad_weights().cwiseProduct(g.hanger_mask());
  return hw;
}

Mat hanger_samples(const Field& u) {
  const Grid& g = u.grid();
  return g.hanger_sin_table() * u.coeffs() * g.basis_nodes(0).transpose();
}

double hanger_integral(const Field& u, const std::function<double(double)>& G) {
  const Grid& g = u.grid();
  const Mat U = hanger_samples(u);
  const Vec& mask = g.hanger_mask();
  const Vec& w = g.quad_weights();
  const double wx = std::numbers::pi / g.hanger_x_points();
  double acc = 0.0;
  for (int j = 0; j < g.N(); ++j) {
    if (mask(j) == 0.0) continue;
    double col = 0.0;
    for (int i = 0; i < U.rows(); ++i) col += G(U(i, j));
    acc += wx * w(j) * col;
  }
  return acc;
}

void write_columns(std::ostream& os, const Field& u) {
  const Mat v = u.nodal_values();
  const Vec& y = u.grid().y_nodes();
  os << "m,j,y,value\n";
  os.precision(17);
  for (int m = 1; m <= u.grid().M(); ++m) {
    for (int j = 0; j < u.grid().N(); ++j) os << m << ',' << j << ',' << y(j) << ',' << v(m - 1, j) << '\n';
  }
}

}  // namespace vkplate
