#include "vkplate/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vkplate {

namespace legendre {

Mat table(double s, int kmax, int max_deriv) {
  Mat t = Mat::Zero(max_deriv + 1, kmax + 1);
  t(0, 0) = 1.0;
  if (kmax >= 1) {
    t(0, 1) = s;
    if (max_deriv >= 1) t(1, 1) = 1.0;
  }
  for (int k = 1; k < kmax; ++k) {
    t(0, k + 1) = ((2.0 * k + 1.0) * s * t(0, k) - k * t(0, k - 1)) / (k + 1.0);
    for (int r = 1; r <= max_deriv; ++r) {
      t(r, k + 1) = t(r, k - 1) + (2.0 * k + 1.0) * t(r - 1, k);
    }
  }
  return t;
}

void gauss(int n, Vec& nodes, Vec& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double s = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = s;
      for (int k = 1; k < n; ++k) {
        const double p2 = ((2.0 * k + 1.0) * s * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
      }
      dp = n * (s * p1 - p0) / (s * s - 1.0);
      const double ds = p1 / dp;
      s -= ds;
      if (std::abs(ds) < 1e-16) break;
    }
    // one more evaluation at the converged node for the weight
    double p0 = 1.0, p1 = s;
    for (int k = 1; k < n; ++k) {
      const double p2 = ((2.0 * k + 1.0) * s * p1 - k * p0) / (k + 1.0);
      p0 = p1;
      p1 = p2;
    }
    dp = n * (s * p1 - p0) / (s * s - 1.0);
    nodes(n - 1 - i) = s;
    weights(n - 1 - i) = 2.0 / ((1.0 - s * s) * dp * dp);
  }
}

Vec integrate(const Vec& c) {
  Vec out = Vec::Zero(c.size() + 1);
  if (c.size() == 0) return out;
  out(1) += c(0);
  for (int k = 1; k < c.size(); ++k) {
    const double a = c(k) / (2.0 * k + 1.0);
    out(k + 1) += a;
    out(k - 1) -= a;
  }
  return out;
}

Vec differentiate(const Vec& a) {
  const auto L = a.size();
  Vec b = Vec::Zero(L);
  for (Eigen::Index k = 0; k < L; ++k) {
    double acc = 0.0;
    for (Eigen::Index j = k + 1; j < L; j += 2) acc += a(j);
    b(k) = (2.0 * k + 1.0) * acc;
  }
  return b;
}

}  // namespace legendre

namespace {

// Clenshaw-Curtis weights on cos(pi j / n), j = 0..n.
Vec clenshaw_curtis(int n) {
  Vec w = Vec::Zero(n + 1);
  const double pi = std::numbers::pi;
  if (n % 2 == 0) {
    w(0) = w(n) = 1.0 / (n * n - 1.0);
  } else {
    w(0) = w(n) = 1.0 / (double(n) * n);
  }
  for (int j = 1; j < n; ++j) {
    const double th = pi * j / n;
    double v = 1.0;
    if (n % 2 == 0) {
      for (int k = 1; k < n / 2; ++k) v -= 2.0 * std::cos(2.0 * k * th) / (4.0 * k * k - 1.0);
      v -= std::cos(n * th) / (n * n - 1.0);
    } else {
      for (int k = 1; k <= (n - 1) / 2; ++k) v -= 2.0 * std::cos(2.0 * k * th) / (4.0 * k * k - 1.0);
    }
    w(j) = 2.0 * v / n;
  }
  return w;
}

double chi_norm(int k) { return std::sqrt((2.0 * k + 1.0) / 2.0); }

}  // namespace

Grid::Grid(int M, int N, const PlateConfig& cfg)
    : M_(M), N_(N), ell_(cfg.ell), sigma_(cfg.sigma), eps_(cfg.eps) {
  if (M < 1) throw ParameterError("grid needs M >= 1 sine modes");
  if (N < 4) throw ParameterError("grid needs N >= 4 collocation nodes");
  cfg.validate();
  const double pi = std::numbers::pi;

  Q_ = (3 * N_) / 2 + 2;
  P_ = 2 * M_;
  Ph_ = std::max(4 * M_, 8);

  // Chebyshev-Gauss-Lobatto nodes, ascending.
  const int n = N_ - 1;
  s_nodes_.resize(N_);
  for (int j = 0; j < N_; ++j) s_nodes_(j) = -std::cos(pi * j / n);
  s_nodes_(0) = -1.0;
  s_nodes_(n) = 1.0;
  if (N_ % 2 == 1) s_nodes_(n / 2) = 0.0;
  y_nodes_ = ell_ * s_nodes_;
  cc_weights_ = ell_ * clenshaw_curtis(n);

  legendre::gauss(Q_, gl_s_, gl_w_);
  gl_y_ = ell_ * gl_s_;
  gl_w_ *= ell_;
  legendre_gl_.resize(Q_, N_);
  for (int q = 0; q < Q_; ++q) legendre_gl_.row(q) = legendre::table(gl_s_(q), N_ - 1, 0).row(0);

  // Legendre coefficients of chi_a and chi_a'.
  chi_legendre_ = Mat::Zero(N_, N_);
  chi_legendre_(0, 0) = 1.0;
  if (N_ > 1) chi_legendre_(1, 1) = 1.0;
  for (int k = 0; k + 2 < N_; ++k) {
    Vec e = Vec::Zero(k + 1);
    e(k) = chi_norm(k);
    const Vec ii = legendre::integrate(legendre::integrate(e));
    chi_legendre_.col(k + 2).head(ii.size()) = ii;
  }

  for (int r = 0; r < 3; ++r) basis_gl_[r].resize(Q_, N_);
  for (int q = 0; q < Q_; ++q) {
    const Mat b = basis_at(gl_y_(q), 2);
    for (int r = 0; r < 3; ++r) basis_gl_[r].row(q) = b.row(r);
  }
  for (int r = 0; r < 5; ++r) basis_nodes_[r].resize(N_, N_);
  for (int j = 0; j < N_; ++j) {
    const Mat b = basis_at(y_nodes_(j), 4);
    for (int r = 0; r < 5; ++r) basis_nodes_[r].row(j) = b.row(r);
  }
  {
    Eigen::PartialPivLU<Mat> lu(basis_nodes_[0]);
    const Mat inv = lu.inverse();
    for (int r = 1; r <= 4; ++r) diff_ops_[r - 1] = basis_nodes_[r] * inv;
  }
  {
    Mat V(N_, N_);
    for (int j = 0; j < N_; ++j) V.row(j) = legendre::table(s_nodes_(j), N_ - 1, 0).row(0);
    vandermonde_lu_.compute(V);
  }

  const auto& X0 = basis_gl_[0];
  const auto& X1 = basis_gl_[1];
  const auto& X2 = basis_gl_[2];
  const Eigen::DiagonalMatrix<double, Eigen::Dynamic> W(gl_w_);
  const double h = pi / 2.0;
  const Mat G00 = X0.transpose() * W * X0;
  const Mat G11 = X1.transpose() * W * X1;
  const Mat G22 = X2.transpose() * W * X2;
  const Mat G02 = X0.transpose() * W * X2;
  mass_ = h * G00;
  star_forms_.reserve(M_);
  biharm_forms_.reserve(M_);
  for (int m = 1; m <= M_; ++m) {
    const double m2 = double(m) * m;
    Mat S = h * (G22 - sigma_ * m2 * (G02 + G02.transpose()) + m2 * m2 * G00 +
                 2.0 * (1.0 - sigma_) * m2 * G11);
    Mat B = h * (G22 - m2 * (G02 + G02.transpose()) + m2 * m2 * G00);
    star_forms_.push_back(0.5 * (S + S.transpose()));
    biharm_forms_.push_back(0.5 * (B + B.transpose()));
  }

  // Clamped functions: P_k - 2(2k+5)/(2k+7) P_{k+2} + (2k+3)/(2k+7) P_{k+4}.
  const int nc = std::max(N_ - 4, 0);
  clamped_ = Mat::Zero(N_, nc);
  for (int k = 0; k < nc; ++k) {
    Vec leg = Vec::Zero(N_);
    leg(k) = 1.0;
    leg(k + 2) = -2.0 * (2.0 * k + 5.0) / (2.0 * k + 7.0);
    leg(k + 4) = (2.0 * k + 3.0) / (2.0 * k + 7.0);
    Vec z = legendre_to_chi(leg);
    const double nrm = std::sqrt(h * z.dot(G22 * z));
    clamped_.col(k) = z / nrm;
  }

  // Dealiased x sampling for quadratic products.
  x_samples_.resize(P_ + 1);
  for (int i = 0; i <= P_; ++i) x_samples_(i) = pi * i / P_;
  sin_x_.resize(P_ + 1, M_);
  cos_x_.resize(P_ + 1, M_);
  for (int i = 0; i <= P_; ++i) {
    for (int m = 1; m <= M_; ++m) {
      sin_x_(i, m - 1) = std::sin(m * x_samples_(i));
      cos_x_(i, m - 1) = std::cos(m * x_samples_(i));
    }
  }
  Mat dct(P_ + 1, P_ + 1);
  for (int j = 0; j <= P_; ++j) {
    for (int i = 0; i <= P_; ++i) {
      const double wi = (i == 0 || i == P_) ? 0.5 : 1.0;
      dct(j, i) = 2.0 / P_ * wi * std::cos(double(j) * i * pi / P_);
    }
    if (j == 0 || j == P_) dct.row(j) *= 0.5;
  }
  Mat sproj = Mat::Zero(M_, P_ + 1);
  for (int m = 1; m <= M_; ++m) {
    for (int j = 0; j <= P_; ++j) {
      if ((m + j) % 2 == 1) sproj(m - 1, j) = (2.0 / pi) * 2.0 * m / (double(m) * m - double(j) * j);
    }
  }
  proj_ = sproj * dct;

  hanger_x_.resize(Ph_);
  hanger_sin_.resize(Ph_, M_);
  for (int i = 0; i < Ph_; ++i) {
    hanger_x_(i) = pi * (i + 0.5) / Ph_;
    for (int m = 1; m <= M_; ++m) hanger_sin_(i, m - 1) = std::sin(m * hanger_x_(i));
  }
  hanger_mask_.resize(N_);
  for (int j = 0; j < N_; ++j) hanger_mask_(j) = std::abs(y_nodes_(j)) > ell_ - eps_ ? 1.0 : 0.0;
}

Mat Grid::basis_at(double y, int max_deriv) const {
  const double s = y / ell_;
  const int R = std::max(max_deriv, 0);
  const Mat t = legendre::table(s, N_ - 1, std::max(R - 2, 1));
  Mat out = Mat::Zero(R + 1, N_);
  out.row(0) = t.row(0) * chi_legendre_;
  if (R >= 1) {
    out(1, 1) = 1.0;
    for (int k = 0; k + 2 < N_; ++k) {
      // chi_{k+2}' = n_k * int P_k
      const double ip = (k == 0) ? t(0, 1) : (t(0, k + 1) - t(0, k - 1)) / (2.0 * k + 1.0);
      out(1, k + 2) = chi_norm(k) * ip;
    }
  }
  for (int r = 2; r <= R; ++r) {
    for (int k = 0; k + 2 < N_; ++k) out(r, k + 2) = chi_norm(k) * t(r - 2, k);
  }
  for (int r = 1; r <= R; ++r) out.row(r) /= std::pow(ell_, r);
  return out;
}

Vec Grid::legendre_to_chi(const Vec& leg_in) const {
  Vec leg = Vec::Zero(N_);
  leg.head(std::min<Eigen::Index>(leg_in.size(), N_)) = leg_in.head(std::min<Eigen::Index>(leg_in.size(), N_));
  const Vec a2 = legendre::differentiate(legendre::differentiate(leg));
  Vec c = Vec::Zero(N_);
  for (int k = 0; k + 2 < N_; ++k) c(k + 2) = a2(k) / chi_norm(k);
  Vec rest = leg;
  for (int k = 0; k + 2 < N_; ++k) rest -= c(k + 2) * chi_legendre_.col(k + 2);
  c(0) = rest(0);
  if (N_ > 1) c(1) = rest(1);
  return c;
}

Vec Grid::nodal_to_chi(const Vec& values) const {
  if (values.size() != N_) throw ParameterError("nodal vector has wrong length");
  return legendre_to_chi(vandermonde_lu_.solve(values));
}

Vec Grid::nodal_to_legendre(const Vec& values) const {
  if (values.size() != N_) throw ParameterError("nodal vector has wrong length");
  return vandermonde_lu_.solve(values);
}

Vec Grid::curvature_to_chi(const Vec& leg_ss) const {
  Vec c = Vec::Zero(N_);
  for (int k = 0; k + 2 < N_ && k < leg_ss.size(); ++k) c(k + 2) = leg_ss(k) / chi_norm(k);
  return c;
}

bool Grid::same_as(const Grid& o) const {
  return this == &o || (M_ == o.M_ && N_ == o.N_ && ell_ == o.ell_ && sigma_ == o.sigma_ && eps_ == o.eps_);
}

GridPtr make_grid(int M, int N, const PlateConfig& cfg) { return std::make_shared<const Grid>(M, N, cfg); }

}  // namespace vkplate
