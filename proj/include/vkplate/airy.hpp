#pragma once

#include <memory>
#include <vector>

#include "vkplate/field.hpp"

namespace vkplate {

/// Per-mode Cholesky factors of the biharmonic form on the clamped space
/// {h(+-ell) = h'(+-ell) = 0}. Immutable after construction.
class ClampedBiharmonicSolver {
 public:
  explicit ClampedBiharmonicSolver(GridPtr grid);

  /// The STARSTAR field B with (B, phi)_** = <load, phi> for every clamped phi.
  /// `load` is an M x N load table as produced by load_from_gl.
  Field solve(const Mat& load) const;

  /// Load table of phi -> (u, phi)_** (the forward operator, weak form).
  Mat apply(const Field& u) const;

 private:
  GridPtr grid_;
  std::vector<Eigen::LLT<Mat>> factors_;
};

/// Per-mode Cholesky factors of the H^2_* form. Free-edge conditions are the
/// natural conditions of this form and hold weakly.
class StarFormSolver {
 public:
  explicit StarFormSolver(GridPtr grid);

  /// Riesz representative in (.,.)_* of the functional given by `load`.
  Field solve(const Mat& load) const;

  /// Load table of w -> (u, w)_*.
  Mat apply(const Field& u) const;

 private:
  GridPtr grid_;
  std::vector<Eigen::LLT<Mat>> factors_;
};

/// Both solvers for one grid. Shared through a per-grid cache so repeated
/// calls reuse the factorizations.
class AiryOps {
 public:
  explicit AiryOps(GridPtr grid);
  static std::shared_ptr<const AiryOps> for_grid(const GridPtr& grid);

  const Grid& grid() const { return *grid_; }
  const ClampedBiharmonicSolver& clamped() const { return clamped_; }
  const StarFormSolver& star() const { return star_; }

  /// (B(v, w), phi)_** = int [v, w] phi. Note B = -Phi for the Airy stress.
  Field B(const Field& v, const Field& w) const;
  /// (C(v, phi), w)_* = int [v, phi] w.
  Field C(const Field& v, const Field& phi) const;
  /// D(v) = C(v, B(v, v)).
  Field D(const Field& v) const;
  /// d(v) = 1/4 ||B(v, v)||_**^2.
  double d(const Field& v) const;
  /// Physical Airy stress Phi = -B(u, u), solving Delta^2 Phi = -[u, u].
  Field airy(const Field& u) const;

 private:
  GridPtr grid_;
  ClampedBiharmonicSolver clamped_;
  StarFormSolver star_;
};

Field opB(const Field& v, const Field& w);
Field opC(const Field& v, const Field& phi);
Field opD(const Field& v);
double d_func(const Field& v);
Field airy_of(const Field& u);

/// int_Omega [u, v] w.
double trilinear(const Field& u, const Field& v, const Field& w);

}  // namespace vkplate
