#include "vkplate/airy.hpp"

#include <map>
#include <mutex>

namespace vkplate {

namespace {

void check_load(const Grid& g, const Mat& load) {
  if (load.rows() != g.M() || load.cols() != g.N()) throw ParameterError("load table does not match the grid size");
}

}  // namespace

ClampedBiharmonicSolver::ClampedBiharmonicSolver(GridPtr grid) : grid_(std::move(grid)) {
  const Mat& Z = grid_->clamped_basis();
  factors_.reserve(grid_->M());
  for (int m = 1; m <= grid_->M(); ++m) {
    const Mat A = Z.transpose() * grid_->biharm_form(m) * Z;
    factors_.emplace_back(A);
    if (factors_.back().info() != Eigen::Success) {
      throw NumericalError("clamped biharmonic form is not positive definite for mode " + std::to_string(m));
    }
  }
}

Field ClampedBiharmonicSolver::solve(const Mat& load) const {
  check_load(*grid_, load);
  const Mat& Z = grid_->clamped_basis();
  Mat c(grid_->M(), grid_->N());
  for (int m = 0; m < grid_->M(); ++m) {
    const Vec r = factors_[m].solve(Z.transpose() * load.row(m).transpose());
    c.row(m) = (Z * r).transpose();
  }
  return Field(grid_, std::move(c), Space::StarStar);
}

Mat ClampedBiharmonicSolver::apply(const Field& u) const {
  Mat out(grid_->M(), grid_->N());
  for (int m = 0; m < grid_->M(); ++m) out.row(m) = u.coeffs().row(m) * grid_->biharm_form(m + 1);
  return out;
}

StarFormSolver::StarFormSolver(GridPtr grid) : grid_(std::move(grid)) {
  factors_.reserve(grid_->M());
  for (int m = 1; m <= grid_->M(); ++m) {
    factors_.emplace_back(grid_->star_form(m));
    if (factors_.back().info() != Eigen::Success) {
      throw NumericalError("H^2_* form is not positive definite for mode " + std::to_string(m));
    }
  }
}

Field StarFormSolver::solve(const Mat& load) const {
  check_load(*grid_, load);
  Mat c(grid_->M(), grid_->N());
  for (int m = 0; m < grid_->M(); ++m) c.row(m) = factors_[m].solve(load.row(m).transpose()).transpose();
  return Field(grid_, std::move(c), Space::Star);
}

Mat StarFormSolver::apply(const Field& u) const {
  Mat out(grid_->M(), grid_->N());
  for (int m = 0; m < grid_->M(); ++m) out.row(m) = u.coeffs().row(m) * grid_->star_form(m + 1);
  return out;
}

AiryOps::AiryOps(GridPtr grid) : grid_(grid), clamped_(grid), star_(grid) {}

std::shared_ptr<const AiryOps> AiryOps::for_grid(const GridPtr& grid) {
  static std::mutex mu;
  static std::map<const Grid*, std::weak_ptr<const AiryOps>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[grid.get()];
  if (auto sp = slot.lock(); sp && &sp->grid() == grid.get()) return sp;
  // The cached ops keep the grid alive, so a live entry can never point at a
  // recycled address.
  auto sp = std::make_shared<const AiryOps>(grid);
  slot = sp;
  return sp;
}

Field AiryOps::B(const Field& v, const Field& w) const {
  return clamped_.solve(load_from_gl(*grid_, bracket_gl(v, w)));
}

Field AiryOps::C(const Field& v, const Field& phi) const {
  return star_.solve(load_from_gl(*grid_, bracket_gl(v, phi)));
}

Field AiryOps::D(const Field& v) const { return C(v, B(v, v)); }

double AiryOps::d(const Field& v) const {
  const Field b = B(v, v);
  return 0.25 * inner_biharm(b, b);
}

Field AiryOps::airy(const Field& u) const { return -B(u, u); }

Field opB(const Field& v, const Field& w) { return AiryOps::for_grid(v.grid_ptr())->B(v, w); }
Field opC(const Field& v, const Field& phi) { return AiryOps::for_grid(v.grid_ptr())->C(v, phi); }
Field opD(const Field& v) { return AiryOps::for_grid(v.grid_ptr())->D(v); }
double d_func(const Field& v) { return AiryOps::for_grid(v.grid_ptr())->d(v); }
Field airy_of(const Field& u) { return AiryOps::for_grid(u.grid_ptr())->airy(u); }

double trilinear(const Field& u, const Field& v, const Field& w) {
  require_same_grid(u, w);
  return pair_gl(u.grid(), bracket_gl(u, v), w);
}

}  // namespace vkplate
