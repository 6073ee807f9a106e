#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vkplate/airy.hpp"
#include "vkplate/spectrum.hpp"

namespace vkplate {

/// No start or iteration reached the convergence criteria.
class NoConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// External load f in the plate equation.
struct LoadSpec {
  enum class Kind { Zero, SinX, E1, Custom };
  Kind kind = Kind::Zero;
  double amplitude = 0.0;      ///< c in c*sin(x) or c*e1
  std::optional<Field> field;  ///< only for Custom

  static LoadSpec zero() { return {}; }
  static LoadSpec sin_x(double c) { return {Kind::SinX, c, std::nullopt}; }
  static LoadSpec e1(double c) { return {Kind::E1, c, std::nullopt}; }
  static LoadSpec custom(Field f) { return {Kind::Custom, 0.0, std::move(f)}; }
  /// c*sin(x) with int f^2 = target^2.
  static LoadSpec sin_x_with_l2_norm(double target, double ell);

  std::string describe() const;
};

struct SolverOptions {
  double grad_tol = 1e-9;   ///< ||J'(u)||_* / max(1, ||u||_*)
  double step_tol = 1e-8;   ///< Newton increment, relative like grad_tol
  int max_iter = 200;
  double divergence_norm = 1e6;
  /// Restricts descent to sine modes m divisible by this. Such subspaces are
  /// invariant under J', so critical points found there are critical in full.
  int mode_stride = 1;  ///< ||u||_* beyond this stops a descent as divergent
  double armijo = 1e-4;
  int max_backtrack = 60;
  double cg_tol = 1e-8;     ///< relative inner tolerance of Newton-CG
  int cg_max = 200;
  double dedup_tol = 1e-6;  ///< ||u - u'||_* / max(1, ||u||_*)
  bool deflation = false;
  double deflation_power = 2.0;
  double deflation_shift = 1.0;
  int deflation_iters = 40;
  int n_starts = 20;
  int eigen_starts = 3;     ///< number of +-s e_k starts
  double start_scale = 1.0; ///< |start| when no reduced amplitude applies
  std::uint64_t seed = 20240521;
  int string_images = 16;
  int string_iters = 300;
  double string_tol = 1e-5;
  int saddle_iters = 50;
  int probe_modes = 4;
  int probe_random = 4;
  double curvature_tol = 1e-6;
  double small_f = 1e-2;    ///< L^2 norm of the default small load
  void validate() const;
};

enum class Stability { Stable, Unstable, Marginal };
const char* to_string(Stability s);

struct StabilityInfo {
  Stability tag = Stability::Marginal;
  int morse_estimate = 0;
  std::vector<double> curvatures;  ///< eigenvalues of the projected Hessian
  std::optional<double> curvature_plus_e1;   ///< one-sided, hangers only
  std::optional<double> curvature_minus_e1;
};

struct Equilibrium {
  Field u;
  Field phi;  ///< Airy stress, phi = airy_of(u)
  double lambda = 0.0;
  double energy = 0.0;
  double residual = 0.0;
  double amplitude = 0.0;  ///< (u, e1)_*
  bool converged = false;
  int iterations = 0;
  std::string origin{};    ///< e.g. "start 3", "mountain pass"
  StabilityInfo stability{};
};

/// Split of J(u) into its terms, plus the sum.
struct EnergyParts {
  double quadratic = 0.0;  ///< 1/2 ||u||_*^2
  double quartic = 0.0;    ///< d(u)
  double buckling = 0.0;   ///< lambda/2 ||u_x||^2 (enters with a minus)
  double hanger = 0.0;
  double load = 0.0;       ///< int f u (enters with a minus)
  double total = 0.0;
  double scale() const { return quadratic + quartic + buckling + std::abs(hanger) + std::abs(load); }
};

/// J(u) = 1/2 ||u||_*^2 + d(u) - lambda/2 ||u_x||^2
///        + int Upsilon (k/2 (u+)^2 + delta/4 (u+)^4) - int f u
/// on one grid. Cheap to copy; holds shared immutable data.
class Functional {
 public:
  Functional(GridPtr grid, PlateConfig cfg, LoadSpec load = {});

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const PlateConfig& config() const { return cfg_; }
  const Field& load() const { return f_; }
  const Lambda1& first_mode() const { return *l1_; }
  const AiryOps& ops() const { return *ops_; }

  EnergyParts energy_parts(const Field& u) const;
  double energy(const Field& u) const { return energy_parts(u).total; }
  /// Riesz representative of J'(u) in (.,.)_*.
  Field gradient(const Field& u) const;
  /// ||J'(u)||_* / max(1, ||u||_*).
  double residual(const Field& u) const;
  /// Riesz representative of J''(u)[v, .]. Uses B(u, u) from `buu` when given.
  Field hessian_apply(const Field& u, const Field& v, const Field* buu = nullptr) const;

  /// alpha = int Upsilon e1^2 and int Upsilon e1^4 with the hanger quadrature.
  double alpha() const;
  double hanger_e1_quartic() const;
  /// lambda_bar = (alpha k + 1) lambda_1.
  double lambda_bar() const;

 private:
  Mat hanger_load(const Field& u, bool derivative, const Field* v) const;

  GridPtr grid_;
  PlateConfig cfg_;
  std::shared_ptr<const AiryOps> ops_;
  std::shared_ptr<const Lambda1> l1_;
  Field f_;
};

double energy(const Field& u, const PlateConfig& cfg, const LoadSpec& load);
Field gradient(const Field& u, const PlateConfig& cfg, const LoadSpec& load);

/// Descent from u0: Newton-CG in the H^2_* metric with an energy line search,
/// falling back to the steepest-descent direction and following directions
/// of negative curvature. Converged means both the relative residual and the
/// Newton increment are below tolerance.
Equilibrium solve_from(const Field& u0, const Functional& J, const SolverOptions& opts = {});

/// Starting fields: 0, +-s_k e_k for the first eigen_starts modes and random
/// fields up to n_starts in total. s_k is the reduced-model amplitude when
/// lambda > lambda_k and start_scale otherwise.
std::vector<Field> default_starts(const Functional& J, const SolverOptions& opts);

struct MultistartResult {
  std::vector<Equilibrium> solutions;  ///< converged, deduplicated, by energy
  int starts = 0;
  int converged = 0;
};

MultistartResult multistart(const Functional& J, const SolverOptions& opts, const std::vector<Field>& starts);

/// Saddle between two equilibria by a string of opts.string_images states,
/// refined by Newton-GMRES. `bend`, if given, displaces the initial string
/// towards that direction (scaled to the endpoint distance).
Equilibrium mountain_pass(const Equilibrium& u1, const Equilibrium& u2, const Functional& J,
                          const SolverOptions& opts = {}, const Field* bend = nullptr);

StabilityInfo classify_stability(const Field& u, const Functional& J, const SolverOptions& opts = {});

/// Residual-minimizing Newton-GMRES from u (finds saddles as well as minima).
Equilibrium newton_refine(const Field& u0, const Functional& J, const SolverOptions& opts, int max_iter);

struct Branch {
  int id = 0;
  std::optional<int> parent;
  std::vector<Equilibrium> points;  ///< lambda strictly increasing
};

struct Bifurcation {
  double lambda = 0.0;          ///< first lambda with the new branch
  double lambda_previous = 0.0; ///< last lambda without it
  int branch = 0;
  int parent = 0;
};

struct ContinuationResult {
  std::vector<Branch> branches;
  std::vector<Bifurcation> bifurcations;
  std::vector<double> lambdas;
};

ContinuationResult continuation(const GridPtr& grid, const PlateConfig& cfg, const LoadSpec& load, double lam_from,
                                double lam_to, int steps, const SolverOptions& opts = {});

struct TheoremReport {
  std::string name;
  bool passed = false;
  std::string hypothesis;
  int count = 0;
  std::vector<Equilibrium> solutions;
  std::vector<std::string> notes;
};

/// Scenario check for one item of the existence theorems. `name` is one of
/// T2i, T2ii, T2iii, T2iv, T3i, T3ii, T3iii. cfg.lambda, k and delta are taken
/// as given; the load is zero or the default small load. Throws
/// ParameterError naming the violated hypothesis.
TheoremReport theorem_suite(const std::string& name, const GridPtr& grid, const PlateConfig& cfg,
                            const SolverOptions& opts = {});

}  // namespace vkplate
