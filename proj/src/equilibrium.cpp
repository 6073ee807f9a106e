#include "vkplate/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <random>
#include <sstream>

namespace vkplate {

namespace {

Field zero_like(const GridPtr& g) { return Field(g, Space::Star); }

double rel_norm_den(const Field& u) { return std::max(1.0, norm_star(u)); }

// Load table of w -> int u_x w_x.
Mat dx_load(const Field& u) {
  Mat L = u.coeffs() * u.grid().mass();
  for (int m = 1; m <= u.grid().M(); ++m) L.row(m - 1) *= double(m) * m;
  return L;
}

Equilibrium make_equilibrium(const Field& u, const Functional& J) {
  Equilibrium eq{.u = u, .phi = J.ops().airy(u)};
  const EnergyParts e = J.energy_parts(u);
  eq.lambda = J.config().lambda;
  eq.energy = e.total;
  eq.residual = J.residual(u);
  eq.amplitude = inner_star(u, J.first_mode().e1);
  return eq;
}

// Zeroes the sine modes outside the symmetry class m = 0 mod stride.
Field restricted(Field f, int stride) {
  if (stride > 1) {
    for (int m = 1; m <= f.grid().M(); ++m)
      if (m % stride != 0) f.coeffs().row(m - 1).setZero();
  }
  return f;
}

struct CGResult {
  Field p;
  std::optional<Field> negative{};  // direction with d^T H d <= 0
  bool converged = false;
  int iterations = 0;
};

// Conjugate gradients on J''(u) p = -g in the (.,.)_* inner product, stopped
// at the first direction of nonpositive curvature.
CGResult newton_cg(const Functional& J, const Field& u, const Field& g, const Field& buu, const SolverOptions& o) {
  CGResult out{.p = zero_like(u.grid_ptr())};
  Field r = -g;
  double rr = inner_star(r, r);
  const double g0 = std::sqrt(rr);
  if (g0 == 0.0) {
    out.converged = true;
    return out;
  }
  Field d = r;
  for (int j = 0; j < o.cg_max; ++j) {
    const Field Hd = restricted(J.hessian_apply(u, d, &buu), o.mode_stride);
    const double dHd = inner_star(d, Hd);
    out.iterations = j + 1;
    if (!(dHd > 0.0)) {
      out.negative = d;
      return out;
    }
    const double a = rr / dHd;
    out.p += a * d;
    r -= a * Hd;
    const double rr_new = inner_star(r, r);
    if (std::sqrt(rr_new) <= o.cg_tol * g0) {
      out.converged = true;
      return out;
    }
    d = r + (rr_new / rr) * d;
    rr = rr_new;
  }
  return out;
}

// GMRES on J''(u) p = -g in the (.,.)_* inner product (indefinite systems).
Field gmres(const Functional& J, const Field& u, const Field& g, const Field& buu, double tol, int max_iter) {
  const GridPtr& grid = u.grid_ptr();
  Field x = zero_like(grid);
  const double beta0 = norm_star(g);
  if (beta0 == 0.0) return x;
  const int restart = std::min(max_iter, 80);
  int total = 0;
  Field r = -g;
  while (total < max_iter) {
    const double beta = norm_star(r);
    if (beta <= tol * beta0) break;
    std::vector<Field> V{(1.0 / beta) * r};
    Mat Hm = Mat::Zero(restart + 1, restart);
    Vec cs = Vec::Zero(restart), sn = Vec::Zero(restart), e = Vec::Zero(restart + 1);
    e(0) = beta;
    int k = 0;
    for (; k < restart && total < max_iter; ++k, ++total) {
      Field w = J.hessian_apply(u, V[k], &buu);
      for (int i = 0; i <= k; ++i) {
        Hm(i, k) = inner_star(w, V[i]);
        w -= Hm(i, k) * V[i];
      }
      Hm(k + 1, k) = norm_star(w);
      for (int i = 0; i < k; ++i) {
        const double t = cs(i) * Hm(i, k) + sn(i) * Hm(i + 1, k);
        Hm(i + 1, k) = -sn(i) * Hm(i, k) + cs(i) * Hm(i + 1, k);
        Hm(i, k) = t;
      }
      const double den = std::hypot(Hm(k, k), Hm(k + 1, k));
      cs(k) = den == 0.0 ? 1.0 : Hm(k, k) / den;
      sn(k) = den == 0.0 ? 0.0 : Hm(k + 1, k) / den;
      const double hk1 = Hm(k + 1, k);
      Hm(k, k) = cs(k) * Hm(k, k) + sn(k) * hk1;
      Hm(k + 1, k) = 0.0;
      e(k + 1) = -sn(k) * e(k);
      e(k) = cs(k) * e(k);
      const bool done = std::abs(e(k + 1)) <= tol * beta0;
      if (hk1 > 0.0 && !done) V.push_back((1.0 / hk1) * w);
      if (done || hk1 == 0.0) {
        ++k;
        ++total;
        break;
      }
    }
    const Vec y = Hm.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(e.head(k));
    for (int i = 0; i < k; ++i) x += y(i) * V[i];
    r = -g - J.hessian_apply(u, x, &buu);
  }
  return x;
}

}  // namespace

// ---------------------------------------------------------------- LoadSpec

LoadSpec LoadSpec::sin_x_with_l2_norm(double target, double ell) {
  return sin_x(target / std::sqrt(std::numbers::pi * ell));
}

std::string LoadSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Zero: os << "zero"; break;
    case Kind::SinX: os << amplitude << "*sin(x)"; break;
    case Kind::E1: os << amplitude << "*e1"; break;
    case Kind::Custom: os << "custom"; break;
  }
  return os.str();
}

void SolverOptions::validate() const {
  if (!(grad_tol > 0 && step_tol > 0 && armijo > 0 && armijo < 1 && cg_tol > 0 && dedup_tol > 0 &&
        curvature_tol > 0 && string_tol > 0 && divergence_norm > 0 && deflation_power > 0 && deflation_shift >= 0 && small_f >= 0)) {
    throw ParameterError("solver tolerances must be positive");
  }
  if (max_iter < 1 || mode_stride < 1 || max_backtrack < 1 || cg_max < 1 || n_starts < 1 || string_images < 3 || string_iters < 1 ||
      saddle_iters < 1 || probe_modes < 1 || probe_random < 0 || eigen_starts < 0) {
    throw ParameterError("solver iteration counts must be positive");
  }
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "STABLE";
    case Stability::Unstable: return "UNSTABLE";
    case Stability::Marginal: return "MARGINAL";
  }
  return "?";
}

// -------------------------------------------------------------- Functional

Functional::Functional(GridPtr grid, PlateConfig cfg, LoadSpec load)
    : grid_(std::move(grid)), cfg_(cfg), f_(grid_, Space::Raw) {
  cfg_.validate();
  if (std::abs(grid_->ell() - cfg_.ell) > 1e-15 * cfg_.ell || std::abs(grid_->sigma() - cfg_.sigma) > 1e-15 ||
      std::abs(grid_->eps() - cfg_.eps) > 1e-15 * cfg_.eps) {
    throw ParameterError("grid was built for a different plate geometry");
  }
  ops_ = AiryOps::for_grid(grid_);
  l1_ = std::make_shared<const Lambda1>(lambda1(cfg_, grid_));
  switch (load.kind) {
    case LoadSpec::Kind::Zero: break;
    case LoadSpec::Kind::SinX:
      f_ = Field::from_profile(
          grid_, 1, [&](double) { return load.amplitude; }, [](double) { return 0.0; }, Space::Raw);
      break;
    case LoadSpec::Kind::E1:
      f_ = load.amplitude * l1_->e1;
      f_.set_space(Space::Raw);
      break;
    case LoadSpec::Kind::Custom:
      if (!load.field) throw ParameterError("custom load without a field");
      if (!load.field->grid().same_as(*grid_)) throw ParameterError("load field lives on a different grid");
      f_ = Field(grid_, load.field->coeffs(), Space::Raw);
      break;
  }
}

Mat Functional::hanger_load(const Field& u, bool derivative, const Field* v) const {
  const Grid& g = *grid_;
  const Mat U = hanger_samples(u);
  Mat G = Mat::Zero(U.rows(), U.cols());
  const double k = cfg_.k, dl = cfg_.delta;
  if (!derivative) {
    for (Eigen::Index i = 0; i < U.size(); ++i) {
      const double s = U.data()[i];
      G.data()[i] = s > 0.0 ? k * s + dl * s * s * s : 0.0;
    }
  } else {
    const Mat V = hanger_samples(*v);
    for (Eigen::Index i = 0; i < U.size(); ++i) {
      const double s = U.data()[i];
      G.data()[i] = s > 0.0 ? (k + 3.0 * dl * s * s) * V.data()[i] : 0.0;
    }
  }
  const Vec w = g.quad_weights().cwiseProduct(g.hanger_mask());
  const double wx = std::numbers::pi / g.hanger_x_points();
  return wx * g.hanger_sin_table().transpose() * (G * w.asDiagonal()) * g.basis_nodes(0);
}

EnergyParts Functional::energy_parts(const Field& u) const {
  require_same_grid(u, l1_->e1);
  EnergyParts e;
  e.quadratic = 0.5 * inner_star(u, u);
  e.quartic = ops_->d(u);
  e.buckling = 0.5 * cfg_.lambda * inner_dx(u, u);
  if (cfg_.has_hangers()) {
    const double k = cfg_.k, dl = cfg_.delta;
    e.hanger = hanger_integral(u, [&](double s) {
      if (s <= 0.0) return 0.0;
      const double s2 = s * s;
      return 0.5 * k * s2 + 0.25 * dl * s2 * s2;
    });
  }
  e.load = inner_l2(f_, u);
  e.total = e.quadratic + e.quartic - e.buckling + e.hanger - e.load;
  return e;
}

Field Functional::gradient(const Field& u) const {
  require_same_grid(u, l1_->e1);
  const Field buu = ops_->B(u, u);
  Mat L = load_from_gl(*grid_, bracket_gl(u, buu)) - cfg_.lambda * dx_load(u) - load_from_field(f_);
  if (cfg_.has_hangers()) L += hanger_load(u, false, nullptr);
  Field g = Field(grid_, u.coeffs(), Space::Star) + ops_->star().solve(L);
  return g;
}

double Functional::residual(const Field& u) const { return norm_star(gradient(u)) / rel_norm_den(u); }

Field Functional::hessian_apply(const Field& u, const Field& v, const Field* buu) const {
  Field own(grid_);
  if (!buu) {
    own = ops_->B(u, u);
    buu = &own;
  }
  const Field buv = ops_->B(u, v);
  Mat L = load_from_gl(*grid_, bracket_gl(v, *buu)) + 2.0 * load_from_gl(*grid_, bracket_gl(u, buv)) -
          cfg_.lambda * dx_load(v);
  if (cfg_.has_hangers()) L += hanger_load(u, true, &v);
  return Field(grid_, v.coeffs(), Space::Star) + ops_->star().solve(L);
}

double Functional::alpha() const {
  return hanger_integral(l1_->e1, [](double s) { return s * s; });
}

double Functional::hanger_e1_quartic() const {
  return hanger_integral(l1_->e1, [](double s) { return s * s * s * s; });
}

double Functional::lambda_bar() const { return (alpha() * cfg_.k + 1.0) * l1_->lambda; }

double energy(const Field& u, const PlateConfig& cfg, const LoadSpec& load) {
  return Functional(u.grid_ptr(), cfg, load).energy(u);
}

Field gradient(const Field& u, const PlateConfig& cfg, const LoadSpec& load) {
  return Functional(u.grid_ptr(), cfg, load).gradient(u);
}

// ----------------------------------------------------------------- solvers

Equilibrium solve_from(const Field& u0, const Functional& J, const SolverOptions& opts) {
  opts.validate();
  require_same_grid(u0, J.first_mode().e1);
  Field u = restricted(Field(u0.grid_ptr(), u0.coeffs(), Space::Star), opts.mode_stride);
  EnergyParts E = J.energy_parts(u);
  Field G = restricted(J.gradient(u), opts.mode_stride);
  bool converged = false;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    const double unorm = norm_star(u);
    if (!(unorm <= opts.divergence_norm)) break;
    const double gnorm = norm_star(G);
    const double res = gnorm / std::max(1.0, unorm);
    const Field buu = J.ops().B(u, u);
    const CGResult cg = newton_cg(J, u, G, buu, opts);
    const double pnorm = norm_star(cg.p);
    if (res < opts.grad_tol && !cg.negative && pnorm <= opts.step_tol * std::max(1.0, unorm)) {
      converged = true;
      break;
    }
    const double tolE = 1e-13 * E.scale();

    std::optional<Field> best;
    double best_E = E.total;
    auto consider = [&](Field cand) {
      const double ec = J.energy(cand);
      if (ec < best_E) {
        best_E = ec;
        best = std::move(cand);
      }
    };

    // Newton (or truncated Newton) direction with backtracking.
    const double slope = inner_star(G, cg.p);
    if (pnorm > 0.0 && slope < 0.0) {
      double a = 1.0;
      for (int b = 0; b < opts.max_backtrack; ++b, a *= 0.5) {
        Field cand = u + a * cg.p;
        const double ec = J.energy(cand);
        if (ec <= E.total + opts.armijo * a * slope + tolE) {
          if (ec < best_E || !best) {
            best_E = ec;
            best = std::move(cand);
          }
          break;
        }
      }
    }

    // Negative curvature: move along it as far as the energy keeps falling.
    if (cg.negative) {
      Field q = *cg.negative;
      if (inner_star(G, q) > 0.0) q *= -1.0;
      const double qn = norm_star(q);
      if (qn > 0.0) {
        q *= std::max(gnorm, 1e-3 * std::max(1.0, unorm)) / qn;
        double a = 1.0;
        double ea = J.energy(u + a * q);
        int guard = 0;
        if (ea < E.total) {
          while (guard++ < 80) {
            const double e2 = J.energy(u + 2.0 * a * q);
            if (!(e2 < ea)) break;
            a *= 2.0;
            ea = e2;
          }
        } else {
          while (guard++ < opts.max_backtrack && !(ea < E.total)) {
            a *= 0.5;
            ea = J.energy(u + a * q);
          }
        }
        if (ea < E.total) consider(u + a * q);
      }
    }

    // Steepest descent in the H^2_* metric as the fallback.
    if (!best && gnorm > 0.0) {
      const double sd_slope = -gnorm * gnorm;
      double a = 1.0;
      for (int b = 0; b < opts.max_backtrack; ++b, a *= 0.5) {
        const double ec = J.energy(u - a * G);
        if (ec <= E.total + opts.armijo * a * sd_slope) {
          consider(u - a * G);
          break;
        }
      }
    }

    if (!best) {
      // Energy differences are below rounding: accept the Newton step when it
      // lowers the residual.
      if (pnorm > 0.0 && !cg.negative) {
        Field cand = u + cg.p;
        if (J.residual(cand) < res && J.energy(cand) <= E.total + 100.0 * tolE) best = std::move(cand);
      }
      if (!best) break;
    }
    u = std::move(*best);
    E = J.energy_parts(u);
    G = restricted(J.gradient(u), opts.mode_stride);
  }
  Equilibrium eq = make_equilibrium(u, J);
  // the full residual confirms that a restricted solution is critical in full
  eq.converged = converged && (opts.mode_stride == 1 || eq.residual < opts.grad_tol);
  eq.iterations = it;
  if (eq.converged) eq.stability = classify_stability(u, J, opts);
  return eq;
}

Equilibrium newton_refine(const Field& u0, const Functional& J, const SolverOptions& opts, int max_iter) {
  Field u(u0.grid_ptr(), u0.coeffs(), Space::Star);
  Field G = J.gradient(u);
  double res = norm_star(G) / rel_norm_den(u);
  bool converged = false;
  int it = 0;
  for (; it < max_iter; ++it) {
    const Field buu = J.ops().B(u, u);
    const Field p = gmres(J, u, G, buu, 1e-10, 300);
    const double unorm = norm_star(u);
    if (res < opts.grad_tol && norm_star(p) <= opts.step_tol * std::max(1.0, unorm)) {
      converged = true;
      break;
    }
    // Steps are accepted on the absolute gradient norm: the relative
    // residual grows when the iterate heads for a saddle at the origin.
    const double gnorm = norm_star(G);
    double a = 1.0;
    bool moved = false;
    for (int b = 0; b < 30; ++b, a *= 0.5) {
      Field cand = u + a * p;
      Field Gc = J.gradient(cand);
      const double gc = norm_star(Gc);
      if (gc < gnorm) {
        u = std::move(cand);
        G = std::move(Gc);
        res = gc / rel_norm_den(u);
        moved = true;
        break;
      }
    }
    if (!moved) {
      converged = res < opts.grad_tol;
      break;
    }
  }
  Equilibrium eq = make_equilibrium(u, J);
  eq.converged = converged;
  eq.iterations = it;
  return eq;
}

std::vector<Field> default_starts(const Functional& J, const SolverOptions& opts) {
  const GridPtr& grid = J.grid_ptr();
  std::vector<Field> starts{zero_like(grid)};
  const double lam = J.config().lambda;
  double base = opts.start_scale;
  const int K = std::min(opts.eigen_starts, grid->M() * (grid->N() - 2) - 1);
  if (K > 0) {
    const DiscreteSpectrum ds = discrete_spectrum(grid, K);
    for (int k = 0; k < K && int(starts.size()) < opts.n_starts; ++k) {
      double s = opts.start_scale;
      if (lam > ds.values[k]) {
        const double dk = J.ops().d(ds.fields[k]);
        s = std::sqrt((lam / ds.values[k] - 1.0) / (4.0 * dk));
      }
      if (k == 0) base = std::max(base, s);
      starts.push_back(s * ds.fields[k]);
      if (int(starts.size()) < opts.n_starts) starts.push_back(-s * ds.fields[k]);
    }
  }
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> logu(std::log(0.1), std::log(10.0));
  while (int(starts.size()) < opts.n_starts) {
    Field r = random_field(grid, rng, Space::Star);
    const double a = base * std::exp(logu(rng));
    r *= a / norm_star(r);
    starts.push_back(std::move(r));
  }
  return starts;
}

namespace {

// Steepest descent on J + sum_i shift * (scale_i / ||u - u_i||)^p, used to
// push a start away from equilibria that were already found.
Field deflated_descent(const Field& u0, const Functional& J, const std::vector<Equilibrium>& found,
                       const SolverOptions& o) {
  auto barrier = [&](const Field& u, Field* grad) {
    double val = 0.0;
    for (const auto& eq : found) {
      const Field diff = u - eq.u;
      const double dist = norm_star(diff);
      const double sc = std::max(1.0, norm_star(eq.u));
      if (dist == 0.0) return std::numeric_limits<double>::infinity();
      const double t = o.deflation_shift * std::pow(sc / dist, o.deflation_power);
      val += t;
      if (grad) *grad -= (o.deflation_power * t / (dist * dist)) * diff;
    }
    return val;
  };
  Field u = u0;
  for (int it = 0; it < o.deflation_iters; ++it) {
    Field g = J.gradient(u);
    const double f0 = J.energy(u) + barrier(u, &g);
    const double gn2 = inner_star(g, g);
    if (!(gn2 > 0.0) || !std::isfinite(f0)) break;
    double a = 1.0;
    bool moved = false;
    for (int b = 0; b < o.max_backtrack; ++b, a *= 0.5) {
      Field c = u - a * g;
      const double fc = J.energy(c) + barrier(c, nullptr);
      if (fc <= f0 - o.armijo * a * gn2) {
        u = std::move(c);
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return u;
}

bool same_solution(const Field& a, const Field& b, double tol) {
  return norm_star(a - b) <= tol * std::max(1.0, std::max(norm_star(a), norm_star(b)));
}

}  // namespace

MultistartResult multistart(const Functional& J, const SolverOptions& opts, const std::vector<Field>& starts) {
  if (starts.empty()) throw ParameterError("multistart needs at least one start");
  MultistartResult out;
  out.starts = int(starts.size());
  for (size_t i = 0; i < starts.size(); ++i) {
    Field u0 = starts[i];
    if (opts.deflation && !out.solutions.empty()) u0 = deflated_descent(u0, J, out.solutions, opts);
    Equilibrium eq = solve_from(u0, J, opts);
    if (!eq.converged) continue;
    ++out.converged;
    eq.origin = "start " + std::to_string(i);
    const bool dup = std::any_of(out.solutions.begin(), out.solutions.end(),
                                 [&](const Equilibrium& s) { return same_solution(s.u, eq.u, opts.dedup_tol); });
    if (!dup) out.solutions.push_back(std::move(eq));
  }
  if (out.converged == 0) throw NoConvergenceError("no start converged");
  std::stable_sort(out.solutions.begin(), out.solutions.end(),
                   [](const Equilibrium& a, const Equilibrium& b) { return a.energy < b.energy; });
  return out;
}

namespace {

// Relaxes a string of images with fixed ends towards a minimum energy path.
void relax_string(std::vector<Field>& img, const Functional& J, const SolverOptions& opts) {
  const int P = int(img.size());
  std::vector<double> dt(P, 1.0);

  auto reparametrize = [&]() {
    std::vector<double> arc(P, 0.0);
    for (int i = 1; i < P; ++i) arc[i] = arc[i - 1] + norm_star(img[i] - img[i - 1]);
    const double L = arc.back();
    if (!(L > 0.0)) return;
    std::vector<Field> out{img.front()};
    int seg = 0;
    for (int i = 1; i < P - 1; ++i) {
      const double target = L * i / (P - 1);
      while (seg < P - 2 && arc[seg + 1] < target) ++seg;
      const double len = arc[seg + 1] - arc[seg];
      const double t = len > 0.0 ? (target - arc[seg]) / len : 0.0;
      out.push_back((1.0 - t) * img[seg] + t * img[seg + 1]);
    }
    out.push_back(img.back());
    img = std::move(out);
  };

  for (int it = 0; it < opts.string_iters; ++it) {
    double worst = 0.0;
    for (int i = 1; i < P - 1; ++i) {
      const Field G = J.gradient(img[i]);
      Field tau = img[i + 1] - img[i - 1];
      const double tn = norm_star(tau);
      if (tn > 0.0) tau *= 1.0 / tn;
      const Field Gp = G - inner_star(G, tau) * tau;
      const double gpn = norm_star(Gp);
      worst = std::max(worst, gpn / rel_norm_den(img[i]));
      if (!(gpn > 0.0)) continue;
      const double Ei = J.energy(img[i]);
      double a = dt[i];
      bool moved = false;
      for (int b = 0; b < 30; ++b, a *= 0.5) {
        Field c = img[i] - a * Gp;
        if (J.energy(c) < Ei) {
          img[i] = std::move(c);
          moved = true;
          break;
        }
      }
      dt[i] = moved ? std::min(1e8, 1.5 * a) : a;
    }
    reparametrize();
    if (worst < opts.string_tol) break;
  }
}

}  // namespace

Equilibrium mountain_pass(const Equilibrium& u1, const Equilibrium& u2, const Functional& J, const SolverOptions& opts,
                          const Field* bend) {
  opts.validate();
  const double dist = norm_star(u2.u - u1.u);
  if (!(dist > 0.0)) throw ParameterError("mountain pass endpoints coincide");
  const int P = opts.string_images;
  Field a = u1.u, b = u2.u;
  Field bdir = zero_like(J.grid_ptr());
  if (bend) {
    const double bn = norm_star(*bend);
    if (bn > 0.0) bdir = (0.5 * dist / bn) * (*bend);
  }
  // When the highest image is an end of the string, the barrier is narrower
  // than the image spacing: restart on the segment next to that end, whose
  // far image is already below it.
  for (int level = 0; level < 8; ++level) {
    std::vector<Field> img;
    img.reserve(P);
    for (int i = 0; i < P; ++i) {
      const double s = double(i) / (P - 1);
      img.push_back((1.0 - s) * a + s * b + (4.0 * s * (1.0 - s)) * bdir);
    }
    relax_string(img, J, opts);
    int imax = 0;
    double emax = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < P; ++i) {
      const double e = J.energy(img[i]);
      if (e > emax) {
        emax = e;
        imax = i;
      }
    }
    if (imax > 0 && imax < P - 1) {
      Equilibrium eq = newton_refine(img[imax], J, opts, opts.saddle_iters);
      eq.origin = "mountain pass";
      eq.converged = eq.residual < 10.0 * opts.grad_tol;
      eq.stability = classify_stability(eq.u, J, opts);
      return eq;
    }
    if (J.energy(img[imax == 0 ? 1 : P - 2]) >= emax) break;
    if (imax == 0) {
      b = img[1];
    } else {
      a = img[P - 2];
    }
    bdir = zero_like(J.grid_ptr());
  }
  throw NumericalError("no separating barrier found between the endpoints");
}

StabilityInfo classify_stability(const Field& u, const Functional& J, const SolverOptions& opts) {
  const GridPtr& grid = J.grid_ptr();
  std::vector<Field> probes;
  const int K = std::min(opts.probe_modes, grid->M() * (grid->N() - 2) - 1);
  if (K > 0) {
    DiscreteSpectrum ds = discrete_spectrum(grid, K);
    for (auto& f : ds.fields) probes.push_back(std::move(f));
  }
  std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
  for (int i = 0; i < opts.probe_random; ++i) probes.push_back(random_field(grid, rng, Space::Star));
  // modified Gram-Schmidt in (.,.)_*
  std::vector<Field> basis;
  for (auto& p : probes) {
    Field q = p;
    for (const auto& b : basis) q -= inner_star(q, b) * b;
    const double n = norm_star(q);
    if (n > 1e-8 * norm_star(p)) basis.push_back((1.0 / n) * q);
  }
  const int n = int(basis.size());
  const double h = 1e-3 * std::max(1.0, norm_star(u));
  const double E0 = J.energy(u);
  Mat H = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    H(i, i) = (J.energy(u + h * basis[i]) - 2.0 * E0 + J.energy(u - h * basis[i])) / (h * h);
    for (int j = 0; j < i; ++j) {
      const Field s = basis[i] + basis[j];
      const Field d = basis[i] - basis[j];
      H(i, j) = H(j, i) =
          (J.energy(u + h * s) - J.energy(u + h * d) - J.energy(u - h * d) + J.energy(u - h * s)) / (4.0 * h * h);
    }
  }
  StabilityInfo info;
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  const Vec ev = es.eigenvalues();
  info.curvatures.assign(ev.data(), ev.data() + ev.size());
  const double tol = opts.curvature_tol;
  int neg = 0;
  bool all_pos = n > 0;
  for (double c : info.curvatures) {
    if (c < -tol) ++neg;
    if (!(c > tol)) all_pos = false;
  }
  if (J.config().has_hangers()) {
    // the hanger term is only C^1, so curvature along +-e1 is one-sided
    const Field& e1 = J.first_mode().e1;
    const double gp = inner_star(J.gradient(u), e1);
    const double cp = 2.0 * (J.energy(u + h * e1) - E0 - h * gp) / (h * h);
    const double cm = 2.0 * (J.energy(u - h * e1) - E0 + h * gp) / (h * h);
    info.curvature_plus_e1 = cp;
    info.curvature_minus_e1 = cm;
    if (std::min(cp, cm) < -tol && neg == 0) neg = 1;
    if (!(std::min(cp, cm) > tol)) all_pos = false;
  }
  info.morse_estimate = neg;
  info.tag = neg > 0 ? Stability::Unstable : (all_pos ? Stability::Stable : Stability::Marginal);
  return info;
}

// ------------------------------------------------------------ continuation

ContinuationResult continuation(const GridPtr& grid, const PlateConfig& cfg, const LoadSpec& load, double lam_from,
                                double lam_to, int steps, const SolverOptions& opts) {
  if (!(lam_from < lam_to)) throw ParameterError("continuation needs lam_from < lam_to");
  if (steps < 2) throw ParameterError("continuation needs at least 2 steps");
  if (lam_from < 0.0) throw ParameterError("lambda must be >= 0");
  ContinuationResult out;
  std::vector<bool> alive;
  for (int s = 0; s < steps; ++s) {
    const double lam = lam_from + (lam_to - lam_from) * s / (steps - 1);
    out.lambdas.push_back(lam);
    PlateConfig c = cfg;
    c.lambda = lam;
    const Functional J(grid, c, load);
    std::vector<const Equilibrium*> here;
    for (size_t b = 0; b < out.branches.size(); ++b) {
      if (!alive[b]) continue;
      Branch& br = out.branches[b];
      Equilibrium eq = solve_from(br.points.back().u, J, opts);
      const bool dup = std::any_of(here.begin(), here.end(),
                                   [&](const Equilibrium* e) { return same_solution(e->u, eq.u, opts.dedup_tol); });
      if (!eq.converged || dup) {
        alive[b] = false;
        continue;
      }
      eq.origin = "branch " + std::to_string(br.id);
      br.points.push_back(std::move(eq));
      here.push_back(&br.points.back());
    }
    MultistartResult ms = multistart(J, opts, default_starts(J, opts));
    for (auto& eq : ms.solutions) {
      const bool known = std::any_of(here.begin(), here.end(),
                                     [&](const Equilibrium* e) { return same_solution(e->u, eq.u, opts.dedup_tol); });
      if (known) continue;
      Branch nb;
      nb.id = int(out.branches.size());
      double best = std::numeric_limits<double>::infinity();
      for (size_t b = 0; b < out.branches.size(); ++b) {
        if (!alive[b]) continue;
        const double d = norm_star(out.branches[b].points.back().u - eq.u);
        if (d < best) {
          best = d;
          nb.parent = out.branches[b].id;
        }
      }
      if (s > 0 && nb.parent) {
        out.bifurcations.push_back({lam, out.lambdas[s - 1], nb.id, *nb.parent});
      }
      nb.points.push_back(std::move(eq));
      out.branches.push_back(std::move(nb));
      alive.push_back(true);
      // pointers into earlier branches stay valid: only their vectors grew
      here.clear();
      for (size_t b = 0; b < out.branches.size(); ++b) {
        if (alive[b] && std::abs(out.branches[b].points.back().lambda - lam) <= 1e-14 * std::max(1.0, lam)) {
          here.push_back(&out.branches[b].points.back());
        }
      }
    }
  }
  return out;
}

}  // namespace vkplate

// ----------------------------------------------------------- theorem suite

namespace vkplate {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError("hypothesis violated: " + what);
}

// Adds `eq` unless an equal field is already listed.
void merge(std::vector<Equilibrium>& list, Equilibrium eq, double tol) {
  for (const auto& s : list)
    if (same_solution(s.u, eq.u, tol)) return;
  list.push_back(std::move(eq));
}

int count_pairs(const std::vector<Equilibrium>& sols, double tol, double zero_tol) {
  int pairs = 0;
  for (size_t i = 0; i < sols.size(); ++i) {
    if (norm_star(sols[i].u) < zero_tol) continue;
    for (size_t j = i + 1; j < sols.size(); ++j)
      if (same_solution(sols[i].u, -sols[j].u, tol)) ++pairs;
  }
  return pairs;
}

}  // namespace

TheoremReport theorem_suite(const std::string& name, const GridPtr& grid, const PlateConfig& cfg,
                            const SolverOptions& opts) {
  opts.validate();
  cfg.validate();
  TheoremReport rep;
  rep.name = name;
  const double lam = cfg.lambda;
  const double l1 = lambda1_value(cfg);
  const bool no_hangers = cfg.k == 0.0 && cfg.delta == 0.0;
  const bool hangers = cfg.k > 0.0 && cfg.delta > 0.0;
  constexpr double zero_tol = 1e-8;

  // A y-independent field has [u, u] = 0, so d vanishes on it and J is not
  // bounded below once lambda exceeds its Rayleigh quotient (exactly 1).
  const Field cyl = Field::from_profile(
      grid, 1, [](double) { return 1.0; }, [](double) { return 0.0; });
  const double cyl_quotient = inner_star(cyl, cyl) / inner_dx(cyl, cyl);
  if (lam > cyl_quotient) {
    rep.notes.push_back("lambda = " + fmt(lam) + " exceeds the Rayleigh quotient " + fmt(cyl_quotient) +
                        " of sin(x), on which d = " + fmt(AiryOps::for_grid(grid)->d(cyl)) +
                        ": J is unbounded below along t*sin(x)");
  }

  auto small_load = [&](double norm) { return LoadSpec::sin_x_with_l2_norm(norm, cfg.ell); };

  if (name == "T2i") {
    require(no_hangers, "k = delta = 0");
    require(lam <= l1, "lambda <= lambda_1 = " + fmt(l1));
    rep.hypothesis = "f = 0, k = delta = 0, lambda <= lambda_1";
    const Functional J(grid, cfg);
    rep.solutions = multistart(J, opts, default_starts(J, opts)).solutions;
    rep.count = int(rep.solutions.size());
    rep.passed = rep.count == 1 && norm_star(rep.solutions[0].u) < zero_tol;
  } else if (name == "T2ii") {
    require(no_hangers, "k = delta = 0");
    require(lam > l1, "lambda > lambda_1 = " + fmt(l1));
    const auto spec = enumerate_spectrum(cfg, lam * (1.0 + 1e-12));
    int k = 0;
    for (const auto& m : spec)
      if (m.lambda < lam) ++k;
    rep.hypothesis = "f = 0, k = delta = 0, lambda in (lambda_" + std::to_string(k) + ", lambda_" +
                     std::to_string(k + 1) + "]";
    const Functional J(grid, cfg);
    std::vector<Equilibrium> sols;
    try {
      for (auto& e : multistart(J, opts, default_starts(J, opts)).solutions) merge(sols, std::move(e), opts.dedup_tol);
    } catch (const NumericalError&) {
    }
    // Subspaces of modes m = 0 mod s are invariant; search each one that
    // carries an eigenvalue below lambda.
    for (int s = 2; s <= grid->M(); ++s) {
      const bool active = std::any_of(spec.begin(), spec.end(),
                                      [&](const EigenMode& e) { return e.m % s == 0 && e.lambda < lam; });
      if (!active) continue;
      SolverOptions o = opts;
      o.mode_stride = s;
      std::vector<Field> starts{zero_like(grid)};
      for (const auto& e : spec) {
        if (e.m % s != 0 || e.lambda >= lam) continue;
        const Field f = mode_field(e, grid);
        const double amp = std::sqrt((lam / e.lambda - 1.0) / (4.0 * J.ops().d(f)));
        starts.push_back(amp * f);
        starts.push_back(-amp * f);
      }
      try {
        for (auto& e : multistart(J, o, starts).solutions) merge(sols, std::move(e), opts.dedup_tol);
      } catch (const NumericalError&) {
      }
      rep.notes.push_back("searched the invariant subspace of modes m = 0 mod " + std::to_string(s));
    }
    rep.solutions = std::move(sols);
    rep.count = int(rep.solutions.size());
    const int pairs = count_pairs(rep.solutions, opts.dedup_tol, zero_tol);
    rep.notes.push_back("nontrivial pairs found: " + std::to_string(pairs) + ", required: " + std::to_string(k));
    rep.passed = pairs >= k;
  } else if (name == "T2iii" || name == "T3i") {
    if (name == "T2iii") require(no_hangers, "k = delta = 0");
    else require(hangers, "k > 0 and delta > 0");
    require(lam < l1, "lambda < lambda_1 = " + fmt(l1));
    const double fnorm = 0.1 * (l1 - lam) * std::sqrt(l1);
    rep.hypothesis = std::string(name == "T2iii" ? "k = delta = 0" : "k, delta > 0") +
                     ", lambda < lambda_1, ||f|| = 0.1 (lambda_1 - lambda) sqrt(lambda_1) = " + fmt(fnorm);
    const Functional J(grid, cfg, small_load(fnorm));
    rep.solutions = multistart(J, opts, default_starts(J, opts)).solutions;
    rep.count = int(rep.solutions.size());
    rep.passed = rep.count == 1;
    if (name == "T2iii" && rep.count >= 1) {
      const double bound = std::sqrt(l1) * fnorm / (l1 - lam);
      const double un = norm_star(rep.solutions[0].u);
      rep.notes.push_back("||u||_* = " + fmt(un) + ", a priori bound " + fmt(bound));
      rep.passed = rep.passed && un <= bound * (1.0 + 1e-6);
    }
  } else if (name == "T2iv" || name == "T3iii") {
    double lbar = l1;
    if (name == "T2iv") {
      require(no_hangers, "k = delta = 0");
      require(lam > l1, "lambda > lambda_1 = " + fmt(l1));
      rep.hypothesis = "k = delta = 0, lambda > lambda_1, ||f|| = " + fmt(opts.small_f);
    } else {
      require(hangers, "k > 0 and delta > 0");
      const Functional J0(grid, cfg);
      lbar = J0.lambda_bar();
      const auto spec = enumerate_spectrum(cfg, std::max(lbar, lam) * 4.0 + 10.0);
      require(spec.size() >= 2, "lambda_2 exists");
      const double l2 = spec[1].lambda;
      require(lbar < l2, "lambda_bar = " + fmt(lbar) + " < lambda_2 = " + fmt(l2));
      require(lbar < lam && lam < l2, "lambda_bar < lambda < lambda_2");
      rep.hypothesis = "k, delta > 0, lambda_bar = " + fmt(lbar) + " < lambda < lambda_2 = " + fmt(l2) +
                       ", ||f|| = " + fmt(opts.small_f);
    }
    const Functional J(grid, cfg, small_load(opts.small_f));
    std::vector<Equilibrium> sols;
    try {
      sols = multistart(J, opts, default_starts(J, opts)).solutions;
    } catch (const NumericalError& e) {
      rep.notes.push_back(e.what());
    }
    const Equilibrium* lo = nullptr;
    const Equilibrium* hi = nullptr;
    for (const auto& s : sols) {
      if (s.stability.tag != Stability::Stable) continue;
      if (s.amplitude < 0.0 && !lo) lo = &s;
      if (s.amplitude > 0.0 && !hi) hi = &s;
    }
    bool saddle_ok = false;
    if (lo && hi) {
      try {
        Equilibrium sad = mountain_pass(*lo, *hi, J, opts);
        saddle_ok = sad.converged && sad.energy > std::max(lo->energy, hi->energy) &&
                    sad.stability.tag == Stability::Unstable;
        rep.notes.push_back("mountain pass energy " + fmt(sad.energy) + " above minima " + fmt(lo->energy) + ", " +
                            fmt(hi->energy));
        merge(sols, std::move(sad), opts.dedup_tol);
      } catch (const NumericalError& e) {
        rep.notes.push_back(e.what());
      }
    } else {
      rep.notes.push_back("no pair of stable minima with opposite signs of (u, e1)_*");
    }
    rep.solutions = std::move(sols);
    rep.count = int(rep.solutions.size());
    int stable = 0, unstable = 0;
    for (const auto& s : rep.solutions) {
      stable += s.stability.tag == Stability::Stable;
      unstable += s.stability.tag == Stability::Unstable;
    }
    rep.passed = rep.count >= 3 && saddle_ok;
    if (name == "T3iii") rep.passed = rep.passed && stable >= 2 && unstable >= 1;
  } else if (name == "T3ii") {
    require(hangers, "k > 0 and delta > 0");
    require(lam > l1, "lambda > lambda_1 = " + fmt(l1));
    rep.hypothesis = "f = 0, k, delta > 0, lambda > lambda_1";
    const Functional J(grid, cfg);
    rep.solutions = multistart(J, opts, default_starts(J, opts)).solutions;
    rep.count = int(rep.solutions.size());
    const Equilibrium* trivial = nullptr;
    for (const auto& s : rep.solutions)
      if (norm_star(s.u) < zero_tol) trivial = &s;
    const Equilibrium& minimizer = rep.solutions.front();
    rep.passed = rep.count >= 2 && trivial && trivial->stability.tag == Stability::Unstable &&
                 minimizer.amplitude < 0.0 && minimizer.energy < 0.0;
  } else {
    throw ParameterError("unknown theorem scenario '" + name + "'");
  }
  return rep;
}

}  // namespace vkplate
