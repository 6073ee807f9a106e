#include "vkplate/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace vkplate {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Roots {
  double beta, gamma;
};

Roots roots_for(int m, double lam) {
  const double mm = double(m) * m;
  const double ms = m * std::sqrt(lam);
  return {std::sqrt(mm + ms), std::sqrt(std::abs(mm - ms))};
}

// 2x2 boundary block [[p, q], [r, s]] acting on the pair of coefficients of
// one parity. Row 1 is h'' - sigma m^2 h, row 2 is h''' - (2 - sigma) m^2 h',
// both evaluated at y = ell.
struct Block {
  double p, q, r, s;
  double det() const { return p * s - q * r; }
};

Block boundary_block(int m, double lam, ModeCase kind, const PlateConfig& cfg) {
  const auto [b, g] = roots_for(m, lam);
  const double mm = double(m) * m;
  const double sg = cfg.sigma;
  const double l = cfg.ell;
  const double eb2 = b * b - sg * mm;
  const double eb3 = b * b * b - (2.0 - sg) * mm * b;
  switch (kind) {
    case ModeCase::SubEven:
      return {eb2 * std::cosh(b * l), (g * g - sg * mm) * std::cosh(g * l), eb3 * std::sinh(b * l),
              (g * g * g - (2.0 - sg) * mm * g) * std::sinh(g * l)};
    case ModeCase::SubOdd:
      return {eb2 * std::sinh(b * l), (g * g - sg * mm) * std::sinh(g * l), eb3 * std::cosh(b * l),
              (g * g * g - (2.0 - sg) * mm * g) * std::cosh(g * l)};
    case ModeCase::SuperEven:
      return {eb2 * std::cosh(b * l), -(g * g + sg * mm) * std::cos(g * l), eb3 * std::sinh(b * l),
              (g * g * g + (2.0 - sg) * mm * g) * std::sin(g * l)};
    case ModeCase::SuperOdd:
      return {eb2 * std::sinh(b * l), -(g * g + sg * mm) * std::sin(g * l), eb3 * std::cosh(b * l),
              -(g * g * g + (2.0 - sg) * mm * g) * std::cos(g * l)};
    case ModeCase::Critical: break;
  }
  throw DomainError("critical modes have no 2x2 boundary block");
}

double signed_term(double num, double den) {
  if (den == 0.0) return num >= 0 ? kInf : -kInf;
  return num / (den * den);
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double flo) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

const char* to_string(ModeCase c) {
  switch (c) {
    case ModeCase::SubEven: return "SUB_EVEN";
    case ModeCase::SubOdd: return "SUB_ODD";
    case ModeCase::Critical: return "CRITICAL";
    case ModeCase::SuperEven: return "SUPER_EVEN";
    case ModeCase::SuperOdd: return "SUPER_ODD";
  }
  return "?";
}

double EigenMode::profile(double y, int r) const {
  if (r < 0 || r > 4) throw ParameterError("profile derivative order must be 0..4");
  const double br = std::pow(beta, r);
  const bool even_r = (r % 2 == 0);
  double v = coeffs[0] * br * (even_r ? std::cosh(beta * y) : std::sinh(beta * y)) +
             coeffs[1] * br * (even_r ? std::sinh(beta * y) : std::cosh(beta * y));
  switch (kind) {
    case ModeCase::SubEven:
    case ModeCase::SubOdd: {
      const double gr = std::pow(gamma, r);
      v += coeffs[2] * gr * (even_r ? std::cosh(gamma * y) : std::sinh(gamma * y)) +
           coeffs[3] * gr * (even_r ? std::sinh(gamma * y) : std::cosh(gamma * y));
      break;
    }
    case ModeCase::SuperEven:
    case ModeCase::SuperOdd: {
      const double gr = std::pow(gamma, r);
      const double shift = r * std::numbers::pi / 2.0;
      v += coeffs[2] * gr * std::cos(gamma * y + shift) + coeffs[3] * gr * std::sin(gamma * y + shift);
      break;
    }
    case ModeCase::Critical:
      if (r == 0) v += coeffs[2] + coeffs[3] * y;
      if (r == 1) v += coeffs[3];
      break;
  }
  return v;
}

double char_lambda1(double lam, const PlateConfig& cfg) {
  const double lo = (1.0 - cfg.sigma) * (1.0 - cfg.sigma);
  if (!(lam > lo && lam < 1.0)) {
    std::ostringstream os;
    os << "char_lambda1 needs (1-sigma)^2 < lambda < 1, got " << lam;
    throw DomainError(os.str());
  }
  const double r = std::sqrt(lam);
  const double sm = std::sqrt(1.0 - r);
  const double sp = std::sqrt(1.0 + r);
  const double u = r + 1.0 - cfg.sigma;
  const double v = r - 1.0 + cfg.sigma;
  return sm * u * u * std::tanh(cfg.ell * sm) - sp * v * v * std::tanh(cfg.ell * sp);
}

double lambda1_value(const PlateConfig& cfg) {
  cfg.validate();
  const double a = (1.0 - cfg.sigma) * (1.0 - cfg.sigma);
  auto R = [&](double l) { return char_lambda1(l, cfg); };
  double lo = a + 1e-12 * a;
  double hi = std::nextafter(1.0, 0.0);
  double flo = R(lo);
  double fhi = R(hi);
  if (!(flo > 0 && fhi < 0)) {
    // fall back to a scan in case the end values are swamped by rounding
    const int n = 10000;
    bool found = false;
    double prev = flo, xprev = lo;
    for (int i = 1; i <= n && !found; ++i) {
      const double x = lo + (hi - lo) * i / n;
      const double fx = R(x);
      if ((prev > 0) != (fx > 0)) {
        lo = xprev;
        hi = x;
        flo = prev;
        found = true;
      }
      prev = fx;
      xprev = x;
    }
    if (!found) {
      std::ostringstream os;
      os << "no sign change of the lambda_1 characteristic function (R(lo)=" << flo << ", R(hi)=" << fhi
         << ", sigma=" << cfg.sigma << ", ell=" << cfg.ell << ")";
      throw NumericalError(os.str());
    }
  }
  return bisect(R, lo, hi, flo);
}

Lambda1 lambda1(const PlateConfig& cfg, const GridPtr& grid) {
  const double lam = lambda1_value(cfg);
  EigenMode mode;
  mode.m = 1;
  mode.lambda = lam;
  mode.kind = ModeCase::SubEven;
  const auto [b, g] = roots_for(1, lam);
  mode.beta = b;
  mode.gamma = g;
  const double r = std::sqrt(lam);
  mode.coeffs = {(r - 1.0 + cfg.sigma) / std::cosh(cfg.ell * b), 0.0, (r + 1.0 - cfg.sigma) / std::cosh(cfg.ell * g),
                 0.0};
  Field e1 = mode_field(mode, grid);
  return {lam, mode, std::move(e1)};
}

CharResiduals characteristic_residuals(int m, double lam, const PlateConfig& cfg) {
  if (m < 1) throw ParameterError("mode index must be >= 1");
  if (!(lam > 0.0)) throw DomainError("lambda must be positive");
  const double mm = double(m) * m;
  if (std::abs(lam - mm) < 1e-8) {
    throw DomainError("lambda = m^2 is the critical case; use critical_mode");
  }
  CharResiduals out;
  if (lam < mm) {
    const auto [b, g] = roots_for(m, lam);
    const double l = cfg.ell;
    const double dg = g * g - mm * cfg.sigma;
    const double db = b * b - mm * cfg.sigma;
    out.pole = (std::abs(dg) < 1e-12 * mm) || (std::abs(db) < 1e-12 * mm);
    const double tg = signed_term(g * std::tanh(l * g), std::abs(dg) < 1e-12 * mm ? 0.0 : dg);
    const double tb = signed_term(b * std::tanh(l * b), std::abs(db) < 1e-12 * mm ? 0.0 : db);
    out.even = tg - tb;
    const double cb = signed_term(b / std::tanh(l * b), std::abs(db) < 1e-12 * mm ? 0.0 : db);
    const double cg = signed_term(g / std::tanh(l * g), std::abs(dg) < 1e-12 * mm ? 0.0 : dg);
    out.odd = cb - cg;
  } else {
    out.super = true;
    out.even = boundary_block(m, lam, ModeCase::SuperEven, cfg).det();
    out.odd = boundary_block(m, lam, ModeCase::SuperOdd, cfg).det();
  }
  return out;
}

double critical_s(const PlateConfig& cfg) {
  const double q = cfg.sigma / (2.0 - cfg.sigma);
  const double q2 = q * q;
  auto f = [&](double s) { return std::tanh(s) - q2 * s; };
  // tanh(s)/s decreases from 1 to 0, so the root is unique and below 1/q2
  return bisect(f, 1e-6, 1.0 / q2 + 1.0, f(1e-6));
}

std::optional<EigenMode> critical_mode(const PlateConfig& cfg) {
  const double s = critical_s(cfg);
  const double mstar = s / (cfg.ell * std::numbers::sqrt2);
  const double mr = std::round(mstar);
  if (mr < 1.0 || std::abs(mstar - mr) > 1e-9) return std::nullopt;
  const int m = int(mr);
  EigenMode mode;
  mode.m = m;
  mode.lambda = mr * mr;
  mode.kind = ModeCase::Critical;
  mode.beta = std::numbers::sqrt2 * m;
  mode.gamma = 0.0;
  mode.coeffs = {0.0, cfg.sigma * cfg.ell, 0.0, (2.0 - cfg.sigma) * std::sinh(mode.beta * cfg.ell)};
  return mode;
}

EigenMode make_mode(int m, double lam, ModeCase kind, const PlateConfig& cfg) {
  if (kind == ModeCase::Critical) {
    auto c = critical_mode(cfg);
    if (!c || c->m != m) throw DomainError("no critical mode for this m");
    return *c;
  }
  EigenMode mode;
  mode.m = m;
  mode.lambda = lam;
  mode.kind = kind;
  const auto [b, g] = roots_for(m, lam);
  mode.beta = b;
  mode.gamma = g;
  const Block B = boundary_block(m, lam, kind, cfg);
  // null vector from the adjugate, using the better-scaled row
  double x, z;
  if (std::hypot(B.p, B.q) >= std::hypot(B.r, B.s)) {
    x = B.q;
    z = -B.p;
  } else {
    x = B.s;
    z = -B.r;
  }
  const double nrm = std::hypot(x, z);
  x /= nrm;
  z /= nrm;
  const bool even = (kind == ModeCase::SubEven || kind == ModeCase::SuperEven);
  mode.coeffs = even ? std::array<double, 4>{x, 0.0, z, 0.0} : std::array<double, 4>{0.0, x, 0.0, z};
  return mode;
}

std::vector<double> residual_roots(int m, bool odd, double lo, double hi, const PlateConfig& cfg,
                                   const SpectrumOptions& opts) {
  std::vector<double> roots;
  if (!(hi > lo)) return roots;
  auto f = [&](double l) {
    const CharResiduals r = characteristic_residuals(m, l, cfg);
    return odd ? r.odd : r.even;
  };
  const int n = std::max(16, int(std::ceil((hi - lo) * opts.points_per_unit)));
  auto finite = [](double v) { return std::isfinite(v); };

  std::function<void(double, double, double, double, int)> cell = [&](double a, double b, double fa, double fb,
                                                                        int depth) {
    if (!finite(fa) || !finite(fb)) return;  // pole cell, never report a root inside
    if (fa == 0.0) {
      roots.push_back(a);
      return;
    }
    if ((fa > 0) != (fb > 0)) {
      roots.push_back(bisect(f, a, b, fa));
      return;
    }
    if (depth > 0) return;
    // same signs at both ends: a midpoint of opposite sign reveals a root pair
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    if (finite(fm) && fm != 0.0 && (fm > 0) != (fa > 0)) {
      const int sub = 64;
      double xa = a, ya = fa;
      for (int i = 1; i <= sub; ++i) {
        const double xb = a + (b - a) * i / sub;
        const double yb = f(xb);
        cell(xa, xb, ya, yb, depth + 1);
        xa = xb;
        ya = yb;
      }
    }
  };

  double xa = lo, ya = f(lo);
  for (int i = 1; i <= n; ++i) {
    const double xb = lo + (hi - lo) * i / n;
    const double yb = f(xb);
    cell(xa, xb, ya, yb, 0);
    xa = xb;
    ya = yb;
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, a); }),
              roots.end());
  return roots;
}

std::vector<EigenMode> enumerate_spectrum(const PlateConfig& cfg, double lam_max, const SpectrumOptions& opts) {
  cfg.validate();
  if (!(lam_max > 0.0) || !std::isfinite(lam_max)) throw ParameterError("lam_max must be positive and finite");
  std::vector<EigenMode> out;
  // The H^2_* form of mode m dominates (1 - sigma) m^4 times the L^2 form,
  // so every eigenvalue of mode m is at least (1 - sigma) m^2.
  const int mmax = int(std::floor(std::sqrt(lam_max / (1.0 - cfg.sigma)))) + 1;
  for (int m = 1; m <= mmax; ++m) {
    const double mm = double(m) * m;
    const double sub_lo = (1.0 - cfg.sigma) * mm * (1.0 - 1e-6);
    const double sub_hi = std::min(lam_max, mm - 2.0 * opts.guard);
    for (bool odd : {false, true}) {
      for (double r : residual_roots(m, odd, sub_lo, sub_hi, cfg, opts)) {
        out.push_back(make_mode(m, r, odd ? ModeCase::SubOdd : ModeCase::SubEven, cfg));
      }
      for (double r : residual_roots(m, odd, mm + 2.0 * opts.guard, lam_max, cfg, opts)) {
        out.push_back(make_mode(m, r, odd ? ModeCase::SuperOdd : ModeCase::SuperEven, cfg));
      }
    }
  }
  if (auto c = critical_mode(cfg); c && c->lambda <= lam_max) out.push_back(*c);
  std::stable_sort(out.begin(), out.end(), [](const EigenMode& a, const EigenMode& b) { return a.lambda < b.lambda; });
  return out;
}

ProfileCheck check_profile(const EigenMode& mode, const PlateConfig& cfg, int samples) {
  ProfileCheck pc;
  const double mm = double(mode.m) * mode.m;
  const double c0 = mm * mm - mm * mode.lambda;
  for (int i = 1; i < samples; ++i) {
    const double y = -cfg.ell + 2.0 * cfg.ell * i / samples;
    const double h0 = mode.profile(y, 0), h2 = mode.profile(y, 2), h4 = mode.profile(y, 4);
    const double scale = std::abs(h4) + 2 * mm * std::abs(h2) + std::abs(c0 * h0) + 1e-300;
    pc.ode = std::max(pc.ode, std::abs(h4 - 2 * mm * h2 + c0 * h0) / scale);
  }
  for (double y : {-cfg.ell, cfg.ell}) {
    const double h0 = mode.profile(y, 0), h1 = mode.profile(y, 1), h2 = mode.profile(y, 2), h3 = mode.profile(y, 3);
    const double s1 = std::abs(h2) + cfg.sigma * mm * std::abs(h0) + 1e-300;
    const double s2 = std::abs(h3) + (2.0 - cfg.sigma) * mm * std::abs(h1) + 1e-300;
    pc.bc = std::max(pc.bc, std::abs(h2 - cfg.sigma * mm * h0) / s1);
    pc.bc = std::max(pc.bc, std::abs(h3 + (cfg.sigma - 2.0) * mm * h1) / s2);
  }
  return pc;
}

Field mode_field(const EigenMode& mode, const GridPtr& grid) {
  if (mode.m > grid->M()) throw ParameterError("mode wavenumber exceeds the grid's M");
  Field f = Field::from_profile(
      grid, mode.m, [&](double y) { return mode.profile(y, 0); }, [&](double y) { return mode.profile(y, 2); },
      Space::Star);
  const double n = norm_star(f);
  if (!(n > 0.0)) throw NumericalError("eigenmode profile has zero norm on the grid");
  f *= 1.0 / n;
  const Vec row = f.nodal_values().row(mode.m - 1).transpose();
  Eigen::Index idx;
  row.cwiseAbs().maxCoeff(&idx);
  if (row(idx) < 0) f *= -1.0;
  return f;
}

DiscreteSpectrum discrete_spectrum(const GridPtr& grid, int K) {
  const Grid& g = *grid;
  if (K < 1 || K >= g.M() * (g.N() - 2)) throw ParameterError("need 1 <= K < M*(N-2)");
  struct Entry {
    double lam;
    int m;
    Vec c;
  };
  std::vector<Entry> all;
  for (int m = 1; m <= g.M(); ++m) {
    const Mat& S = g.star_form(m);
    const Mat B = double(m) * m * g.mass();
    // symmetric diagonal scaling, then (u,v)_* = lambda (u_x, v_x) becomes
    // a standard symmetric problem for mu = 1 / lambda
    const Vec d = S.diagonal().cwiseSqrt().cwiseInverse();
    const Mat Ss = d.asDiagonal() * S * d.asDiagonal();
    const Mat Bs = d.asDiagonal() * B * d.asDiagonal();
    Eigen::LLT<Mat> llt(Ss);
    if (llt.info() != Eigen::Success) throw NumericalError("H^2_* form is not positive definite on the grid");
    Mat C = llt.matrixL().solve(Bs);
    C = llt.matrixL().solve(C.transpose()).eval();
    C = 0.5 * (C + C.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(C);
    if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
    const Vec& mu = es.eigenvalues();
    for (int i = int(mu.size()) - 1; i >= 0; --i) {
      if (!(mu(i) > 0.0)) break;
      const Vec c = d.asDiagonal() * Vec(llt.matrixU().solve(es.eigenvectors().col(i)));
      all.push_back({1.0 / mu(i), m, c});
      if (int(mu.size()) - i >= K) break;
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.lam < b.lam; });
  DiscreteSpectrum out;
  for (int i = 0; i < K && i < int(all.size()); ++i) {
    Mat coeffs = Mat::Zero(g.M(), g.N());
    coeffs.row(all[i].m - 1) = all[i].c.transpose();
    Field f(grid, std::move(coeffs), Space::Star);
    f *= 1.0 / norm_star(f);
    out.values.push_back(all[i].lam);
    out.modes.push_back(all[i].m);
    out.fields.push_back(std::move(f));
  }
  return out;
}

}  // namespace vkplate
