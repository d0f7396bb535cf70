#include "rrg/variational.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rrg/errors.hpp"
#include "rrg/theory.hpp"

namespace rrg {

namespace {

constexpr double kLog2 = std::numbers::ln2;

double xlogx(double t) { return t > 0 ? t * std::log(t) : 0.0; }

}  // namespace

// ---------------------------------------------------------------- first moment

bool FirstMomentPoint::interior() const {
  return mu_pp > 0 && rho_p > 0 && rho_p < 1 && mu_pm() > 0 && mu_mm() > 0;
}

PsiEval psi_eval(const FirstMomentPoint& pt, const ModelParams& p) {
  if (!pt.interior()) throw domain_error("psi_eval: point not interior");
  const double d = p.d, b = p.beta;
  const double m = pt.mu_pp, r = pt.rho_p, c = pt.mu_pm(), u = pt.mu_mm();
  const double h_rho = -xlogx(r) - xlogx(1 - r);
  const double h_mu = -xlogx(m) - 2 * xlogx(c) - xlogx(u);
  PsiEval e;
  // H(rho) - (d/2)(KL(mu | rho x rho) + beta(mu_pp + mu_mm)) with KL = -H(mu) + 2H(rho).
  e.value = (1 - d) * h_rho + (d / 2) * h_mu - (d * b / 2) * (1 + 2 * m - 2 * r);
  e.grad[0] = (d / 2) * (-std::log(m) + 2 * std::log(c) - std::log(u)) - d * b;
  e.grad[1] = (1 - d) * std::log((1 - r) / r) + d * std::log(u / c) + d * b;
  e.hess(0, 0) = (d / 2) * (-1 / m - 2 / c - 1 / u);
  e.hess(0, 1) = e.hess(1, 0) = d * (1 / c + 1 / u);
  e.hess(1, 1) = (d - 1) * (1 / (1 - r) + 1 / r) - d * (2 / u + 1 / c);
  return e;
}

FirstMomentPoint psi_argmax_closed(const ModelParams& p) { return {p.x / (2 * (1 + p.x)), 0.5}; }

double psi_max_closed(const ModelParams& p) {
  return (1 - p.d / 2.0) * kLog2 + (p.d / 2.0) * std::log1p(p.x);
}

double psi_hessian_det_closed(const ModelParams& p) {
  const double d = p.d, eb = std::exp(p.beta);
  return 4 * d * (1 + p.x) * (1 + p.x) * eb * (2 + d * (eb - 1));
}

FirstMomentPoint find_psi_max(const ModelParams& p, FirstMomentPoint start) {
  auto pt = [](const Vec& v) { return FirstMomentPoint{v[0], v[1]}; };
  Vec x0(2);
  x0 << start.mu_pp, start.rho_p;
  auto r = maximize_newton([&](const Vec& v) { return psi_eval(pt(v), p).value; },
                           [&](const Vec& v) -> Vec { return psi_eval(pt(v), p).grad; },
                           [&](const Vec& v) -> Mat { return psi_eval(pt(v), p).hess; },
                           [&](const Vec& v) { return pt(v).interior(); }, x0);
  if (!r.converged) throw optimization_error("find_psi_max: no convergence after " + std::to_string(r.iterations) + " steps");
  return pt(r.x);
}

// --------------------------------------------------------------- second moment

double SecondMomentPoint::mu_mmmm() const {
  double s = 1;
  for (int i = 0; i < 6; ++i) s -= 2 * x[i];
  return s - x[6] - x[7] - x[8];
}

std::array<double, 4> SecondMomentPoint::rho() const {
  const double pp = x[1] + x[2] + x[3] + x[8];
  const double pm = x[0] + x[2] + x[4] + x[6];
  const double mp = x[0] + x[3] + x[5] + x[7];
  return {pp, pm, mp, 1 - pp - pm - mp};
}

std::array<double, 16> SecondMomentPoint::mu() const {
  std::array<double, 16> m{};
  auto set = [&](int a, int b, double v) { m[a * 4 + b] = m[b * 4 + a] = v; };
  set(1, 2, x[0]);
  set(0, 3, x[1]);
  set(0, 1, x[2]);
  set(0, 2, x[3]);
  set(1, 3, x[4]);
  set(2, 3, x[5]);
  set(1, 1, x[6]);
  set(2, 2, x[7]);
  set(0, 0, x[8]);
  set(3, 3, mu_mmmm());
  return m;
}

SecondMomentPoint SecondMomentPoint::from_mu(const std::array<double, 16>& m) {
  SecondMomentPoint s;
  s.x = {m[1 * 4 + 2], m[0 * 4 + 3], m[0 * 4 + 1], m[0 * 4 + 2], m[1 * 4 + 3],
         m[2 * 4 + 3], m[1 * 4 + 1], m[2 * 4 + 2], m[0]};
  return s;
}

bool SecondMomentPoint::interior() const {
  for (double v : x)
    if (!(v > 0)) return false;
  if (!(mu_mmmm() > 0)) return false;
  for (double r : rho())
    if (!(r > 0)) return false;
  return true;
}

Vec9 SecondMomentPoint::vec() const { return Eigen::Map<const Vec9>(x.data()); }

SecondMomentPoint SecondMomentPoint::from_vec(const Vec9& v) {
  SecondMomentPoint s;
  for (int i = 0; i < 9; ++i) s.x[i] = v[i];
  return s;
}

namespace {

// delta = sum_k alpha_k phi(a_k . x + c_k) + energy, phi(t) = t log t.
struct Form {
  double alpha;
  Vec9 a;
  double c;
};

std::vector<Form> delta_forms(const ModelParams& p) {
  const double d = p.d;
  auto vec = [](std::initializer_list<double> v) {
    Vec9 r;
    int i = 0;
    for (double t : v) r[i++] = t;
    return r;
  };
  std::vector<Form> f;
  f.push_back({d - 1, vec({0, 1, 1, 1, 0, 0, 0, 0, 1}), 0});
  f.push_back({d - 1, vec({1, 0, 1, 0, 1, 0, 1, 0, 0}), 0});
  f.push_back({d - 1, vec({1, 0, 0, 1, 0, 1, 0, 1, 0}), 0});
  f.push_back({d - 1, vec({-2, -1, -2, -2, -1, -1, -1, -1, -1}), 1});
  for (int i = 0; i < 9; ++i) f.push_back({i < 6 ? -d : -d / 2, Vec9::Unit(i), 0});
  f.push_back({-d / 2, vec({-2, -2, -2, -2, -2, -2, -1, -1, -1}), 1});
  return f;
}

// -d beta (x3 + ... + x9 + mu_mmmm) written as an affine function of x.
Vec9 energy_grad(const ModelParams& p) {
  Vec9 e;
  e << 2, 2, 1, 1, 1, 1, 0, 0, 0;
  return p.d * p.beta * e;
}

}  // namespace

DeltaEval delta_eval(const SecondMomentPoint& pt, const ModelParams& p) {
  if (!pt.interior()) throw domain_error("delta_eval: point not interior");
  const Vec9 x = pt.vec();
  DeltaEval e;
  e.value = -p.d * p.beta * (1 - 2 * x[0] - 2 * x[1] - x[2] - x[3] - x[4] - x[5]);
  e.grad = energy_grad(p);
  for (const auto& f : delta_forms(p)) {
    const double t = f.a.dot(x) + f.c;
    e.value += f.alpha * xlogx(t);
    e.grad += f.alpha * (std::log(t) + 1) * f.a;
  }
  return e;
}

Mat9 delta_hessian_analytic(const SecondMomentPoint& pt, const ModelParams& p) {
  if (!pt.interior()) throw domain_error("delta_hessian: point not interior");
  const Vec9 x = pt.vec();
  Mat9 H = Mat9::Zero();
  for (const auto& f : delta_forms(p)) H += (f.alpha / (f.a.dot(x) + f.c)) * f.a * f.a.transpose();
  return H;
}

SecondMomentPoint delta_argmax_closed(const ModelParams& p) {
  const double x = p.x, q = 4 * (1 + x) * (1 + x);
  SecondMomentPoint s;
  s.x = {1 / q, 1 / q, x / q, x / q, x / q, x / q, x * x / q, x * x / q, x * x / q};
  return s;
}

double delta_max_closed(const ModelParams& p) { return (2 - p.d) * kLog2 + p.d * std::log1p(p.x); }

SecondMomentPoint find_delta_max(const ModelParams& p) {
  Vec x0 = Vec::Constant(9, 1.0 / 16);
  auto pt = [](const Vec& v) { return SecondMomentPoint::from_vec(v); };
  auto r = maximize_newton([&](const Vec& v) { return delta_eval(pt(v), p).value; },
                           [&](const Vec& v) -> Vec { return delta_eval(pt(v), p).grad; },
                           [&](const Vec& v) -> Mat { return delta_hessian_analytic(pt(v), p); },
                           [&](const Vec& v) { return pt(v).interior(); }, x0);
  if (!r.converged) throw optimization_error("find_delta_max: no convergence");
  return pt(r.x);
}

HessianDelta hessian_delta(const ModelParams& p) {
  static const int M1[9][9] = {{6, 2, 5, 5, 3, 3, 3, 3, 2}, {2, 2, 3, 3, 1, 1, 1, 1, 2}, {5, 3, 6, 5, 3, 2, 3, 2, 3},
                               {5, 3, 5, 6, 2, 3, 2, 3, 3}, {3, 1, 3, 2, 2, 1, 2, 1, 1}, {3, 1, 2, 3, 1, 2, 1, 2, 1},
                               {3, 1, 3, 2, 2, 1, 2, 1, 1}, {3, 1, 2, 3, 1, 2, 1, 2, 1}, {2, 2, 3, 3, 1, 1, 1, 1, 2}};
  const double d = p.d, eb = std::exp(p.beta), x = p.x;
  const double w[9] = {2, 2, 1, 1, 1, 1, 0, 0, 0};
  const double diag[9] = {2, 2, 2 * eb, 2 * eb, 2 * eb, 2 * eb, eb * eb, eb * eb, eb * eb};
  const double s2 = 2 * d * (1 + x) * (1 + x) * eb * eb, s3 = 2 * d * (1 + x) * (1 + x);
  HessianDelta h;
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) {
      // rank-one pattern entries 4 / 2 / 1
      const double m2 = (w[i] > 0 ? 2 : 1) * (w[j] > 0 ? 2 : 1);
      h.matrix(i, j) = 4 * (d - 1) * M1[i][j] - s2 * m2 - (i == j ? s3 * diag[i] : 0.0);
    }
  h.det_neg = (-h.matrix).determinant();
  return h;
}

double delta_hessian_det_closed(const ModelParams& p) {
  const double d = p.d, b = p.beta, eb = std::exp(b);
  return std::pow(2.0, 17) * std::pow(d, 6) * std::exp(-8 * b) * std::pow(1 + eb, 16) * std::pow(d * eb - d + 2, 2) *
         (2 * eb * eb + 2 * d * eb - d * eb * eb - d + 2);
}

// -------------------------------------------------------------- inner problem

OverlapParam make_overlap(double alpha, double beta) {
  if (!(std::abs(alpha) < 1)) throw domain_error("alpha must lie in (-1, 1)");
  const double y = std::exp(-2 * beta);
  return {alpha, std::sqrt((1 + y) * (1 + y) - alpha * alpha * (1 - y) * (1 - y))};
}

InnerSolution solve_inner_mu(const OverlapParam& a, const ModelParams& p) {
  if (!(p.beta > 0)) throw domain_error("solve_inner_mu: beta = 0 is degenerate; the beta -> 0 limit is uniform");
  const double al = a.alpha, x = p.x, y = std::exp(-2 * p.beta), z = a.z;
  // Rationalized multipliers: (1+y)^2 + a u - 2xz = u (1+y)^2 (1+a)^2 / ((1+y)^2 + a u + 2xz)
  // with u = (1-y)^2, which avoids the cancellation at small beta.
  const double u = (1 - y) * (1 - y), w = (1 + y) * (1 + y);
  InnerSolution s;
  s.x1_mult = 2 * std::sqrt((1 + y) / (w + al * u + 2 * x * z));
  s.x2_mult = 2 * std::sqrt((1 + y) / (w - al * u + 2 * x * z));
  s.rho = {(1 + al) / 4, (1 - al) / 4, (1 - al) / 4, (1 + al) / 4};
  const double mult[4] = {s.x1_mult, s.x2_mult, s.x2_mult, s.x1_mult};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const int mono = 2 - __builtin_popcount(static_cast<unsigned>(i ^ j));
      s.mu[i * 4 + j] = s.rho[i] * s.rho[j] * mult[i] * mult[j] * std::pow(x, mono);
    }
  s.point = SecondMomentPoint::from_mu(s.mu);
  const double r_pp = s.rho[0], r_pm = s.rho[1], x1 = s.x1_mult, x2 = s.x2_mult;
  s.residual_pp = r_pp * x1 * x1 * y + 2 * r_pm * x1 * x2 * x + r_pp * x1 * x1 - 1;
  s.residual_pm = r_pm * x2 * x2 * y + 2 * r_pp * x1 * x2 * x + r_pm * x2 * x2 - 1;
  if (std::abs(s.residual_pp) > 1e-9 || std::abs(s.residual_pm) > 1e-9)
    throw std::logic_error("solve_inner_mu: marginal constraints violated");
  return s;
}

namespace {

constexpr double kAlphaGuard = 1 - 1e-9;

void check_alpha(double alpha) {
  if (!(std::abs(alpha) <= kAlphaGuard)) throw domain_error("alpha too close to +-1");
}

}  // namespace

double g_closed(double alpha, const ModelParams& p) {
  check_alpha(alpha);
  const double y = std::exp(-2 * p.beta), x = p.x;
  const double z = make_overlap(alpha, p.beta).z;
  const double ap = (1 + y) * (1 + y) + alpha * (1 - y) * (1 - y) - 2 * x * z;
  const double am = (1 + y) * (1 + y) - alpha * (1 - y) * (1 - y) - 2 * x * z;
  return 2 * kLog2 - std::log((1 + y) * (1 - y) * (1 - y)) - (1 + alpha) * std::log1p(alpha) -
         (1 - alpha) * std::log1p(-alpha) + 0.5 * (1 + alpha) * std::log(ap) + 0.5 * (1 - alpha) * std::log(am);
}

FAlpha f_alpha_eval(double alpha, const ModelParams& p) {
  check_alpha(alpha);
  if (!(p.beta > 0)) throw domain_error("f_alpha_eval needs beta > 0");
  const double d = p.d, b = p.beta, y = std::exp(-2 * b), x = p.x;
  const double z = make_overlap(alpha, b).z;
  const double ap = (1 + y) * (1 + y) + alpha * (1 - y) * (1 - y) - 2 * x * z;
  const double am = (1 + y) * (1 + y) - alpha * (1 - y) * (1 - y) - 2 * x * z;
  const double h = kLog2 - 0.5 * ((1 + alpha) * std::log1p(alpha) + (1 - alpha) * std::log1p(-alpha));
  FAlpha f;
  f.value = kLog2 + h - (d / 2) * g_closed(alpha, p);
  f.d1 = ((d - 1) / 2) * (std::log1p(alpha) - std::log1p(-alpha)) - (d / 4) * (std::log(ap) - std::log(am));
  const double oma = 1 - alpha * alpha;
  f.d2 = (d - 2) / (2 * oma) -
         d / (oma * std::sqrt(oma * (std::exp(2 * b) + std::exp(-2 * b)) + 2 + 2 * alpha * alpha));
  return f;
}

double find_alpha_max(const ModelParams& p, bool allow_above_threshold) {
  if (!(p.beta > 0)) throw domain_error("find_alpha_max needs beta > 0");
  if (!allow_above_threshold && p.beta >= beta_ks(p.d))
    throw domain_error("find_alpha_max: beta >= beta_KS (pass allow_above_threshold to explore)");
  const int N = 2000;
  const double lo = -0.999, hi = 0.999;
  auto at = [&](int k) { return lo + (hi - lo) * k / N; };
  int best = 0;
  double fb = -INFINITY;
  for (int k = 0; k <= N; ++k) {
    double v = f_alpha_eval(at(k), p).value;
    if (v > fb) {
      fb = v;
      best = k;
    }
  }
  double a = at(std::max(0, best - 1)), c = at(std::min(N, best + 1));
  const double gr = (std::sqrt(5.0) - 1) / 2;
  double u = c - gr * (c - a), v = a + gr * (c - a);
  double fu = f_alpha_eval(u, p).value, fv = f_alpha_eval(v, p).value;
  for (int it = 0; it < 200 && c - a > 1e-12; ++it) {
    if (fu > fv) {
      c = v;
      v = u;
      fv = fu;
      u = c - gr * (c - a);
      fu = f_alpha_eval(u, p).value;
    } else {
      a = u;
      u = v;
      fu = fv;
      v = a + gr * (c - a);
      fv = f_alpha_eval(v, p).value;
    }
  }
  double al = 0.5 * (a + c);
  for (int it = 0; it < 50; ++it) {
    auto f = f_alpha_eval(al, p);
    if (!(f.d2 < 0)) break;
    const double step = -f.d1 / f.d2;
    if (std::abs(al + step) > kAlphaGuard) break;
    al += step;
    if (std::abs(step) < 1e-17) break;
  }
  return al;
}

// ------------------------------------------------------------------- lattices

std::vector<std::vector<mpq_class>> lattice_basis(MomentKind m, int d) {
  if (d < 1) throw domain_error("d must be positive");
  const mpq_class one_d(1, d), two_d(2, d);
  if (m == MomentKind::first) {
    // coordinates (mu_pp, rho_p)
    mpq_class t = two_d;
    t.canonicalize();
    return {{t, 0}, {0, 1}};
  }
  std::vector<std::vector<mpq_class>> a(9, std::vector<mpq_class>(9, 0));
  mpq_class o = one_d, t = two_d;
  o.canonicalize();
  t.canonicalize();
  a[0][0] = o;
  a[1][1] = 1, a[1][2] = -o, a[1][3] = -o, a[1][8] = -t;
  a[2][2] = o;
  a[3][3] = o;
  a[4][0] = -o, a[4][2] = -o, a[4][4] = 1, a[4][6] = -t;
  a[5][0] = -o, a[5][3] = -o, a[5][5] = 1, a[5][7] = -t;
  a[6][6] = t;
  a[7][7] = t;
  a[8][8] = t;
  return a;
}

mpq_class rational_determinant(std::vector<std::vector<mpq_class>> a) {
  const size_t n = a.size();
  mpq_class det = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    while (piv < n && sgn(a[piv][c]) == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (size_t r = c + 1; r < n; ++r) {
      if (sgn(a[r][c]) == 0) continue;
      mpq_class f = a[r][c] / a[c][c];
      for (size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

mpq_class lattice_determinant(MomentKind m, int d) {
  if (d < 1) throw domain_error("d must be positive");
  mpq_class r;
  if (m == MomentKind::first) {
    r = mpq_class(2, d);
  } else {
    mpz_class d6;
    mpz_ui_pow_ui(d6.get_mpz_t(), static_cast<unsigned long>(d), 6);
    r = mpq_class(mpz_class(8), d6);
  }
  r.canonicalize();
  return r;
}

// ------------------------------------------------------- Laplace applications

namespace {

Mat to_double(const std::vector<std::vector<mpq_class>>& a) {
  Mat m(a.size(), a.size());
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a.size(); ++j) m(i, j) = a[i][j].get_d();
  return m;
}

}  // namespace

LaplaceProblem first_moment_laplace_problem(const ModelParams& p) {
  LaplaceProblem pr;
  pr.dim = 2;
  pr.basis = to_double(lattice_basis(MomentKind::first, p.d));
  pr.lattice_det = lattice_determinant(MomentKind::first, p.d).get_d();
  pr.offset = Vec(2);
  pr.offset << 0.25, 0.5;
  auto pt = [](const Vec& v) { return FirstMomentPoint{v[0], v[1]}; };
  pr.phi = [=](const Vec& v) { return psi_eval(pt(v), p).value; };
  pr.phi_grad = [=](const Vec& v) -> Vec { return psi_eval(pt(v), p).grad; };
  pr.phi_hess = [=](const Vec& v) -> Mat { return psi_eval(pt(v), p).hess; };
  pr.weight = [=](const Vec& v) {
    auto q = pt(v);
    return 1 / (std::numbers::pi * std::sqrt(2 * q.mu_pp * q.mu_mm() * q.mu_pm() * p.d));
  };
  pr.b_n = [](double n) { return 1 / n; };
  pr.feasible = [=](const Vec& v) { return pt(v).interior(); };
  return pr;
}

LaplaceProblem second_moment_laplace_problem(const ModelParams& p) {
  LaplaceProblem pr;
  pr.dim = 9;
  pr.basis = to_double(lattice_basis(MomentKind::second, p.d));
  pr.lattice_det = lattice_determinant(MomentKind::second, p.d).get_d();
  pr.offset = Vec::Constant(9, 1.0 / 16);
  auto pt = [](const Vec& v) { return SecondMomentPoint::from_vec(v); };
  pr.phi = [=](const Vec& v) { return delta_eval(pt(v), p).value; };
  pr.phi_grad = [=](const Vec& v) -> Vec { return delta_eval(pt(v), p).grad; };
  pr.phi_hess = [=](const Vec& v) -> Mat { return delta_hessian_analytic(pt(v), p); };
  pr.weight = [=](const Vec& v) {
    auto q = pt(v);
    // product over the ten distinct entries
    double prod = q.mu_mmmm();
    for (double t : q.x) prod *= t;
    const double d = p.d;
    return 1 / (8 * d * d * d * std::pow(std::numbers::pi, 4.5) * std::sqrt(prod));
  };
  pr.b_n = [](double n) { return std::pow(n, -4.5); };
  pr.feasible = [=](const Vec& v) { return pt(v).interior(); };
  return pr;
}

}  // namespace rrg
