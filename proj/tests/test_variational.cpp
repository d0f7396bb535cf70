#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rrg/errors.hpp"
#include "rrg/rng.hpp"
#include "rrg/theory.hpp"
#include "rrg/variational.hpp"

using namespace rrg;

namespace {

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

Vec to_vec(const Vec9& v) { return Vec(v); }

// Random interior 16-type distribution, symmetric under swapping the two vertices.
SecondMomentPoint random_second_point(Rng& rng) {
  std::array<double, 16> mu{};
  double s = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) {
      const double w = 0.2 + rng.uniform();
      mu[a * 4 + b] = mu[b * 4 + a] = w;
      s += a == b ? w : 2 * w;
    }
  for (auto& v : mu) v /= s;
  return SecondMomentPoint::from_mu(mu);
}

FirstMomentPoint random_first_point(Rng& rng) {
  // rho in (0.2, 0.8), mu_pp strictly inside (max(0, 2 rho - 1), rho).
  const double rho = 0.2 + 0.6 * rng.uniform();
  const double lo = std::max(0.0, 2 * rho - 1), hi = rho;
  return {lo + (hi - lo) * (0.05 + 0.9 * rng.uniform()), rho};
}

}  // namespace

TEST_CASE("psi at the closed-form optimum") {
  const ModelParams p(10, 3, 1.0);
  const auto opt = psi_argmax_closed(p);
  CHECK(opt.mu_pp == doctest::Approx(p.x / (2 * (1 + p.x))).epsilon(1e-15));
  CHECK(opt.rho_p == 0.5);
  const auto e = psi_eval(opt, p);
  CHECK(e.grad.norm() <= 1e-12);
  CHECK(e.value == doctest::Approx(0.1233189).epsilon(1e-6));
  CHECK(e.value == doctest::Approx(psi_max_closed(p)).epsilon(1e-14));
  const double eb = std::exp(1.0), x = p.x;
  const double det_closed = 4 * 3 * (1 + x) * (1 + x) * eb * (2 + 3 * (eb - 1));
  CHECK(det_closed == doctest::Approx(436.690).epsilon(1e-5));
  CHECK((-e.hess).determinant() == doctest::Approx(det_closed).epsilon(1e-12));
  CHECK(psi_hessian_det_closed(p) == doctest::Approx(det_closed).epsilon(1e-14));
  // Central differences of the value, step 1e-5.
  auto f = [&](const Vec& v) { return psi_eval({v[0], v[1]}, p).value; };
  Vec at(2);
  at << opt.mu_pp, opt.rho_p;
  const Mat fd = fd_hessian(f, at, 1e-5);
  CHECK(rel_close((-fd).determinant(), det_closed, 1e-4));
  auto g = [&](const Vec& v) -> Vec { return Vec(psi_eval({v[0], v[1]}, p).grad); };
  CHECK(rel_close((-fd_jacobian(g, at, 1e-5)).determinant(), det_closed, 1e-6));
  CHECK_THROWS_AS(psi_eval({0.6, 0.5}, p), domain_error);
}

TEST_CASE("find_psi_max matches the closed form") {
  const ModelParams p(10, 3, std::log(2.0));
  const auto r = find_psi_max(p);
  CHECK(std::abs(r.mu_pp - 1.0 / 6) <= 1e-10);
  CHECK(std::abs(r.rho_p - 0.5) <= 1e-10);
  for (int d : {3, 4, 5, 7})
    for (double f : {0.1, 0.5, 0.9}) {
      const ModelParams q(10, d, f * beta_ks(d));
      const auto m = find_psi_max(q);
      const auto c = psi_argmax_closed(q);
      CHECK(std::abs(m.mu_pp - c.mu_pp) <= 1e-10);
      CHECK(std::abs(m.rho_p - 0.5) <= 1e-10);
    }
  CHECK(std::abs(find_psi_max(ModelParams(10, 3, 1e-6)).mu_pp - 0.25) < 1e-6);
}

TEST_CASE("find_psi_max has a single basin") {
  Rng rng(7);
  for (int d : {3, 4, 5})
    for (double beta : {0.3, 0.8, 0.95 * beta_ks(d)}) {
      const ModelParams p(10, d, beta);
      double lo_m = 1, hi_m = 0, lo_r = 1, hi_r = 0;
      for (int k = 0; k < 50; ++k) {
        const auto r = find_psi_max(p, random_first_point(rng));
        lo_m = std::min(lo_m, r.mu_pp), hi_m = std::max(hi_m, r.mu_pp);
        lo_r = std::min(lo_r, r.rho_p), hi_r = std::max(hi_r, r.rho_p);
      }
      CHECK(hi_m - lo_m <= 1e-8);
      CHECK(hi_r - lo_r <= 1e-8);
    }
}

TEST_CASE("analytic gradients match central differences") {
  Rng rng(8);
  for (int k = 0; k < 100; ++k) {
    const int d = 3 + static_cast<int>(rng.below(4));
    const ModelParams p(10, d, 0.05 + 1.5 * rng.uniform());

    const auto fp = random_first_point(rng);
    Vec a(2);
    a << fp.mu_pp, fp.rho_p;
    const Vec gf = fd_gradient([&](const Vec& v) { return psi_eval({v[0], v[1]}, p).value; }, a, 1e-6);
    const auto pe = psi_eval(fp, p);
    for (int i = 0; i < 2; ++i) CHECK(rel_close(gf[i], pe.grad[i], 1e-6));

    const auto sp = random_second_point(rng);
    const Vec gs = fd_gradient(
        [&](const Vec& v) { return delta_eval(SecondMomentPoint::from_vec(Vec9(v)), p).value; }, to_vec(sp.vec()), 1e-6);
    const auto de = delta_eval(sp, p);
    for (int i = 0; i < 9; ++i) CHECK(rel_close(gs[i], de.grad[i], 1e-6));

    const double alpha = -0.9 + 1.8 * rng.uniform();
    const double h = 1e-6 * std::max(std::abs(alpha), 1e-3);
    const auto fa = f_alpha_eval(alpha, p);
    const double d1 = (f_alpha_eval(alpha + h, p).value - f_alpha_eval(alpha - h, p).value) / (2 * h);
    const double d2 = (f_alpha_eval(alpha + h, p).d1 - f_alpha_eval(alpha - h, p).d1) / (2 * h);
    CHECK(rel_close(d1, fa.d1, 1e-6));
    CHECK(rel_close(d2, fa.d2, 1e-6));
  }
}

TEST_CASE("analytic delta Hessian matches differences of the gradient") {
  Rng rng(9);
  for (int k = 0; k < 10; ++k) {
    const ModelParams p(10, 3 + k % 3, 0.3 + 0.1 * k);
    const auto sp = random_second_point(rng);
    const Mat fd = fd_jacobian([&](const Vec& v) -> Vec { return Vec(delta_eval(SecondMomentPoint::from_vec(Vec9(v)), p).grad); },
                               to_vec(sp.vec()), 1e-6);
    const Mat9 an = delta_hessian_analytic(sp, p);
    CHECK((fd - Mat(an)).cwiseAbs().maxCoeff() <= 1e-5 * std::max(1.0, an.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("delta at the closed-form optimum") {
  const ModelParams p(10, 3, 1.0);
  const auto opt = delta_argmax_closed(p);
  const auto e = delta_eval(opt, p);
  CHECK(e.value == doctest::Approx(0.2466378).epsilon(1e-6));
  CHECK(e.grad.norm() <= 1e-9);
  double total = 0;
  for (double v : opt.mu()) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  // Table entries: e^{-2b}/(4(1+x)^2) on (++,++), 1/(4(1+x)^2) on (+-,-+), x/(4(1+x)^2) on (++,+-).
  const double c = 1 / (4 * (1 + p.x) * (1 + p.x));
  const auto mu = opt.mu();
  CHECK(mu[0] == doctest::Approx(p.x * p.x * c).epsilon(1e-14));
  CHECK(mu[1 * 4 + 2] == doctest::Approx(c).epsilon(1e-14));
  CHECK(mu[0 * 4 + 1] == doctest::Approx(p.x * c).epsilon(1e-14));
  for (int d : {3, 4, 6})
    for (double f : {0.2, 0.5, 0.9}) {
      const ModelParams q(10, d, f * beta_ks(d));
      CHECK(delta_max_closed(q) == doctest::Approx(2 * psi_max_closed(q)).epsilon(1e-14));
      const auto m = find_delta_max(q);
      const auto cl = delta_argmax_closed(q);
      for (int i = 0; i < 9; ++i) CHECK(std::abs(m.x[i] - cl.x[i]) <= 1e-9);
      CHECK(delta_eval(m, q).value == doctest::Approx(delta_max_closed(q)).epsilon(1e-12));
    }
}

TEST_CASE("assembled delta Hessian and its determinant") {
  const ModelParams p(10, 3, 1.0);
  const auto h = hessian_delta(p);
  CHECK(h.det_neg == doctest::Approx(1.735e16).epsilon(1e-3));
  CHECK(h.det_neg == doctest::Approx(delta_hessian_det_closed(p)).epsilon(1e-9));
  // Independent evaluation of the closed form.
  const double eb = std::exp(1.0), d = 3;
  const double closed = std::pow(2.0, 17) * std::pow(d, 6) * std::exp(-8.0) * std::pow(1 + eb, 16) *
                        std::pow(d * eb - d + 2, 2) * (2 * eb * eb + 2 * d * eb - d * eb * eb - d + 2);
  CHECK(h.det_neg == doctest::Approx(closed).epsilon(1e-9));
  const Mat9 an = delta_hessian_analytic(delta_argmax_closed(p), p);
  CHECK((h.matrix - an).cwiseAbs().maxCoeff() <= 1e-10 * an.cwiseAbs().maxCoeff());
  // Value differences, step 1e-5.
  const Mat fd = fd_hessian([&](const Vec& v) { return delta_eval(SecondMomentPoint::from_vec(Vec9(v)), p).value; },
                            to_vec(delta_argmax_closed(p).vec()), 1e-5);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) {
      INFO(i, " ", j, " fd ", fd(i, j), " assembled ", h.matrix(i, j));
      CHECK(rel_close(fd(i, j), h.matrix(i, j), 1e-4));
    }
  for (int dd = 3; dd <= 8; ++dd)
    for (double f = 0.05; f < 1; f += 0.1) CHECK(delta_hessian_det_closed(ModelParams(10, dd, f * beta_ks(dd))) > 0);
}

TEST_CASE("inner solution") {
  for (double beta : {0.3, 1.0, 1.5}) {
    const ModelParams p(10, 3, beta);
    const auto s = solve_inner_mu(make_overlap(0.0, beta), p);
    CHECK(s.x1_mult == doctest::Approx(2 / (1 + p.x)).epsilon(1e-12));
    CHECK(s.x2_mult == doctest::Approx(2 / (1 + p.x)).epsilon(1e-12));
    const auto cl = delta_argmax_closed(p).mu();
    for (int i = 0; i < 16; ++i) CHECK(s.mu[i] == doctest::Approx(cl[i]).epsilon(1e-12));
  }
  for (double alpha : {-0.9, -0.5, -0.1, 0.0, 0.2, 0.6, 0.95})
    for (double beta : {0.1, 0.7, 1.6}) {
      const ModelParams p(10, 4, beta);
      const auto op = make_overlap(alpha, beta);
      CHECK(op.z > 0);
      const auto s = solve_inner_mu(op, p);
      CHECK(std::abs(s.residual_pp) <= 1e-12);
      CHECK(std::abs(s.residual_pm) <= 1e-12);
      double total = 0;
      for (double v : s.mu) total += v;
      CHECK(std::abs(total - 1) <= 1e-12);
    }
  CHECK(make_overlap(0.0, 1.0).z == doctest::Approx(1 + std::exp(-2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(solve_inner_mu(make_overlap(0.1, 0.0), ModelParams(10, 3, 0.0)), domain_error);
  CHECK_THROWS_AS(make_overlap(1.0, 1.0), domain_error);
}

TEST_CASE("f_d(alpha, beta)") {
  const ModelParams p(10, 3, 1.0);
  const auto f0 = f_alpha_eval(0.0, p);
  CHECK(f0.value == doctest::Approx(delta_max_closed(p)).epsilon(1e-12));
  CHECK(std::abs(f0.d1) <= 1e-14);
  const double e = std::exp(1.0);
  CHECK(f0.d2 == doctest::Approx(0.5 - 3 / (e + 1 / e)).epsilon(1e-13));
  CHECK(f0.d2 == doctest::Approx(-0.4720814).epsilon(1e-6));
  // f value equals delta at the inner solution.
  for (double alpha : {-0.7, -0.2, 0.3, 0.8}) {
    const auto s = solve_inner_mu(make_overlap(alpha, 1.0), p);
    CHECK(f_alpha_eval(alpha, p).value == doctest::Approx(delta_eval(s.point, p).value).epsilon(1e-10));
  }
  for (int d : {3, 4, 5}) {
    const ModelParams k(10, d, beta_ks(d));
    for (double alpha : {-0.9, -0.5, -0.1, 0.1, 0.5, 0.9}) CHECK(f_alpha_eval(alpha, k).d2 < 0);
  }
  for (int d : {3, 4})
    for (double beta : {0.3, 1.0})
      for (double alpha : {-0.6, 0.0, 0.4}) {
        const double a = f_alpha_eval(alpha, ModelParams(10, d, beta)).d2;
        const double b = f_alpha_eval(alpha, ModelParams(10, d, beta + 1e-3)).d2;
        CHECK(b > a);
      }
  CHECK_THROWS_AS(f_alpha_eval(1.0, p), domain_error);
  CHECK_THROWS_AS(f_alpha_eval(-1.0 + 1e-12, p), domain_error);
  CHECK(g_closed(0.0, p) == doctest::Approx(2 * std::log(2.0) - 2 * std::log1p(p.x)).epsilon(1e-13));
}

TEST_CASE("alpha maximizer") {
  CHECK(std::abs(find_alpha_max(ModelParams(10, 3, 1.0))) <= 1e-8);
  CHECK(std::abs(find_alpha_max(ModelParams(10, 4, 0.5))) <= 1e-8);
  const ModelParams above(10, 3, beta_ks(3) + 0.3);
  CHECK_THROWS_AS(find_alpha_max(above), domain_error);
  CHECK(std::abs(find_alpha_max(above, true)) > 0.01);
}

TEST_CASE("lattice determinants") {
  CHECK(lattice_determinant(MomentKind::first, 3) == mpq_class(2, 3));
  CHECK(lattice_determinant(MomentKind::second, 3) == mpq_class(8, 729));
  for (int d = 1; d <= 8; ++d) {
    mpq_class a(2, d), b(8, static_cast<long>(std::pow(d, 6)));
    a.canonicalize();
    b.canonicalize();
    CHECK(rational_determinant(lattice_basis(MomentKind::first, d)) == a);
    CHECK(rational_determinant(lattice_basis(MomentKind::second, d)) == b);
  }
  std::vector<std::vector<mpq_class>> m{{mpq_class(0), mpq_class(2)}, {mpq_class(3), mpq_class(1)}};
  CHECK(rational_determinant(m) == -6);
  CHECK_THROWS_AS(lattice_determinant(MomentKind::first, 0), domain_error);
}

TEST_CASE("Laplace evaluator on a Gaussian sum") {
  const double n = 1e4;
  LaplaceProblem pr;
  pr.dim = 1;
  pr.basis = Mat::Identity(1, 1);
  pr.offset = Vec::Zero(1);
  pr.phi = [](const Vec& v) { return -0.5 * v[0] * v[0]; };
  pr.weight = [](const Vec&) { return 1.0; };
  pr.b_n = [](double) { return 1.0; };
  pr.feasible = [](const Vec&) { return true; };
  const auto r = laplace_estimate(pr, n);
  CHECK(r.log_value == doctest::Approx(0.5 * std::log(2 * std::numbers::pi * n)).epsilon(1e-6));
  double s = 0;
  for (long k = -100000; k <= 100000; ++k) s += std::exp(-0.5 * double(k) * double(k) / n);
  CHECK(std::abs(s / r.value() - 1) <= 1e-6);
}

TEST_CASE("Laplace evaluator on the binomial sum") {
  const int n = 1000;
  LaplaceProblem pr;
  pr.dim = 1;
  pr.basis = Mat::Identity(1, 1);
  pr.offset = Vec::Constant(1, 0.4);
  pr.phi = [](const Vec& v) { return -v[0] * std::log(v[0]) - (1 - v[0]) * std::log(1 - v[0]); };
  pr.weight = [](const Vec& v) { return 1 / std::sqrt(2 * std::numbers::pi * v[0] * (1 - v[0])); };
  pr.b_n = [](double m) { return 1 / std::sqrt(m); };
  pr.feasible = [](const Vec& v) { return v[0] > 0 && v[0] < 1; };
  const auto r = laplace_estimate(pr, n);
  CHECK(std::abs(r.argmax[0] - 0.5) < 1e-8);
  CHECK(std::abs(r.log_value - n * std::log(2.0)) <= 1e-3);
  pr.phi = [](const Vec& v) { return v[0] * v[0]; };
  CHECK_THROWS(laplace_estimate(pr, n));
}

TEST_CASE("first-moment Laplace problem reproduces the asymptotic prefactor") {
  for (int d : {3, 4, 5})
    for (double f : {0.2, 0.5, 0.9})
      for (int n : {50, 100, 1000}) {
        const ModelParams p(n, d, f * beta_ks(d));
        const auto r = laplace_estimate(first_moment_laplace_problem(p), n);
        CHECK(std::abs(r.log_value - first_moment_asymptotic(p).pairing_total(n)) <= 1e-10);
        CHECK(r.det_neg_hess > 0);
      }
}

TEST_CASE("second-moment Laplace problem reproduces the asymptotic prefactor") {
  for (int d : {3, 4})
    for (double f : {0.3, 0.7}) {
      const int n = 200;
      const ModelParams p(n, d, f * beta_ks(d));
      const auto r = laplace_estimate(second_moment_laplace_problem(p), n);
      CHECK(std::abs(r.log_value - second_moment_asymptotic(p).pairing_total(n)) <= 1e-8);
    }
}
