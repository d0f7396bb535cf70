#include "rrg/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rrg/errors.hpp"

namespace rrg {

NewtonResult maximize_newton(const std::function<double(const Vec&)>& f, const std::function<Vec(const Vec&)>& grad,
                             const std::function<Mat(const Vec&)>& hess, const std::function<bool(const Vec&)>& feasible,
                             Vec x, const NewtonOptions& opt) {
  if (!feasible(x)) throw domain_error("Newton start point infeasible");
  NewtonResult r;
  double fx = f(x);
  for (int it = 0; it < opt.max_iter; ++it) {
    r.iterations = it + 1;
    Vec g = grad(x);
    if (g.lpNorm<Eigen::Infinity>() < opt.grad_tol) {
      r.converged = true;
      break;
    }
    Mat negH = -hess(x);
    Eigen::LLT<Mat> llt(negH);
    Vec step = llt.info() == Eigen::Success ? Vec(llt.solve(g)) : Vec(g);
    double t = 1;
    bool moved = false;
    while (t * step.lpNorm<Eigen::Infinity>() > opt.step_tol) {
      Vec y = x + t * step;
      if (feasible(y)) {
        double fy = f(y);
        // Slack of a few ulps: near the optimum f is flat to rounding noise.
        if (fy >= fx - 1e-14 * std::max(1.0, std::abs(fx))) {
          x = y;
          fx = fy;
          moved = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!moved) {
      // No representable improvement left: accept if the gradient is tiny.
      r.converged = g.lpNorm<Eigen::Infinity>() < 1e-8;
      break;
    }
  }
  r.x = x;
  r.value = fx;
  return r;
}

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
  Vec g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    const double hi = h * std::max(1.0, std::abs(x[i]));
    Vec a = x, b = x;
    a[i] += hi;
    b[i] -= hi;
    g[i] = (f(a) - f(b)) / (2 * hi);
  }
  return g;
}

Mat fd_hessian(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
  const int n = static_cast<int>(x.size());
  Mat H(n, n);
  for (int i = 0; i < n; ++i) {
    const double hi = h * std::max(1.0, std::abs(x[i]));
    for (int j = i; j < n; ++j) {
      const double hj = h * std::max(1.0, std::abs(x[j]));
      auto at = [&](double si, double sj) {
        Vec y = x;
        y[i] += si * hi;
        y[j] += sj * hj;
        return f(y);
      };
      H(i, j) = H(j, i) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * hi * hj);
    }
  }
  return H;
}

Mat fd_jacobian(const std::function<Vec(const Vec&)>& g, const Vec& x, double h) {
  const int n = static_cast<int>(x.size());
  Mat J(n, n);
  for (int i = 0; i < n; ++i) {
    const double hi = h * std::max(1.0, std::abs(x[i]));
    Vec a = x, b = x;
    a[i] += hi;
    b[i] -= hi;
    J.col(i) = (g(a) - g(b)) / (2 * hi);
  }
  return 0.5 * (J + J.transpose());
}

double LaplaceResult::value() const { return std::exp(log_value); }

LaplaceResult laplace_estimate(const LaplaceProblem& prob, double n) {
  const int r = static_cast<int>(prob.basis.cols());
  if (prob.basis.rows() != prob.dim || r < 1 || r > prob.dim) throw dimension_error("lattice basis has wrong shape");
  Eigen::HouseholderQR<Mat> qr(prob.basis);
  Mat Q = qr.householderQ() * Mat::Identity(prob.dim, r);
  double ldet = prob.lattice_det;
  if (ldet <= 0) ldet = std::sqrt((prob.basis.transpose() * prob.basis).determinant());
  if (!(ldet > 0)) throw domain_error("lattice determinant must be positive");

  auto lift = [&](const Vec& y) -> Vec { return prob.offset + Q * y; };
  auto fy = [&](const Vec& y) { return prob.phi(lift(y)); };
  auto gy = [&](const Vec& y) -> Vec {
    if (prob.phi_grad) return Q.transpose() * prob.phi_grad(lift(y));
    return fd_gradient(fy, y);
  };
  auto hy = [&](const Vec& y) -> Mat {
    if (prob.phi_hess) return Q.transpose() * prob.phi_hess(lift(y)) * Q;
    return fd_hessian(fy, y);
  };
  auto feas = [&](const Vec& y) { return prob.feasible(lift(y)); };

  NewtonOptions opt;
  if (!prob.phi_grad) opt.grad_tol = 1e-9;  // difference gradients carry ~1e-11 roundoff
  auto nr = maximize_newton(fy, gy, hy, feas, Vec::Zero(r), opt);
  if (!nr.converged) throw optimization_error("Laplace: maximizer search did not converge");
  LaplaceResult out;
  out.argmax = lift(nr.x);
  out.phi_max = nr.value;
  Mat negH = -hy(nr.x);
  out.det_neg_hess = negH.determinant();
  if (!(out.det_neg_hess > 0)) throw domain_error("Laplace: restricted Hessian not negative definite");
  const double w = prob.weight(out.argmax);
  if (!(w > 0)) throw domain_error("Laplace: weight not positive at the maximizer");
  out.lattice_det = ldet;
  out.log_value = 0.5 * r * std::log(2 * std::numbers::pi * n) + std::log(w) + std::log(prob.b_n(n)) + n * nr.value -
                  std::log(ldet) - 0.5 * std::log(out.det_neg_hess);
  return out;
}

}  // namespace rrg
