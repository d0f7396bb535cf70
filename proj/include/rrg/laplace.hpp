#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>

namespace rrg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct NewtonOptions {
  int max_iter = 200;
  double grad_tol = 1e-13;
  double step_tol = 1e-16;
};

struct NewtonResult {
  Vec x;
  double value = 0;
  int iterations = 0;
  bool converged = false;
};

// Maximizes f by damped Newton; falls back to a gradient step when -H is not
// positive definite. Steps are halved until the point stays feasible and f does
// not decrease.
NewtonResult maximize_newton(const std::function<double(const Vec&)>& f, const std::function<Vec(const Vec&)>& grad,
                             const std::function<Mat(const Vec&)>& hess, const std::function<bool(const Vec&)>& feasible,
                             Vec x0, const NewtonOptions& opt = {});

// Central differences with step h * max(1, |x_i|).
Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h = 1e-5);
Mat fd_hessian(const std::function<double(const Vec&)>& f, const Vec& x, double h = 1e-5);
// Symmetrized central differences of an analytic gradient.
Mat fd_jacobian(const std::function<Vec(const Vec&)>& g, const Vec& x, double h = 1e-6);

// Sum over (offset + L/n) inside the region of b_n psi(x) exp(n phi(x)), where L
// is spanned by the columns of basis.
struct LaplaceProblem {
  int dim = 0;
  Mat basis;                 // dim x r
  double lattice_det = 0;    // 0: take sqrt(det(B^T B))
  Vec offset;                // a feasible point on the affine slice
  std::function<double(const Vec&)> phi;
  std::function<Vec(const Vec&)> phi_grad;  // optional
  std::function<Mat(const Vec&)> phi_hess;  // optional
  std::function<double(const Vec&)> weight;
  std::function<double(double)> b_n;
  std::function<bool(const Vec&)> feasible;
};

struct LaplaceResult {
  double log_value = 0;
  Vec argmax;
  double phi_max = 0;
  double det_neg_hess = 0;  // restricted to the lattice span
  double lattice_det = 0;
  double value() const;
};

LaplaceResult laplace_estimate(const LaplaceProblem& prob, double n);

}  // namespace rrg
