#pragma once

#include <gmpxx.h>

#include <Eigen/Dense>

#include <array>
#include <vector>

#include "rrg/laplace.hpp"
#include "rrg/params.hpp"

namespace rrg {

// ---- first moment: psi(mu_pp, rho_p) ----

struct FirstMomentPoint {
  double mu_pp = 0.25;
  double rho_p = 0.5;
  double mu_pm() const { return rho_p - mu_pp; }
  double mu_mm() const { return 1 + mu_pp - 2 * rho_p; }
  bool interior() const;
};

struct PsiEval {
  double value = 0;
  Eigen::Vector2d grad;
  Eigen::Matrix2d hess;
};

PsiEval psi_eval(const FirstMomentPoint& pt, const ModelParams& p);
FirstMomentPoint psi_argmax_closed(const ModelParams& p);
double psi_max_closed(const ModelParams& p);
double psi_hessian_det_closed(const ModelParams& p);  // det(-Hess) at the optimum
FirstMomentPoint find_psi_max(const ModelParams& p, FirstMomentPoint start = {});

// ---- second moment: delta over nine free coordinates ----

// x[0..8] = x1..x9: mu(+-,-+), mu(++,--), mu(++,+-), mu(++,-+), mu(+-,--),
// mu(-+,--), mu(+-,+-), mu(-+,-+), mu(++,++). The first six appear twice in mu.
struct SecondMomentPoint {
  std::array<double, 9> x{};
  double mu_mmmm() const;
  std::array<double, 4> rho() const;   // ++, +-, -+, --
  std::array<double, 16> mu() const;   // mu[a*4+b], pair_type order
  bool interior() const;
  static SecondMomentPoint from_mu(const std::array<double, 16>& mu);
  Eigen::Matrix<double, 9, 1> vec() const;
  static SecondMomentPoint from_vec(const Eigen::Matrix<double, 9, 1>& v);
};

using Mat9 = Eigen::Matrix<double, 9, 9>;
using Vec9 = Eigen::Matrix<double, 9, 1>;

struct DeltaEval {
  double value = 0;
  Vec9 grad;
};

DeltaEval delta_eval(const SecondMomentPoint& pt, const ModelParams& p);
Mat9 delta_hessian_analytic(const SecondMomentPoint& pt, const ModelParams& p);
SecondMomentPoint delta_argmax_closed(const ModelParams& p);
double delta_max_closed(const ModelParams& p);
SecondMomentPoint find_delta_max(const ModelParams& p);

struct HessianDelta {
  Mat9 matrix;
  double det_neg = 0;
};
// Explicit integer-pattern assembly at the optimum.
HessianDelta hessian_delta(const ModelParams& p);
double delta_hessian_det_closed(const ModelParams& p);

// ---- overlap-parametrized inner problem ----

struct OverlapParam {
  double alpha = 0;
  double z = 0;
};
OverlapParam make_overlap(double alpha, double beta);

struct InnerSolution {
  double x1_mult = 0, x2_mult = 0;
  SecondMomentPoint point;
  std::array<double, 16> mu{};
  std::array<double, 4> rho{};
  double residual_pp = 0, residual_pm = 0;  // marginal constraints
};
InnerSolution solve_inner_mu(const OverlapParam& a, const ModelParams& p);

struct FAlpha {
  double value = 0, d1 = 0, d2 = 0;
};
double g_closed(double alpha, const ModelParams& p);
FAlpha f_alpha_eval(double alpha, const ModelParams& p);
// Grid scan, golden section, then Newton polish. Below beta_KS the answer is 0.
double find_alpha_max(const ModelParams& p, bool allow_above_threshold = false);

// ---- lattices ----

enum class MomentKind { first, second };
std::vector<std::vector<mpq_class>> lattice_basis(MomentKind m, int d);
mpq_class rational_determinant(std::vector<std::vector<mpq_class>> a);
mpq_class lattice_determinant(MomentKind m, int d);

// ---- Laplace problems for the two moment sums ----

LaplaceProblem first_moment_laplace_problem(const ModelParams& p);
LaplaceProblem second_moment_laplace_problem(const ModelParams& p);

}  // namespace rrg
