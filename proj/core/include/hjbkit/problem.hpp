#pragma once

// HJB problem instances with control-affine dynamics f(t,x,v) = f1 + f2 v,
// quadratic control cost L = Lbar + gamma |v|^2, and box-constrained
// controls. Exact pointwise optimal control and Hamiltonian, the truncated
// Hamiltonian H_R, the a-priori gradient bound, and the separable grid
// oracle live here.

#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "hjbkit/types.hpp"

namespace hjb {

enum class MapKind { zero, constant, affine, identity };
enum class PsiKind { linear, bspline };

// Suprema and Lipschitz ingredients of the a-priori bounds; non-finite
// entries mark quantities a family cannot bound (e.g. affine drift).
struct BoundConstants {
  double sup_f1_2 = 0.0;
  double sup_f2_2 = 0.0;
  double sup_f1_1 = 0.0;
  double sup_f2_1 = 0.0;
  double lip_f1_2 = 0.0;        // C_1^d
  double lip_f2_2 = 0.0;        // C_2^{d,dbar}
  double sup_dxj_f1_2 = 0.0;    // max_j |d_{x_j} f1|_2
  double sup_dxj_f2_2 = 0.0;
  double sup_psi = 0.0;
  double sup_grad_psi_2 = 0.0;
  double sup_lbar = 0.0;
  double sup_grad_lbar_2 = 0.0;
  double sup_grad_lbar_inf = 0.0;
};

// Parsed built-in family description; the source of truth for exact
// component networks, oracle eligibility, and serialization.
struct FamilySpec {
  std::string family = "custom";
  int d = 1;
  int dbar = 1;
  double gamma = 0.5;
  double t_f = 1.0;
  double q = 1.0;
  Vec a, b;

  // f1(t,x) = A1 (t;x) + c1 with A1 in R^{d x (1+d)}; analogous for f2
  // (rows flattened row-major, d*dbar of them) and lbar (single row).
  MapKind f1_kind = MapKind::zero;
  Mat f1_A;
  Vec f1_c;
  MapKind f2_kind = MapKind::identity;
  Mat f2_A;
  Vec f2_c;
  MapKind lbar_kind = MapKind::zero;
  Vec lbar_g;
  double lbar_c = 0.0;

  PsiKind psi_kind = PsiKind::linear;
  Vec psi_g;
  double psi_c = 0.0;
  double psi_amp = 1.0;

  std::optional<double> R_override;
  // Sup-norm box |x|_inf <= x_envelope used for range metadata of unbounded
  // (affine) families.
  double x_envelope = 32.0;
  // User-supplied constants take precedence over the derived ones.
  std::optional<BoundConstants> user_constants;
};

struct TruncationLevel {
  double R = 1.0;
};

struct ControlProblem {
  int d = 1;
  int dbar = 1;
  double gamma = 0.5;
  Vec box_lo, box_hi;
  double t_f = 1.0;
  std::function<Vec(double, const Vec&)> f1;
  std::function<Mat(double, const Vec&)> f2;   // d x dbar
  std::function<double(double, const Vec&)> lbar;
  std::function<double(const Vec&)> psi;
  std::function<Vec(const Vec&)> psi_grad;
  double growth_q = 1.0;
  std::optional<BoundConstants> bound_constants;
  std::optional<double> R_override;
  FamilySpec spec;
};

// Builds a problem (functions, constants) from a family description;
// validates the invariants (a_i < b_i, gamma > 0, t_f > 0).
ControlProblem make_problem(const FamilySpec& spec);

// Convenience built-ins used throughout the test-suites.
ControlProblem make_p1(int d = 2);                 // f1=0, f2=I, gamma=1/2, box [-1,1]
ControlProblem make_heat(int d = 10);              // f1=f2=lbar=0, psi linear
ControlProblem make_cole_hopf(int d = 10, double amp = 1.0);

// -- operations ---------------------------------------------------------------

// ubar_i = min(max(-(f2^T p)_i / (2 gamma), a_i), b_i); exact closed form.
Vec optimal_control(const ControlProblem& prob, double t, const Vec& x,
                    const Vec& p);

// H(t,x,p) = p^T f(t,x,ubar) + Lbar(t,x) + gamma |ubar|^2.
double hamiltonian(const ControlProblem& prob, double t, const Vec& x,
                   const Vec& p);

// Componentwise chi_R.
Vec clip(const Vec& p, const TruncationLevel& R);

// H_R(t,x,p) = H(t,x,chi_R(p)); same code path as hamiltonian.
double truncated_hamiltonian(const ControlProblem& prob,
                             const TruncationLevel& R, double t, const Vec& x,
                             const Vec& p);

// Inputs of the Appendix-style bound, evaluated verbatim:
//   c0 = sup|f1|_2
//   vbound = e^{c0 tf} (sup|Psi| + tf sup Lbar + gamma max(|a|_2^2, |b|_2^2))
//   c1 = 1/4 + sup[|f1|_2 + |f2|_2 max(|a|_inf,|b|_inf)] + C_1^d
//   R  = e^{c1 tf} (sup|grad Psi|_2 + tf vbound (sup|f2|_2 + C_2) +
//        tf sup(|Lbar| + |grad Lbar|_2) + gamma max(|a|_2^2,|b|_2^2)
//        max(|a|_inf,|b|_inf))
struct GradientBoundInputs {
  BoundConstants c;
  double gamma = 0.0;
  double t_f = 0.0;
  double box_a_2sq = 0.0;   // |a|_2^2
  double box_b_2sq = 0.0;
  double box_a_inf = 0.0;
  double box_b_inf = 0.0;
};
double evaluate_gradient_bound(const GradientBoundInputs& in);

// Default truncation level from the a-priori bound; fails loudly when the
// required constants are missing or non-finite.
TruncationLevel gradient_bound(const ControlProblem& prob);

// R_override when present, else gradient_bound.
TruncationLevel effective_truncation(const ControlProblem& prob);

// Upper bounds (Cx, Cp) with |H_R(t,x,p)-H_R(t,x',p)| <= Cx |x-x'|_1 and
// |H_R(t,x,p)-H_R(t,x,p')| <= Cp |p-p'|_inf, assembled from the gradient
// bounds of H with |p|_2 <= sqrt(d) R.
std::pair<double, double> hamiltonian_lipschitz_estimate(
    const ControlProblem& prob, const TruncationLevel& R);

// Separable tensor-grid minimization of p^T f + L over U with grid_n points
// per control coordinate; the independent oracle for the closed form.
double brute_force_hamiltonian(const ControlProblem& prob, double t,
                               const Vec& x, const Vec& p, int grid_n);

// Per-control-coordinate sup over (t,x) of the f2 column 1-norms; used by
// the oracle validity check. Non-finite when the family cannot bound it.
Vec f2_column_norm_sup(const ControlProblem& prob);

// Centered cubic B-spline (support [-2,2], C^2) and its derivative.
double bspline3(double x);
double bspline3_deriv(double x);

}  // namespace hjb
