#include "hjbkit/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hjb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite(const Vec& v, const char* what) {
  if (!v.allFinite())
    throw std::domain_error(std::string("non-finite input: ") + what);
}

void check_point(const ControlProblem& prob, double t, const Vec& x,
                 const Vec& p) {
  if (x.size() != prob.d || p.size() != prob.d)
    throw std::invalid_argument("state/costate dimension mismatch");
  if (!std::isfinite(t)) throw std::domain_error("non-finite input: t");
  require_finite(x, "x");
  require_finite(p, "p");
}

// Evaluates A (t;x) + c for the stored affine families.
Vec eval_affine(const Mat& A, const Vec& c, double t, const Vec& x) {
  Vec tx(1 + x.size());
  tx[0] = t;
  tx.tail(x.size()) = x;
  return A * tx + c;
}

// sup over [0,tf] x {|x|_inf <= env} of |row . (t;x) + c|; t is the first
// input coordinate.
double affine_row_sup(const Eigen::RowVectorXd& row, double c, double tf,
                      double env) {
  double acc = std::max(std::abs(c), std::abs(c + row[0] * tf));
  for (int j = 1; j < row.size(); ++j) acc += std::abs(row[j]) * env;
  return acc;
}

BoundConstants derive_bound_constants(const FamilySpec& s) {
  BoundConstants c;
  const int d = s.d, dbar = s.dbar;
  switch (s.f1_kind) {
    case MapKind::zero:
      break;
    case MapKind::constant:
      c.sup_f1_2 = s.f1_c.norm();
      c.sup_f1_1 = s.f1_c.lpNorm<1>();
      break;
    default:
      c.sup_f1_2 = c.sup_f1_1 = kInf;
      c.lip_f1_2 = s.f1_A.rightCols(d).norm();
      for (int j = 0; j < d; ++j)
        c.sup_dxj_f1_2 = std::max(c.sup_dxj_f1_2, s.f1_A.col(1 + j).norm());
      break;
  }
  switch (s.f2_kind) {
    case MapKind::zero:
      break;
    case MapKind::identity:
      c.sup_f2_2 = std::sqrt(static_cast<double>(d));
      c.sup_f2_1 = static_cast<double>(d);
      break;
    case MapKind::constant:
      c.sup_f2_2 = s.f2_c.norm();
      c.sup_f2_1 = s.f2_c.lpNorm<1>();
      break;
    case MapKind::affine:
      c.sup_f2_2 = c.sup_f2_1 = kInf;
      c.lip_f2_2 = s.f2_A.rightCols(d).norm();
      for (int j = 0; j < d; ++j)
        c.sup_dxj_f2_2 = std::max(c.sup_dxj_f2_2, s.f2_A.col(1 + j).norm());
      break;
  }
  switch (s.lbar_kind) {
    case MapKind::zero:
      break;
    case MapKind::constant:
      c.sup_lbar = std::abs(s.lbar_c);
      break;
    default:
      c.sup_lbar = kInf;
      c.sup_grad_lbar_2 = s.lbar_g.tail(d).norm();
      c.sup_grad_lbar_inf = s.lbar_g.tail(d).lpNorm<Eigen::Infinity>();
      break;
  }
  if (s.psi_kind == PsiKind::linear) {
    c.sup_psi = s.psi_g.isZero(0.0) ? std::abs(s.psi_c) : kInf;
    c.sup_grad_psi_2 = s.psi_g.norm();
  } else {
    // psi = (amp/d) sum_i B(x_i); sup|B| = sup|B'| = 2/3.
    c.sup_psi = std::abs(s.psi_amp) * (2.0 / 3.0);
    c.sup_grad_psi_2 =
        std::abs(s.psi_amp) * (2.0 / 3.0) / std::sqrt(static_cast<double>(d));
  }
  (void)dbar;
  return c;
}

}  // namespace

double bspline3(double x) {
  const double ax = std::abs(x);
  if (ax >= 2.0) return 0.0;
  const double u = 2.0 - ax;
  if (ax >= 1.0) return u * u * u / 6.0;
  const double w = 1.0 - ax;
  return (u * u * u - 4.0 * w * w * w) / 6.0;
}

double bspline3_deriv(double x) {
  const double ax = std::abs(x);
  if (ax >= 2.0) return 0.0;
  const double sg = x >= 0.0 ? 1.0 : -1.0;
  const double u = 2.0 - ax;
  if (ax >= 1.0) return sg * (-0.5 * u * u);
  const double w = 1.0 - ax;
  return sg * (2.0 * w * w - 0.5 * u * u);
}

ControlProblem make_problem(const FamilySpec& spec) {
  const int d = spec.d, dbar = spec.dbar;
  if (d < 1 || dbar < 1) throw std::invalid_argument("d, dbar must be >= 1");
  if (!(spec.gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  if (!(spec.t_f > 0.0)) throw std::invalid_argument("t_f must be > 0");
  if (!(spec.q >= 1.0)) throw std::invalid_argument("q must be >= 1");
  if (spec.a.size() != dbar || spec.b.size() != dbar)
    throw std::invalid_argument("box vectors must have length dbar");
  for (int i = 0; i < dbar; ++i)
    if (!(spec.a[i] < spec.b[i]))
      throw std::invalid_argument("box needs a_i < b_i");

  ControlProblem prob;
  prob.d = d;
  prob.dbar = dbar;
  prob.gamma = spec.gamma;
  prob.box_lo = spec.a;
  prob.box_hi = spec.b;
  prob.t_f = spec.t_f;
  prob.growth_q = spec.q;
  prob.R_override = spec.R_override;
  prob.spec = spec;

  switch (spec.f1_kind) {
    case MapKind::zero:
      prob.f1 = [d](double, const Vec&) { return Vec(Vec::Zero(d)); };
      break;
    case MapKind::constant: {
      Vec c = spec.f1_c;
      prob.f1 = [c](double, const Vec&) { return c; };
      break;
    }
    default: {
      Mat A = spec.f1_A;
      Vec c = spec.f1_c;
      prob.f1 = [A, c](double t, const Vec& x) { return eval_affine(A, c, t, x); };
      break;
    }
  }
  switch (spec.f2_kind) {
    case MapKind::zero:
      prob.f2 = [d, dbar](double, const Vec&) { return Mat(Mat::Zero(d, dbar)); };
      break;
    case MapKind::identity:
      if (d != dbar) throw std::invalid_argument("identity f2 needs d == dbar");
      prob.f2 = [d](double, const Vec&) { return Mat(Mat::Identity(d, d)); };
      break;
    case MapKind::constant: {
      // f2_c stores the d x dbar entries row-major.
      Mat F = Eigen::Map<const Eigen::Matrix<
          double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          spec.f2_c.data(), d, dbar);
      prob.f2 = [F](double, const Vec&) { return F; };
      break;
    }
    case MapKind::affine: {
      Mat A = spec.f2_A;
      Vec c = spec.f2_c;
      prob.f2 = [A, c, d, dbar](double t, const Vec& x) {
        Vec flat = eval_affine(A, c, t, x);
        return Mat(Eigen::Map<const Eigen::Matrix<
                       double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            flat.data(), d, dbar));
      };
      break;
    }
  }
  switch (spec.lbar_kind) {
    case MapKind::zero:
      prob.lbar = [](double, const Vec&) { return 0.0; };
      break;
    case MapKind::constant: {
      double c = spec.lbar_c;
      prob.lbar = [c](double, const Vec&) { return c; };
      break;
    }
    default: {
      Vec g = spec.lbar_g;
      double c = spec.lbar_c;
      prob.lbar = [g, c](double t, const Vec& x) {
        double v = c + g[0] * t;
        for (int j = 0; j < x.size(); ++j) v += g[1 + j] * x[j];
        return v;
      };
      break;
    }
  }
  if (spec.psi_kind == PsiKind::linear) {
    Vec g = spec.psi_g;
    double c = spec.psi_c;
    prob.psi = [g, c](const Vec& x) { return g.dot(x) + c; };
    prob.psi_grad = [g](const Vec&) { return g; };
  } else {
    const double amp = spec.psi_amp;
    prob.psi = [amp, d](const Vec& x) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += bspline3(x[i]);
      return amp / d * s;
    };
    prob.psi_grad = [amp, d](const Vec& x) {
      Vec g(d);
      for (int i = 0; i < d; ++i) g[i] = amp / d * bspline3_deriv(x[i]);
      return g;
    };
  }

  prob.bound_constants =
      spec.user_constants ? *spec.user_constants : derive_bound_constants(spec);
  return prob;
}

ControlProblem make_p1(int d) {
  FamilySpec s;
  s.family = "p1";
  s.d = s.dbar = d;
  s.gamma = 0.5;
  s.t_f = 1.0;
  s.a = Vec::Constant(d, -1.0);
  s.b = Vec::Constant(d, 1.0);
  s.f1_kind = MapKind::zero;
  s.f2_kind = MapKind::identity;
  s.lbar_kind = MapKind::zero;
  s.psi_kind = PsiKind::linear;
  s.psi_g = Vec::Unit(d, 0);
  return make_problem(s);
}

ControlProblem make_heat(int d) {
  FamilySpec s;
  s.family = "heat";
  s.d = s.dbar = d;
  s.gamma = 0.5;
  s.t_f = 1.0;
  s.a = Vec::Constant(d, -1.0);
  s.b = Vec::Constant(d, 1.0);
  s.f1_kind = MapKind::zero;
  s.f2_kind = MapKind::zero;
  s.lbar_kind = MapKind::zero;
  s.psi_kind = PsiKind::linear;
  s.psi_g = Vec::Unit(d, 0);
  s.R_override = 1.0;
  return make_problem(s);
}

ControlProblem make_cole_hopf(int d, double amp) {
  FamilySpec s;
  s.family = "colehopf";
  s.d = s.dbar = d;
  s.gamma = 0.5;
  s.t_f = 1.0;
  s.a = Vec::Constant(d, -4.0);
  s.b = Vec::Constant(d, 4.0);
  s.f1_kind = MapKind::zero;
  s.f2_kind = MapKind::identity;
  s.lbar_kind = MapKind::zero;
  s.psi_kind = PsiKind::bspline;
  s.psi_amp = amp;
  s.R_override = 1.0;
  return make_problem(s);
}

Vec optimal_control(const ControlProblem& prob, double t, const Vec& x,
                    const Vec& p) {
  check_point(prob, t, x, p);
  const Mat F2 = prob.f2(t, x);
  Vec u = -(F2.transpose() * p) / (2.0 * prob.gamma);
  for (int i = 0; i < prob.dbar; ++i)
    u[i] = std::clamp(u[i], prob.box_lo[i], prob.box_hi[i]);
  return u;
}

double hamiltonian(const ControlProblem& prob, double t, const Vec& x,
                   const Vec& p) {
  const Vec u = optimal_control(prob, t, x, p);
  const Vec f = prob.f1(t, x) + prob.f2(t, x) * u;
  return p.dot(f) + prob.lbar(t, x) + prob.gamma * u.squaredNorm();
}

Vec clip(const Vec& p, const TruncationLevel& R) {
  require_finite(p, "p");
  Vec out(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i)
    out[i] = std::clamp(p[i], -R.R, R.R);
  return out;
}

double truncated_hamiltonian(const ControlProblem& prob,
                             const TruncationLevel& R, double t, const Vec& x,
                             const Vec& p) {
  return hamiltonian(prob, t, x, clip(p, R));
}

double evaluate_gradient_bound(const GradientBoundInputs& in) {
  const BoundConstants& c = in.c;
  const double max_2sq = std::max(in.box_a_2sq, in.box_b_2sq);
  const double max_inf = std::max(in.box_a_inf, in.box_b_inf);
  const double c0 = c.sup_f1_2;
  const double vbound =
      std::exp(c0 * in.t_f) *
      (c.sup_psi + in.t_f * c.sup_lbar + in.gamma * max_2sq);
  const double c1 =
      0.25 + c.sup_f1_2 + c.sup_f2_2 * max_inf + c.lip_f1_2;
  return std::exp(c1 * in.t_f) *
         (c.sup_grad_psi_2 + in.t_f * vbound * (c.sup_f2_2 + c.lip_f2_2) +
          in.t_f * (c.sup_lbar + c.sup_grad_lbar_2) +
          in.gamma * max_2sq * max_inf);
}

TruncationLevel gradient_bound(const ControlProblem& prob) {
  if (!prob.bound_constants)
    throw std::runtime_error("gradient_bound: constants required");
  GradientBoundInputs in;
  in.c = *prob.bound_constants;
  in.gamma = prob.gamma;
  in.t_f = prob.t_f;
  in.box_a_2sq = prob.box_lo.squaredNorm();
  in.box_b_2sq = prob.box_hi.squaredNorm();
  in.box_a_inf = prob.box_lo.lpNorm<Eigen::Infinity>();
  in.box_b_inf = prob.box_hi.lpNorm<Eigen::Infinity>();
  const double R = evaluate_gradient_bound(in);
  if (!std::isfinite(R) || !(R > 0.0))
    throw std::runtime_error(
        "gradient_bound: constants required (family has unbounded or "
        "degenerate ingredients)");
  return TruncationLevel{R};
}

TruncationLevel effective_truncation(const ControlProblem& prob) {
  if (prob.R_override) {
    if (!(*prob.R_override > 0.0))
      throw std::invalid_argument("R_override must be > 0");
    return TruncationLevel{*prob.R_override};
  }
  return gradient_bound(prob);
}

std::pair<double, double> hamiltonian_lipschitz_estimate(
    const ControlProblem& prob, const TruncationLevel& R) {
  if (!prob.bound_constants)
    throw std::runtime_error("hamiltonian_lipschitz_estimate: constants required");
  const BoundConstants& c = *prob.bound_constants;
  const double mab_inf = std::max(prob.box_lo.lpNorm<Eigen::Infinity>(),
                                  prob.box_hi.lpNorm<Eigen::Infinity>());
  const double mab_2 = std::max(prob.box_lo.norm(), prob.box_hi.norm());
  const double p2 = std::sqrt(static_cast<double>(prob.d)) * R.R;

  // p-direction: term bounds of grad_p H, paired with |p - p'|_inf.
  const double cp =
      c.sup_f1_1 +
      mab_inf * c.sup_f2_1 * (1.0 + 1.0 / (2.0 * prob.gamma) + 0.5);

  // x-direction: the displayed Cbar with |p|_2 <= sqrt(d) R.
  const double cx =
      p2 * (c.sup_dxj_f1_2 +
            c.sup_dxj_f2_2 *
                (mab_2 + c.sup_f2_2 * p2 / (2.0 * prob.gamma))) +
      c.sup_grad_lbar_inf +
      c.sup_dxj_f2_2 * p2 / (2.0 * prob.gamma) * mab_2;

  if (!std::isfinite(cp) || !std::isfinite(cx))
    throw std::runtime_error(
        "hamiltonian_lipschitz_estimate: constants required");
  return {cx, cp};
}

double brute_force_hamiltonian(const ControlProblem& prob, double t,
                               const Vec& x, const Vec& p, int grid_n) {
  check_point(prob, t, x, p);
  if (grid_n < 2) throw std::invalid_argument("grid_n >= 2 required");
  const Vec base = prob.f1(t, x);
  const Mat F2 = prob.f2(t, x);
  const Vec slope = F2.transpose() * p;  // per-coordinate linear coefficient
  double h = p.dot(base) + prob.lbar(t, x);
  // The objective separates across control coordinates: each contributes
  // min over the 1-D grid of slope_i v + gamma v^2.
  for (int i = 0; i < prob.dbar; ++i) {
    const double lo = prob.box_lo[i], hi = prob.box_hi[i];
    const double step = (hi - lo) / (grid_n - 1);
    double best = kInf;
    for (int k = 0; k < grid_n; ++k) {
      const double v = lo + step * k;
      best = std::min(best, slope[i] * v + prob.gamma * v * v);
    }
    h += best;
  }
  return h;
}

Vec f2_column_norm_sup(const ControlProblem& prob) {
  const FamilySpec& s = prob.spec;
  Vec out = Vec::Zero(prob.dbar);
  switch (s.f2_kind) {
    case MapKind::zero:
      break;
    case MapKind::identity:
      out.setOnes();
      break;
    case MapKind::constant: {
      const Mat F = prob.f2(0.0, Vec::Zero(prob.d));
      for (int i = 0; i < prob.dbar; ++i) out[i] = F.col(i).lpNorm<1>();
      break;
    }
    case MapKind::affine: {
      for (int i = 0; i < prob.dbar; ++i) {
        double acc = 0.0;
        for (int j = 0; j < prob.d; ++j) {
          const int r = j * prob.dbar + i;  // row-major (j,i) entry of f2
          const Eigen::RowVectorXd row = s.f2_A.row(r);
          acc += affine_row_sup(row, s.f2_c[r], s.t_f, s.x_envelope);
        }
        out[i] = acc;
      }
      break;
    }
  }
  return out;
}

}  // namespace hjb
