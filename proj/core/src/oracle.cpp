#include "hjbkit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hjbkit/parallel.hpp"
#include "hjbkit/rng.hpp"

namespace hjb {

namespace {

constexpr int kChunks = 64;

bool map_is_zero(MapKind k, const Vec& c, const Mat& A) {
  if (k == MapKind::zero) return true;
  if (k == MapKind::constant) return c.size() == 0 || c.isZero(0.0);
  if (k == MapKind::affine) return A.isZero(0.0) && c.isZero(0.0);
  return false;
}

bool f2_is_identity(const ControlProblem& prob) {
  const FamilySpec& s = prob.spec;
  if (prob.d != prob.dbar) return false;
  if (s.f2_kind == MapKind::identity) return true;
  if (s.f2_kind == MapKind::constant) {
    const Mat F = prob.f2(0.0, Vec::Zero(prob.d));
    return F.isIdentity(0.0);
  }
  return false;
}

bool lbar_is_zero(const ControlProblem& prob) {
  const FamilySpec& s = prob.spec;
  return s.lbar_kind == MapKind::zero ||
         (s.lbar_kind == MapKind::constant && s.lbar_c == 0.0) ||
         (s.lbar_kind == MapKind::affine && s.lbar_g.isZero(0.0) &&
          s.lbar_c == 0.0);
}

double batch_stderr(const std::vector<double>& batch_means) {
  const int c = static_cast<int>(batch_means.size());
  double mean = 0.0;
  for (double v : batch_means) mean += v;
  mean /= c;
  double var = 0.0;
  for (double v : batch_means) var += (v - mean) * (v - mean);
  var /= (c - 1);
  return std::sqrt(var / c);
}

}  // namespace

std::pair<bool, std::string> oracle_validity_check(const ControlProblem& prob,
                                                   const TruncationLevel& R) {
  const Vec col = f2_column_norm_sup(prob);
  if (!col.allFinite())
    return {false, "f2 column norms unbounded on the envelope"};
  for (int i = 0; i < prob.dbar; ++i) {
    const double r = R.R * col[i] / (2.0 * prob.gamma);
    if (!(prob.box_lo[i] <= -r && r <= prob.box_hi[i]))
      return {false, "clamp can activate at control coordinate " +
                         std::to_string(i) + " (needs radius " +
                         std::to_string(r) + ")"};
  }
  return {true, "interior regime: clamp never activates"};
}

OracleResult cole_hopf_value(const ControlProblem& prob, double t, const Vec& x,
                             std::int64_t mc_samples, std::uint64_t seed,
                             int threads) {
  OracleResult out;
  out.gradient = Vec::Zero(prob.d);
  out.gradient_stderr = Vec::Zero(prob.d);
  const FamilySpec& s = prob.spec;
  if (!map_is_zero(s.f1_kind, s.f1_c, s.f1_A) || !f2_is_identity(prob) ||
      !lbar_is_zero(prob)) {
    out.reason = "ineligible family: needs f1 = 0, f2 = I, lbar = 0";
    return out;
  }
  const auto [ok, why] = oracle_validity_check(prob, effective_truncation(prob));
  if (!ok) {
    out.reason = "validity check failed: " + why;
    return out;
  }
  if (x.size() != prob.d) throw std::invalid_argument("cole_hopf: bad x");
  if (!(t >= 0.0 && t <= prob.t_f))
    throw std::invalid_argument("cole_hopf: t outside [0, t_f]");

  const double g2 = 2.0 * prob.gamma;
  const double sig = std::sqrt(prob.t_f - t);
  if (sig == 0.0) {
    out.value = prob.psi(x);
    out.gradient = prob.psi_grad(x);
    out.valid = true;
    out.reason = "terminal time: exact";
    return out;
  }

  const std::int64_t per = std::max<std::int64_t>(2, mc_samples / kChunks);
  struct Chunk {
    double sw = 0.0;
    Vec swg;
  };
  std::vector<Chunk> chunks(kChunks);
  parallel_for(kChunks, threads, [&](std::int64_t c) {
    RngStream rng = derive_stream(seed, "cole-hopf", static_cast<std::uint64_t>(c));
    Chunk acc{0.0, Vec::Zero(prob.d)};
    Vec z(prob.d);
    for (std::int64_t k = 0; k < per; ++k) {
      rng.fill_gaussian(z);
      const Vec y = x + sig * z;
      const double w = std::exp(-prob.psi(y) / g2);
      acc.sw += w;
      acc.swg += w * prob.psi_grad(y);
    }
    chunks[static_cast<std::size_t>(c)] = std::move(acc);
  });

  double sw = 0.0;
  Vec swg = Vec::Zero(prob.d);
  std::vector<double> vb(kChunks);
  Mat gb(kChunks, prob.d);
  for (int c = 0; c < kChunks; ++c) {
    sw += chunks[c].sw;
    swg += chunks[c].swg;
    vb[c] = -g2 * std::log(chunks[c].sw / per);
    gb.row(c) = (chunks[c].swg / chunks[c].sw).transpose();
  }
  out.value = -g2 * std::log(sw / (per * kChunks));
  out.gradient = swg / sw;
  out.stderr_ = batch_stderr(vb);
  for (int j = 0; j < prob.d; ++j) {
    std::vector<double> col(kChunks);
    for (int c = 0; c < kChunks; ++c) col[c] = gb(c, j);
    out.gradient_stderr[j] = batch_stderr(col);
  }
  out.valid = true;
  out.reason = "ok";
  return out;
}

OracleResult heat_value(const ControlProblem& prob, double t, const Vec& x,
                        std::int64_t mc_samples, std::uint64_t seed,
                        int threads) {
  OracleResult out;
  out.gradient = Vec::Zero(prob.d);
  out.gradient_stderr = Vec::Zero(prob.d);
  const FamilySpec& s = prob.spec;
  const bool zero_h = map_is_zero(s.f1_kind, s.f1_c, s.f1_A) &&
                      map_is_zero(s.f2_kind, s.f2_c, s.f2_A) &&
                      lbar_is_zero(prob) &&
                      (prob.box_lo.array() <= 0.0).all() &&
                      (prob.box_hi.array() >= 0.0).all();
  if (!zero_h) {
    out.reason = "ineligible family: needs f1 = f2 = lbar = 0 and 0 in U";
    return out;
  }
  if (x.size() != prob.d) throw std::invalid_argument("heat_value: bad x");
  const double sig = std::sqrt(prob.t_f - t);
  if (sig == 0.0) {
    out.value = prob.psi(x);
    out.gradient = prob.psi_grad(x);
    out.valid = true;
    out.reason = "terminal time: exact";
    return out;
  }

  const std::int64_t per = std::max<std::int64_t>(2, mc_samples / kChunks);
  struct Chunk {
    double sv = 0.0;
    Vec sg;
  };
  std::vector<Chunk> chunks(kChunks);
  const double psi_x = prob.psi(x);
  parallel_for(kChunks, threads, [&](std::int64_t c) {
    RngStream rng = derive_stream(seed, "heat", static_cast<std::uint64_t>(c));
    Chunk acc{0.0, Vec::Zero(prob.d)};
    Vec z(prob.d);
    for (std::int64_t k = 0; k < per; ++k) {
      rng.fill_gaussian(z);
      const double v = prob.psi(x + sig * z);
      acc.sv += v;
      acc.sg += ((v - psi_x) / sig) * z;
    }
    chunks[static_cast<std::size_t>(c)] = std::move(acc);
  });

  double sv = 0.0;
  Vec sg = Vec::Zero(prob.d);
  std::vector<double> vb(kChunks);
  Mat gbm(kChunks, prob.d);
  for (int c = 0; c < kChunks; ++c) {
    sv += chunks[c].sv;
    sg += chunks[c].sg;
    vb[c] = chunks[c].sv / per;
    gbm.row(c) = (chunks[c].sg / per).transpose();
  }
  const std::int64_t total = per * kChunks;
  out.value = sv / total;
  out.gradient = sg / total;
  out.stderr_ = batch_stderr(vb);
  for (int j = 0; j < prob.d; ++j) {
    std::vector<double> col(kChunks);
    for (int c = 0; c < kChunks; ++c) col[c] = gbm(c, j);
    out.gradient_stderr[j] = batch_stderr(col);
  }
  out.valid = true;
  out.reason = "ok";
  return out;
}

std::pair<Vec, Vec> gauss_hermite(int n) {
  // Golub-Welsch on the Hermite Jacobi matrix (off-diagonal sqrt(k/2)).
  Mat J = Mat::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(k / 2.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(J);
  Vec nodes = es.eigenvalues();
  Vec weights(n);
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  for (int k = 0; k < n; ++k) {
    const double v0 = es.eigenvectors()(0, k);
    weights[k] = sqrt_pi * v0 * v0;
  }
  return {nodes, weights};
}

namespace {

// E[psi(x + sqrt(tau) Z)] for the 1-D terminal condition, by Gauss-Hermite.
double heat_of_psi_1d(const ControlProblem& prob, double x, double tau,
                      const Vec& nodes, const Vec& weights) {
  if (tau <= 0.0) {
    Vec xx(1);
    xx[0] = x;
    return prob.psi(xx);
  }
  const double s = std::sqrt(2.0 * tau);
  double acc = 0.0;
  Vec xx(1);
  for (int k = 0; k < nodes.size(); ++k) {
    xx[0] = x + s * nodes[k];
    acc += weights[k] * prob.psi(xx);
  }
  return acc / std::sqrt(std::numbers::pi);
}

// Solves the tridiagonal system (lo, di, up) w = rhs in place.
void thomas_solve(std::vector<double>& lo, std::vector<double>& di,
                  std::vector<double>& up, std::vector<double>& rhs) {
  const std::size_t n = di.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = lo[i] / di[i - 1];
    di[i] -= m * up[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= di[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    rhs[i] = (rhs[i] - up[i] * rhs[i + 1]) / di[i];
}

struct StepData {
  const ControlProblem* prob;
  const Vec* gh_nodes;
  const Vec* gh_weights;
};

// Explicit Hamiltonian term H(t, x_i, D1 W) on the interior nodes.
std::vector<double> hterm(const ControlProblem& prob, double t,
                          const std::vector<double>& w, double x_lo,
                          double dx) {
  const std::size_t n = w.size();
  std::vector<double> h(n, 0.0);
  Vec xx(1), pp(1);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    xx[0] = x_lo + dx * static_cast<double>(i);
    pp[0] = (w[i + 1] - w[i - 1]) / (2.0 * dx);
    h[i] = hamiltonian(prob, t, xx, pp);
  }
  return h;
}

// One backward solve; slices[j] holds V(t_f - j dt, .).
std::vector<std::vector<double>> backward_solve(const ControlProblem& prob,
                                                int nx, int nt, double x_lo,
                                                double x_hi, const Vec& ghn,
                                                const Vec& ghw) {
  const double tf = prob.t_f;
  const double dx = (x_hi - x_lo) / (nx - 1);
  const double dt = tf / nt;
  const double kappa = 0.25 * dt / (dx * dx);  // CN coefficient of 1/2 dxx

  std::vector<std::vector<double>> slices(nt + 1,
                                          std::vector<double>(nx, 0.0));
  Vec xx(1);
  for (int i = 0; i < nx; ++i) {
    xx[0] = x_lo + dx * i;
    slices[0][i] = prob.psi(xx);
  }

  std::vector<double> h_prev;  // H-term at the previous slice
  for (int j = 0; j < nt; ++j) {
    const double t_cur = tf - dt * j;
    const double t_new = tf - dt * (j + 1);
    const std::vector<double>& w = slices[j];
    std::vector<double> h_cur = hterm(prob, t_cur, w, x_lo, dx);

    // AB2 extrapolation to the step midpoint; trapezoidal bootstrap on the
    // first step keeps second order.
    std::vector<double> h_mid(nx, 0.0);
    if (j == 0) {
      // predictor: full explicit step
      std::vector<double> pred(nx);
      for (int i = 1; i + 1 < nx; ++i) {
        const double lap = (w[i + 1] - 2.0 * w[i] + w[i - 1]) / (dx * dx);
        pred[i] = w[i] + dt * (0.5 * lap + h_cur[i]);
      }
      pred[0] = heat_of_psi_1d(prob, x_lo, tf - t_new, ghn, ghw);
      pred[nx - 1] = heat_of_psi_1d(prob, x_hi, tf - t_new, ghn, ghw);
      std::vector<double> h_pred = hterm(prob, t_new, pred, x_lo, dx);
      for (int i = 0; i < nx; ++i) h_mid[i] = 0.5 * (h_cur[i] + h_pred[i]);
    } else {
      for (int i = 0; i < nx; ++i)
        h_mid[i] = 1.5 * h_cur[i] - 0.5 * h_prev[i];
    }

    // (I - kappa D2) w_new = (I + kappa D2) w + dt h_mid, Dirichlet ends.
    std::vector<double> lo(nx, -kappa), di(nx, 1.0 + 2.0 * kappa),
        up(nx, -kappa), rhs(nx, 0.0);
    for (int i = 1; i + 1 < nx; ++i)
      rhs[i] = w[i] + kappa * (w[i + 1] - 2.0 * w[i] + w[i - 1]) +
               dt * h_mid[i];
    di[0] = di[nx - 1] = 1.0;
    up[0] = lo[nx - 1] = 0.0;
    lo[0] = up[nx - 1] = 0.0;
    rhs[0] = heat_of_psi_1d(prob, x_lo, tf - t_new, ghn, ghw);
    rhs[nx - 1] = heat_of_psi_1d(prob, x_hi, tf - t_new, ghn, ghw);
    thomas_solve(lo, di, up, rhs);
    slices[j + 1] = std::move(rhs);
    h_prev = std::move(h_cur);
  }
  return slices;
}

}  // namespace

double Fd1dSolution::Slices::interp(double t, double x, double tf,
                                    bool gradient) const {
  // index j runs from t_f down to 0
  const double jr = (tf - t) / dt;
  const int j0 = std::clamp(static_cast<int>(std::floor(jr)), 0, nt - 1);
  const double wt = jr - j0;
  auto eval_slice = [&](int j) {
    const std::vector<double>& w = v[static_cast<std::size_t>(j)];
    const double ir = (x - x_lo) / dx;
    const int i0 = std::clamp(static_cast<int>(std::floor(ir)), 1, nx - 3);
    const double wx = ir - i0;
    if (!gradient) return (1.0 - wx) * w[i0] + wx * w[i0 + 1];
    const double g0 = (w[i0 + 1] - w[i0 - 1]) / (2.0 * dx);
    const double g1 = (w[i0 + 2] - w[i0]) / (2.0 * dx);
    return (1.0 - wx) * g0 + wx * g1;
  };
  return (1.0 - wt) * eval_slice(j0) + wt * eval_slice(j0 + 1);
}

OracleResult Fd1dSolution::at(double t, double x) const {
  OracleResult out;
  out.gradient = Vec::Zero(1);
  out.gradient_stderr = Vec::Zero(1);
  if (!(t >= 0.0 && t <= t_f_)) {
    out.reason = "query time outside [0, t_f]";
    return out;
  }
  const double lo = full_.x_lo + margin_;
  const double hi = full_.x_lo + full_.dx * (full_.nx - 1) - margin_;
  if (!(x >= lo && x <= hi)) {
    out.reason = "query outside the safe interior";
    return out;
  }
  out.value = full_.interp(t, x, t_f_, false);
  out.gradient[0] = full_.interp(t, x, t_f_, true);
  const double vh = half_.interp(t, x, t_f_, false);
  out.stderr_ = std::abs(out.value - vh);
  out.gradient_stderr[0] =
      std::abs(out.gradient[0] - half_.interp(t, x, t_f_, true));
  out.valid = true;
  out.reason = cfl_warning_ ? "ok (explicit-term budget exceeded)" : "ok";
  return out;
}

Fd1dSolution fd_solve_1d(const ControlProblem& prob, const FdGrid& grid) {
  if (prob.d != 1 || prob.dbar != 1)
    throw std::invalid_argument("fd_solve_1d: requires d = dbar = 1");
  if (grid.nx < 9 || grid.nx % 2 == 0)
    throw std::invalid_argument("fd_solve_1d: nx must be odd and >= 9");
  if (!(grid.x_hi > grid.x_lo))
    throw std::invalid_argument("fd_solve_1d: empty x range");

  const double dx = (grid.x_hi - grid.x_lo) / (grid.nx - 1);
  // Advection speed bound |dH/dp| <= sup|f1| + sup|f2| max|box|.
  double speed = 1.0;
  bool speed_known = false;
  if (prob.bound_constants) {
    const BoundConstants& c = *prob.bound_constants;
    const double mab = std::max(prob.box_lo.lpNorm<Eigen::Infinity>(),
                                prob.box_hi.lpNorm<Eigen::Infinity>());
    const double s = c.sup_f1_2 + c.sup_f2_2 * mab;
    if (std::isfinite(s)) {
      speed = std::max(s, 1e-3);
      speed_known = true;
    }
  }
  int nt = grid.nt;
  if (nt <= 0)
    nt = std::max(64, static_cast<int>(std::ceil(prob.t_f * speed /
                                                 (0.25 * dx))));
  if (nt % 2 != 0) ++nt;

  Fd1dSolution sol;
  sol.t_f_ = prob.t_f;
  sol.margin_ = 4.0 * std::sqrt(prob.t_f);
  sol.nx_ = grid.nx;
  sol.nt_ = nt;
  sol.cfl_warning_ =
      !speed_known || (prob.t_f / nt) * speed / dx > 0.25 + 1e-12;

  auto [ghn, ghw] = gauss_hermite(64);

  sol.full_.nx = grid.nx;
  sol.full_.nt = nt;
  sol.full_.x_lo = grid.x_lo;
  sol.full_.dx = dx;
  sol.full_.dt = prob.t_f / nt;
  sol.full_.v = backward_solve(prob, grid.nx, nt, grid.x_lo, grid.x_hi, ghn, ghw);

  const int hx = (grid.nx - 1) / 2 + 1;
  const int ht = nt / 2;
  sol.half_.nx = hx;
  sol.half_.nt = ht;
  sol.half_.x_lo = grid.x_lo;
  sol.half_.dx = (grid.x_hi - grid.x_lo) / (hx - 1);
  sol.half_.dt = prob.t_f / ht;
  sol.half_.v = backward_solve(prob, hx, ht, grid.x_lo, grid.x_hi, ghn, ghw);
  return sol;
}

}  // namespace hjb
