#include "hjbkit/hamnet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hjbkit/parallel.hpp"
#include "hjbkit/rng.hpp"

namespace hjb {

namespace {

// One dataflow stage: every block reads an affine image of the current
// state, passthrough channels ride along unchanged; the new state is
// [block outputs..., passthrough].
struct StageBlock {
  NeuralNet net;
  SpMat pre;  // rows = net.input_dim(), cols = state_dim
};

NeuralNet stage_net(int state_dim, std::vector<StageBlock> blocks,
                    const std::vector<int>& passthrough) {
  std::vector<NeuralNet> nets;
  std::vector<const SpMat*> pres;
  nets.reserve(blocks.size() + 1);
  for (StageBlock& blk : blocks) {
    if (blk.pre.cols() != state_dim || blk.pre.rows() != blk.net.input_dim())
      throw std::logic_error("stage_net: block wiring mismatch");
    nets.push_back(std::move(blk.net));
  }
  SpMat pass_sel(static_cast<int>(passthrough.size()), state_dim);
  if (!passthrough.empty()) {
    std::vector<Triplet> t;
    t.reserve(passthrough.size());
    for (std::size_t r = 0; r < passthrough.size(); ++r)
      t.emplace_back(static_cast<int>(r), passthrough[r], 1.0);
    pass_sel.setFromTriplets(t.begin(), t.end());
    nets.push_back(affine_net(
        SpMat(Mat::Identity(static_cast<int>(passthrough.size()),
                            static_cast<int>(passthrough.size()))
                  .sparseView()),
        Vec::Zero(static_cast<int>(passthrough.size()))));
  }
  NeuralNet stacked = parallelize(nets);

  int rows = 0;
  for (const StageBlock& blk : blocks) rows += static_cast<int>(blk.pre.rows());
  rows += static_cast<int>(pass_sel.rows());
  std::vector<Triplet> trips;
  int off = 0;
  for (const StageBlock& blk : blocks) {
    for (int r = 0; r < blk.pre.outerSize(); ++r)
      for (SpMat::InnerIterator it(blk.pre, r); it; ++it)
        trips.emplace_back(off + static_cast<int>(it.row()),
                           static_cast<int>(it.col()), it.value());
    off += static_cast<int>(blk.pre.rows());
  }
  for (int r = 0; r < pass_sel.outerSize(); ++r)
    for (SpMat::InnerIterator it(pass_sel, r); it; ++it)
      trips.emplace_back(off + static_cast<int>(it.row()),
                         static_cast<int>(it.col()), it.value());
  SpMat pre(rows, state_dim);
  pre.setFromTriplets(trips.begin(), trips.end());
  return affine_precompose(stacked, pre, Vec::Zero(rows));
}

SpMat selection(const std::vector<int>& idx, int cols) {
  std::vector<Triplet> t;
  t.reserve(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r)
    t.emplace_back(static_cast<int>(r), idx[r], 1.0);
  SpMat s(static_cast<int>(idx.size()), cols);
  s.setFromTriplets(t.begin(), t.end());
  return s;
}

std::vector<int> iota_vec(int from, int count) {
  std::vector<int> v(count);
  for (int i = 0; i < count; ++i) v[i] = from + i;
  return v;
}

NeuralNet component_net(MapKind kind, const Mat& A, const Vec& c, int out_dim,
                        int d) {
  switch (kind) {
    case MapKind::zero:
      return zero_net(1 + d, out_dim);
    case MapKind::constant:
      return affine_net(SpMat(out_dim, 1 + d), c);
    case MapKind::identity: {
      // row-major vec of I_d as a constant output
      Vec b = Vec::Zero(out_dim);
      for (int i = 0; i < d; ++i) b[i * d + i] = 1.0;
      return affine_net(SpMat(out_dim, 1 + d), b);
    }
    case MapKind::affine:
      return affine_net(A, c);
  }
  throw std::logic_error("unreachable");
}

double map_sup_inf(MapKind kind, const Mat& A, const Vec& c, double tf,
                   double env) {
  switch (kind) {
    case MapKind::zero:
      return 0.0;
    case MapKind::constant:
      return c.size() ? c.lpNorm<Eigen::Infinity>() : 0.0;
    case MapKind::identity:
      return 1.0;
    case MapKind::affine: {
      double s = 0.0;
      for (int r = 0; r < A.rows(); ++r) {
        double acc = std::max(std::abs(c[r]), std::abs(c[r] + A(r, 0) * tf));
        for (int j = 1; j < A.cols(); ++j) acc += std::abs(A(r, j)) * env;
        s = std::max(s, acc);
      }
      return s;
    }
  }
  throw std::logic_error("unreachable");
}

double map_sup_one(MapKind kind, const Mat& A, const Vec& c, double tf,
                   double env, int d) {
  switch (kind) {
    case MapKind::zero:
      return 0.0;
    case MapKind::constant:
      return c.lpNorm<1>();
    case MapKind::identity:
      return static_cast<double>(d);
    case MapKind::affine: {
      double s = 0.0;
      for (int r = 0; r < A.rows(); ++r) {
        double acc = std::max(std::abs(c[r]), std::abs(c[r] + A(r, 0) * tf));
        for (int j = 1; j < A.cols(); ++j) acc += std::abs(A(r, j)) * env;
        s += acc;
      }
      return s;
    }
  }
  throw std::logic_error("unreachable");
}

// 1-norm-to-1-norm Lipschitz constant in x of an affine (t,x) map: the
// largest column 1-norm over the x columns.
double affine_lip_x(MapKind kind, const Mat& A, int d) {
  if (kind != MapKind::affine) return 0.0;
  double s = 0.0;
  for (int j = 0; j < d; ++j) s = std::max(s, A.col(1 + j).lpNorm<1>());
  return s;
}

}  // namespace

ProblemNets build_problem_nets(const ControlProblem& prob) {
  const FamilySpec& s = prob.spec;
  const int d = prob.d, dbar = prob.dbar;
  ProblemNets pn;
  pn.x_envelope = s.x_envelope;
  pn.f1 = component_net(s.f1_kind, s.f1_A, s.f1_c, d, d);
  pn.f2 = component_net(s.f2_kind, s.f2_A, s.f2_c, d * dbar, d);
  if (s.lbar_kind == MapKind::zero) {
    pn.lbar = zero_net(1 + d, 1);
  } else if (s.lbar_kind == MapKind::constant) {
    pn.lbar = affine_net(SpMat(1, 1 + d), Vec::Constant(1, s.lbar_c));
  } else {
    Mat A(1, 1 + d);
    A.row(0) = s.lbar_g.transpose();
    pn.lbar = affine_net(A, Vec::Constant(1, s.lbar_c));
  }
  if (s.psi_kind == PsiKind::linear) {
    Mat A(1, d);
    A.row(0) = s.psi_g.transpose();
    pn.psi = affine_net(A, Vec::Constant(1, s.psi_c));
    pn.lip_psi_x = s.psi_g.lpNorm<Eigen::Infinity>();
  } else {
    // psi(x) = (amp/d) sum_i B(x_i) with the cardinal decomposition
    // B(x) = [s3(x+2) - 4 s3(x+1) + 6 s3(x) - 4 s3(x-1) + s3(x-2)] / 6.
    static const double kKnots[5] = {2.0, 1.0, 0.0, -1.0, -2.0};
    static const double kCoef[5] = {1.0, -4.0, 6.0, -4.0, 1.0};
    std::vector<Triplet> a1;
    Vec b1(5 * d);
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < 5; ++k) {
        a1.emplace_back(5 * i + k, i, 1.0);
        b1[5 * i + k] = kKnots[k];
      }
    SpMat A1(5 * d, d);
    A1.setFromTriplets(a1.begin(), a1.end());
    Mat A2 = Mat::Zero(1, 5 * d);
    const double scale = s.psi_amp / (6.0 * d);
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < 5; ++k) A2(0, 5 * i + k) = scale * kCoef[k];
    pn.psi = NeuralNet({Layer{A1, b1, Act::recu},
                        Layer{SpMat(A2.sparseView()), Vec::Zero(1), Act::linear}});
    pn.lip_psi_x = std::abs(s.psi_amp) / d * (2.0 / 3.0);
  }
  pn.lip_f1_x = affine_lip_x(s.f1_kind, s.f1_A, d);
  pn.lip_f2_x = affine_lip_x(s.f2_kind, s.f2_A, d);
  pn.lip_lbar_x = s.lbar_kind == MapKind::affine
                      ? s.lbar_g.tail(d).lpNorm<Eigen::Infinity>()
                      : 0.0;
  pn.sup_f1_inf = map_sup_inf(s.f1_kind, s.f1_A, s.f1_c, s.t_f, s.x_envelope);
  pn.sup_f2_inf = map_sup_inf(s.f2_kind, s.f2_A, s.f2_c, s.t_f, s.x_envelope);
  pn.sup_f2_one =
      map_sup_one(s.f2_kind, s.f2_A, s.f2_c, s.t_f, s.x_envelope, d);
  switch (s.f2_kind) {
    case MapKind::zero:
      pn.sup_f2_row_one = 0.0;
      break;
    case MapKind::identity:
      pn.sup_f2_row_one = 1.0;
      break;
    case MapKind::constant: {
      // f2_c stores the entries row-major (d rows of dbar entries)
      for (int i = 0; i < d; ++i)
        pn.sup_f2_row_one = std::max(
            pn.sup_f2_row_one, s.f2_c.segment(i * dbar, dbar).lpNorm<1>());
      break;
    }
    case MapKind::affine: {
      for (int i = 0; i < d; ++i) {
        double acc = 0.0;
        for (int j = 0; j < dbar; ++j) {
          const int r = i * dbar + j;
          double entry = std::max(std::abs(s.f2_c[r]),
                                  std::abs(s.f2_c[r] + s.f2_A(r, 0) * s.t_f));
          for (int m = 1; m < s.f2_A.cols(); ++m)
            entry += std::abs(s.f2_A(r, m)) * s.x_envelope;
          acc += entry;
        }
        pn.sup_f2_row_one = std::max(pn.sup_f2_row_one, acc);
      }
      break;
    }
  }
  return pn;
}

HamiltonianNetBuild build_hamiltonian_net(const ProblemNets& pnets,
                                          const ControlProblem& prob,
                                          const TruncationLevel& R,
                                          double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("build_hamiltonian_net: delta outside (0,1)");
  const int d = prob.d, dbar = prob.dbar;
  if (pnets.f1.output_dim() != d || pnets.f2.output_dim() != d * dbar ||
      pnets.lbar.output_dim() != 1)
    throw std::invalid_argument("build_hamiltonian_net: component shape mismatch");
  const double g2 = 2.0 * prob.gamma;

  Vec mx(dbar);
  for (int i = 0; i < dbar; ++i)
    mx[i] = std::max(std::abs(prob.box_lo[i]), std::abs(prob.box_hi[i]));
  const double mx_inf = mx.lpNorm<Eigen::Infinity>();

  // Product range: every value entering a prod/sq block stays below it.
  const double range =
      std::max({R.R, pnets.sup_f2_inf, mx_inf,
                pnets.sup_f1_inf + pnets.sup_f2_row_one * mx_inf + 1.0, 1.0});

  // Tolerance split: worst-case assembly of the block errors, so the
  // emitted net meets |phi_H - H_R| <= delta outright for exact components.
  const double sd = std::sqrt(static_cast<double>(d));
  const double f2n2 = pnets.sup_f2_inf * sd * std::sqrt(static_cast<double>(dbar));
  const double e_u = d / g2;  // |u - u~|_inf <= e_u * delta_prod
  const double split =
      sd * R.R * f2n2 * std::sqrt(static_cast<double>(dbar)) * e_u  // f2 (u-u~)
      + sd * R.R * sd * dbar                                        // matvec(d,dbar)
      + d                                                           // final dot
      + d * mx.sum()                                                // |u|^2 - |u~|^2
      + prob.gamma * mx.squaredNorm();                              // sq blocks
  const double dp = delta / std::max(1.0, split);
  const double dsq = dp;
  const int m_sq = sq_depth_for(dsq);

  HamiltonianNetBuild out;
  out.delta = delta;
  out.range = range;
  out.delta_prod = dp;
  out.delta_sq = dsq;
  out.sq_depth = m_sq;

  const int in_dim = 1 + 2 * d;
  const std::vector<int> tx_idx = iota_vec(0, 1 + d);
  const std::vector<int> p_idx = iota_vec(1 + d, d);

  // Stage 0: state = [F1(d), F2(d*dbar), LB(1), CP(d)]
  NeuralNet state;
  {
    std::vector<StageBlock> blocks;
    blocks.push_back({pnets.f1, selection(tx_idx, in_dim)});
    blocks.push_back({pnets.f2, selection(tx_idx, in_dim)});
    blocks.push_back({pnets.lbar, selection(tx_idx, in_dim)});
    blocks.push_back({clip_net(R.R, d), selection(p_idx, in_dim)});
    state = stage_net(in_dim, std::move(blocks), {});
  }
  int sdim = state.output_dim();
  const int F1 = 0, F2 = d, LB = d + d * dbar, CP = LB + 1;

  // Stage 1: U0 = matvec(f2^T, chi_R(p)); state = [U0(dbar), F1, F2, LB, CP]
  {
    std::vector<int> wire;
    wire.reserve(dbar * d + d);
    for (int i = 0; i < dbar; ++i)
      for (int j = 0; j < d; ++j) wire.push_back(F2 + j * dbar + i);  // (f2^T)_ij
    for (int j = 0; j < d; ++j) wire.push_back(CP + j);
    std::vector<StageBlock> blocks;
    blocks.push_back(
        {matvec_net(dbar, d, range, dp), selection(wire, sdim)});
    std::vector<int> pass = iota_vec(0, sdim);
    state = compose(stage_net(sdim, std::move(blocks), pass), state);
  }
  sdim = state.output_dim();
  const int U0 = 0, F1b = dbar + F1, F2b = dbar + F2, LBb = dbar + LB,
            CPb = dbar + CP;

  // Stage 2: UR = clamp(-U0 / (2 gamma)); state = [UR(dbar), F1, F2, LB, CP]
  {
    SpMat pre = selection(iota_vec(U0, dbar), sdim) * (-1.0 / g2);
    std::vector<StageBlock> blocks;
    blocks.push_back({clamp_net(prob.box_lo, prob.box_hi), pre});
    std::vector<int> pass;
    for (int i = 0; i < d; ++i) pass.push_back(F1b + i);
    for (int i = 0; i < d * dbar; ++i) pass.push_back(F2b + i);
    pass.push_back(LBb);
    for (int i = 0; i < d; ++i) pass.push_back(CPb + i);
    state = compose(stage_net(sdim, std::move(blocks), pass), state);
  }
  sdim = state.output_dim();
  const int UR = 0, F1c = dbar, F2c = F1c + d, LBc = F2c + d * dbar,
            CPc = LBc + 1;

  // Stage 3: MV = matvec(f2, u~), AU_i = |u~_i| / mx_i;
  // state = [MV(d), AU(dbar), F1, LB, CP]
  {
    std::vector<int> wire;
    for (int k = 0; k < d * dbar; ++k) wire.push_back(F2c + k);
    for (int i = 0; i < dbar; ++i) wire.push_back(UR + i);
    std::vector<StageBlock> blocks;
    blocks.push_back({matvec_net(d, dbar, range, dp), selection(wire, sdim)});

    Mat absA(2 * dbar, dbar);
    absA.setZero();
    for (int i = 0; i < dbar; ++i) {
      absA(2 * i, i) = 1.0;
      absA(2 * i + 1, i) = -1.0;
    }
    Mat absO = Mat::Zero(dbar, 2 * dbar);
    for (int i = 0; i < dbar; ++i) {
      absO(i, 2 * i) = 1.0 / mx[i];
      absO(i, 2 * i + 1) = 1.0 / mx[i];
    }
    NeuralNet abs_net(
        {Layer{SpMat(absA.sparseView()), Vec::Zero(2 * dbar), Act::relu},
         Layer{SpMat(absO.sparseView()), Vec::Zero(dbar), Act::linear}});
    blocks.push_back({abs_net, selection(iota_vec(UR, dbar), sdim)});

    std::vector<int> pass;
    for (int i = 0; i < d; ++i) pass.push_back(F1c + i);
    pass.push_back(LBc);
    for (int i = 0; i < d; ++i) pass.push_back(CPc + i);
    state = compose(stage_net(sdim, std::move(blocks), pass), state);
  }
  sdim = state.output_dim();
  const int MV = 0, AU = d, F1d = AU + dbar, LBd = F1d + d, CPd = LBd + 1;

  // Stage 4: DOT = matvec(chi_R(p)^T, F1 + MV), SQ_i = sq(AU_i);
  // state = [DOT(1), SQ(dbar), LB]
  {
    std::vector<Triplet> trips;
    for (int j = 0; j < d; ++j) trips.emplace_back(j, CPd + j, 1.0);
    for (int j = 0; j < d; ++j) {
      trips.emplace_back(d + j, F1d + j, 1.0);
      trips.emplace_back(d + j, MV + j, 1.0);
    }
    SpMat dot_pre(2 * d, sdim);
    dot_pre.setFromTriplets(trips.begin(), trips.end());

    std::vector<StageBlock> blocks;
    blocks.push_back({matvec_net(1, d, range, dp), dot_pre});
    std::vector<NeuralNet> sqs(dbar, sq_net(m_sq));
    blocks.push_back({parallelize(sqs), selection(iota_vec(AU, dbar), sdim)});
    state = compose(stage_net(sdim, std::move(blocks), {LBd}), state);
  }

  // Output: DOT + gamma sum_i mx_i^2 SQ_i + LB
  Mat outrow = Mat::Zero(1, 2 + dbar);
  outrow(0, 0) = 1.0;
  for (int i = 0; i < dbar; ++i) outrow(0, 1 + i) = prob.gamma * mx[i] * mx[i];
  outrow(0, 1 + dbar) = 1.0;
  out.net = affine_postcompose(outrow, Vec::Zero(1), state);

  // Lipschitz upper bounds along the chain (1-norms); matvec blocks have
  // constant 4M (|dA|_1 + m |db|_1), sq blocks constant 2.
  {
    const double M4 = 4.0 * range;
    const double u_p = M4 * dbar / g2;
    const double u_x = M4 * pnets.lip_f2_x / g2;
    const double mv2_x = M4 * (pnets.lip_f2_x + d * u_x);
    const double mv2_p = M4 * d * u_p;
    const double inner_x = pnets.lip_f1_x + mv2_x;
    const double inner_p = mv2_p;
    const double dot_x = M4 * inner_x;
    const double dot_p = M4 * (1.0 + inner_p);
    const double sq_x = 2.0 * prob.gamma * mx_inf * u_x;
    const double sq_p = 2.0 * prob.gamma * mx_inf * u_p;
    out.lip_x_bound = dot_x + sq_x + pnets.lip_lbar_x;
    out.lip_p_bound = dot_p + sq_p;
  }
  return out;
}

NeuralNet build_policy_net(const ProblemNets& pnets, const ControlProblem& prob,
                           const NeuralNet& grad_net, double eps0) {
  const int d = prob.d, dbar = prob.dbar;
  if (grad_net.input_dim() != d || grad_net.output_dim() != d)
    throw std::invalid_argument("build_policy_net: grad_net must map d -> d");
  if (!(eps0 > 0.0 && eps0 < 1.0))
    throw std::invalid_argument("build_policy_net: eps0 outside (0,1)");

  // f2 at t = 0: wire a zero first coordinate.
  Mat t0 = Mat::Zero(1 + d, d);
  t0.block(1, 0, d, d).setIdentity();
  NeuralNet f2_at0 = affine_precompose(pnets.f2, t0, Vec::Zero(1 + d));

  NeuralNet stacked = parallelize({f2_at0, grad_net});
  Mat dup = Mat::Zero(2 * d, d);
  dup.block(0, 0, d, d).setIdentity();
  dup.block(d, 0, d, d).setIdentity();
  NeuralNet pair = affine_precompose(stacked, dup, Vec::Zero(2 * d));

  // (f2 row-major, g) -> f2^T g needs (f2^T row-major, g).
  std::vector<Triplet> perm;
  for (int i = 0; i < dbar; ++i)
    for (int j = 0; j < d; ++j) perm.emplace_back(i * d + j, j * dbar + i, 1.0);
  for (int j = 0; j < d; ++j)
    perm.emplace_back(dbar * d + j, d * dbar + j, 1.0);
  SpMat P(dbar * d + d, d * dbar + d);
  P.setFromTriplets(perm.begin(), perm.end());

  // The gradient surrogate plays the role of the costate, so the truncation
  // level bounds its range wherever the corollary applies.
  double grad_range = 1.0;
  try {
    grad_range = effective_truncation(prob).R;
  } catch (const std::exception&) {
  }
  const double range = std::max({pnets.sup_f2_inf, grad_range, 1.0});
  NeuralNet mv = matvec_net(dbar, d, range, eps0);
  NeuralNet contracted = compose(affine_precompose(mv, P, Vec::Zero(P.rows())),
                                 pair);

  NeuralNet scaled = affine_postcompose(
      Mat(Mat::Identity(dbar, dbar) * (-1.0 / (2.0 * prob.gamma))),
      Vec::Zero(dbar), contracted);
  return compose(clamp_net(prob.box_lo, prob.box_hi), scaled);
}

LipschitzReport validate_net_lipschitz(const NeuralNet& net, double cx_bound,
                                       double cp_bound, int samples,
                                       std::uint64_t seed,
                                       const LipschitzProbe& probe) {
  LipschitzReport rep;
  rep.bound_x = cx_bound;
  rep.bound_p = cp_bound;
  const int in = net.input_dim();
  const bool hnet = probe.state_dim > 0 && in == 1 + 2 * probe.state_dim;
  const int d = hnet ? probe.state_dim : in;

  // Sampling fans out over fixed chunks with per-chunk derived streams, so
  // the report does not depend on the worker count.
  constexpr int kChunks = 16;
  const int per = std::max(1, samples / kChunks);
  struct ChunkMax {
    double x = 0.0, p = 0.0;
  };
  std::vector<ChunkMax> maxima(kChunks);
  parallel_for(kChunks, default_threads(), [&](std::int64_t c) {
    RngStream rng =
        derive_stream(seed, "lipschitz-probe", static_cast<std::uint64_t>(c));
    auto sample_uniform = [&](int n, double r) {
      Vec v(n);
      for (int i = 0; i < n; ++i)
        v[i] = (2.0 * rng.next_unit_open() - 1.0) * r;
      return v;
    };
    ChunkMax acc;
    for (int s = 0; s < per; ++s) {
      if (hnet) {
        const double t = rng.next_unit_open() * probe.t_f;
        Vec x = sample_uniform(d, probe.x_range);
        Vec x2 = sample_uniform(d, probe.x_range);
        Vec p = sample_uniform(d, probe.p_range);
        Vec p2 = sample_uniform(d, probe.p_range);
        Vec in_a(1 + 2 * d), in_b(1 + 2 * d);
        in_a[0] = in_b[0] = t;
        in_a.segment(1, d) = x;
        in_a.tail(d) = p;
        // x-direction pair
        in_b.segment(1, d) = x2;
        in_b.tail(d) = p;
        double num =
            (net.realize(in_a) - net.realize(in_b)).lpNorm<Eigen::Infinity>();
        double den = (x - x2).lpNorm<1>();
        if (den > 0.0) acc.x = std::max(acc.x, num / den);
        // p-direction pair
        in_b.segment(1, d) = x;
        in_b.tail(d) = p2;
        num = (net.realize(in_a) - net.realize(in_b)).lpNorm<Eigen::Infinity>();
        den = (p - p2).lpNorm<1>();
        if (den > 0.0) acc.p = std::max(acc.p, num / den);
      } else {
        Vec a = sample_uniform(in, probe.x_range);
        Vec b = sample_uniform(in, probe.x_range);
        const double num =
            (net.realize(a) - net.realize(b)).lpNorm<Eigen::Infinity>();
        const double den1 = (a - b).lpNorm<1>();
        const double deninf = (a - b).lpNorm<Eigen::Infinity>();
        if (den1 > 0.0) acc.x = std::max(acc.x, num / den1);
        if (deninf > 0.0) acc.p = std::max(acc.p, num / deninf);
      }
    }
    maxima[static_cast<std::size_t>(c)] = acc;
  });
  for (const ChunkMax& m : maxima) {
    rep.max_ratio_x = std::max(rep.max_ratio_x, m.x);
    rep.max_ratio_p = std::max(rep.max_ratio_p, m.p);
  }
  rep.pass = rep.max_ratio_x <= cx_bound && rep.max_ratio_p <= cp_bound;
  return rep;
}

}  // namespace hjb
