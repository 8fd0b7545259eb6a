#include "hjbkit/mlp.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "hjbkit/parallel.hpp"

namespace hjb {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r))
    throw std::overflow_error("count_indices: overflow");
  return r;
}

std::int64_t ipow(std::int64_t base, int e) {
  std::int64_t r = 1;
  for (int k = 0; k < e; ++k) r *= base;
  return r;
}

void check_params(const MlpParams& p) {
  if (p.N < 0 || p.M < 1)
    throw std::invalid_argument("mlp: need N >= 0, M >= 1");
  if (!(p.alpha_time > 0.0 && p.alpha_time <= 1.0))
    throw std::invalid_argument("mlp: alpha_time must be in (0,1]");
}

struct Evaluators {
  std::function<double(double, const Vec&, const Vec&)> h;
  std::function<double(const Vec&)> psi;
};

struct MlpCtx {
  const ControlProblem* prob;
  Evaluators ev;
  MlpParams params;
  PathKey root_key;
  std::atomic<std::uint64_t> z_draws{0};
  std::atomic<std::uint64_t> tau_draws{0};

  MlpCtx(const ControlProblem& p, Evaluators e, const MlpParams& pr)
      : prob(&p), ev(std::move(e)), params(pr), root_key(pr.seed) {}
};

struct ValueGrad {
  double v;
  Vec g;
};

void check_finite(const MlpCtx& ctx, double v, const IndexPath& where) {
  if (!std::isfinite(v))
    throw std::runtime_error("mlp: non-finite intermediate at index path " +
                             where.to_string() + " (seed " +
                             std::to_string(ctx.params.seed) + ")");
}

// One node of the recursion. `trail` is kept for diagnostics only; the RNG
// key carries the same path incrementally.
ValueGrad estimate_node(MlpCtx& ctx, int n, const PathKey& key,
                        IndexPath& trail, double t, const Vec& x,
                        bool parallel_root) {
  const int d = ctx.prob->d;
  if (n <= 0) return {0.0, Vec::Zero(d)};

  const double tf = ctx.prob->t_f;
  const double alpha = ctx.params.alpha_time;
  const std::int64_t M = ctx.params.M;
  const double horizon = tf - t;
  const double s = std::sqrt(horizon);

  ValueGrad acc{ctx.ev.psi(x), Vec::Zero(d)};

  // Terminal control-variate block.
  const std::int64_t mn = ipow(M, n);
  const double psi_x = acc.v;
  for (std::int64_t i = 1; i <= mn; ++i) {
    RngStream rng = key.child(0, -i).stream();
    Vec z = sample_gaussian(rng, d);
    ctx.z_draws.fetch_add(1, std::memory_order_relaxed);
    const double dpsi = ctx.ev.psi(x + s * z) - psi_x;
    acc.v += dpsi / static_cast<double>(mn);
    acc.g += (dpsi / (s * static_cast<double>(mn))) * z;
  }

  // Level-difference blocks; every (l, i) term is independent, so the root
  // call may fan them out. Contributions are reduced in (l, i) order.
  struct Term {
    double v;
    Vec g;
  };
  std::vector<std::pair<int, std::int64_t>> jobs;
  for (int l = 0; l < n; ++l)
    for (std::int64_t i = 1; i <= ipow(M, n - l); ++i) jobs.emplace_back(l, i);

  std::vector<Term> results(jobs.size());
  auto run_job = [&](std::int64_t j) {
    const auto [l, i] = jobs[static_cast<std::size_t>(j)];
    const std::int64_t mnl = ipow(M, n - l);
    PathKey node = key.child(l, i);
    RngStream rng = node.stream();
    const double tau = sample_tau(rng, alpha);
    ctx.tau_draws.fetch_add(1, std::memory_order_relaxed);
    Vec z = sample_gaussian(rng, d);
    ctx.z_draws.fetch_add(1, std::memory_order_relaxed);

    const double tp = t + horizon * tau;
    const Vec xp = x + std::sqrt(horizon * tau) * z;
    const double w = horizon * std::pow(tau, 1.0 - alpha) /
                     (alpha * static_cast<double>(mnl));

    IndexPath sub = trail;
    sub.steps.emplace_back(l, i);
    ValueGrad lo = estimate_node(ctx, l, node, sub, tp, xp, false);
    double h = ctx.ev.h(tp, xp, lo.g);
    if (l >= 1) {
      IndexPath sub2 = trail;
      sub2.steps.emplace_back(-l, i);
      ValueGrad hi =
          estimate_node(ctx, l - 1, key.child(-l, i), sub2, tp, xp, false);
      h -= ctx.ev.h(tp, xp, hi.g);
    }
    check_finite(ctx, h, sub);

    Term term;
    term.v = w * h;
    term.g = (w * h / std::sqrt(horizon * tau)) * z;
    results[static_cast<std::size_t>(j)] = std::move(term);
  };

  const int workers = parallel_root ? ctx.params.threads : 1;
  parallel_for(static_cast<std::int64_t>(jobs.size()), workers, run_job);

  for (const Term& term : results) {
    acc.v += term.v;
    acc.g += term.g;
  }
  check_finite(ctx, acc.v, trail);
  return acc;
}

MlpEstimate run_estimator(const ControlProblem& prob, Evaluators ev,
                          const MlpParams& params, double t, const Vec& x) {
  check_params(params);
  if (x.size() != prob.d)
    throw std::invalid_argument("mlp_estimate: state dimension mismatch");
  if (!(t >= 0.0 && t < prob.t_f))
    throw std::invalid_argument("mlp_estimate: need 0 <= t < t_f");

  const auto t0 = std::chrono::steady_clock::now();
  MlpCtx ctx(prob, std::move(ev), params);
  IndexPath trail;
  ValueGrad vg =
      estimate_node(ctx, params.N, ctx.root_key, trail, t, x, true);
  const auto t1 = std::chrono::steady_clock::now();

  MlpEstimate out;
  out.value = vg.v;
  out.gradient = std::move(vg.g);
  out.meta.N = params.N;
  out.meta.M = params.M;
  out.meta.seed = params.seed;
  out.meta.wall_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();
  out.meta.z_draws = ctx.z_draws.load();
  out.meta.tau_draws = ctx.tau_draws.load();
  return out;
}

}  // namespace

std::string IndexPath::to_string() const {
  std::string s = "0";
  for (const auto& [l, i] : steps)
    s += "(" + std::to_string(l) + "," + std::to_string(i) + ")";
  return s;
}

std::uint64_t count_indices(int N, int M) {
  if (N < 0 || M < 1) throw std::invalid_argument("count_indices: bad N/M");
  std::uint64_t count = 1;
  std::uint64_t mk = 1;
  for (int k = 1; k <= N; ++k) {
    mk = checked_mul(mk, static_cast<std::uint64_t>(M));
    const std::uint64_t branch = 1 + (2ull * k - 1) * (2ull * mk + 1);
    count = checked_mul(count, branch);
  }
  return count;
}

double sample_tau(RngStream& rng, double alpha_time) {
  if (!(alpha_time > 0.0 && alpha_time <= 1.0))
    throw std::invalid_argument("sample_tau: alpha_time must be in (0,1]");
  const double u = rng.next_unit_open();
  return alpha_time == 1.0 ? u : std::pow(u, 1.0 / alpha_time);
}

Vec sample_gaussian(RngStream& rng, int d) {
  if (d < 1) throw std::invalid_argument("sample_gaussian: d >= 1");
  return rng.gaussian(d);
}

MlpEstimate mlp_estimate(const ControlProblem& prob, const TruncationLevel& R,
                         const MlpParams& params, double t, const Vec& x) {
  if (params.h_mode != HMode::exact_hr)
    throw std::invalid_argument(
        "mlp_estimate(prob, R, ...): params.h_mode must be exact_hr");
  Evaluators ev;
  ev.h = [&prob, R](double tt, const Vec& xx, const Vec& pp) {
    return truncated_hamiltonian(prob, R, tt, xx, pp);
  };
  ev.psi = [&prob](const Vec& xx) { return prob.psi(xx); };
  return run_estimator(prob, std::move(ev), params, t, x);
}

MlpEstimate mlp_estimate(const ControlProblem& prob, const ProblemNets& pnets,
                         const NeuralNet& phi_h, const MlpParams& params,
                         double t, const Vec& x) {
  if (params.h_mode != HMode::network)
    throw std::invalid_argument(
        "mlp_estimate(prob, pnets, ...): params.h_mode must be network");
  if (phi_h.input_dim() != 1 + 2 * prob.d)
    throw std::invalid_argument("mlp_estimate: phi_h must take (t, x, p)");
  const int d = prob.d;
  Evaluators ev;
  ev.h = [&phi_h, d](double tt, const Vec& xx, const Vec& pp) {
    Vec in(1 + 2 * d);
    in[0] = tt;
    in.segment(1, d) = xx;
    in.tail(d) = pp;
    return phi_h.realize(in)[0];
  };
  ev.psi = [&pnets](const Vec& xx) { return pnets.psi.realize(xx)[0]; };
  return run_estimator(prob, std::move(ev), params, t, x);
}

namespace {

// Frozen-net recursion. Emits a net x -> (value, gradient) in R^{1+d}
// matching estimate_node under the same randomness.
NeuralNet freeze_node(const ControlProblem& prob, const ProblemNets& pnets,
                      const NeuralNet& phi_h, const MlpParams& params, int n,
                      const PathKey& key, double t) {
  const int d = prob.d;
  if (n <= 0) return zero_net(d, 1 + d);

  const double tf = prob.t_f;
  const double alpha = params.alpha_time;
  const std::int64_t M = params.M;
  const double horizon = tf - t;
  const double s = std::sqrt(horizon);

  std::vector<NeuralNet> terms;
  std::vector<double> weights;

  // psi(x) into the value channel.
  {
    Mat col = Mat::Zero(1 + d, 1);
    col(0, 0) = 1.0;
    terms.push_back(affine_postcompose(col, Vec::Zero(1 + d), pnets.psi));
    weights.push_back(1.0);
  }

  const std::int64_t mn = ipow(M, n);
  for (std::int64_t i = 1; i <= mn; ++i) {
    RngStream rng = key.child(0, -i).stream();
    Vec z = sample_gaussian(rng, d);
    NeuralNet shifted = affine_precompose(
        pnets.psi, Mat(Mat::Identity(d, d)), Vec(s * z));
    NeuralNet dpsi = add(shifted, pnets.psi, 1.0, -1.0);
    Mat col(1 + d, 1);
    col(0, 0) = 1.0 / static_cast<double>(mn);
    col.block(1, 0, d, 1) = z / (s * static_cast<double>(mn));
    terms.push_back(affine_postcompose(col, Vec::Zero(1 + d), dpsi));
    weights.push_back(1.0);
  }

  for (int l = 0; l < n; ++l) {
    const std::int64_t mnl = ipow(M, n - l);
    for (std::int64_t i = 1; i <= mnl; ++i) {
      PathKey node = key.child(l, i);
      RngStream rng = node.stream();
      const double tau = sample_tau(rng, alpha);
      Vec z = sample_gaussian(rng, d);
      const double tp = t + horizon * tau;
      const Vec shift = std::sqrt(horizon * tau) * z;
      const double w = horizon * std::pow(tau, 1.0 - alpha) /
                       (alpha * static_cast<double>(mnl));
      Mat col(1 + d, 1);
      col(0, 0) = w;
      col.block(1, 0, d, 1) = (w / std::sqrt(horizon * tau)) * z;

      auto h_of_sub = [&](const NeuralNet& sub) {
        // x -> (t', x + shift, grad_sub(x + shift)) fed into phi_h.
        SpMat rows(d, 1 + d);
        std::vector<Triplet> tr;
        for (int r = 0; r < d; ++r) tr.emplace_back(r, 1 + r, 1.0);
        rows.setFromTriplets(tr.begin(), tr.end());
        NeuralNet grad = affine_postcompose(rows, Vec::Zero(d), sub);
        NeuralNet grad_shift =
            affine_precompose(grad, Mat(Mat::Identity(d, d)), shift);
        Mat headA = Mat::Zero(1 + d, d);
        headA.block(1, 0, d, d).setIdentity();
        Vec headb(1 + d);
        headb[0] = tp;
        headb.tail(d) = shift;
        NeuralNet head = affine_net(headA, headb);
        NeuralNet stacked = parallelize({head, grad_shift});
        Mat dup = Mat::Zero(2 * d, d);
        dup.block(0, 0, d, d).setIdentity();
        dup.block(d, 0, d, d).setIdentity();
        return compose(phi_h,
                       affine_precompose(stacked, dup, Vec::Zero(2 * d)));
      };

      NeuralNet sub_lo = freeze_node(prob, pnets, phi_h, params, l, node, tp);
      terms.push_back(affine_postcompose(col, Vec::Zero(1 + d), h_of_sub(sub_lo)));
      weights.push_back(1.0);
      if (l >= 1) {
        NeuralNet sub_hi =
            freeze_node(prob, pnets, phi_h, params, l - 1, key.child(-l, i), tp);
        terms.push_back(
            affine_postcompose(Mat(-col), Vec::Zero(1 + d), h_of_sub(sub_hi)));
        weights.push_back(1.0);
      }
    }
  }
  return add_many(terms, weights);
}

}  // namespace

NeuralNet freeze_to_net(const ControlProblem& prob, const ProblemNets& pnets,
                        const NeuralNet& phi_h, const MlpParams& params,
                        double t) {
  check_params(params);
  if (params.h_mode != HMode::network)
    throw std::invalid_argument(
        "freeze_to_net: requires h_mode == network (exact_HR cannot be "
        "frozen)");
  if (!(t >= 0.0 && t < prob.t_f))
    throw std::invalid_argument("freeze_to_net: need 0 <= t < t_f");
  if (phi_h.input_dim() != 1 + 2 * prob.d)
    throw std::invalid_argument("freeze_to_net: phi_h must take (t, x, p)");
  PathKey root(params.seed);
  return freeze_node(prob, pnets, phi_h, params, params.N, root, t);
}

MaxNormReport gaussian_maxnorm_check(int n, double sigma, int samples,
                                     std::uint64_t seed,
                                     const std::vector<double>& alphas) {
  if (n < 1 || samples < 2 || !(sigma > 0.0))
    throw std::invalid_argument("gaussian_maxnorm_check: bad arguments");
  MaxNormReport rep;
  rep.mean_bound = sigma * std::sqrt(2.0 * std::log(2.0 * n));
  rep.tail_alpha = alphas;
  rep.tail_bound.resize(alphas.size());
  for (std::size_t k = 0; k < alphas.size(); ++k)
    rep.tail_bound[k] = std::exp(-alphas[k] * alphas[k] / (2.0 * sigma * sigma));

  RngStream rng = derive_stream(seed, "gaussian-maxnorm");
  double sum = 0.0, sumsq = 0.0;
  std::vector<std::int64_t> exceed(alphas.size(), 0);
  Vec z(n);
  for (int sct = 0; sct < samples; ++sct) {
    rng.fill_gaussian(z);
    const double m = sigma * z.lpNorm<Eigen::Infinity>();
    sum += m;
    sumsq += m * m;
    for (std::size_t k = 0; k < alphas.size(); ++k)
      if (m >= rep.mean_bound + alphas[k]) ++exceed[k];
  }
  rep.mean = sum / samples;
  const double var = std::max(0.0, sumsq / samples - rep.mean * rep.mean);
  rep.mean_se = std::sqrt(var / samples);
  rep.tail_freq.resize(alphas.size());
  rep.tail_se.resize(alphas.size());
  bool ok = rep.mean <= rep.mean_bound + 3.0 * rep.mean_se;
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    const double f = static_cast<double>(exceed[k]) / samples;
    rep.tail_freq[k] = f;
    rep.tail_se[k] = std::sqrt(std::max(f * (1.0 - f), 1.0 / samples) /
                               samples);
    ok = ok && f <= rep.tail_bound[k] + 3.0 * rep.tail_se[k];
  }
  rep.pass = ok;
  return rep;
}

}  // namespace hjb
