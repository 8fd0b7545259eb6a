// Acceptance suite: property-based checks at desk scale, one pass/fail line
// per criterion. Exit status is nonzero iff any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli_commands.hpp"
#include "hjbkit/hamnet.hpp"
#include "hjbkit/io.hpp"
#include "hjbkit/mlp.hpp"
#include "hjbkit/netcalc.hpp"
#include "hjbkit/oracle.hpp"
#include "hjbkit/parallel.hpp"
#include "hjbkit/problem.hpp"
#include "hjbkit/rng.hpp"
#include "test_families.hpp"

using namespace hjb;
namespace fs = std::filesystem;

namespace {

struct Ctx {
  std::string detail;
  bool ok = true;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) {
    detail += (detail.empty() ? "" : "; ") + what;
  }
};

Vec rand_box(int d, double radius, RngStream& rng) {
  Vec v(d);
  for (int i = 0; i < d; ++i)
    v[i] = (2.0 * rng.next_unit_open() - 1.0) * radius;
  return v;
}

Vec pack_txp(double t, const Vec& x, const Vec& p) {
  Vec in(1 + x.size() + p.size());
  in[0] = t;
  in.segment(1, x.size()) = x;
  in.tail(p.size()) = p;
  return in;
}

std::vector<ControlProblem> builtin_families() {
  return {make_p1(2), make_heat(2), hjb::testing::make_drift(),
          hjb::testing::make_affine_family(), make_cole_hopf(10)};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) return "<missing " + p.string() + ">";
  return std::string(std::istreambuf_iterator<char>(f),
                     std::istreambuf_iterator<char>());
}

// -- criteria ----------------------------------------------------------------

void c01_hamiltonian_closed_form(Ctx& c) {
  const std::vector<ControlProblem> fams = builtin_families();
  double worst = 0.0;
  for (std::size_t fi = 0; fi < fams.size(); ++fi) {
    const ControlProblem& prob = fams[fi];
    std::vector<double> errs(1000);
    parallel_for(1000, default_threads(), [&](std::int64_t k) {
      RngStream rng = derive_stream(101, "c1", fi, k);
      const double t = rng.next_unit_open() * prob.t_f;
      Vec x = rand_box(prob.d, 2.0, rng);
      Vec p = rand_box(prob.d, 4.0, rng);
      errs[k] = std::abs(hamiltonian(prob, t, x, p) -
                         brute_force_hamiltonian(prob, t, x, p, 10000));
    });
    for (double e : errs) worst = std::max(worst, e);
  }
  c.require(worst <= 1e-4, "max |closed - brute| = " + fmt_g17(worst));
  c.note("max err " + fmt_g17(worst) + " over 5 families x 1000 points");
}

void c02_building_blocks(Ctx& c) {
  Vec in1(1);
  for (int m = 1; m <= 8; ++m) {
    NeuralNet net = sq_net(m);
    RngStream rng = derive_stream(102, "c2-sq", m);
    double max_err = 0.0;
    for (int k = 0; k < 100000; ++k) {
      in1[0] = rng.next_unit_open();
      max_err =
          std::max(max_err, std::abs(net.realize(in1)[0] - in1[0] * in1[0]));
    }
    const double bound = std::ldexp(1.0, -2 * m - 2);
    c.require(max_err <= bound, "sq m=" + std::to_string(m) + " err " +
                                    fmt_g17(max_err));
    in1[0] = std::ldexp(1.0, -m - 1);
    const double mid = std::abs(net.realize(in1)[0] - in1[0] * in1[0]);
    c.require(mid >= 0.9 * bound, "sq m=" + std::to_string(m) + " not tight");
  }

  const double M = 4.0, delta = 1e-3;
  NeuralNet p = prod_net(M, delta);
  RngStream rng = derive_stream(102, "c2-prod");
  Vec in2(2);
  double max_err = 0.0, max_lip = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double x = (2.0 * rng.next_unit_open() - 1.0) * M;
    const double y = (2.0 * rng.next_unit_open() - 1.0) * M;
    in2 << x, y;
    const double v = p.realize(in2)[0];
    max_err = std::max(max_err, std::abs(v - x * y));
    const double x2 = (2.0 * rng.next_unit_open() - 1.0) * M;
    const double y2 = (2.0 * rng.next_unit_open() - 1.0) * M;
    in2 << x2, y2;
    const double den = std::abs(x - x2) + std::abs(y - y2);
    if (den > 1e-9)
      max_lip = std::max(max_lip, std::abs(v - p.realize(in2)[0]) / den);
  }
  c.require(max_err <= delta, "prod err " + fmt_g17(max_err));
  c.require(max_lip <= 4.0 * M, "prod lipschitz " + fmt_g17(max_lip));

  NeuralNet mv = matvec_net(2, 3, M, delta);
  double mv_err = 0.0;
  Vec in(9);
  for (int k = 0; k < 3000; ++k) {
    Mat A(2, 3);
    Vec b(3);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j)
        A(i, j) = (2.0 * rng.next_unit_open() - 1.0) * M;
    for (int j = 0; j < 3; ++j)
      b[j] = (2.0 * rng.next_unit_open() - 1.0) * M;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) in[i * 3 + j] = A(i, j);
    in.tail(3) = b;
    mv_err = std::max(mv_err, (mv.realize(in) - A * b).norm());
  }
  c.require(mv_err <= delta * std::sqrt(2.0) * 3.0,
            "matvec err " + fmt_g17(mv_err));

  NeuralNet chi = clip_net(2.0, 2);
  Vec a(2), bb(2);
  a << -1.0, 0.5;
  bb << 1.0, 2.0;
  NeuralNet cl = clamp_net(a, bb);
  double worst = 0.0;
  Vec y(2);
  for (int k = 0; k < 20000; ++k) {
    y = rand_box(2, 5.0, rng);
    Vec c1 = chi.realize(y), c2 = cl.realize(y);
    for (int i = 0; i < 2; ++i) {
      worst = std::max(worst, std::abs(c1[i] - std::clamp(y[i], -2.0, 2.0)));
      worst = std::max(worst, std::abs(c2[i] - std::clamp(y[i], a[i], bb[i])));
    }
  }
  c.require(worst <= 1e-12, "clip/clamp dev " + fmt_g17(worst));
}

void c03_hamiltonian_net(Ctx& c) {
  FamilySpec p1s = make_p1(2).spec;
  p1s.R_override = 2.0;  // linear psi has no a-priori gradient bound
  const std::vector<ControlProblem> fams = {make_problem(p1s),
                                            hjb::testing::make_drift(),
                                            make_cole_hopf(4)};
  double worst_ratio = 0.0;
  for (std::size_t fi = 0; fi < fams.size(); ++fi) {
    const ControlProblem& prob = fams[fi];
    const TruncationLevel R = effective_truncation(prob);
    const ProblemNets pn = build_problem_nets(prob);
    for (double delta : {1e-1, 1e-2, 1e-3}) {
      HamiltonianNetBuild hb = build_hamiltonian_net(pn, prob, R, delta);
      std::vector<double> ratio(10000);
      const double xr = 10.0 / std::sqrt(static_cast<double>(prob.d));
      const double pr = 2.0 * R.R / std::sqrt(static_cast<double>(prob.d));
      const std::uint64_t salt =
          mix64(fi + 31 * static_cast<std::uint64_t>(delta * 1e6));
      parallel_for(10000, default_threads(), [&](std::int64_t k) {
        RngStream rng = derive_stream(103, "c3", salt, k);
        const double t = rng.next_unit_open() * prob.t_f;
        Vec x = rand_box(prob.d, xr, rng);
        Vec p = rand_box(prob.d, pr, rng);
        const double ref = truncated_hamiltonian(prob, R, t, x, p);
        const double got = hb.net.realize(pack_txp(t, x, p))[0];
        ratio[k] = std::abs(got - ref) /
                   (delta * (1.0 + std::pow(x.norm(), prob.growth_q)));
      });
      for (double r : ratio) worst_ratio = std::max(worst_ratio, r);

      RngStream rng = derive_stream(103, "c3-clip", fi);
      for (int k = 0; k < 200; ++k) {
        const double t = rng.next_unit_open() * prob.t_f;
        Vec x = rand_box(prob.d, 3.0, rng);
        Vec p = rand_box(prob.d, 4.0 * R.R, rng);
        const double va = hb.net.realize(pack_txp(t, x, p))[0];
        const double vb = hb.net.realize(pack_txp(t, x, clip(p, R)))[0];
        if (va != vb) {
          c.require(false, "p-clip invariance broken");
          return;
        }
      }
    }
  }
  c.require(worst_ratio <= 1.0,
            "envelope ratio " + fmt_g17(worst_ratio) + " > 1");
  c.note("worst |phi_H - H_R| / envelope = " + fmt_g17(worst_ratio));
}

void c04_mlp_heat(Ctx& c) {
  const int d = 10;
  ControlProblem heat = make_heat(d);
  RngStream xr = derive_stream(104, "c4-x");
  const Vec x = rand_box(d, 1.0, xr);
  const Vec g = heat.spec.psi_g;
  MlpParams p;
  p.N = 2;
  p.M = 2;
  p.alpha_time = 0.5;
  const int seeds = 200;
  Vec vs(seeds);
  Mat gs(seeds, d);
  std::vector<MlpEstimate> est(seeds);
  parallel_for(seeds, default_threads(), [&](std::int64_t s) {
    MlpParams ps = p;
    ps.seed = 4000 + s;
    est[s] = mlp_estimate(heat, TruncationLevel{1.0}, ps, 0.0, x);
  });
  for (int s = 0; s < seeds; ++s) {
    vs[s] = est[s].value;
    gs.row(s) = est[s].gradient.transpose();
  }
  const double vmean = vs.mean();
  const double vse =
      std::sqrt((vs.array() - vmean).square().sum() / (seeds - 1) / seeds);
  c.require(std::abs(vmean - g.dot(x)) <= 3.0 * vse + 1e-12,
            "value mean off: " + fmt_g17(vmean) + " vs " + fmt_g17(g.dot(x)));
  for (int i = 0; i < d; ++i) {
    const double gm = gs.col(i).mean();
    const double gse = std::sqrt((gs.col(i).array() - gm).square().sum() /
                                 (seeds - 1) / seeds);
    c.require(std::abs(gm - g[i]) <= 3.0 * gse + 1e-12,
              "gradient coord " + std::to_string(i) + " off");
  }
  c.note("value " + fmt_g17(vmean) + " target " + fmt_g17(g.dot(x)) +
         " (se " + fmt_g17(vse) + ")");
}

void c05_mlp_vs_cole_hopf(Ctx& c) {
  const int d = 10;
  ControlProblem prob = make_cole_hopf(d);
  const TruncationLevel R = effective_truncation(prob);
  const auto [ok, why] = oracle_validity_check(prob, R);
  c.require(ok, "validity check failed: " + why);
  if (!ok) return;

  const int n_pts = 24;
  std::vector<Vec> pts(n_pts);
  for (int k = 0; k < n_pts; ++k) {
    RngStream rng = derive_stream(105, "c5-q", k);
    pts[k] = rand_box(d, 1.0, rng);
  }
  std::vector<OracleResult> ref(n_pts);
  for (int k = 0; k < n_pts; ++k) {
    ref[k] = cole_hopf_value(prob, 0.0, pts[k], 400000, 7000 + k,
                             default_threads());
    if (!ref[k].valid) {
      c.require(false, "oracle invalid: " + ref[k].reason);
      return;
    }
  }
  double ref_l2 = 0.0;
  for (const OracleResult& r : ref) ref_l2 += r.value * r.value;
  ref_l2 = std::sqrt(ref_l2);

  auto rel_l2_for = [&](int N, int M, std::uint64_t seed) {
    std::vector<double> sq(n_pts);
    parallel_for(n_pts, default_threads(), [&](std::int64_t k) {
      MlpParams p;
      p.N = N;
      p.M = M;
      p.alpha_time = 0.5;
      p.seed = seed;
      const MlpEstimate est = mlp_estimate(prob, R, p, 0.0, pts[k]);
      const double dd = est.value - ref[k].value;
      sq[k] = dd * dd;
    });
    double s = 0.0;
    for (double v : sq) s += v;
    return std::sqrt(s) / ref_l2;
  };

  const double rel44 = rel_l2_for(4, 4, 77);
  c.require(rel44 <= 0.1, "rel L2 at N=M=4: " + fmt_g17(rel44));

  const int ens = 20;
  double e2 = 0.0, e4 = 0.0;
  for (int s = 0; s < ens; ++s) {
    e2 += rel_l2_for(2, 2, 9000 + s);
    e4 += rel_l2_for(4, 4, 9000 + s);
  }
  e2 /= ens;
  e4 /= ens;
  c.require(e4 <= e2, "ensemble error increased: N=2 " + fmt_g17(e2) +
                          " -> N=4 " + fmt_g17(e4));
  c.note("rel44 " + fmt_g17(rel44) + ", ensemble N=2 " + fmt_g17(e2) +
         " N=4 " + fmt_g17(e4));
}

void c06_freezing(Ctx& c) {
  const int d = 3;
  ControlProblem prob = make_cole_hopf(d);
  const TruncationLevel R = effective_truncation(prob);
  const ProblemNets pn = build_problem_nets(prob);
  const HamiltonianNetBuild hb = build_hamiltonian_net(pn, prob, R, 1e-2);
  MlpParams p;
  p.N = 2;
  p.M = 2;
  p.alpha_time = 0.5;
  p.seed = 31;
  p.h_mode = HMode::network;
  const NeuralNet frozen = freeze_to_net(prob, pn, hb.net, p, 0.0);

  double worst = 0.0;
  std::vector<double> devs(100);
  parallel_for(100, default_threads(), [&](std::int64_t k) {
    RngStream rng = derive_stream(106, "c6", k);
    Vec x = rand_box(d, 1.5, rng);
    const MlpEstimate est = mlp_estimate(prob, pn, hb.net, p, 0.0, x);
    Vec ref(1 + d);
    ref[0] = est.value;
    ref.tail(d) = est.gradient;
    devs[k] = (frozen.realize(x) - ref).lpNorm<Eigen::Infinity>() /
              std::max(1.0, ref.lpNorm<Eigen::Infinity>());
  });
  for (double v : devs) worst = std::max(worst, v);
  c.require(worst <= 1e-9, "frozen deviation " + fmt_g17(worst));

  // reported size must equal the netcalc accounting of the emitted net
  std::size_t hand = 0;
  for (const Layer& L : frozen.layers()) {
    for (int r = 0; r < L.A.outerSize(); ++r)
      for (SpMat::InnerIterator it(L.A, r); it; ++it)
        if (it.value() != 0.0) ++hand;
    for (Eigen::Index i = 0; i < L.b.size(); ++i)
      if (L.b[i] != 0.0) ++hand;
  }
  c.require(frozen.size() == hand, "size accounting mismatch");
  c.note("size " + std::to_string(frozen.size()) + ", max rel dev " +
         fmt_g17(worst));
}

void c07_index_combinatorics(Ctx& c) {
  auto reference = [](int N, int M) {
    std::uint64_t count = 1;
    double mk = 1.0;
    for (int k = 1; k <= N; ++k) {
      mk *= M;
      std::uint64_t fresh = 0;
      for (int l = -k + 1; l <= k - 1; ++l)
        fresh += static_cast<std::uint64_t>(2 * mk + 1);
      count += count * fresh;
    }
    return count;
  };
  c.require(count_indices(1, 1) == 4, "N=1,M=1 != 4");
  c.require(count_indices(2, 2) == 168, "N=2,M=2 != 168");
  for (int N = 0; N <= 4; ++N)
    for (int M = 1; M <= 4; ++M)
      c.require(count_indices(N, M) == reference(N, M),
                "mismatch at N=" + std::to_string(N) +
                    ",M=" + std::to_string(M));
}

void c08_tau_law(Ctx& c) {
  const int n = 1000000;
  const double crit = 1.62762 / std::sqrt(static_cast<double>(n));  // 1%
  for (double alpha : {0.25, 0.5, 0.9}) {
    RngStream rng = derive_stream(108, "c8",
                                  static_cast<std::uint64_t>(alpha * 100));
    std::vector<double> draws(n);
    double sum = 0.0, sumsq = 0.0;
    for (int k = 0; k < n; ++k) {
      draws[k] = sample_tau(rng, alpha);
      sum += draws[k];
      sumsq += draws[k] * draws[k];
    }
    std::sort(draws.begin(), draws.end());
    double ks = 0.0;
    for (int k = 0; k < n; ++k) {
      const double f = std::pow(draws[k], alpha);
      ks = std::max(ks, std::abs(f - static_cast<double>(k + 1) / n));
      ks = std::max(ks, std::abs(f - static_cast<double>(k) / n));
    }
    c.require(ks <= crit, "KS " + fmt_g17(ks) + " at alpha " +
                              fmt_g17(alpha));
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    const double want = alpha / (alpha + 1.0);
    c.require(std::abs(mean - want) <= 3.0 * std::sqrt(var / n),
              "mean off at alpha " + fmt_g17(alpha));
  }
}

void c09_gaussian_maxnorm(Ctx& c) {
  for (int n : {2, 10, 100}) {
    MaxNormReport rep = gaussian_maxnorm_check(n, 1.0, 100000, 109, {1.0, 2.0});
    c.require(rep.pass, "max-norm report failed at n = " + std::to_string(n));
    c.note("n=" + std::to_string(n) + ": mean " + fmt_g17(rep.mean) +
           " <= " + fmt_g17(rep.mean_bound));
  }
}

void c10_scaling(Ctx& c) {
  MlpParams p;
  p.N = 2;
  p.M = 2;
  p.alpha_time = 0.5;
  p.seed = 110;
  p.h_mode = HMode::network;
  std::vector<double> logd, logsize;
  for (int d : {1, 2, 4, 8, 16}) {
    ControlProblem prob = make_p1(d);
    FamilySpec s = prob.spec;
    s.R_override = 1.0;
    prob = make_problem(s);
    const ProblemNets pn = build_problem_nets(prob);
    const HamiltonianNetBuild hb =
        build_hamiltonian_net(pn, prob, TruncationLevel{1.0}, 1e-2);
    const NeuralNet frozen = freeze_to_net(prob, pn, hb.net, p, 0.0);
    logd.push_back(std::log(static_cast<double>(d)));
    logsize.push_back(std::log(static_cast<double>(frozen.size())));
  }
  double mx = 0, my = 0;
  const std::size_t n = logd.size();
  for (std::size_t i = 0; i < n; ++i) {
    mx += logd[i];
    my += logsize[i];
  }
  mx /= n;
  my /= n;
  double num = 0, den = 0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (logd[i] - mx) * (logsize[i] - my);
    den += (logd[i] - mx) * (logd[i] - mx);
  }
  const double slope = num / den;
  c.require(slope <= 3.0, "log-log slope " + fmt_g17(slope));
  c.note("size slope " + fmt_g17(slope) + " over d in {1,2,4,8,16}");
}

void c11_oracles(Ctx& c) {
  FamilySpec s;
  s.family = "custom";
  s.d = s.dbar = 1;
  s.gamma = 0.5;
  s.t_f = 1.0;
  s.a = Vec::Constant(1, -4.0);
  s.b = Vec::Constant(1, 4.0);
  s.f1_kind = MapKind::zero;
  s.f2_kind = MapKind::identity;
  s.lbar_kind = MapKind::zero;
  s.psi_kind = PsiKind::bspline;
  s.R_override = 1.0;
  ControlProblem prob = make_problem(s);

  // Richardson self-convergence over three refinements
  auto solve_at = [&](int nx, int nt) {
    FdGrid g;
    g.nx = nx;
    g.nt = nt;
    return fd_solve_1d(prob, g);
  };
  const Fd1dSolution s1 = solve_at(251, 64);
  const Fd1dSolution s2 = solve_at(501, 128);
  const Fd1dSolution s3 = solve_at(1001, 256);
  double e12 = 0.0, e23 = 0.0;
  for (double x : {-2.0, -1.3, -0.6, 0.0, 0.5, 1.1, 1.9, 2.6}) {
    e12 = std::max(e12, std::abs(s1.at(0.0, x).value - s2.at(0.0, x).value));
    e23 = std::max(e23, std::abs(s2.at(0.0, x).value - s3.at(0.0, x).value));
  }
  const double order = std::log2(e12 / e23);
  c.require(order >= 1.5, "Richardson order " + fmt_g17(order));

  // cross-oracle agreement on 20 interior points
  const Fd1dSolution fine = solve_at(2001, 0);
  RngStream rng = derive_stream(111, "c11-pts");
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double x = (2.0 * rng.next_unit_open() - 1.0) * 2.5;
    const OracleResult fd = fine.at(0.0, x);
    const OracleResult ch = cole_hopf_value(
        prob, 0.0, (Vec(1) << x).finished(), 400000, 5000 + k,
        default_threads());
    const double tol = 1e-3 + 3.0 * ch.stderr_;
    if (std::abs(fd.value - ch.value) > tol)
      c.require(false, "cross-oracle mismatch at x = " + fmt_g17(x));
    worst = std::max(worst, std::abs(fd.value - ch.value));
  }
  c.note("Richardson order " + fmt_g17(order) + ", max cross dev " +
         fmt_g17(worst));

  // stderr scaling under sample doubling (ensemble-averaged)
  Vec x0(1);
  x0 << 0.2;
  const int reps = 32;
  double a = 0.0, b = 0.0;
  for (int r = 0; r < reps; ++r) {
    a += cole_hopf_value(prob, 0.0, x0, 50000, 300 + r, 2).stderr_;
    b += cole_hopf_value(prob, 0.0, x0, 100000, 700 + r, 2).stderr_;
  }
  const double ratio = b / a;
  c.require(ratio >= 0.9 / std::sqrt(2.0) && ratio <= 1.1 / std::sqrt(2.0),
            "stderr ratio " + fmt_g17(ratio));
}

void c12_determinism(Ctx& c) {
  const fs::path base = fs::temp_directory_path() / "hjbkit_acceptance_c12";
  fs::remove_all(base);
  json solve_cfg{{"problem", json{{"family", "colehopf"}, {"d", 3}}},
                 {"seed", 21},
                 {"mlp", {{"N", 2}, {"M", 2}, {"alpha_time", 0.5}}},
                 {"Q", {{"lo", {-1.0, -1.0, -1.0}}, {"hi", {1.0, 1.0, 1.0}},
                        {"n", 8}}}};
  json freeze_cfg{{"problem", json{{"family", "colehopf"}, {"d", 2}}},
                  {"seed", 22},
                  {"mlp", {{"N", 2}, {"M", 2}, {"alpha_time", 0.5}}},
                  {"delta", 1e-2},
                  {"check_points", 10}};
  std::string solve_ref, net_ref, report_ref;
  for (int threads : {1, 2, 8}) {
    cli::Options opt;
    opt.out_dir = (base / ("t" + std::to_string(threads))).string();
    opt.threads = threads;
    c.require(cli::cmd_solve(solve_cfg, opt) == 0, "solve exit");
    c.require(cli::cmd_freeze(freeze_cfg, opt) == 0, "freeze exit");
    const std::string sv = slurp(fs::path(opt.out_dir) / "solve.csv");
    const std::string nt = slurp(fs::path(opt.out_dir) / "frozen_net.json");
    const std::string rp = slurp(fs::path(opt.out_dir) / "freeze_report.csv");
    if (threads == 1) {
      solve_ref = sv;
      net_ref = nt;
      report_ref = rp;
      // re-run in place: bytes must not change
      c.require(cli::cmd_solve(solve_cfg, opt) == 0, "solve rerun exit");
      c.require(slurp(fs::path(opt.out_dir) / "solve.csv") == sv,
                "solve rerun bytes differ");
    } else {
      c.require(sv == solve_ref, "solve bytes differ at threads " +
                                     std::to_string(threads));
      c.require(nt == net_ref, "frozen net bytes differ at threads " +
                                   std::to_string(threads));
      c.require(rp == report_ref, "freeze report bytes differ at threads " +
                                      std::to_string(threads));
    }
  }
  fs::remove_all(base);
}

struct Criterion {
  int id;
  std::string name;
  std::function<void(Ctx&)> run;
  double budget_s;  // 0: no stated budget
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "hamiltonian-closed-form", c01_hamiltonian_closed_form, 10.0},
      {2, "building-blocks", c02_building_blocks, 30.0},
      {3, "hamiltonian-network", c03_hamiltonian_net, 120.0},
      {4, "mlp-heat-case", c04_mlp_heat, 60.0},
      {5, "mlp-vs-cole-hopf", c05_mlp_vs_cole_hopf, 600.0},
      {6, "freezing", c06_freezing, 60.0},
      {7, "index-combinatorics", c07_index_combinatorics, 0.0},
      {8, "tau-law", c08_tau_law, 0.0},
      {9, "gaussian-max-norm", c09_gaussian_maxnorm, 0.0},
      {10, "scaling", c10_scaling, 300.0},
      {11, "oracles", c11_oracles, 0.0},
      {12, "determinism", c12_determinism, 0.0},
  };

  int failures = 0;
  for (const Criterion& cr : criteria) {
    Ctx ctx;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.run(ctx);
    } catch (const std::exception& e) {
      ctx.require(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (cr.budget_s > 0.0 && secs > cr.budget_s)
      ctx.require(false, "runtime " + fmt_g17(secs) + " s over budget " +
                             fmt_g17(cr.budget_s) + " s");
    std::string budget;
    if (cr.budget_s > 0.0)
      budget = ", budget " + fmt_g17(cr.budget_s) + " s";
    std::printf("%s criterion-%02d %-24s (%.1f s%s)%s%s\n",
                ctx.ok ? "PASS" : "FAIL", cr.id, cr.name.c_str(), secs,
                budget.c_str(), ctx.detail.empty() ? "" : ": ",
                ctx.detail.c_str());
    if (!ctx.ok) ++failures;
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
