#include "cli_commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <stdexcept>
#include <vector>

#include "hjbkit/hamnet.hpp"
#include "hjbkit/mlp.hpp"
#include "hjbkit/netcalc.hpp"
#include "hjbkit/oracle.hpp"
#include "hjbkit/parallel.hpp"
#include "hjbkit/problem.hpp"
#include "hjbkit/rng.hpp"

namespace hjb::cli {

namespace {

namespace fs = std::filesystem;

int threads_of(const Options& opt) {
  return opt.threads > 0 ? opt.threads : default_threads();
}

std::uint64_t seed_of(const json& cfg, const Options& opt) {
  if (opt.seed) return *opt.seed;
  return cfg.value("seed", 0ull);
}

std::string out_path(const Options& opt, const std::string& name) {
  fs::create_directories(opt.out_dir);
  return (fs::path(opt.out_dir) / name).string();
}

ControlProblem problem_from_entry(const json& entry) {
  if (entry.is_string()) return load_problem(entry.get<std::string>());
  return problem_from_json(entry);
}

std::vector<ControlProblem> problems_of(const json& cfg) {
  std::vector<ControlProblem> out;
  if (cfg.contains("problems"))
    for (const json& e : cfg["problems"]) out.push_back(problem_from_entry(e));
  else if (cfg.contains("problem"))
    out.push_back(problem_from_entry(cfg["problem"]));
  else
    throw std::invalid_argument("config needs \"problem\" or \"problems\"");
  return out;
}

MlpParams mlp_params_of(const json& cfg, std::uint64_t seed) {
  const json m = cfg.value("mlp", json::object());
  MlpParams p;
  p.N = m.value("N", 2);
  p.M = m.value("M", 2);
  p.alpha_time = m.value("alpha_time", 0.5);
  p.seed = seed;
  const std::string mode = m.value("h_mode", std::string("exact"));
  if (mode == "exact")
    p.h_mode = HMode::exact_hr;
  else if (mode == "network")
    p.h_mode = HMode::network;
  else
    throw std::invalid_argument("mlp.h_mode must be \"exact\" or \"network\"");
  return p;
}

// Query points: explicit "points" array, or uniform draws from the box Q.
std::vector<Vec> points_of(const json& cfg, int d, std::uint64_t seed) {
  std::vector<Vec> pts;
  if (cfg.contains("points")) {
    for (const json& row : cfg["points"]) {
      Vec x(d);
      if (static_cast<int>(row.size()) != d)
        throw std::invalid_argument("point with wrong dimension");
      for (int i = 0; i < d; ++i) x[i] = row[i].get<double>();
      pts.push_back(std::move(x));
    }
    return pts;
  }
  const json q = cfg.value("Q", json::object());
  const int n = q.value("n", 32);
  Vec lo = Vec::Constant(d, -1.0), hi = Vec::Constant(d, 1.0);
  if (q.contains("lo"))
    for (int i = 0; i < d; ++i) lo[i] = q["lo"][i].get<double>();
  if (q.contains("hi"))
    for (int i = 0; i < d; ++i) hi[i] = q["hi"][i].get<double>();
  for (int k = 0; k < n; ++k) {
    RngStream rng = derive_stream(seed, "q-sample", k);
    Vec x(d);
    for (int i = 0; i < d; ++i)
      x[i] = lo[i] + (hi[i] - lo[i]) * rng.next_unit_open();
    pts.push_back(std::move(x));
  }
  return pts;
}

struct OracleRunner {
  std::string name = "none";
  const ControlProblem* prob = nullptr;
  std::int64_t mc_samples = 200000;
  std::uint64_t seed = 0;
  int threads = 1;
  std::optional<Fd1dSolution> fd;

  bool active() const { return name != "none"; }

  OracleResult at(double t, const Vec& x, std::uint64_t point_id) const {
    if (name == "cole_hopf")
      return cole_hopf_value(*prob, t, x, mc_samples,
                             mix64(seed + kGoldenGamma * point_id), threads);
    if (name == "heat")
      return heat_value(*prob, t, x, mc_samples,
                        mix64(seed + kGoldenGamma * point_id), threads);
    if (name == "fd1d") return fd->at(t, x[0]);
    throw std::invalid_argument("unknown oracle: " + name);
  }
};

OracleRunner oracle_of(const json& cfg, const ControlProblem& prob,
                       std::uint64_t seed, int threads) {
  OracleRunner r;
  r.name = cfg.value("oracle", std::string("none"));
  r.prob = &prob;
  r.mc_samples = cfg.value("mc_samples", 200000);
  r.seed = mix64(seed ^ fnv1a("oracle"));
  r.threads = threads;
  if (r.name == "fd1d") {
    FdGrid grid;
    const json g = cfg.value("fd_grid", json::object());
    grid.nx = g.value("nx", 2001);
    grid.nt = g.value("nt", 0);
    grid.x_lo = g.value("x_lo", -8.0);
    grid.x_hi = g.value("x_hi", 8.0);
    r.fd = fd_solve_1d(prob, grid);
  }
  return r;
}

double lsq_slope(const std::vector<double>& logx,
                 const std::vector<double>& logy) {
  const std::size_t n = logx.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += logx[i];
    my += logy[i];
  }
  mx /= n;
  my /= n;
  double num = 0, den = 0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (logx[i] - mx) * (logy[i] - my);
    den += (logx[i] - mx) * (logx[i] - mx);
  }
  return num / den;
}

}  // namespace

int cmd_hamiltonian_check(const json& cfg, const Options& opt) {
  const std::uint64_t seed = seed_of(cfg, opt);
  const int n_points = cfg.value("points_per_problem", 200);
  const double tol = cfg.value("tol", 1e-4);
  const int grid_n = cfg.value("grid_n", 10000);
  const double x_radius = cfg.value("x_radius", 2.0);
  const double p_radius = cfg.value("p_radius", 4.0);
  const bool corrupt = cfg.value("self_test_corrupt_gamma", false);

  std::vector<ControlProblem> probs = problems_of(cfg);
  CsvWriter csv({"problem_id", "point_id", "t", "h_closed", "h_brute",
                 "abs_err", "tol", "pass"});
  bool all_pass = true;
  for (std::size_t pi = 0; pi < probs.size(); ++pi) {
    const ControlProblem& prob = probs[pi];
    ControlProblem closed_prob = prob;
    if (corrupt) {
      FamilySpec s = prob.spec;
      s.gamma *= 1.5;
      closed_prob = make_problem(s);
    }
    struct Row {
      double t, hc, hb;
    };
    std::vector<Row> rows(n_points);
    parallel_for(n_points, threads_of(opt), [&](std::int64_t k) {
      RngStream rng = derive_stream(seed, "ham-check", pi, k);
      const double t = rng.next_unit_open() * prob.t_f;
      Vec x(prob.d), p(prob.d);
      for (int i = 0; i < prob.d; ++i)
        x[i] = (2.0 * rng.next_unit_open() - 1.0) * x_radius;
      for (int i = 0; i < prob.d; ++i)
        p[i] = (2.0 * rng.next_unit_open() - 1.0) * p_radius;
      rows[k] = {t, hamiltonian(closed_prob, t, x, p),
                 brute_force_hamiltonian(prob, t, x, p, grid_n)};
    });
    for (int k = 0; k < n_points; ++k) {
      const double err = std::abs(rows[k].hc - rows[k].hb);
      const bool pass = err <= tol;
      all_pass = all_pass && pass;
      csv.row({std::to_string(pi), std::to_string(k), fmt_g17(rows[k].t),
               fmt_g17(rows[k].hc), fmt_g17(rows[k].hb), fmt_g17(err),
               fmt_g17(tol), pass ? "PASS" : "FAIL"});
    }
  }
  csv.write(out_path(opt, "hamiltonian_check.csv"));
  return all_pass ? 0 : 1;
}

int cmd_blocks_check(const json& cfg, const Options& opt) {
  const std::uint64_t seed = seed_of(cfg, opt);
  CsvWriter csv({"suite", "case", "measured", "bound", "pass"});
  bool all_pass = true;
  auto emit = [&](const std::string& suite, const std::string& name,
                  double measured, double bound) {
    const bool pass = measured <= bound;
    all_pass = all_pass && pass;
    csv.row({suite, name, fmt_g17(measured), fmt_g17(bound),
             pass ? "PASS" : "FAIL"});
  };

  std::vector<int> ms = {1, 2, 3, 4, 5, 6, 7, 8};
  if (cfg.contains("sq_m")) {
    ms.clear();
    for (const json& v : cfg["sq_m"]) ms.push_back(v.get<int>());
  }
  const int sq_samples = cfg.value("sq_samples", 100000);
  for (int m : ms) {
    NeuralNet net = sq_net(m);
    RngStream rng = derive_stream(seed, "blocks-sq", m);
    double max_err = 0.0;
    Vec in(1);
    for (int k = 0; k < sq_samples; ++k) {
      in[0] = rng.next_unit_open();
      max_err = std::max(max_err,
                         std::abs(net.realize(in)[0] - in[0] * in[0]));
    }
    const double bound = std::ldexp(1.0, -2 * m - 2);
    emit("sq", "max_err_m" + std::to_string(m), max_err, bound);
    in[0] = std::ldexp(1.0, -m - 1);  // first grid midpoint
    const double mid = std::abs(net.realize(in)[0] - in[0] * in[0]);
    // tightness: midpoint error at least 0.9 * bound
    emit("sq", "tight_m" + std::to_string(m), 0.9 * bound, mid);
  }

  const json pc = cfg.value("prod", json::object());
  const double pM = pc.value("range", 4.0);
  const double pd = pc.value("delta", 1e-3);
  const int pn = pc.value("samples", 10000);
  {
    NeuralNet net = prod_net(pM, pd);
    RngStream rng = derive_stream(seed, "blocks-prod");
    double max_err = 0.0, max_lip = 0.0, max_zero = 0.0;
    Vec in(2);
    for (int k = 0; k < pn; ++k) {
      const double x = (2.0 * rng.next_unit_open() - 1.0) * pM;
      const double y = (2.0 * rng.next_unit_open() - 1.0) * pM;
      in << x, y;
      const double v = net.realize(in)[0];
      max_err = std::max(max_err, std::abs(v - x * y));
      in << x, 0.0;
      max_zero = std::max(max_zero, std::abs(net.realize(in)[0]));
      const double x2 = (2.0 * rng.next_unit_open() - 1.0) * pM;
      const double y2 = (2.0 * rng.next_unit_open() - 1.0) * pM;
      in << x2, y2;
      const double v2 = net.realize(in)[0];
      const double den = std::abs(x - x2) + std::abs(y - y2);
      if (den > 1e-9) max_lip = std::max(max_lip, std::abs(v - v2) / den);
    }
    emit("prod", "max_err", max_err, pd);
    emit("prod", "annihilation", max_zero, pd);
    emit("prod", "lipschitz_ratio", max_lip, 4.0 * pM);
  }

  const json mc = cfg.value("matvec", json::object());
  const int mm = mc.value("m", 2), mn = mc.value("n", 2);
  const double mM = mc.value("range", 4.0), md = mc.value("delta", 1e-3);
  const int msamples = mc.value("samples", 1000);
  {
    NeuralNet net = matvec_net(mm, mn, mM, md);
    RngStream rng = derive_stream(seed, "blocks-matvec");
    double max_err = 0.0;
    Vec in(mm * mn + mn);
    for (int k = 0; k < msamples; ++k) {
      Mat A(mm, mn);
      Vec b(mn);
      for (int i = 0; i < mm; ++i)
        for (int j = 0; j < mn; ++j)
          A(i, j) = (2.0 * rng.next_unit_open() - 1.0) * mM;
      for (int j = 0; j < mn; ++j)
        b[j] = (2.0 * rng.next_unit_open() - 1.0) * mM;
      for (int i = 0; i < mm; ++i)
        for (int j = 0; j < mn; ++j) in[i * mn + j] = A(i, j);
      in.tail(mn) = b;
      max_err = std::max(max_err, (net.realize(in) - A * b).norm());
    }
    emit("matvec", "l2_err", max_err,
         md * std::sqrt(static_cast<double>(mm)) * mn);
  }

  {
    const double tol = cfg.value("clip_clamp_tol", 1e-12);
    NeuralNet chi = clip_net(2.0, 3);
    Vec a(3), b(3);
    a << -1.0, -0.5, 0.25;
    b << 1.0, 2.0, 0.75;
    NeuralNet cl = clamp_net(a, b);
    RngStream rng = derive_stream(seed, "blocks-clip");
    double worst_clip = 0.0, worst_clamp = 0.0;
    for (int k = 0; k < 10000; ++k) {
      Vec y(3);
      for (int i = 0; i < 3; ++i)
        y[i] = (2.0 * rng.next_unit_open() - 1.0) * 5.0;
      Vec c1 = chi.realize(y);
      Vec c2 = cl.realize(y);
      for (int i = 0; i < 3; ++i) {
        worst_clip =
            std::max(worst_clip, std::abs(c1[i] - std::clamp(y[i], -2.0, 2.0)));
        worst_clamp =
            std::max(worst_clamp, std::abs(c2[i] - std::clamp(y[i], a[i], b[i])));
      }
    }
    emit("clip", "max_dev", worst_clip, tol);
    emit("clamp", "max_dev", worst_clamp, tol);
  }

  csv.write(out_path(opt, "blocks_check.csv"));

  // Optional Hamiltonian-network validation with the per-point report
  // schema (point_id, value_exact, value_net, envelope, pass).
  if (cfg.contains("hamnet")) {
    const json hc = cfg["hamnet"];
    ControlProblem prob = problem_from_entry(hc.at("problem"));
    const double delta = hc.value("delta", 1e-2);
    const int n = hc.value("points", 1000);
    const double x_radius = hc.value("x_radius", 3.0);
    TruncationLevel R = effective_truncation(prob);
    ProblemNets pn = build_problem_nets(prob);
    HamiltonianNetBuild hb = build_hamiltonian_net(pn, prob, R, delta);
    CsvWriter hcsv({"point_id", "value_exact", "value_net", "envelope",
                    "pass"});
    struct Row {
      double exact, net, env;
    };
    std::vector<Row> rows(n);
    parallel_for(n, threads_of(opt), [&](std::int64_t k) {
      RngStream rng = derive_stream(seed, "blocks-hamnet", k);
      const double t = rng.next_unit_open() * prob.t_f;
      Vec x(prob.d), p(prob.d);
      for (int i = 0; i < prob.d; ++i)
        x[i] = (2.0 * rng.next_unit_open() - 1.0) * x_radius;
      for (int i = 0; i < prob.d; ++i)
        p[i] = (2.0 * rng.next_unit_open() - 1.0) * 2.0 * R.R;
      Vec in(1 + 2 * prob.d);
      in[0] = t;
      in.segment(1, prob.d) = x;
      in.tail(prob.d) = p;
      rows[k] = {truncated_hamiltonian(prob, R, t, x, p),
                 hb.net.realize(in)[0],
                 delta * (1.0 + std::pow(x.norm(), prob.growth_q))};
    });
    for (int k = 0; k < n; ++k) {
      const bool pass = std::abs(rows[k].net - rows[k].exact) <= rows[k].env;
      all_pass = all_pass && pass;
      hcsv.row({std::to_string(k), fmt_g17(rows[k].exact),
                fmt_g17(rows[k].net), fmt_g17(rows[k].env),
                pass ? "PASS" : "FAIL"});
    }
    hcsv.write(out_path(opt, "hamnet_check.csv"));
  }
  return all_pass ? 0 : 1;
}

int cmd_solve(const json& cfg, const Options& opt) {
  const std::uint64_t seed = seed_of(cfg, opt);
  const int threads = threads_of(opt);
  ControlProblem prob = problems_of(cfg).front();
  MlpParams params = mlp_params_of(cfg, seed);
  params.threads = threads;
  const double t = cfg.value("t", 0.0);
  std::vector<Vec> pts = points_of(cfg, prob.d, mix64(seed ^ fnv1a("points")));

  TruncationLevel R = effective_truncation(prob);
  std::optional<ProblemNets> pnets;
  std::optional<HamiltonianNetBuild> hb;
  if (params.h_mode == HMode::network) {
    pnets = build_problem_nets(prob);
    hb = build_hamiltonian_net(*pnets, prob, R,
                               cfg.value("delta", 1e-2));
  }

  std::vector<MlpEstimate> est(pts.size());
  parallel_for(static_cast<std::int64_t>(pts.size()), threads,
               [&](std::int64_t i) {
                 MlpParams p = params;
                 p.threads = 1;  // outer loop owns the parallelism
                 est[i] = p.h_mode == HMode::network
                              ? mlp_estimate(prob, *pnets, hb->net, p, t, pts[i])
                              : mlp_estimate(prob, R, p, t, pts[i]);
               });

  OracleRunner oracle = oracle_of(cfg, prob, seed, threads);
  std::vector<OracleResult> oracle_vals;
  if (oracle.active()) {
    oracle_vals.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      oracle_vals[i] = oracle.at(t, pts[i], i);
      if (!oracle_vals[i].valid)
        throw std::runtime_error("oracle '" + oracle.name +
                                 "' invalid at point " + std::to_string(i) +
                                 ": " + oracle_vals[i].reason);
    }
  }

  std::vector<std::string> header{"t"};
  for (int i = 0; i < prob.d; ++i) header.push_back("x" + std::to_string(i));
  header.push_back("value");
  for (int i = 0; i < prob.d; ++i) header.push_back("g" + std::to_string(i));
  header.insert(header.end(), {"N", "M", "alpha", "seed", "samples"});
  if (oracle.active())
    header.insert(header.end(),
                  {"oracle", "oracle_value", "oracle_stderr", "abs_err"});
  if (opt.timings) header.push_back("wall_ms");
  CsvWriter csv(header);

  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<std::string> row{fmt_g17(t)};
    for (int k = 0; k < prob.d; ++k) row.push_back(fmt_g17(pts[i][k]));
    row.push_back(fmt_g17(est[i].value));
    for (int k = 0; k < prob.d; ++k) row.push_back(fmt_g17(est[i].gradient[k]));
    row.push_back(std::to_string(params.N));
    row.push_back(std::to_string(params.M));
    row.push_back(fmt_g17(params.alpha_time));
    row.push_back(std::to_string(seed));
    row.push_back(std::to_string(est[i].meta.z_draws + est[i].meta.tau_draws));
    if (oracle.active()) {
      row.push_back(oracle.name);
      row.push_back(fmt_g17(oracle_vals[i].value));
      row.push_back(fmt_g17(oracle_vals[i].stderr_));
      row.push_back(fmt_g17(std::abs(est[i].value - oracle_vals[i].value)));
    }
    if (opt.timings) row.push_back(fmt_g17(est[i].meta.wall_ms));
    csv.row(row);
  }
  csv.write(out_path(opt, "solve.csv"));

  if (cfg.value("l2_summary", false) && oracle.active()) {
    double se = 0.0, so = 0.0, sstderr = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double d = est[i].value - oracle_vals[i].value;
      se += d * d;
      so += oracle_vals[i].value * oracle_vals[i].value;
      sstderr += oracle_vals[i].stderr_ * oracle_vals[i].stderr_;
    }
    const double n = static_cast<double>(pts.size());
    CsvWriter sum({"n_points", "l2_abs", "l2_rel", "oracle_stderr_rms"});
    const double l2 = std::sqrt(se / n);
    const double rel = std::sqrt(se) / std::sqrt(std::max(so, 1e-300));
    sum.row({std::to_string(pts.size()), fmt_g17(l2), fmt_g17(rel),
             fmt_g17(std::sqrt(sstderr / n))});
    sum.write(out_path(opt, "solve_summary.csv"));
  }
  return 0;
}

int cmd_freeze(const json& cfg, const Options& opt) {
  const std::uint64_t seed = seed_of(cfg, opt);
  ControlProblem prob = problems_of(cfg).front();
  if (cfg.value("mlp", json::object()).value("h_mode", std::string("network")) ==
      "exact")
    throw std::invalid_argument(
        "freeze: the exact-H_R evaluator cannot be frozen; use h_mode "
        "\"network\"");
  MlpParams params = mlp_params_of(cfg, seed);
  params.h_mode = HMode::network;
  params.threads = 1;
  const double t = cfg.value("t", 0.0);
  const double delta = cfg.value("delta", 1e-2);
  const double tol = cfg.value("equivalence_tol", 1e-9);
  const int n_check = cfg.value("check_points", 100);
  const double radius = cfg.value("x_radius", 1.0);

  TruncationLevel R = effective_truncation(prob);
  ProblemNets pnets = build_problem_nets(prob);
  HamiltonianNetBuild hb = build_hamiltonian_net(pnets, prob, R, delta);
  NeuralNet frozen = freeze_to_net(prob, pnets, hb.net, params, t);
  save_net(frozen, out_path(opt, "frozen_net.json"));

  CsvWriter csv({"point_id", "value_est", "value_net", "max_dev", "rel_dev",
                 "pass"});
  bool all_pass = true;
  std::vector<Vec> pts(n_check);
  for (int k = 0; k < n_check; ++k) {
    RngStream rng = derive_stream(seed, "freeze-check", k);
    Vec x(prob.d);
    for (int i = 0; i < prob.d; ++i)
      x[i] = (2.0 * rng.next_unit_open() - 1.0) * radius;
    pts[k] = std::move(x);
  }
  std::vector<MlpEstimate> est(n_check);
  std::vector<Vec> net_out(n_check);
  parallel_for(n_check, threads_of(opt), [&](std::int64_t k) {
    est[k] = mlp_estimate(prob, pnets, hb.net, params, t, pts[k]);
    net_out[k] = frozen.realize(pts[k]);
  });
  for (int k = 0; k < n_check; ++k) {
    Vec ref(1 + prob.d);
    ref[0] = est[k].value;
    ref.tail(prob.d) = est[k].gradient;
    const double dev = (net_out[k] - ref).lpNorm<Eigen::Infinity>();
    const double rel = dev / std::max(1.0, ref.lpNorm<Eigen::Infinity>());
    const bool pass = rel <= tol;
    all_pass = all_pass && pass;
    csv.row({std::to_string(k), fmt_g17(est[k].value), fmt_g17(net_out[k][0]),
             fmt_g17(dev), fmt_g17(rel), pass ? "PASS" : "FAIL"});
  }
  csv.write(out_path(opt, "freeze_report.csv"));

  CsvWriter sizes({"size_frozen", "width_frozen", "depth_frozen",
                   "size_phi_h", "size_psi", "count_indices"});
  sizes.row({std::to_string(frozen.size()), std::to_string(frozen.width()),
             std::to_string(frozen.depth()), std::to_string(hb.net.size()),
             std::to_string(pnets.psi.size()),
             std::to_string(count_indices(params.N, params.M))});
  sizes.write(out_path(opt, "freeze_sizes.csv"));
  return all_pass ? 0 : 1;
}

int cmd_scaling(const json& cfg, const Options& opt) {
  const std::uint64_t seed = seed_of(cfg, opt);
  std::vector<int> d_list = {1, 2, 4, 8, 16};
  if (cfg.contains("d_list")) {
    d_list.clear();
    for (const json& v : cfg["d_list"]) d_list.push_back(v.get<int>());
  }
  const double delta = cfg.value("delta", 1e-2);
  const std::string family = cfg.value("family", std::string("p1"));
  MlpParams params = mlp_params_of(cfg, seed);
  params.h_mode = HMode::network;
  params.threads = 1;

  CsvWriter csv({"d", "size_phi_h", "size_frozen", "width_frozen",
                 "depth_frozen", "equiv_dev"});
  std::vector<double> logd, logsize;
  for (int d : d_list) {
    json pj{{"family", family}, {"d", d}, {"R_override", 1.0}};
    ControlProblem prob = problem_from_json(pj);
    TruncationLevel R = effective_truncation(prob);
    ProblemNets pnets = build_problem_nets(prob);
    HamiltonianNetBuild hb = build_hamiltonian_net(pnets, prob, R, delta);
    NeuralNet frozen = freeze_to_net(prob, pnets, hb.net, params, 0.0);

    double dev = 0.0;
    for (int k = 0; k < 3; ++k) {
      RngStream rng = derive_stream(seed, "scaling-check", d, k);
      Vec x(d);
      for (int i = 0; i < d; ++i) x[i] = 2.0 * rng.next_unit_open() - 1.0;
      MlpEstimate est = mlp_estimate(prob, pnets, hb.net, params, 0.0, x);
      Vec ref(1 + d);
      ref[0] = est.value;
      ref.tail(d) = est.gradient;
      dev = std::max(dev,
                     (frozen.realize(x) - ref).lpNorm<Eigen::Infinity>() /
                         std::max(1.0, ref.lpNorm<Eigen::Infinity>()));
    }
    csv.row({std::to_string(d), std::to_string(hb.net.size()),
             std::to_string(frozen.size()), std::to_string(frozen.width()),
             std::to_string(frozen.depth()), fmt_g17(dev)});
    logd.push_back(std::log(static_cast<double>(d)));
    logsize.push_back(std::log(static_cast<double>(frozen.size())));
  }
  csv.write(out_path(opt, "scaling.csv"));

  CsvWriter sum({"quantity", "slope"});
  sum.row({"log_size_frozen_vs_log_d", fmt_g17(lsq_slope(logd, logsize))});
  sum.write(out_path(opt, "scaling_summary.csv"));
  return 0;
}

int cmd_convergence(const json& cfg, const Options& opt) {
  const std::uint64_t seed = seed_of(cfg, opt);
  const int threads = threads_of(opt);
  ControlProblem prob = problems_of(cfg).front();
  const double t = cfg.value("t", 0.0);
  std::vector<int> n_list = {1, 2, 3, 4};
  if (cfg.contains("N_list")) {
    n_list.clear();
    for (const json& v : cfg["N_list"]) n_list.push_back(v.get<int>());
  }
  const int n_seeds = cfg.value("seeds", 20);
  const std::string m_mode = cfg.value("M_mode", std::string("floor_pow"));
  MlpParams base = mlp_params_of(cfg, seed);

  std::vector<Vec> pts = points_of(cfg, prob.d, mix64(seed ^ fnv1a("points")));
  OracleRunner oracle = oracle_of(cfg, prob, seed, threads);
  if (!oracle.active())
    throw std::invalid_argument("convergence needs an oracle");
  std::vector<OracleResult> ref(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    ref[i] = oracle.at(t, pts[i], i);
    if (!ref[i].valid)
      throw std::runtime_error("oracle invalid at a query point: " +
                               ref[i].reason);
  }
  double ref_l2 = 0.0;
  for (const OracleResult& r : ref) ref_l2 += r.value * r.value;
  ref_l2 = std::sqrt(std::max(ref_l2, 1e-300));

  TruncationLevel R = effective_truncation(prob);
  CsvWriter csv({"N", "M", "seed_index", "l2_abs", "l2_rel"});
  CsvWriter sum({"N", "M", "mean_l2_rel", "se_l2_rel"});
  for (int N : n_list) {
    int M = base.M;
    if (m_mode == "floor_pow")
      M = std::max(1, static_cast<int>(std::floor(
                          std::pow(static_cast<double>(N), base.alpha_time))));
    else if (m_mode == "equal")
      M = N;
    std::vector<double> rels(n_seeds);
    parallel_for(n_seeds, threads, [&](std::int64_t s) {
      MlpParams p = base;
      p.N = N;
      p.M = M;
      p.threads = 1;
      p.seed = mix64(seed + kGoldenGamma * (s + 1));
      double se = 0.0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        MlpEstimate est = mlp_estimate(prob, R, p, t, pts[i]);
        const double d = est.value - ref[i].value;
        se += d * d;
      }
      rels[s] = std::sqrt(se) / ref_l2;
    });
    double mean = 0.0;
    for (int s = 0; s < n_seeds; ++s) {
      csv.row({std::to_string(N), std::to_string(M), std::to_string(s),
               fmt_g17(rels[s] * ref_l2 / std::sqrt(static_cast<double>(
                                              pts.size()))),
               fmt_g17(rels[s])});
      mean += rels[s];
    }
    mean /= n_seeds;
    double var = 0.0;
    for (double r : rels) var += (r - mean) * (r - mean);
    var = n_seeds > 1 ? var / (n_seeds - 1) : 0.0;
    sum.row({std::to_string(N), std::to_string(M), fmt_g17(mean),
             fmt_g17(std::sqrt(var / n_seeds))});
  }
  csv.write(out_path(opt, "convergence.csv"));
  sum.write(out_path(opt, "convergence_summary.csv"));
  return 0;
}

int run_command(const std::string& name, const Options& opt) {
  const json cfg = load_json(opt.config_path);
  if (name == "hamiltonian-check") return cmd_hamiltonian_check(cfg, opt);
  if (name == "blocks-check") return cmd_blocks_check(cfg, opt);
  if (name == "solve") return cmd_solve(cfg, opt);
  if (name == "freeze") return cmd_freeze(cfg, opt);
  if (name == "scaling") return cmd_scaling(cfg, opt);
  if (name == "convergence") return cmd_convergence(cfg, opt);
  std::cerr << "unknown command: " << name << "\n";
  return 2;
}

}  // namespace hjb::cli
