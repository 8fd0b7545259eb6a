#include "cli_commands.hpp"

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "hjbkit/io.hpp"

using namespace hjb;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  return std::string(std::istreambuf_iterator<char>(f),
                     std::istreambuf_iterator<char>());
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("hjbkit_test_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

json p1_json(int d) {
  return json{{"family", "p1"}, {"d", d}, {"R_override", 2.0}};
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("problem file round-trip is the identity") {
  json j{{"family", "colehopf"}, {"d", 4}, {"t_f", 0.75},
         {"psi", {{"kind", "bspline"}, {"amplitude", 0.5}}}};
  const json j1 = family_to_json(family_from_json(j));
  const json j2 = family_to_json(family_from_json(j1));
  CHECK(j1 == j2);

  json custom{{"family", "custom"},
              {"d", 2},
              {"dbar", 3},
              {"gamma", 2.0},
              {"a", {-1.0, -1.0, 0.5}},
              {"b", {3.0, 1.0, 2.0}},
              {"f1", {{"kind", "const"}, {"c", {0.25, -0.125}}}},
              {"f2",
               {{"kind", "affine"},
                {"A", json::array({{0.0, 0.1, 0.0}, {0.0, 0.0, 0.0},
                                   {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0},
                                   {0.0, 0.0, 0.2}, {0.0, 0.0, 0.0}})},
                {"c", {1.0, 0.0, 0.0, 0.0, 1.0, 0.0}}}},
              {"lbar", {{"kind", "affine"}, {"g", {0.0, 0.5, -0.5}}, {"c", 0.1}}},
              {"psi", {{"kind", "linear"}, {"g", {1.0, -1.0}}, {"c", 0.0}}},
              {"R_override", 1.5}};
  const json c1 = family_to_json(family_from_json(custom));
  const json c2 = family_to_json(family_from_json(c1));
  CHECK(c1 == c2);
}

TEST_CASE("bound_constants in the problem file override the derived ones") {
  json j{{"family", "p1"},
         {"d", 2},
         {"bound_constants",
          {{"sup_grad_psi_2", 1.0}, {"sup_psi", 0.5}, {"lip_f2_2", 0.0}}}};
  ControlProblem prob = problem_from_json(j);
  REQUIRE(prob.bound_constants.has_value());
  CHECK(prob.bound_constants->sup_grad_psi_2 == 1.0);
  CHECK(prob.bound_constants->sup_psi == 0.5);
  // with user constants the bound becomes computable for linear psi
  CHECK(gradient_bound(prob).R > 0.0);
  const json j1 = family_to_json(family_from_json(j));
  const json j2 = family_to_json(family_from_json(j1));
  CHECK(j1 == j2);
}

TEST_CASE("blocks-check hamnet section emits the per-point report") {
  TempDir dir("hamnetcsv");
  json cfg{{"seed", 5},
           {"sq_m", {1}},
           {"sq_samples", 1000},
           {"hamnet",
            {{"problem", json{{"family", "colehopf"}, {"d", 2}}},
             {"delta", 1e-2},
             {"points", 200}}}};
  cli::Options opt;
  opt.out_dir = dir.path.string();
  opt.threads = 2;
  CHECK(cli::cmd_blocks_check(cfg, opt) == 0);
  const std::string body = slurp(dir.path / "hamnet_check.csv");
  CHECK(body.find("point_id,value_exact,value_net,envelope,pass") == 0);
  CHECK(body.find("FAIL") == std::string::npos);
}

TEST_CASE("hamiltonian-check passes on P1 and fails when corrupted") {
  TempDir dir("hamcheck");
  json cfg{{"problem", p1_json(2)},
           {"seed", 3},
           {"points_per_problem", 50},
           {"grid_n", 10000},
           {"tol", 1e-4}};
  cli::Options opt;
  opt.out_dir = dir.path.string();
  opt.threads = 2;
  CHECK(cli::cmd_hamiltonian_check(cfg, opt) == 0);
  CHECK(fs::exists(dir.path / "hamiltonian_check.csv"));

  // harness self-test: corrupt the closed form's gamma
  cfg["self_test_corrupt_gamma"] = true;
  CHECK(cli::cmd_hamiltonian_check(cfg, opt) == 1);
}

TEST_CASE("blocks-check produces a green report") {
  TempDir dir("blocks");
  json cfg{{"seed", 4},
           {"sq_m", {1, 3}},
           {"sq_samples", 20000},
           {"prod", {{"range", 2.0}, {"delta", 1e-3}, {"samples", 3000}}},
           {"matvec",
            {{"m", 2}, {"n", 2}, {"range", 2.0}, {"delta", 1e-3},
             {"samples", 300}}}};
  cli::Options opt;
  opt.out_dir = dir.path.string();
  CHECK(cli::cmd_blocks_check(cfg, opt) == 0);
  const std::string body = slurp(dir.path / "blocks_check.csv");
  CHECK(body.find("FAIL") == std::string::npos);
}

TEST_CASE("solve: byte-identical across reruns and thread counts") {
  TempDir dir1("solve1"), dir2("solve2"), dir8("solve8");
  json cfg{{"problem", json{{"family", "colehopf"}, {"d", 3}}},
           {"seed", 11},
           {"t", 0.0},
           {"mlp", {{"N", 2}, {"M", 2}, {"alpha_time", 0.5}}},
           {"Q", {{"lo", {-1.0, -1.0, -1.0}}, {"hi", {1.0, 1.0, 1.0}},
                  {"n", 6}}}};
  cli::Options o1, o2, o8;
  o1.out_dir = dir1.path.string();
  o1.threads = 1;
  o2.out_dir = dir2.path.string();
  o2.threads = 2;
  o8.out_dir = dir8.path.string();
  o8.threads = 8;
  CHECK(cli::cmd_solve(cfg, o1) == 0);
  CHECK(cli::cmd_solve(cfg, o2) == 0);
  CHECK(cli::cmd_solve(cfg, o8) == 0);
  const std::string a = slurp(dir1.path / "solve.csv");
  CHECK(a == slurp(dir2.path / "solve.csv"));
  CHECK(a == slurp(dir8.path / "solve.csv"));

  // rerun in place: identical bytes
  CHECK(cli::cmd_solve(cfg, o1) == 0);
  CHECK(a == slurp(dir1.path / "solve.csv"));
  CHECK(a.find("wall_ms") == std::string::npos);
}

TEST_CASE("solve with the heat oracle and l2 summary") {
  TempDir dir("solveh");
  json cfg{{"problem", json{{"family", "heat"}, {"d", 2}}},
           {"seed", 12},
           {"mlp", {{"N", 2}, {"M", 3}, {"alpha_time", 1.0}}},
           {"oracle", "heat"},
           {"mc_samples", 20000},
           {"l2_summary", true},
           {"Q", {{"lo", {-1.0, -1.0}}, {"hi", {1.0, 1.0}}, {"n", 4}}}};
  cli::Options opt;
  opt.out_dir = dir.path.string();
  opt.threads = 2;
  CHECK(cli::cmd_solve(cfg, opt) == 0);
  CHECK(fs::exists(dir.path / "solve.csv"));
  CHECK(fs::exists(dir.path / "solve_summary.csv"));
  const std::string body = slurp(dir.path / "solve.csv");
  CHECK(body.find("oracle_value") != std::string::npos);
}

TEST_CASE("freeze: equivalence report, net file, exact mode refused") {
  TempDir dir("freeze");
  json cfg{{"problem", json{{"family", "colehopf"}, {"d", 2}}},
           {"seed", 13},
           {"mlp", {{"N", 2}, {"M", 2}, {"alpha_time", 0.5}}},
           {"delta", 1e-2},
           {"check_points", 10}};
  cli::Options opt;
  opt.out_dir = dir.path.string();
  opt.threads = 2;
  CHECK(cli::cmd_freeze(cfg, opt) == 0);
  CHECK(fs::exists(dir.path / "frozen_net.json"));
  NeuralNet net = load_net((dir.path / "frozen_net.json").string());
  CHECK(net.input_dim() == 2);
  CHECK(net.output_dim() == 3);

  json bad = cfg;
  bad["mlp"]["h_mode"] = "exact";
  CHECK_THROWS_AS(cli::cmd_freeze(bad, opt), std::invalid_argument);
}

TEST_CASE("freeze is byte-identical across thread counts") {
  TempDir dir1("fz1"), dir8("fz8");
  json cfg{{"problem", json{{"family", "colehopf"}, {"d", 2}}},
           {"seed", 14},
           {"mlp", {{"N", 2}, {"M", 2}, {"alpha_time", 0.5}}},
           {"delta", 1e-2},
           {"check_points", 5}};
  cli::Options o1, o8;
  o1.out_dir = dir1.path.string();
  o1.threads = 1;
  o8.out_dir = dir8.path.string();
  o8.threads = 8;
  CHECK(cli::cmd_freeze(cfg, o1) == 0);
  CHECK(cli::cmd_freeze(cfg, o8) == 0);
  CHECK(slurp(dir1.path / "frozen_net.json") ==
        slurp(dir8.path / "frozen_net.json"));
  CHECK(slurp(dir1.path / "freeze_report.csv") ==
        slurp(dir8.path / "freeze_report.csv"));
}

TEST_CASE("solve through the network Hamiltonian route") {
  TempDir dir("solvenet");
  json cfg{{"problem", json{{"family", "colehopf"}, {"d", 2}}},
           {"seed", 16},
           {"delta", 1e-2},
           {"mlp", {{"N", 2}, {"M", 2}, {"alpha_time", 0.5},
                    {"h_mode", "network"}}},
           {"points", {{0.25, -0.5}, {0.0, 0.0}}}};
  cli::Options opt;
  opt.out_dir = dir.path.string();
  opt.threads = 2;
  CHECK(cli::cmd_solve(cfg, opt) == 0);
  const std::string body = slurp(dir.path / "solve.csv");
  CHECK(body.find("value") != std::string::npos);
  // network and exact evaluations agree to the built tolerance scale
  json exact = cfg;
  exact["mlp"]["h_mode"] = "exact";
  TempDir dir2("solvenet2");
  cli::Options opt2;
  opt2.out_dir = dir2.path.string();
  CHECK(cli::cmd_solve(exact, opt2) == 0);
}

TEST_CASE("timings flag appends the wall_ms column") {
  TempDir dir("timings");
  json cfg{{"problem", json{{"family", "heat"}, {"d", 2}}},
           {"seed", 1},
           {"mlp", {{"N", 1}, {"M", 1}, {"alpha_time", 1.0}}},
           {"points", {{0.0, 0.0}}}};
  cli::Options opt;
  opt.out_dir = dir.path.string();
  opt.timings = true;
  CHECK(cli::cmd_solve(cfg, opt) == 0);
  CHECK(slurp(dir.path / "solve.csv").find("wall_ms") != std::string::npos);
}

TEST_CASE("run_command dispatches from a config file") {
  TempDir dir("dispatch");
  const json cfg{{"problem", json{{"family", "heat"}, {"d", 2}}},
                 {"seed", 2},
                 {"mlp", {{"N", 1}, {"M", 1}, {"alpha_time", 1.0}}},
                 {"points", {{0.1, 0.2}}}};
  const std::string cfg_path = (dir.path / "cfg.json").string();
  save_json(cfg, cfg_path);
  cli::Options opt;
  opt.config_path = cfg_path;
  opt.out_dir = dir.path.string();
  CHECK(cli::run_command("solve", opt) == 0);
  CHECK(fs::exists(dir.path / "solve.csv"));
  CHECK(cli::run_command("no-such-command", opt) == 2);
}

TEST_CASE("convergence command writes ensemble summaries") {
  TempDir dir("conv");
  json cfg{{"problem", json{{"family", "colehopf"}, {"d", 2}}},
           {"seed", 15},
           {"N_list", {1, 2}},
           {"M_mode", "equal"},
           {"seeds", 4},
           {"mlp", {{"alpha_time", 1.0}}},
           {"oracle", "cole_hopf"},
           {"mc_samples", 40000},
           {"Q", {{"lo", {-1.0, -1.0}}, {"hi", {1.0, 1.0}}, {"n", 4}}}};
  cli::Options opt;
  opt.out_dir = dir.path.string();
  opt.threads = 4;
  CHECK(cli::cmd_convergence(cfg, opt) == 0);
  CHECK(fs::exists(dir.path / "convergence.csv"));
  CHECK(fs::exists(dir.path / "convergence_summary.csv"));
}

TEST_SUITE_END();
