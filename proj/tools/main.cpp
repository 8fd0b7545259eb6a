// hjbkit: batch solver and verification toolkit for box-constrained
// control-affine HJB problems.

#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cli_commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "HJB solver and verification toolkit: closed-form Hamiltonians, "
      "certified network building blocks, multilevel Picard estimation, "
      "estimator freezing, and verification oracles"};
  app.require_subcommand(1);

  hjb::cli::Options opt;
  const std::vector<std::string> names = {"hamiltonian-check", "blocks-check",
                                          "solve", "freeze", "scaling",
                                          "convergence"};
  const std::vector<std::string> descs = {
      "closed-form Hamiltonian vs separable grid search",
      "certified error/Lipschitz suites for the network building blocks",
      "multilevel Picard estimates at query points, optional oracle columns",
      "freeze one sampled estimator into a single network file",
      "frozen-network size across dimensions with a log-log slope fit",
      "estimator error vs level count against a reference oracle"};
  std::uint64_t seed_val = 0;
  for (std::size_t i = 0; i < names.size(); ++i) {
    CLI::App* sub = app.add_subcommand(names[i], descs[i]);
    sub->add_option("--config", opt.config_path, "JSON experiment config")
        ->required();
    sub->add_option("--out", opt.out_dir, "output directory (default: .)");
    sub->add_option("--seed", seed_val, "override the config seed")
        ->each([&opt, &seed_val](const std::string&) { opt.seed = seed_val; });
    sub->add_option("--threads", opt.threads,
                    "worker threads (default: HJB_THREADS or all cores)");
    sub->add_flag("--timings", opt.timings,
                  "append wall_ms columns (breaks byte-stable outputs)");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    return hjb::cli::run_command(sub, opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
