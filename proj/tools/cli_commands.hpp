#pragma once

// Batch commands behind the hjbkit binary. Every command is deterministic
// given (config, seed): reports are byte-identical across reruns and thread
// counts. Wall-clock timings are only appended when explicitly requested,
// so the default outputs stay stable.

#include <cstdint>
#include <optional>
#include <string>

#include "hjbkit/io.hpp"

namespace hjb::cli {

struct Options {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides the config seed
  int threads = 0;                    // 0: HJB_THREADS or hardware default
  bool timings = false;               // append wall_ms columns
};

// Exit codes: 0 all rows pass, 1 at least one FAIL row, 2 usage error.
int cmd_hamiltonian_check(const json& cfg, const Options& opt);
int cmd_blocks_check(const json& cfg, const Options& opt);
int cmd_solve(const json& cfg, const Options& opt);
int cmd_freeze(const json& cfg, const Options& opt);
int cmd_scaling(const json& cfg, const Options& opt);
int cmd_convergence(const json& cfg, const Options& opt);

// Dispatch by subcommand name; loads the config file.
int run_command(const std::string& name, const Options& opt);

}  // namespace hjb::cli
