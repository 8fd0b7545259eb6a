#pragma once

// Multilevel Picard estimator for (V(t,x), grad_x V(t,x)) and the freezing
// of one sampled estimator into a single explicit network.
//
// Index tree: Theta_0 = {root}, Theta_k extends every path by (l, i) with
// l in [-k+1, k-1], i in [-M^k, M^k]. The estimator consumes the labels
// (theta,0,-i) for the terminal block and (theta,l,i) / (theta,-l,i) for
// the level differences; labels are pure RNG stream identifiers, so fixed
// seeds give scheduling-independent results.

#include <cstdint>
#include <string>
#include <vector>

#include "hjbkit/hamnet.hpp"
#include "hjbkit/netcalc.hpp"
#include "hjbkit/problem.hpp"
#include "hjbkit/rng.hpp"
#include "hjbkit/types.hpp"

namespace hjb {

enum class HMode { exact_hr, network };

struct MlpParams {
  int N = 1;
  int M = 1;
  double alpha_time = 0.5;  // in (0,1]; 1 is the uniform-sampling case
  std::uint64_t seed = 0;
  HMode h_mode = HMode::exact_hr;
  int threads = 1;
};

struct IndexPath {
  std::vector<std::pair<std::int64_t, std::int64_t>> steps;
  std::string to_string() const;
};

struct MlpMeta {
  int N = 0;
  int M = 0;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
  std::uint64_t z_draws = 0;
  std::uint64_t tau_draws = 0;
};

struct MlpEstimate {
  double value = 0.0;
  Vec gradient;
  MlpMeta meta;
};

// #Theta^N_N via #Theta_k = #Theta_{k-1} (1 + (2k-1)(2 M^k + 1)).
std::uint64_t count_indices(int N, int M);

// Inverse-transform sample of the law with CDF b -> b^alpha on (0,1);
// never returns an endpoint.
double sample_tau(RngStream& rng, double alpha_time);

// d i.i.d. standard normal coordinates.
Vec sample_gaussian(RngStream& rng, int d);

// The full recursion with H evaluated through the exact truncated
// Hamiltonian. Requires params.h_mode == exact_hr.
MlpEstimate mlp_estimate(const ControlProblem& prob, const TruncationLevel& R,
                         const MlpParams& params, double t, const Vec& x);

// Same recursion with H and Psi evaluated through their networks.
// Requires params.h_mode == network.
MlpEstimate mlp_estimate(const ControlProblem& prob, const ProblemNets& pnets,
                         const NeuralNet& phi_h, const MlpParams& params,
                         double t, const Vec& x);

// Rewrites one sampled estimator (randomness fixed by params.seed) as a
// single network x -> (value, gradient): channel 0 is the value, channels
// 1..d the gradient. Built from shifts, composition, parallelization and
// weighted addition only.
NeuralNet freeze_to_net(const ControlProblem& prob, const ProblemNets& pnets,
                        const NeuralNet& phi_h, const MlpParams& params,
                        double t);

struct MaxNormReport {
  double mean = 0.0;
  double mean_se = 0.0;
  double mean_bound = 0.0;  // sigma sqrt(2 log 2n)
  std::vector<double> tail_alpha;
  std::vector<double> tail_freq;
  std::vector<double> tail_se;
  std::vector<double> tail_bound;  // exp(-alpha^2 / (2 sigma^2))
  bool pass = false;
};

// Empirical check of the Gaussian max-norm concentration bounds.
MaxNormReport gaussian_maxnorm_check(int n, double sigma, int samples,
                                     std::uint64_t seed,
                                     const std::vector<double>& alphas = {1.0,
                                                                          2.0});

}  // namespace hjb
