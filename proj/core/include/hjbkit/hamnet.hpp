#pragma once

// Assembles the explicit Hamiltonian network and the feedback policy
// network from a problem's component networks, and validates the certified
// error / Lipschitz contracts by sampling.

#include <cstdint>

#include "hjbkit/netcalc.hpp"
#include "hjbkit/problem.hpp"

namespace hjb {

// Component networks of one problem instance. For the built-in families all
// four are exact, so the approximation tolerances are zero. Lipschitz
// constants are with respect to the 1-norm in x (output in the 1-norm);
// sup_* fields bound realizations on [0,t_f] x {|x|_inf <= x_envelope}.
struct ProblemNets {
  NeuralNet f1;    // (1+d) -> d
  NeuralNet f2;    // (1+d) -> d*dbar, row-major
  NeuralNet lbar;  // (1+d) -> 1
  NeuralNet psi;   // d -> 1, ReCU hidden layers (C^2)
  double delta1 = 0.0, delta2 = 0.0, delta_lbar = 0.0, delta_psi = 0.0;
  double lip_f1_x = 0.0, lip_f2_x = 0.0, lip_lbar_x = 0.0, lip_psi_x = 0.0;
  double sup_f1_inf = 0.0;
  double sup_f2_inf = 0.0;
  double sup_f2_one = 0.0;      // entrywise 1-norm sup
  double sup_f2_row_one = 0.0;  // max row 1-norm sup
  double x_envelope = 32.0;
};

// Exact component nets for a built-in family.
ProblemNets build_problem_nets(const ControlProblem& prob);

struct HamiltonianNetBuild {
  NeuralNet net;       // (1 + 2d) -> 1, input (t, x, p)
  double delta = 0.0;  // requested target
  double range = 0.0;  // product/matvec range bound M
  double delta_prod = 0.0;
  double delta_sq = 0.0;
  int sq_depth = 0;
  // Lipschitz upper bounds of the emitted net assembled along the
  // composition chain (1-norm in x, 1-norm in p).
  double lip_x_bound = 0.0;
  double lip_p_bound = 0.0;
};

// Emits one network realizing
//   prod(chi_R(p)^T, f1 + matvec(f2, u~)) + lbar + gamma sum_i
//   max(a_i,b_i)^2 sq(|u~_i| / max|a_i|,|b_i|)
// with u~ = clamp(-matvec(f2^T, chi_R(p)) / (2 gamma), a, b). For exact
// component nets the deviation from H_R is <= delta uniformly on the range
// envelope; p enters only through the clip, so realizations are exactly
// invariant under p -> chi_R(p).
HamiltonianNetBuild build_hamiltonian_net(const ProblemNets& pnets,
                                          const ControlProblem& prob,
                                          const TruncationLevel& R,
                                          double delta);

// clamp(-matvec(f2(0,.)^T, grad_net(.)) / (2 gamma)): feedback policy at
// t = 0 from a gradient surrogate; outputs always inside the control box.
NeuralNet build_policy_net(const ProblemNets& pnets, const ControlProblem& prob,
                           const NeuralNet& grad_net, double eps0);

struct LipschitzProbe {
  double t_f = 1.0;
  double x_range = 5.0;   // sup-norm sampling radius
  double p_range = 2.0;
  int state_dim = 0;      // >0: treat input as (t, x[d], p[d]) with d = state_dim
};

struct LipschitzReport {
  double max_ratio_x = 0.0;
  double max_ratio_p = 0.0;
  double bound_x = 0.0;
  double bound_p = 0.0;
  bool pass = false;
};

// Empirical max difference ratios over `samples` random pairs; PASS iff both
// stay below the stated bounds.
LipschitzReport validate_net_lipschitz(const NeuralNet& net, double cx_bound,
                                       double cp_bound, int samples,
                                       std::uint64_t seed,
                                       const LipschitzProbe& probe);

}  // namespace hjb
