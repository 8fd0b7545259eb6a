#pragma once

// Independent reference solvers used to verify the estimator and the
// constructed networks: a Cole-Hopf / heat-semigroup Monte Carlo oracle for
// the unconstrained-interior regime, and a 1-D implicit-explicit finite
// difference solver for the HJB terminal value problem.

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hjbkit/problem.hpp"
#include "hjbkit/types.hpp"

namespace hjb {

struct OracleResult {
  double value = 0.0;
  Vec gradient;
  double stderr_ = 0.0;  // MC half-width or grid-error estimate
  Vec gradient_stderr;
  bool valid = false;
  std::string reason;
};

// V(t,x) = -2 gamma log E[exp(-Psi(x + W_{tf-t}) / (2 gamma))], gradient by
// the likelihood-ratio identity with common draws; valid only for the
// f1 = 0, f2 = I, Lbar = 0 family when the control clamp never activates.
OracleResult cole_hopf_value(const ControlProblem& prob, double t, const Vec& x,
                             std::int64_t mc_samples, std::uint64_t seed,
                             int threads = 1);

// E[Psi(x + W_{tf-t})] and the representation-formula gradient weight
// W/(tf-t) (with the Psi(x) control variate); valid for the H == 0 family.
OracleResult heat_value(const ControlProblem& prob, double t, const Vec& x,
                        std::int64_t mc_samples, std::uint64_t seed,
                        int threads = 1);

// PASS iff for every control coordinate the interval
// [-R sup|f2 col_i|_1 / (2 gamma), +...] sits inside [a_i, b_i], so the
// clamp never activates and the unconstrained Hamiltonian is exact.
std::pair<bool, std::string> oracle_validity_check(const ControlProblem& prob,
                                                   const TruncationLevel& R);

struct FdGrid {
  int nx = 2001;
  int nt = 0;  // 0: choose from the explicit-term budget <= 0.25
  double x_lo = -8.0;
  double x_hi = 8.0;
};

// Backward-in-time solve of  dt V + 1/2 dxx V + H(t, x, dx V) = 0,
// V(tf,.) = Psi: Crank-Nicolson diffusion, Adams-Bashforth-extrapolated
// explicit Hamiltonian from central differences, far-field Dirichlet data
// from the heat value of Psi. Queries interpolate the stored slices; the
// grid-error estimate compares against an internal half-resolution solve.
class Fd1dSolution {
 public:
  OracleResult at(double t, double x) const;
  bool cfl_warning() const { return cfl_warning_; }
  int nx() const { return nx_; }
  int nt() const { return nt_; }

 private:
  friend Fd1dSolution fd_solve_1d(const ControlProblem& prob,
                                  const FdGrid& grid);
  struct Slices {
    int nx = 0, nt = 0;
    double x_lo = 0.0, dx = 0.0, dt = 0.0;
    std::vector<std::vector<double>> v;  // nt+1 slices, index j at t = tf - j dt
    double interp(double t, double x, double tf, bool gradient) const;
  };
  Slices full_, half_;
  double t_f_ = 0.0;
  double margin_ = 0.0;
  int nx_ = 0, nt_ = 0;
  bool cfl_warning_ = false;
};

Fd1dSolution fd_solve_1d(const ControlProblem& prob, const FdGrid& grid);

// Nodes/weights of n-point Gauss-Hermite quadrature (weight e^{-y^2});
// E[f(Z)] = sum_k w_k f(sqrt(2) y_k) / sqrt(pi) for standard normal Z.
std::pair<Vec, Vec> gauss_hermite(int n);

}  // namespace hjb
