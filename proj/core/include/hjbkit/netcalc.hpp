#pragma once

// Explicit-weight neural networks and the construction calculus built on
// them: composition, parallelization, weighted sums, affine wiring, and the
// certified building blocks (clip, clamp, square, product, matrix-vector).
//
// A network is a list of layers (A, b, act). Layer i maps h -> act(A h + b);
// the final layer is always linear. Hidden activations are ReLU
// (sigma1(x) = max(0,x)) or ReCU (sigma3(x) = max(0,x)^3). Exact identity
// segments use sigma1(x) - sigma1(-x) for ReLU layers and the cubic identity
// 24x = (x+2)^3 - 2x^3 + (x-2)^3 for ReCU layers, so mixed-activation blocks
// can be stacked while every layer keeps a single activation.

#include <cstddef>
#include <string>
#include <vector>

#include "hjbkit/types.hpp"

namespace hjb {

enum class Act { linear, relu, recu };

std::string act_name(Act a);
Act act_from_name(const std::string& s);

struct Layer {
  SpMat A;
  Vec b;
  Act act = Act::linear;
};

class NeuralNet {
 public:
  NeuralNet() = default;
  explicit NeuralNet(std::vector<Layer> layers);

  int input_dim() const { return static_cast<int>(layers_.front().A.cols()); }
  int output_dim() const { return static_cast<int>(layers_.back().A.rows()); }
  int depth() const { return static_cast<int>(layers_.size()); }
  int width() const;
  // Number of nonzero weights over all A and b (recomputed, never cached).
  std::size_t size() const;

  const std::vector<Layer>& layers() const { return layers_; }

  Vec realize(const Vec& x) const;

  // ReCU pre-activations beyond this magnitude raise a diagnostic; cubing
  // larger values loses too much precision for the certified bounds.
  static constexpr double kRecuEnvelope = 1e4;

 private:
  std::vector<Layer> layers_;
};

// -- elementary constructors ------------------------------------------------

NeuralNet affine_net(const SpMat& A, const Vec& b);
NeuralNet affine_net(const Mat& A, const Vec& b);
NeuralNet zero_net(int in_dim, int out_dim);
// Exact identity on R^dim realized with hidden_depth activation layers.
NeuralNet identity_net(int dim, int hidden_depth, Act act);

// -- calculus ---------------------------------------------------------------

// realize(compose(f,g), x) = realize(f, realize(g, x)); the junction affine
// maps are fused.
NeuralNet compose(const NeuralNet& f, const NeuralNet& g);

// Stacked inputs/outputs; depth alignment inserts activation-matching
// identity segments (merged activation schedule = shortest common
// supersequence of the blocks' schedules).
NeuralNet parallelize(const std::vector<NeuralNet>& nets);

// Weighted sum with shared input: realize = sum_k w_k f_k(x).
NeuralNet add(const NeuralNet& f, const NeuralNet& g, double wf = 1.0,
              double wg = 1.0);
NeuralNet add_many(const std::vector<NeuralNet>& nets,
                   const std::vector<double>& weights);

// realize(affine_precompose(net, A, b), x) = realize(net, A x + b).
NeuralNet affine_precompose(const NeuralNet& net, const SpMat& A, const Vec& b);
NeuralNet affine_precompose(const NeuralNet& net, const Mat& A, const Vec& b);
// realize(affine_postcompose(C, e, net), x) = C realize(net, x) + e.
NeuralNet affine_postcompose(const SpMat& C, const Vec& e, const NeuralNet& net);
NeuralNet affine_postcompose(const Mat& C, const Vec& e, const NeuralNet& net);

// -- schedule machinery (exposed for tests and size analysis) ---------------

// Activation tags between affine stages, i.e. acts of layers 0..L-2.
std::vector<Act> hidden_schedule(const NeuralNet& net);
// Shortest common supersequence of two schedules.
std::vector<Act> merge_schedules(const std::vector<Act>& a,
                                 const std::vector<Act>& b);
// Rebuilds net so its hidden schedule equals sched (a supersequence of the
// net's own schedule); inserted positions carry exact identity segments.
NeuralNet expand_to_schedule(const NeuralNet& net,
                             const std::vector<Act>& sched);

// -- certified building blocks ----------------------------------------------

// Componentwise chi_R. Exactly saturating: for |y_i| >= R the output is the
// bit pattern of +-R, so downstream nets cannot see where in the saturated
// band the input was. Weight count does not depend on R.
NeuralNet clip_net(double R, int dim = 1);

// Componentwise min(max(y_i, a_i), b_i); outputs are always inside the
// closed box.
NeuralNet clamp_net(const Vec& a, const Vec& b);

// Piecewise-linear interpolant of x^2 on the dyadic grid {k 2^-m} over
// [0,1]; max error exactly 2^-(2m+2), Lipschitz constant <= 2.
NeuralNet sq_net(int m);
// Smallest m with interpolation error 2^-(2m+2) <= eps.
int sq_depth_for(double eps);

// Two inputs -> x*y within delta on [-M,M]^2 (inputs are pre-clamped to the
// range, so outside it the net computes clamp(x)*clamp(y) within delta).
// Lipschitz constant <= 4M in each argument.
NeuralNet prod_net(double range, double delta);
// Internal refinement depth used by prod_net(range, delta).
int prod_sq_depth(double range, double delta);

// (m*n + n) inputs (A row-major, then b) -> A b with p-norm error
// <= delta * m^(1/p) * n for entries in [-range, range].
NeuralNet matvec_net(int m, int n, double range, double delta);

}  // namespace hjb
