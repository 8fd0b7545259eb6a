#include "hjbkit/netcalc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hjb {

namespace {

SpMat to_sparse(const Mat& A) {
  SpMat s = A.sparseView();
  s.prune(0.0, 0.0);
  s.makeCompressed();
  return s;
}

SpMat pruned(SpMat A) {
  A.prune(0.0, 0.0);
  A.makeCompressed();
  return A;
}

SpMat sparse_identity(int n, double scale = 1.0) {
  SpMat I(n, n);
  I.reserve(Eigen::VectorXi::Constant(n, 1));
  for (int i = 0; i < n; ++i) I.insert(i, i) = scale;
  I.makeCompressed();
  return I;
}

// Vertical stack of sparse blocks sharing a column count.
SpMat vstack(const std::vector<const SpMat*>& blocks) {
  int rows = 0;
  const int cols = static_cast<int>(blocks.front()->cols());
  std::size_t nnz = 0;
  for (const SpMat* blk : blocks) {
    rows += static_cast<int>(blk->rows());
    nnz += static_cast<std::size_t>(blk->nonZeros());
    if (blk->cols() != cols) throw std::logic_error("vstack: column mismatch");
  }
  std::vector<Triplet> trips;
  trips.reserve(nnz);
  int off = 0;
  for (const SpMat* blk : blocks) {
    for (int r = 0; r < blk->outerSize(); ++r)
      for (SpMat::InnerIterator it(*blk, r); it; ++it)
        trips.emplace_back(off + static_cast<int>(it.row()),
                           static_cast<int>(it.col()), it.value());
    off += static_cast<int>(blk->rows());
  }
  SpMat out(rows, cols);
  out.setFromTriplets(trips.begin(), trips.end());
  return pruned(std::move(out));
}

SpMat block_diag(const std::vector<const SpMat*>& blocks) {
  int rows = 0, cols = 0;
  std::size_t nnz = 0;
  for (const SpMat* blk : blocks) {
    rows += static_cast<int>(blk->rows());
    cols += static_cast<int>(blk->cols());
    nnz += static_cast<std::size_t>(blk->nonZeros());
  }
  std::vector<Triplet> trips;
  trips.reserve(nnz);
  int ro = 0, co = 0;
  for (const SpMat* blk : blocks) {
    for (int r = 0; r < blk->outerSize(); ++r)
      for (SpMat::InnerIterator it(*blk, r); it; ++it)
        trips.emplace_back(ro + static_cast<int>(it.row()),
                           co + static_cast<int>(it.col()), it.value());
    ro += static_cast<int>(blk->rows());
    co += static_cast<int>(blk->cols());
  }
  SpMat out(rows, cols);
  out.setFromTriplets(trips.begin(), trips.end());
  return pruned(std::move(out));
}

void apply_act(Act act, Vec& h) {
  switch (act) {
    case Act::linear:
      break;
    case Act::relu:
      h = h.cwiseMax(0.0);
      break;
    case Act::recu: {
      if (h.size() > 0 && h.cwiseAbs().maxCoeff() > NeuralNet::kRecuEnvelope)
        throw std::domain_error(
            "recu pre-activation outside the certified envelope |x| <= 1e4");
      for (Eigen::Index i = 0; i < h.size(); ++i) {
        const double s = std::max(0.0, h[i]);
        h[i] = s * s * s;
      }
      break;
    }
  }
}

}  // namespace

std::string act_name(Act a) {
  switch (a) {
    case Act::linear: return "linear";
    case Act::relu: return "relu";
    case Act::recu: return "recu";
  }
  return "linear";
}

Act act_from_name(const std::string& s) {
  if (s == "linear") return Act::linear;
  if (s == "relu") return Act::relu;
  if (s == "recu") return Act::recu;
  throw std::invalid_argument("unknown activation tag: " + s);
}

NeuralNet::NeuralNet(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw std::invalid_argument("net needs >= 1 layer");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& L = layers_[i];
    if (L.b.size() != L.A.rows())
      throw std::invalid_argument("layer bias length != row count");
    if (i > 0 && layers_[i - 1].A.rows() != L.A.cols())
      throw std::invalid_argument("layer shapes do not chain");
  }
  if (layers_.back().act != Act::linear)
    throw std::invalid_argument("output layer must be linear");
}

int NeuralNet::width() const {
  int w = input_dim();
  for (const Layer& L : layers_) w = std::max(w, static_cast<int>(L.A.rows()));
  return w;
}

std::size_t NeuralNet::size() const {
  std::size_t s = 0;
  for (const Layer& L : layers_) {
    for (int r = 0; r < L.A.outerSize(); ++r)
      for (SpMat::InnerIterator it(L.A, r); it; ++it)
        if (it.value() != 0.0) ++s;
    for (Eigen::Index i = 0; i < L.b.size(); ++i)
      if (L.b[i] != 0.0) ++s;
  }
  return s;
}

Vec NeuralNet::realize(const Vec& x) const {
  if (x.size() != input_dim())
    throw std::invalid_argument("realize: input dimension mismatch");
  Vec h = x;
  for (const Layer& L : layers_) {
    Vec next = L.A * h;
    next += L.b;
    apply_act(L.act, next);
    h = std::move(next);
  }
  return h;
}

NeuralNet affine_net(const SpMat& A, const Vec& b) {
  return NeuralNet({Layer{pruned(A), b, Act::linear}});
}

NeuralNet affine_net(const Mat& A, const Vec& b) {
  return affine_net(to_sparse(A), b);
}

NeuralNet zero_net(int in_dim, int out_dim) {
  return affine_net(SpMat(out_dim, in_dim), Vec::Zero(out_dim));
}

NeuralNet identity_net(int dim, int hidden_depth, Act act) {
  NeuralNet id = affine_net(sparse_identity(dim), Vec::Zero(dim));
  if (hidden_depth <= 0) return id;
  return expand_to_schedule(id, std::vector<Act>(hidden_depth, act));
}

NeuralNet compose(const NeuralNet& f, const NeuralNet& g) {
  if (f.input_dim() != g.output_dim())
    throw std::invalid_argument("compose: f input != g output");
  std::vector<Layer> layers(g.layers().begin(), g.layers().end() - 1);
  const Layer& gl = g.layers().back();
  const Layer& f0 = f.layers().front();
  Layer junction;
  junction.A = pruned(SpMat(f0.A * gl.A));
  junction.b = f0.A * gl.b + f0.b;
  junction.act = f0.act;
  layers.push_back(std::move(junction));
  layers.insert(layers.end(), f.layers().begin() + 1, f.layers().end());
  return NeuralNet(std::move(layers));
}

std::vector<Act> hidden_schedule(const NeuralNet& net) {
  std::vector<Act> sched;
  sched.reserve(net.depth() - 1);
  for (int i = 0; i + 1 < net.depth(); ++i) {
    const Act a = net.layers()[i].act;
    if (a == Act::linear)
      throw std::logic_error("hidden layer with linear act; fuse first");
    sched.push_back(a);
  }
  return sched;
}

std::vector<Act> merge_schedules(const std::vector<Act>& a,
                                 const std::vector<Act>& b) {
  // Shortest common supersequence via the LCS table.
  const std::size_t m = a.size(), n = b.size();
  std::vector<std::vector<int>> lcs(m + 1, std::vector<int>(n + 1, 0));
  for (std::size_t i = 1; i <= m; ++i)
    for (std::size_t j = 1; j <= n; ++j)
      lcs[i][j] = (a[i - 1] == b[j - 1])
                      ? lcs[i - 1][j - 1] + 1
                      : std::max(lcs[i - 1][j], lcs[i][j - 1]);
  std::vector<Act> out;
  out.reserve(m + n - lcs[m][n]);
  std::size_t i = m, j = n;
  while (i > 0 && j > 0) {
    if (a[i - 1] == b[j - 1]) {
      out.push_back(a[--i]);
      --j;
    } else if (lcs[i - 1][j] >= lcs[i][j - 1]) {
      out.push_back(a[--i]);
    } else {
      out.push_back(b[--j]);
    }
  }
  while (i > 0) out.push_back(a[--i]);
  while (j > 0) out.push_back(b[--j]);
  std::reverse(out.begin(), out.end());
  return out;
}

NeuralNet expand_to_schedule(const NeuralNet& net,
                             const std::vector<Act>& sched) {
  const std::vector<Act> own = hidden_schedule(net);
  if (own == sched) return net;

  // decode: logical values = decode * physical channels. Identity segments
  // grow the physical width; placing an own layer resets it.
  SpMat decode = sparse_identity(net.input_dim());
  std::vector<Layer> layers;
  layers.reserve(sched.size() + 1);
  std::size_t pending = 0;

  for (Act want : sched) {
    if (pending < own.size() && own[pending] == want) {
      const Layer& L = net.layers()[pending];
      Layer placed;
      placed.A = pruned(SpMat(L.A * decode));
      placed.b = L.b;
      placed.act = want;
      layers.push_back(std::move(placed));
      decode = sparse_identity(static_cast<int>(L.A.rows()));
      ++pending;
      continue;
    }
    const int w = static_cast<int>(decode.rows());
    Layer ride;
    if (want == Act::relu) {
      // y = sigma1(y) - sigma1(-y)
      SpMat neg = decode * -1.0;
      ride.A = vstack({&decode, &neg});
      ride.b = Vec::Zero(2 * w);
      ride.act = Act::relu;
      std::vector<Triplet> dt;
      dt.reserve(2 * w);
      for (int i = 0; i < w; ++i) {
        dt.emplace_back(i, i, 1.0);
        dt.emplace_back(i, w + i, -1.0);
      }
      SpMat nd(w, 2 * w);
      nd.setFromTriplets(dt.begin(), dt.end());
      decode = std::move(nd);
    } else if (want == Act::recu) {
      // 24y = (y+2)^3 - (-y-2)^3-style split of the cubic identity:
      // y = [s3(y+2) - s3(-y-2) - 2 s3(y) + 2 s3(-y) + s3(y-2) - s3(-y+2)]/24
      SpMat neg = decode * -1.0;
      ride.A = vstack({&decode, &neg, &decode, &neg, &decode, &neg});
      Vec b(6 * w);
      b.segment(0, w).setConstant(2.0);
      b.segment(w, w).setConstant(-2.0);
      b.segment(2 * w, 2 * w).setZero();
      b.segment(4 * w, w).setConstant(-2.0);
      b.segment(5 * w, w).setConstant(2.0);
      ride.b = std::move(b);
      ride.act = Act::recu;
      const double c = 1.0 / 24.0;
      std::vector<Triplet> dt;
      dt.reserve(6 * w);
      for (int i = 0; i < w; ++i) {
        dt.emplace_back(i, i, c);
        dt.emplace_back(i, w + i, -c);
        dt.emplace_back(i, 2 * w + i, -2.0 * c);
        dt.emplace_back(i, 3 * w + i, 2.0 * c);
        dt.emplace_back(i, 4 * w + i, c);
        dt.emplace_back(i, 5 * w + i, -c);
      }
      SpMat nd(w, 6 * w);
      nd.setFromTriplets(dt.begin(), dt.end());
      decode = std::move(nd);
    } else {
      throw std::logic_error("schedule may not contain linear");
    }
    ride.A = pruned(std::move(ride.A));
    layers.push_back(std::move(ride));
  }
  if (pending != own.size())
    throw std::logic_error("schedule is not a supersequence of the net's");

  const Layer& last = net.layers().back();
  Layer out;
  out.A = pruned(SpMat(last.A * decode));
  out.b = last.b;
  out.act = Act::linear;
  layers.push_back(std::move(out));
  return NeuralNet(std::move(layers));
}

NeuralNet parallelize(const std::vector<NeuralNet>& nets) {
  if (nets.empty()) throw std::invalid_argument("parallelize: empty list");
  if (nets.size() == 1) return nets.front();

  std::vector<Act> merged = hidden_schedule(nets.front());
  for (std::size_t k = 1; k < nets.size(); ++k)
    merged = merge_schedules(merged, hidden_schedule(nets[k]));

  std::vector<NeuralNet> expanded;
  expanded.reserve(nets.size());
  for (const NeuralNet& n : nets) expanded.push_back(expand_to_schedule(n, merged));

  const int depth = static_cast<int>(merged.size()) + 1;
  std::vector<Layer> layers;
  layers.reserve(depth);
  for (int k = 0; k < depth; ++k) {
    std::vector<const SpMat*> blocks;
    blocks.reserve(expanded.size());
    Eigen::Index brows = 0;
    for (const NeuralNet& n : expanded) {
      blocks.push_back(&n.layers()[k].A);
      brows += n.layers()[k].b.size();
    }
    Layer L;
    L.A = block_diag(blocks);
    L.b.resize(brows);
    Eigen::Index off = 0;
    for (const NeuralNet& n : expanded) {
      const Vec& b = n.layers()[k].b;
      L.b.segment(off, b.size()) = b;
      off += b.size();
    }
    L.act = k + 1 < depth ? merged[k] : Act::linear;
    layers.push_back(std::move(L));
  }
  return NeuralNet(std::move(layers));
}

NeuralNet add_many(const std::vector<NeuralNet>& nets,
                   const std::vector<double>& weights) {
  if (nets.empty() || nets.size() != weights.size())
    throw std::invalid_argument("add_many: needs matching nets/weights");
  const int in = nets.front().input_dim();
  const int out = nets.front().output_dim();
  for (const NeuralNet& n : nets)
    if (n.input_dim() != in || n.output_dim() != out)
      throw std::invalid_argument("add_many: dimension mismatch");

  NeuralNet stacked = parallelize(nets);
  const int k = static_cast<int>(nets.size());
  std::vector<Triplet> dup;
  dup.reserve(static_cast<std::size_t>(k) * in);
  for (int c = 0; c < k; ++c)
    for (int i = 0; i < in; ++i) dup.emplace_back(c * in + i, i, 1.0);
  SpMat D(k * in, in);
  D.setFromTriplets(dup.begin(), dup.end());

  std::vector<Triplet> sum;
  sum.reserve(static_cast<std::size_t>(k) * out);
  for (int c = 0; c < k; ++c)
    for (int i = 0; i < out; ++i)
      if (weights[c] != 0.0) sum.emplace_back(i, c * out + i, weights[c]);
  SpMat S(out, k * out);
  S.setFromTriplets(sum.begin(), sum.end());

  return affine_postcompose(S, Vec::Zero(out),
                            affine_precompose(stacked, D, Vec::Zero(k * in)));
}

NeuralNet add(const NeuralNet& f, const NeuralNet& g, double wf, double wg) {
  return add_many({f, g}, {wf, wg});
}

NeuralNet affine_precompose(const NeuralNet& net, const SpMat& A, const Vec& b) {
  if (net.input_dim() != A.rows() || A.rows() != b.size())
    throw std::invalid_argument("affine_precompose: shape mismatch");
  std::vector<Layer> layers = net.layers();
  Vec nb = layers.front().A * b;
  nb += layers.front().b;
  layers.front().b = std::move(nb);
  layers.front().A = pruned(SpMat(layers.front().A * A));
  return NeuralNet(std::move(layers));
}

NeuralNet affine_precompose(const NeuralNet& net, const Mat& A, const Vec& b) {
  return affine_precompose(net, to_sparse(A), b);
}

NeuralNet affine_postcompose(const SpMat& C, const Vec& e, const NeuralNet& net) {
  if (C.cols() != net.output_dim() || C.rows() != e.size())
    throw std::invalid_argument("affine_postcompose: shape mismatch");
  std::vector<Layer> layers = net.layers();
  Layer& last = layers.back();
  Vec nb = C * last.b;
  nb += e;
  last.b = std::move(nb);
  last.A = pruned(SpMat(C * last.A));
  return NeuralNet(std::move(layers));
}

NeuralNet affine_postcompose(const Mat& C, const Vec& e, const NeuralNet& net) {
  return affine_postcompose(to_sparse(C), e, net);
}

NeuralNet clip_net(double R, int dim) {
  if (!(R > 0.0)) throw std::invalid_argument("clip_net: R must be positive");
  // chi_R(y) = R - sigma1(2R - sigma1(y + R)); saturates to the exact bit
  // pattern of +-R outside the band.
  std::vector<Layer> layers(3);
  layers[0] = Layer{sparse_identity(dim), Vec::Constant(dim, R), Act::relu};
  layers[1] =
      Layer{sparse_identity(dim, -1.0), Vec::Constant(dim, 2.0 * R), Act::relu};
  layers[2] =
      Layer{sparse_identity(dim, -1.0), Vec::Constant(dim, R), Act::linear};
  return NeuralNet(std::move(layers));
}

NeuralNet clamp_net(const Vec& a, const Vec& b) {
  const int dim = static_cast<int>(a.size());
  if (b.size() != dim) throw std::invalid_argument("clamp_net: a/b mismatch");
  Vec width(dim);
  for (int i = 0; i < dim; ++i) {
    if (!(a[i] < b[i])) throw std::invalid_argument("clamp_net: needs a < b");
    double c = b[i] - a[i];
    // Keep a_i + c <= b_i so outputs never leave the closed box.
    while (a[i] + c > b[i]) c = std::nextafter(c, 0.0);
    width[i] = c;
  }
  // clamp(y) = a + sigma1(c - sigma1(b - y))
  std::vector<Layer> layers(3);
  layers[0] = Layer{sparse_identity(dim, -1.0), b, Act::relu};
  layers[1] = Layer{sparse_identity(dim, -1.0), width, Act::relu};
  layers[2] = Layer{sparse_identity(dim), a, Act::linear};
  return NeuralNet(std::move(layers));
}

int sq_depth_for(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("sq_depth_for: eps <= 0");
  int m = 1;
  while (std::ldexp(1.0, -2 * m - 2) > eps) ++m;
  return m;
}

NeuralNet sq_net(int m) {
  if (m < 1) throw std::invalid_argument("sq_net: m >= 1 required");
  // Sawtooth refinement: f_s = f_{s-1} - g_s/4^s with g_s = hat(g_{s-1}),
  // hat(u) = 2 sigma1(u) - 4 sigma1(u - 1/2) + 2 sigma1(u - 1). The carry
  // channel holds the accumulated interpolant, which stays nonnegative on
  // [0,1] and therefore rides through ReLU unchanged.
  std::vector<Layer> layers;
  layers.reserve(m + 1);
  {
    Mat A(3, 1);
    A << 1.0, 1.0, 1.0;
    Vec b(3);
    b << 0.0, -0.5, -1.0;
    layers.push_back(Layer{to_sparse(A), b, Act::relu});
  }
  if (m >= 2) {
    Mat A(4, 3);
    A << 2.0, -4.0, 2.0,
         2.0, -4.0, 2.0,
         2.0, -4.0, 2.0,
         0.5,  1.0, -0.5;
    Vec b(4);
    b << 0.0, -0.5, -1.0, 0.0;
    layers.push_back(Layer{to_sparse(A), b, Act::relu});
  }
  for (int s = 3; s <= m; ++s) {
    const double inv = std::ldexp(1.0, -2 * (s - 1));  // 1/4^(s-1)
    Mat A(4, 4);
    A << 2.0, -4.0, 2.0, 0.0,
         2.0, -4.0, 2.0, 0.0,
         2.0, -4.0, 2.0, 0.0,
         -2.0 * inv, 4.0 * inv, -2.0 * inv, 1.0;
    Vec b(4);
    b << 0.0, -0.5, -1.0, 0.0;
    layers.push_back(Layer{to_sparse(A), b, Act::relu});
  }
  if (m == 1) {
    Mat A(1, 3);
    A << 0.5, 1.0, -0.5;
    layers.push_back(Layer{to_sparse(A), Vec::Zero(1), Act::linear});
  } else {
    const double inv = std::ldexp(1.0, -2 * m);
    Mat A(1, 4);
    A << -2.0 * inv, 4.0 * inv, -2.0 * inv, 1.0;
    layers.push_back(Layer{to_sparse(A), Vec::Zero(1), Act::linear});
  }
  return NeuralNet(std::move(layers));
}

int prod_sq_depth(double range, double delta) {
  if (!(range > 0.0)) throw std::invalid_argument("prod_net: range <= 0");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("prod_net: delta outside (0,1)");
  // The three-square split can stack two interpolation errors with the same
  // sign, so budget 2 * 2 range^2 * 2^-(2m+2) <= delta.
  return sq_depth_for(delta / (4.0 * range * range));
}

NeuralNet prod_net(double range, double delta) {
  const int m = prod_sq_depth(range, delta);
  const double M = range;

  NeuralNet clamp2 = clamp_net(Vec::Constant(2, -M), Vec::Constant(2, M));

  // (cx, cy) -> (|cx+cy|, |cx|, |cy|) / (2M)
  Mat A1(6, 2);
  A1 << 1.0, 1.0,
        -1.0, -1.0,
        1.0, 0.0,
        -1.0, 0.0,
        0.0, 1.0,
        0.0, -1.0;
  Mat A2 = Mat::Zero(3, 6);
  const double s = 1.0 / (2.0 * M);
  A2(0, 0) = A2(0, 1) = s;
  A2(1, 2) = A2(1, 3) = s;
  A2(2, 4) = A2(2, 5) = s;
  NeuralNet abs3(std::vector<Layer>{
      Layer{to_sparse(A1), Vec::Zero(6), Act::relu},
      Layer{to_sparse(A2), Vec::Zero(3), Act::linear}});

  NeuralNet sq = sq_net(m);
  NeuralNet squares = parallelize({sq, sq, sq});

  Mat out(1, 3);
  const double twoM2 = 2.0 * M * M;
  out << twoM2, -twoM2, -twoM2;
  return affine_postcompose(out, Vec::Zero(1),
                            compose(squares, compose(abs3, clamp2)));
}

NeuralNet matvec_net(int m, int n, double range, double delta) {
  if (m < 1 || n < 1) throw std::invalid_argument("matvec_net: dims >= 1");
  NeuralNet p = prod_net(range, delta);
  std::vector<NeuralNet> prods(static_cast<std::size_t>(m) * n, p);
  NeuralNet stacked = parallelize(prods);

  // Input layout: A row-major (m*n), then b (n); pair k = i*n + j reads
  // (A_ij, b_j).
  std::vector<Triplet> sel;
  sel.reserve(2 * static_cast<std::size_t>(m) * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      const int k = i * n + j;
      sel.emplace_back(2 * k, k, 1.0);
      sel.emplace_back(2 * k + 1, m * n + j, 1.0);
    }
  SpMat S(2 * m * n, m * n + n);
  S.setFromTriplets(sel.begin(), sel.end());

  std::vector<Triplet> rows;
  rows.reserve(static_cast<std::size_t>(m) * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) rows.emplace_back(i, i * n + j, 1.0);
  SpMat Rsum(m, m * n);
  Rsum.setFromTriplets(rows.begin(), rows.end());

  return affine_postcompose(
      Rsum, Vec::Zero(m),
      affine_precompose(stacked, S, Vec::Zero(2 * m * n)));
}

}  // namespace hjb
