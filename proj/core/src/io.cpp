#include "hjbkit/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hjb {

namespace {

MapKind map_kind_from(const std::string& s) {
  if (s == "zero") return MapKind::zero;
  if (s == "const") return MapKind::constant;
  if (s == "affine") return MapKind::affine;
  if (s == "identity") return MapKind::identity;
  throw std::invalid_argument("unknown map kind: " + s);
}

std::string map_kind_name(MapKind k) {
  switch (k) {
    case MapKind::zero: return "zero";
    case MapKind::constant: return "const";
    case MapKind::affine: return "affine";
    case MapKind::identity: return "identity";
  }
  return "zero";
}

Vec vec_from_json(const json& j) {
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

json vec_to_json(const Vec& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

Mat mat_from_json(const json& j) {
  const std::size_t rows = j.size();
  const std::size_t cols = rows ? j[0].size() : 0;
  Mat m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols)
      throw std::invalid_argument("ragged 2-D array in problem file");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json mat_to_json(const Mat& m) {
  json j = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(row);
  }
  return j;
}

void apply_family_preset(FamilySpec& s) {
  const int d = s.d;
  if (s.family == "p1") {
    s.dbar = d;
    s.gamma = 0.5;
    s.a = Vec::Constant(d, -1.0);
    s.b = Vec::Constant(d, 1.0);
    s.f1_kind = MapKind::zero;
    s.f2_kind = MapKind::identity;
    s.lbar_kind = MapKind::zero;
    s.psi_kind = PsiKind::linear;
    s.psi_g = Vec::Unit(d, 0);
  } else if (s.family == "heat") {
    s.dbar = d;
    s.gamma = 0.5;
    s.a = Vec::Constant(d, -1.0);
    s.b = Vec::Constant(d, 1.0);
    s.f1_kind = MapKind::zero;
    s.f2_kind = MapKind::zero;
    s.lbar_kind = MapKind::zero;
    s.psi_kind = PsiKind::linear;
    s.psi_g = Vec::Unit(d, 0);
    if (!s.R_override) s.R_override = 1.0;
  } else if (s.family == "colehopf") {
    s.dbar = d;
    s.gamma = 0.5;
    s.a = Vec::Constant(d, -4.0);
    s.b = Vec::Constant(d, 4.0);
    s.f1_kind = MapKind::zero;
    s.f2_kind = MapKind::identity;
    s.lbar_kind = MapKind::zero;
    s.psi_kind = PsiKind::bspline;
    if (!s.R_override) s.R_override = 1.0;
  } else if (s.family != "custom") {
    throw std::invalid_argument("unknown family: " + s.family);
  }
}

}  // namespace

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

FamilySpec family_from_json(const json& j) {
  FamilySpec s;
  s.family = j.value("family", std::string("custom"));
  s.d = j.at("d").get<int>();
  s.dbar = j.value("dbar", s.d);
  apply_family_preset(s);
  if (j.contains("gamma")) s.gamma = j["gamma"].get<double>();
  s.t_f = j.value("t_f", 1.0);
  s.q = j.value("q", 1.0);
  if (j.contains("a")) s.a = vec_from_json(j["a"]);
  if (j.contains("b")) s.b = vec_from_json(j["b"]);
  if (j.contains("dbar")) s.dbar = j["dbar"].get<int>();

  auto load_map = [&](const char* name, MapKind& kind, Mat& A, Vec& c,
                      int out_dim) {
    if (!j.contains(name)) return;
    const json& m = j[name];
    kind = map_kind_from(m.at("kind").get<std::string>());
    if (kind == MapKind::constant) c = vec_from_json(m.at("c"));
    if (kind == MapKind::affine) {
      A = mat_from_json(m.at("A"));
      c = m.contains("c") ? vec_from_json(m["c"]) : Vec(Vec::Zero(out_dim));
      if (A.rows() != out_dim || A.cols() != 1 + s.d)
        throw std::invalid_argument(std::string(name) +
                                    ": A must be out x (1+d)");
    }
  };
  load_map("f1", s.f1_kind, s.f1_A, s.f1_c, s.d);
  load_map("f2", s.f2_kind, s.f2_A, s.f2_c, s.d * s.dbar);
  if (j.contains("lbar")) {
    const json& m = j["lbar"];
    s.lbar_kind = map_kind_from(m.at("kind").get<std::string>());
    if (s.lbar_kind == MapKind::constant) s.lbar_c = m.at("c").get<double>();
    if (s.lbar_kind == MapKind::affine) {
      s.lbar_g = vec_from_json(m.at("g"));
      s.lbar_c = m.value("c", 0.0);
      if (s.lbar_g.size() != 1 + s.d)
        throw std::invalid_argument("lbar: g must have length 1+d");
    }
  }
  if (j.contains("psi")) {
    const json& m = j["psi"];
    const std::string kind = m.at("kind").get<std::string>();
    if (kind == "linear") {
      s.psi_kind = PsiKind::linear;
      s.psi_g = vec_from_json(m.at("g"));
      s.psi_c = m.value("c", 0.0);
      if (s.psi_g.size() != s.d)
        throw std::invalid_argument("psi: g must have length d");
    } else if (kind == "bspline") {
      s.psi_kind = PsiKind::bspline;
      s.psi_amp = m.value("amplitude", 1.0);
    } else {
      throw std::invalid_argument("unknown psi kind: " + kind);
    }
  }
  if (j.contains("R_override")) s.R_override = j["R_override"].get<double>();
  s.x_envelope = j.value("x_envelope", 32.0);
  if (j.contains("bound_constants")) {
    const json& b = j["bound_constants"];
    BoundConstants c;
    c.sup_f1_2 = b.value("sup_f1_2", 0.0);
    c.sup_f2_2 = b.value("sup_f2_2", 0.0);
    c.sup_f1_1 = b.value("sup_f1_1", 0.0);
    c.sup_f2_1 = b.value("sup_f2_1", 0.0);
    c.lip_f1_2 = b.value("lip_f1_2", 0.0);
    c.lip_f2_2 = b.value("lip_f2_2", 0.0);
    c.sup_dxj_f1_2 = b.value("sup_dxj_f1_2", 0.0);
    c.sup_dxj_f2_2 = b.value("sup_dxj_f2_2", 0.0);
    c.sup_psi = b.value("sup_psi", 0.0);
    c.sup_grad_psi_2 = b.value("sup_grad_psi_2", 0.0);
    c.sup_lbar = b.value("sup_lbar", 0.0);
    c.sup_grad_lbar_2 = b.value("sup_grad_lbar_2", 0.0);
    c.sup_grad_lbar_inf = b.value("sup_grad_lbar_inf", 0.0);
    s.user_constants = c;
  }
  return s;
}

json family_to_json(const FamilySpec& s) {
  json j;
  j["family"] = s.family;
  j["d"] = s.d;
  j["dbar"] = s.dbar;
  j["gamma"] = s.gamma;
  j["t_f"] = s.t_f;
  j["q"] = s.q;
  j["a"] = vec_to_json(s.a);
  j["b"] = vec_to_json(s.b);
  auto dump_map = [&](const char* name, MapKind kind, const Mat& A,
                      const Vec& c) {
    json m;
    m["kind"] = map_kind_name(kind);
    if (kind == MapKind::constant) m["c"] = vec_to_json(c);
    if (kind == MapKind::affine) {
      m["A"] = mat_to_json(A);
      m["c"] = vec_to_json(c);
    }
    j[name] = m;
  };
  dump_map("f1", s.f1_kind, s.f1_A, s.f1_c);
  dump_map("f2", s.f2_kind, s.f2_A, s.f2_c);
  {
    json m;
    m["kind"] = map_kind_name(s.lbar_kind);
    if (s.lbar_kind == MapKind::constant) m["c"] = s.lbar_c;
    if (s.lbar_kind == MapKind::affine) {
      m["g"] = vec_to_json(s.lbar_g);
      m["c"] = s.lbar_c;
    }
    j["lbar"] = m;
  }
  {
    json m;
    if (s.psi_kind == PsiKind::linear) {
      m["kind"] = "linear";
      m["g"] = vec_to_json(s.psi_g);
      m["c"] = s.psi_c;
    } else {
      m["kind"] = "bspline";
      m["amplitude"] = s.psi_amp;
    }
    j["psi"] = m;
  }
  if (s.R_override) j["R_override"] = *s.R_override;
  j["x_envelope"] = s.x_envelope;
  if (s.user_constants) {
    const BoundConstants& c = *s.user_constants;
    j["bound_constants"] = json{{"sup_f1_2", c.sup_f1_2},
                                {"sup_f2_2", c.sup_f2_2},
                                {"sup_f1_1", c.sup_f1_1},
                                {"sup_f2_1", c.sup_f2_1},
                                {"lip_f1_2", c.lip_f1_2},
                                {"lip_f2_2", c.lip_f2_2},
                                {"sup_dxj_f1_2", c.sup_dxj_f1_2},
                                {"sup_dxj_f2_2", c.sup_dxj_f2_2},
                                {"sup_psi", c.sup_psi},
                                {"sup_grad_psi_2", c.sup_grad_psi_2},
                                {"sup_lbar", c.sup_lbar},
                                {"sup_grad_lbar_2", c.sup_grad_lbar_2},
                                {"sup_grad_lbar_inf", c.sup_grad_lbar_inf}};
  }
  return j;
}

ControlProblem problem_from_json(const json& j) {
  return make_problem(family_from_json(j));
}

ControlProblem load_problem(const std::string& path) {
  return problem_from_json(load_json(path));
}

json net_to_json(const NeuralNet& net) {
  json layers = json::array();
  for (const Layer& L : net.layers()) {
    json jl;
    jl["act"] = act_name(L.act);
    Mat dense = Mat(L.A);
    jl["A"] = mat_to_json(dense);
    jl["b"] = vec_to_json(L.b);
    layers.push_back(std::move(jl));
  }
  return json{{"layers", layers}};
}

NeuralNet net_from_json(const json& j) {
  std::vector<Layer> layers;
  for (const json& jl : j.at("layers")) {
    Layer L;
    L.act = act_from_name(jl.at("act").get<std::string>());
    Mat dense = mat_from_json(jl.at("A"));
    SpMat sp = dense.sparseView();
    sp.prune(0.0, 0.0);
    sp.makeCompressed();
    L.A = std::move(sp);
    L.b = vec_from_json(jl.at("b"));
    layers.push_back(std::move(L));
  }
  return NeuralNet(std::move(layers));
}

void save_net(const NeuralNet& net, const std::string& path) {
  std::string out;
  out.reserve(net.size() * 8 + 1024);
  out += "{\"layers\":[";
  bool first_layer = true;
  for (const Layer& L : net.layers()) {
    if (!first_layer) out += ",";
    first_layer = false;
    out += "{\"act\":\"";
    out += act_name(L.act);
    out += "\",\"A\":[";
    const Mat dense = Mat(L.A);
    for (Eigen::Index r = 0; r < dense.rows(); ++r) {
      if (r) out += ",";
      out += "[";
      for (Eigen::Index c = 0; c < dense.cols(); ++c) {
        if (c) out += ",";
        out += fmt_g17(dense(r, c));
      }
      out += "]";
    }
    out += "],\"b\":[";
    for (Eigen::Index i = 0; i < L.b.size(); ++i) {
      if (i) out += ",";
      out += fmt_g17(L.b[i]);
    }
    out += "]}";
  }
  out += "]}\n";
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << out;
}

NeuralNet load_net(const std::string& path) {
  return net_from_json(load_json(path));
}

json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  json j;
  f >> j;
  return j;
}

void save_json(const json& j, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << j.dump(2) << "\n";
}

CsvWriter::CsvWriter(std::vector<std::string> header)
    : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) buf_ += ",";
    buf_ += header[i];
  }
  buf_ += "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_)
    throw std::invalid_argument("csv row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) buf_ += ",";
    buf_ += cells[i];
  }
  buf_ += "\n";
}

void CsvWriter::row_numeric(const std::vector<double>& cells) {
  std::vector<std::string> s;
  s.reserve(cells.size());
  for (double v : cells) s.push_back(fmt_g17(v));
  row(s);
}

void CsvWriter::write(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << buf_;
}

}  // namespace hjb
