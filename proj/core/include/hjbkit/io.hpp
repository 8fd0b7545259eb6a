#pragma once

// File formats: problem specification (JSON), network files
// ({"layers":[{"act","A","b"}]} with decimal numbers at 17 significant
// digits for bit-faithful round-trips), and deterministic CSV records.

#include <string>
#include <vector>

#include "hjbkit/netcalc.hpp"
#include "hjbkit/problem.hpp"

// vendored single header
#include "json.hpp"

namespace hjb {

using json = nlohmann::json;

// %.17g with a fixed locale; the CSV/network number format.
std::string fmt_g17(double v);

FamilySpec family_from_json(const json& j);
json family_to_json(const FamilySpec& spec);

ControlProblem load_problem(const std::string& path);
ControlProblem problem_from_json(const json& j);

json net_to_json(const NeuralNet& net);
NeuralNet net_from_json(const json& j);
// Writes the network file with hand-formatted numbers (17 significant
// digits); save_net(load_net(p)) reproduces realizations bit-for-bit.
void save_net(const NeuralNet& net, const std::string& path);
NeuralNet load_net(const std::string& path);

json load_json(const std::string& path);
void save_json(const json& j, const std::string& path);

// Deterministic CSV: fixed column order, fmt_g17 numbers, '\n' endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  void row_numeric(const std::vector<double>& cells);
  const std::string& str() const { return buf_; }
  void write(const std::string& path) const;

 private:
  std::string buf_;
  std::size_t columns_ = 0;
};

}  // namespace hjb
