#pragma once

// JSON and CSV interchange.
//
// Circuit document (version 1):
//   {"version":1, "n_qubits":int, "dressing":"full"|"support",
//    "cnot_layers":[[[c,t],...],...], "angles":[[t1,t2,t3],...]}
//
// Target unitary document:
//   {"dim":int, "re":[[...],...], "im":[[...],...]}
//
// Convergence trace CSV: header "sweep,cost,wall_seconds", one row per sweep.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qsynth/circuit.hpp"

namespace qsynth {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& j,
                                           const char* field) {
  const auto it = j.find(field);
  if (it == j.end())
    throw ParseError(std::string("missing field \"") + field + "\"");
  return *it;
}

}  // namespace detail

inline nlohmann::json circuit_to_json(const Skeleton& s,
                                      const ParamAssignment& p) {
  check_param_length(s, p);
  nlohmann::json layers = nlohmann::json::array();
  for (const CnotLayer& layer : s.cnot_layers()) {
    nlohmann::json jl = nlohmann::json::array();
    for (const CnotPair& pr : layer.pairs)
      jl.push_back(nlohmann::json::array({pr.control, pr.target}));
    layers.push_back(std::move(jl));
  }
  nlohmann::json angles = nlohmann::json::array();
  for (const EulerTriple& t : p)
    angles.push_back(nlohmann::json::array({t.theta1, t.theta2, t.theta3}));
  return nlohmann::json{
      {"version", 1},
      {"n_qubits", s.n_qubits()},
      {"dressing", s.dressing() == Dressing::Full ? "full" : "support"},
      {"cnot_layers", std::move(layers)},
      {"angles", std::move(angles)}};
}

inline std::pair<Skeleton, ParamAssignment> circuit_from_json(
    const nlohmann::json& j) {
  const nlohmann::json& version = detail::require_field(j, "version");
  if (!version.is_number_integer() || version.get<int>() != 1)
    throw ParseError("unsupported circuit document version " + version.dump());
  const nlohmann::json& jn = detail::require_field(j, "n_qubits");
  if (!jn.is_number_integer() || jn.get<int>() < 1)
    throw ParseError("field \"n_qubits\" must be a positive integer");
  const nlohmann::json& jd = detail::require_field(j, "dressing");
  Dressing dressing;
  if (jd == "full")
    dressing = Dressing::Full;
  else if (jd == "support")
    dressing = Dressing::SupportOnly;
  else
    throw ParseError("field \"dressing\" must be \"full\" or \"support\"");

  std::vector<CnotLayer> layers;
  for (const nlohmann::json& jl : detail::require_field(j, "cnot_layers")) {
    CnotLayer layer;
    for (const nlohmann::json& jp : jl) {
      if (!jp.is_array() || jp.size() != 2)
        throw ParseError("field \"cnot_layers\" entries must be [control,target] pairs");
      layer.pairs.push_back(CnotPair{jp[0].get<int>(), jp[1].get<int>()});
    }
    layers.push_back(std::move(layer));
  }
  Skeleton skeleton;
  try {
    skeleton = Skeleton(jn.get<int>(), std::move(layers), dressing);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("field \"cnot_layers\": ") + e.what());
  }

  ParamAssignment angles;
  for (const nlohmann::json& jt : detail::require_field(j, "angles")) {
    if (!jt.is_array() || jt.size() != 3)
      throw ParseError("field \"angles\" entries must be [t1,t2,t3] triples");
    angles.push_back(
        EulerTriple{jt[0].get<double>(), jt[1].get<double>(), jt[2].get<double>()});
  }
  if (static_cast<int>(angles.size()) != skeleton.slot_count())
    throw ParseError("field \"angles\" has " + std::to_string(angles.size()) +
                     " entries, skeleton has " +
                     std::to_string(skeleton.slot_count()) + " slots");
  return {std::move(skeleton), std::move(angles)};
}

inline nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row_re = nlohmann::json::array(), row_im = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row_re.push_back(m(i, j).real());
      row_im.push_back(m(i, j).imag());
    }
    re.push_back(std::move(row_re));
    im.push_back(std::move(row_im));
  }
  return nlohmann::json{{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  const nlohmann::json& jd = detail::require_field(j, "dim");
  if (!jd.is_number_integer() || jd.get<int>() < 1)
    throw ParseError("field \"dim\" must be a positive integer");
  const Eigen::Index dim = jd.get<Eigen::Index>();
  const nlohmann::json& re = detail::require_field(j, "re");
  const nlohmann::json& im = detail::require_field(j, "im");
  if (re.size() != static_cast<size_t>(dim) || im.size() != static_cast<size_t>(dim))
    throw ParseError("fields \"re\"/\"im\" must have dim rows");
  ComplexMatrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (re[i].size() != static_cast<size_t>(dim) || im[i].size() != static_cast<size_t>(dim))
      throw ParseError("fields \"re\"/\"im\" must have dim columns in every row");
    for (Eigen::Index k = 0; k < dim; ++k)
      m(i, k) = Complex(re[i][k].get<double>(), im[i][k].get<double>());
  }
  return m;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << text;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline nlohmann::json parse_json_file(const std::string& path) {
  try {
    return nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace qsynth
