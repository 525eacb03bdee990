#pragma once

// JSON exchange for operators, layouts and basis pairs.
//
//   operator: {"dim": 2, "re": [[...], [...]], "im": [[...], [...]]}   ("im" optional)
//   layout:   {"labels": ["A", "B"], "dims": [2, 2]}
//   bases:    {"x": <operator-shaped columns>, "y": <operator-shaped columns>}

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcont/operator_core.hpp"

namespace qcont::io {

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json rr = nlohmann::json::array(), ir = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ir.push_back(m(i, j).imag());
    }
    re.push_back(rr);
    im.push_back(ir);
  }
  return {{"dim", m.rows()}, {"re", re}, {"im", im}};
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.contains("re")) throw std::invalid_argument("operator JSON needs a \"re\" array");
  const auto& re = j.at("re");
  const auto n = static_cast<Index>(re.size());
  if (j.contains("dim") && j.at("dim").get<Index>() != n) {
    throw std::invalid_argument("operator JSON: \"dim\" does not match the number of rows");
  }
  Matrix m = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const auto& row = re.at(static_cast<std::size_t>(i));
    if (static_cast<Index>(row.size()) != n) throw std::invalid_argument("operator JSON: matrix is not square");
    for (Index k = 0; k < n; ++k) m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
  }
  if (j.contains("im")) {
    const auto& im = j.at("im");
    if (static_cast<Index>(im.size()) != n) throw std::invalid_argument("operator JSON: \"im\" has wrong shape");
    for (Index i = 0; i < n; ++i) {
      for (Index k = 0; k < n; ++k) {
        m(i, k) += Complex(0.0, im.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(k)).get<double>());
      }
    }
  }
  return m;
}

inline nlohmann::json layout_to_json(const SubsystemLayout& l) {
  return {{"labels", l.labels()}, {"dims", l.dims()}};
}

inline SubsystemLayout layout_from_json(const nlohmann::json& j) {
  return SubsystemLayout(j.at("labels").get<std::vector<std::string>>(), j.at("dims").get<std::vector<Index>>());
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return nlohmann::json::parse(in);
}

inline Matrix read_matrix(const std::string& path) { return matrix_from_json(read_json_file(path)); }

inline DensityMatrix read_state(const std::string& path) { return DensityMatrix(read_matrix(path)); }

}  // namespace qcont::io
