#pragma once

// Verification records shared by the checkers, the bound catalog and the
// campaign runner. Serialized as JSON lines or CSV.

#include <cstdint>
#include <cstring>
#include <iomanip>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcont/operator_core.hpp"

namespace qcont {

/// One verification record. pass <=> margin >= -tolerance.
struct BoundReport {
  std::string bound_name;
  std::string inputs_fingerprint;
  /// epsilon for continuity bounds, p for concavity-type checks.
  double epsilon = 0.0;
  double measured = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  double tolerance = 1e-8;
  bool pass = true;
  std::string note;

  /// Upper-bound record: measured <= bound.
  static BoundReport upper(std::string name, std::string fingerprint, double epsilon, double measured,
                           double bound, double tolerance = 1e-8) {
    BoundReport r;
    r.bound_name = std::move(name);
    r.inputs_fingerprint = std::move(fingerprint);
    r.epsilon = epsilon;
    r.measured = measured;
    r.bound = bound;
    r.margin = bound - measured;
    r.tolerance = tolerance;
    r.pass = r.margin >= -tolerance;
    return r;
  }

  /// Two-sided record: lower <= measured <= upper. `bound` holds the lower
  /// end; the margin is the distance to the nearer violated side.
  static BoundReport sandwich(std::string name, std::string fingerprint, double parameter, double lower,
                              double measured, double upper, double tolerance = 1e-8) {
    BoundReport r;
    r.bound_name = std::move(name);
    r.inputs_fingerprint = std::move(fingerprint);
    r.epsilon = parameter;
    r.measured = measured;
    r.bound = lower;
    r.margin = std::min(measured - lower, upper - measured);
    r.tolerance = tolerance;
    r.pass = r.margin >= -tolerance;
    return r;
  }
};

/// FNV-1a over the raw entries plus the dims, e.g. "9f2c...:2x2,2x2".
inline std::string fingerprint(std::initializer_list<const Matrix*> mats) {
  std::uint64_t hash = 14695981039346656037ull;
  std::ostringstream dims;
  bool first = true;
  for (const Matrix* m : mats) {
    for (Index j = 0; j < m->cols(); ++j) {
      for (Index i = 0; i < m->rows(); ++i) {
        const double parts[2] = {(*m)(i, j).real(), (*m)(i, j).imag()};
        unsigned char bytes[sizeof(parts)];
        std::memcpy(bytes, parts, sizeof(parts));
        for (unsigned char b : bytes) {
          hash ^= b;
          hash *= 1099511628211ull;
        }
      }
    }
    dims << (first ? "" : ",") << m->rows() << "x" << m->cols();
    first = false;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << hash << ":" << dims.str();
  return os.str();
}

inline nlohmann::json to_json(const BoundReport& r) {
  return nlohmann::json{{"bound_name", r.bound_name}, {"inputs_fingerprint", r.inputs_fingerprint},
                        {"epsilon", r.epsilon},       {"measured", r.measured},
                        {"bound", r.bound},           {"margin", r.margin},
                        {"tolerance", r.tolerance},   {"pass", r.pass},
                        {"note", r.note}};
}

inline void write_jsonl(std::ostream& os, const std::vector<BoundReport>& reports) {
  for (const auto& r : reports) os << to_json(r).dump() << '\n';
}

inline void write_csv(std::ostream& os, const std::vector<BoundReport>& reports) {
  os << "bound_name,epsilon,measured,bound,margin,pass\n";
  os << std::setprecision(17);
  for (const auto& r : reports) {
    os << r.bound_name << ',' << r.epsilon << ',' << r.measured << ',' << r.bound << ',' << r.margin << ','
       << (r.pass ? "true" : "false") << '\n';
  }
}

}  // namespace qcont
