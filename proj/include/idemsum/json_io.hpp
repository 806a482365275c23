#pragma once

#include <string>
#include <vector>

#include "idemsum/canon.hpp"
#include "idemsum/cert.hpp"
#include "idemsum/pipelines.hpp"
#include "json.hpp"

namespace idemsum {

// Stable key order in every emitted document; identical inputs dump to
// identical bytes.
using json = nlohmann::ordered_json;

inline json field_to_json(const FieldPtr &F) {
  json j;
  j["p"] = F->p();
  j["k"] = F->k();
  if (F->k() > 1) j["modulus"] = F->modulus();
  return j;
}

// Element JSON: plain integer over a prime field, little-endian coordinate
// list otherwise.
inline json elem_to_json(const FieldPtr &F, elem x) {
  if (F->k() == 1) return json(x);
  return json(F->coords(x));
}

inline json mat_to_json(const Mat &A) {
  json j;
  j["field"] = field_to_json(A.field());
  j["rows"] = A.rows();
  j["cols"] = A.cols();
  json rows = json::array();
  for (int i = 0; i < A.rows(); ++i) {
    json row = json::array();
    for (int c = 0; c < A.cols(); ++c) row.push_back(elem_to_json(A.field(), A.at(i, c)));
    rows.push_back(std::move(row));
  }
  j["entries"] = std::move(rows);
  return j;
}

// Polynomial JSON: little-endian coefficient list of element JSON.
inline json poly_to_json(const Poly &f) {
  json j = json::array();
  for (elem c : f.coeffs()) j.push_back(elem_to_json(f.field(), c));
  return j;
}

inline json cert_to_json(const DecompCert &c) {
  json j;
  j["seed"] = c.seed;
  j["signs"] = c.signs;
  json parts = json::array();
  for (const auto &P : c.parts) parts.push_back(mat_to_json(P));
  j["parts"] = std::move(parts);
  j["pipeline"] = c.pipeline;
  j["count"] = c.count();
  return j;
}

inline json eig_structure_to_json(const std::vector<EigStructure> &es) {
  json j = json::array();
  for (const auto &e : es) {
    json entry;
    entry["factor"] = poly_to_json(e.factor);
    entry["nk"] = e.nk;
    j.push_back(std::move(entry));
  }
  return j;
}

inline json sn_bounds_to_json(const SnBounds &b) {
  json j;
  j["lower"] = b.lower;
  j["upper"] = b.upper;
  j["notes"] = b.notes;
  return j;
}

namespace detail {

inline void expect(bool cond, const std::string &what) {
  require(cond, Errc::MalformedInput, what);
}

inline bool is_count(const json &j) {
  return j.is_number_integer() && j.get<std::int64_t>() >= 0;
}

}  // namespace detail

inline FieldPtr field_from_json(const json &j) {
  detail::expect(j.is_object() && j.contains("p") && j.contains("k") &&
                     detail::is_count(j["p"]) && detail::is_count(j["k"]),
                 "field wants {\"p\":int,\"k\":int[,\"modulus\":[...]]}");
  std::optional<std::vector<std::uint32_t>> mod;
  if (j.contains("modulus")) {
    detail::expect(j["modulus"].is_array(), "field modulus must be a coefficient list");
    mod = j["modulus"].get<std::vector<std::uint32_t>>();
  }
  return FieldCtx::make(j["p"].get<std::uint32_t>(), j["k"].get<std::uint32_t>(), mod);
}

inline elem elem_from_json(const FieldPtr &F, const json &j) {
  if (F->k() == 1) {
    detail::expect(detail::is_count(j), "prime-field element must be an integer");
    elem x = j.get<elem>();
    detail::expect(x < F->p(), "element out of range");
    return x;
  }
  detail::expect(j.is_array(), "extension element must be a coordinate list");
  return F->from_coords(j.get<std::vector<std::uint32_t>>());
}

inline Mat mat_from_json(const json &j) {
  detail::expect(j.is_object() && j.contains("field") && j.contains("rows") &&
                     j.contains("cols") && j.contains("entries"),
                 "matrix wants {\"field\",\"rows\",\"cols\",\"entries\"}");
  FieldPtr F = field_from_json(j["field"]);
  detail::expect(detail::is_count(j["rows"]) && detail::is_count(j["cols"]),
                 "matrix dimensions must be nonnegative integers");
  int rows = j["rows"].get<int>();
  int cols = j["cols"].get<int>();
  const json &e = j["entries"];
  detail::expect(e.is_array() && static_cast<int>(e.size()) == rows,
                 "entry row count must match \"rows\"");
  Mat A(F, rows, cols);
  for (int i = 0; i < rows; ++i) {
    const json &row = e[static_cast<std::size_t>(i)];
    detail::expect(row.is_array() && static_cast<int>(row.size()) == cols,
                   "entry row " + std::to_string(i + 1) + " must have \"cols\" elements");
    for (int c = 0; c < cols; ++c)
      A.at(i, c) = elem_from_json(F, row[static_cast<std::size_t>(c)]);
  }
  return A;
}

inline DecompCert cert_from_json(const json &j) {
  detail::expect(j.is_object() && j.contains("signs") && j.contains("parts"),
                 "certificate wants {\"seed\",\"signs\",\"parts\",\"pipeline\",\"count\"}");
  DecompCert c;
  c.seed = j.value("seed", std::uint64_t{0});
  c.pipeline = j.value("pipeline", std::string{});
  detail::expect(j["signs"].is_array() && j["parts"].is_array(),
                 "certificate signs/parts must be arrays");
  c.signs = j["signs"].get<std::vector<int>>();
  for (const auto &pj : j["parts"]) c.parts.push_back(mat_from_json(pj));
  detail::expect(c.signs.size() == c.parts.size(),
                 "certificate signs and parts must have equal length");
  return c;
}

}  // namespace idemsum
