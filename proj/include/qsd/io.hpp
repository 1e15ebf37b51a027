// Copyright (c) 2026 qsd contributors
// SPDX-License-Identifier: MIT

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qsd/scenario.hpp"

namespace qsd::io {

using json = nlohmann::json;

// --- scenario documents ------------------------------------------------------
//
// A scenario document is a JSON object:
//
//   {
//     "id": "example1",                     // optional; defaults to file stem
//     "dim": 3,
//     "states": [ {"label": "rho1", "matrix": [[[re,im], ...], ...]}, ... ],
//     "priors": [0.5, 0.5],
//     "povms":  [ {"name": "A", "elements": [matrix, ...]}, ... ],  // optional
//     "options": {"seed": 1, "psd_tolerance": 1e-10}                // optional
//   }
//
// Matrix entries are [re, im] pairs; a bare number is accepted as a real
// entry.  Parse failures carry the offending field's path.

struct FileOptions {
  std::uint64_t seed = 1;
  double psd_tolerance = tol::psd;
};

struct NamedPovm {
  std::string name;
  Povm povm;
};

struct ScenarioFile {
  std::string id;
  std::vector<std::string> labels;
  Scenario scenario;
  std::vector<NamedPovm> povms;
  FileOptions options;

  const Povm& povm(const std::string& name) const {
    for (const auto& p : povms) {
      if (p.name == name) return p.povm;
    }
    std::string known;
    for (const auto& p : povms) known += (known.empty() ? "'" : ", '") + p.name + "'";
    throw ValidationError("no measurement named '" + name + "' in '" + id + "'" +
                          (known.empty() ? "; the file defines none"
                                         : "; available: " + known));
  }
};

namespace detail {

inline const json& member(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) {
    throw ValidationError(where + ": missing field '" + std::string(key) + "'");
  }
  return *it;
}

inline double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ValidationError(where + ": expected a number");
  return j.get<double>();
}

inline int positive_int(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<std::int64_t>() <= 0) {
    throw ValidationError(where + ": expected a positive integer");
  }
  return static_cast<int>(j.get<std::int64_t>());
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                           const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* a : allowed) {
      if (item.key() == a) {
        known = true;
        break;
      }
    }
    if (!known) {
      std::string expected;
      for (const char* a : allowed) expected += (expected.empty() ? "" : ", ") + std::string(a);
      throw ValidationError(where + ": unknown field '" + item.key() +
                            "' (expected " + expected + ")");
    }
  }
}

}  // namespace detail

inline Complex parse_entry(const json& j, const std::string& where) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (!j.is_array() || j.size() != 2) {
    throw ValidationError(where + ": expected [re, im] or a real number");
  }
  return Complex(detail::number(j[0], where + "[0]"),
                 detail::number(j[1], where + "[1]"));
}

inline Matrix parse_matrix(const json& j, int dim, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + ": expected an array of rows");
  if (static_cast<int>(j.size()) != dim) {
    throw ValidationError(where + ": has " + std::to_string(j.size()) + " rows, expected " +
                          std::to_string(dim));
  }
  Matrix m(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    const std::string rw = where + " row " + std::to_string(r);
    if (!row.is_array()) throw ValidationError(rw + ": expected an array of entries");
    if (static_cast<int>(row.size()) != dim) {
      throw ValidationError(rw + ": has " + std::to_string(row.size()) +
                            " entries, expected " + std::to_string(dim));
    }
    for (int c = 0; c < dim; ++c) {
      m(r, c) = parse_entry(row[static_cast<std::size_t>(c)],
                            rw + " col " + std::to_string(c));
    }
  }
  return m;
}

inline ScenarioFile parse_scenario_file(const json& doc, const std::string& origin = "scenario",
                                        std::optional<double> psd_override = std::nullopt) {
  detail::reject_unknown(doc, {"id", "dim", "states", "priors", "povms", "options"}, origin);
  const int dim = detail::positive_int(detail::member(doc, "dim", origin), origin + ".dim");

  std::string id;
  if (doc.contains("id")) {
    if (!doc["id"].is_string()) throw ValidationError(origin + ".id: expected a string");
    id = doc["id"].get<std::string>();
  }

  FileOptions opt;
  if (doc.contains("options")) {
    const json& o = doc["options"];
    const std::string ow = origin + ".options";
    detail::reject_unknown(o, {"seed", "psd_tolerance"}, ow);
    if (o.contains("seed")) {
      if (!o["seed"].is_number_integer() || o["seed"].get<std::int64_t>() < 0) {
        throw ValidationError(ow + ".seed: expected a non-negative integer");
      }
      opt.seed = o["seed"].get<std::uint64_t>();
    }
    if (o.contains("psd_tolerance")) {
      opt.psd_tolerance = detail::number(o["psd_tolerance"], ow + ".psd_tolerance");
      if (opt.psd_tolerance < 0.0) {
        throw ValidationError(ow + ".psd_tolerance: must be non-negative");
      }
    }
  }
  if (psd_override) {
    if (*psd_override < 0.0) throw ValidationError(origin + ": psd tolerance must be non-negative");
    opt.psd_tolerance = *psd_override;
  }

  const json& states = detail::member(doc, "states", origin);
  if (!states.is_array() || states.size() < 2) {
    throw ValidationError(origin + ".states: expected an array of at least two states");
  }
  const int n = static_cast<int>(states.size());
  std::vector<std::string> labels;
  std::vector<DensityMatrix> rhos;
  labels.reserve(static_cast<std::size_t>(n));
  rhos.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const json& s = states[static_cast<std::size_t>(i)];
    const std::string where = origin + ".states[" + std::to_string(i) + "]";
    detail::reject_unknown(s, {"label", "matrix"}, where);
    const json& label = detail::member(s, "label", where);
    if (!label.is_string()) throw ValidationError(where + ".label: expected a string");
    labels.push_back(label.get<std::string>());
    const Matrix m = parse_matrix(detail::member(s, "matrix", where), dim, where + ".matrix");
    try {
      rhos.emplace_back(m);
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }

  const json& priors = detail::member(doc, "priors", origin);
  if (!priors.is_array() || static_cast<int>(priors.size()) != n) {
    throw ValidationError(origin + ".priors: expected " + std::to_string(n) +
                          " entries to match states");
  }
  RealVector q(n);
  for (int i = 0; i < n; ++i) {
    q(i) = detail::number(priors[static_cast<std::size_t>(i)],
                          origin + ".priors[" + std::to_string(i) + "]");
  }

  std::vector<NamedPovm> povms;
  if (doc.contains("povms")) {
    const json& list = doc["povms"];
    if (!list.is_array()) throw ValidationError(origin + ".povms: expected an array");
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::string where = origin + ".povms[" + std::to_string(k) + "]";
      const json& p = list[k];
      detail::reject_unknown(p, {"name", "elements"}, where);
      const json& name = detail::member(p, "name", where);
      if (!name.is_string()) throw ValidationError(where + ".name: expected a string");
      for (const auto& existing : povms) {
        if (existing.name == name.get<std::string>()) {
          throw ValidationError(where + ".name: duplicate measurement name '" +
                                name.get<std::string>() + "'");
        }
      }
      const json& elements = detail::member(p, "elements", where);
      if (!elements.is_array() || elements.empty()) {
        throw ValidationError(where + ".elements: expected a non-empty array of matrices");
      }
      std::vector<Matrix> mats;
      mats.reserve(elements.size());
      for (std::size_t y = 0; y < elements.size(); ++y) {
        mats.push_back(parse_matrix(elements[y], dim,
                                    where + ".elements[" + std::to_string(y) + "]"));
      }
      try {
        povms.push_back(NamedPovm{name.get<std::string>(), Povm(mats, opt.psd_tolerance)});
      } catch (const ValidationError& e) {
        throw ValidationError(where + ": " + e.what());
      }
    }
  }

  try {
    return ScenarioFile{std::move(id), std::move(labels), Scenario(std::move(rhos), q),
                        std::move(povms), opt};
  } catch (const ValidationError& e) {
    throw ValidationError(origin + ": " + e.what());
  }
}

inline ScenarioFile load_scenario_file(const std::string& path,
                                       std::optional<double> psd_override = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  ScenarioFile f = parse_scenario_file(doc, path, psd_override);
  if (f.id.empty()) f.id = std::filesystem::path(path).stem().string();
  return f;
}

// --- serialization -----------------------------------------------------------

inline json entry_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

inline json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(entry_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json scenario_file_json(const ScenarioFile& f) {
  json doc;
  if (!f.id.empty()) doc["id"] = f.id;
  doc["dim"] = f.scenario.dim();
  json states = json::array();
  for (int i = 0; i < f.scenario.size(); ++i) {
    json s;
    s["label"] = i < static_cast<int>(f.labels.size()) ? f.labels[static_cast<std::size_t>(i)]
                                                       : "rho" + std::to_string(i + 1);
    s["matrix"] = matrix_json(f.scenario.states()[static_cast<std::size_t>(i)].rho);
    states.push_back(std::move(s));
  }
  doc["states"] = std::move(states);
  json priors = json::array();
  for (int i = 0; i < f.scenario.size(); ++i) priors.push_back(f.scenario.prior(i));
  doc["priors"] = std::move(priors);
  json povms = json::array();
  for (const auto& p : f.povms) {
    json entry;
    entry["name"] = p.name;
    json elements = json::array();
    for (int y = 0; y < p.povm.outcomes(); ++y) elements.push_back(matrix_json(p.povm.element(y)));
    entry["elements"] = std::move(elements);
    povms.push_back(std::move(entry));
  }
  doc["povms"] = std::move(povms);
  doc["options"] = json{{"seed", f.options.seed}, {"psd_tolerance", f.options.psd_tolerance}};
  return doc;
}

/// Document carrying the input scenario plus a single named measurement, in
/// the same encoding parse_scenario_file reads back.
inline json povm_document(const ScenarioFile& base, const std::string& name, const Povm& p) {
  const ScenarioFile out{base.id, base.labels, base.scenario, {NamedPovm{name, p}},
                         base.options};
  return scenario_file_json(out);
}

inline void write_json_file(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << doc.dump(2) << '\n';
  if (!out) throw ValidationError("failed while writing '" + path + "'");
}

// --- result tables -------------------------------------------------------------

/// Numeric cells use 12 significant digits with '.' as the decimal mark.
inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::string(buf);
}

inline std::string csv_quote(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

/// Rectangular table with a header row.  Rows sort lexicographically on their
/// leading key columns so identical invocations emit byte-identical CSV.
struct ResultTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) {
    if (row.size() != header.size()) {
      throw ValidationError("result row has " + std::to_string(row.size()) +
                            " cells, header has " + std::to_string(header.size()));
    }
    rows.push_back(std::move(row));
  }

  void sort_rows(std::size_t key_columns = 3) {
    const std::size_t k = std::min(key_columns, header.size());
    std::stable_sort(rows.begin(), rows.end(),
                     [k](const std::vector<std::string>& a, const std::vector<std::string>& b) {
                       for (std::size_t i = 0; i < k; ++i) {
                         if (a[i] != b[i]) return a[i] < b[i];
                       }
                       return false;
                     });
  }

  std::string to_csv() const {
    std::ostringstream out;
    const auto line = [&out](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out << ',';
        out << csv_quote(cells[i]);
      }
      out << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out.str();
  }
};

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ValidationError("failed while writing '" + path + "'");
}

}  // namespace qsd::io
