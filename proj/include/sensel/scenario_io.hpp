// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON scenario files (see schema/scenario.schema.json). Matrices are
// row-major nested arrays. A model entry is either one matrix (constant over
// the horizon) or {"per_step": [M_1, ..., M_N]}. Block-diagonal sensor noise
// may be given as noise.blocks, one matrix per sensor, instead of noise.R;
// saving uses that form whenever the constant R is block diagonal.

#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sensel/error.hpp"
#include "sensel/linalg.hpp"
#include "sensel/model.hpp"

namespace sensel {

using Json = nlohmann::json;

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kParseError, field + ": " + what);
}

inline const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) parse_fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) parse_fail(path.empty() ? key : path + "." + key, "missing field");
  return *it;
}

inline double number(const Json& j, const std::string& path) {
  if (!j.is_number()) parse_fail(path, "expected a number");
  return j.get<double>();
}

inline Vector vector_from(const Json& j, const std::string& path) {
  if (!j.is_array()) parse_fail(path, "expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Index>(k)) = number(j[k], path + "[" + std::to_string(k) + "]");
  return v;
}

inline Matrix matrix_from(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) parse_fail(path, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) parse_fail(path + "[0]", "expected a non-empty row");
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols) parse_fail(rp, "rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Index>(r), static_cast<Index>(c)) = number(j[r][c], rp + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

inline std::vector<Matrix> model_entry(const Json& j, const std::string& path) {
  if (j.is_object()) {
    const Json& list = field(j, "per_step", path);
    if (!list.is_array() || list.empty()) parse_fail(path + ".per_step", "expected a non-empty array of matrices");
    std::vector<Matrix> out;
    for (std::size_t k = 0; k < list.size(); ++k) {
      out.push_back(matrix_from(list[k], path + ".per_step[" + std::to_string(k) + "]"));
    }
    return out;
  }
  return {matrix_from(j, path)};
}

inline std::vector<int> int_list(const Json& j, const std::string& path) {
  if (!j.is_array()) parse_fail(path, "expected an array of integers");
  std::vector<int> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number_integer()) parse_fail(path + "[" + std::to_string(k) + "]", "expected an integer");
    out.push_back(j[k].get<int>());
  }
  return out;
}

inline Position position_from(const Json& j, const std::string& path) {
  const Vector v = vector_from(j, path);
  if (v.size() != 2) parse_fail(path, "expected [x, y]");
  return Position(v(0), v(1));
}

inline Relation relation_from(const Json& j, const std::string& path) {
  if (!j.is_string()) parse_fail(path, "expected one of \"<=\", \"=\", \">=\"");
  const auto s = j.get<std::string>();
  if (s == "<=") return Relation::kLessEqual;
  if (s == "=" || s == "==") return Relation::kEqual;
  if (s == ">=") return Relation::kGreaterEqual;
  parse_fail(path, "unknown relation \"" + s + "\"");
}

inline Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

inline Json entry_json(const std::vector<Matrix>& list) {
  if (list.size() == 1) return to_json(list.front());
  Json steps = Json::array();
  for (const auto& m : list) steps.push_back(to_json(m));
  return Json{{"per_step", std::move(steps)}};
}

}  // namespace detail

/// Parses and validates a scenario document.
inline Scenario scenario_from_json(const Json& j) {
  using namespace detail;
  Scenario s;
  if (!j.is_object()) parse_fail("(root)", "expected an object");
  if (j.contains("name")) {
    if (!j["name"].is_string()) parse_fail("name", "expected a string");
    s.name = j["name"].get<std::string>();
  }
  const Json& sd = field(j, "state_dim", "");
  if (!sd.is_number_integer()) parse_fail("state_dim", "expected an integer");
  s.system.state_dim = sd.get<Index>();
  s.system.f = model_entry(field(j, "F", ""), "F");
  s.system.q = model_entry(field(j, "Q", ""), "Q");

  const Json& sensors = field(j, "sensors", "");
  if (!sensors.is_array()) parse_fail("sensors", "expected an array");
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const std::string p = "sensors[" + std::to_string(i) + "]";
    SensorModel m;
    m.h = model_entry(field(sensors[i], "H", p), p + ".H");
    if (sensors[i].contains("position")) m.position = position_from(sensors[i]["position"], p + ".position");
    s.sensors.push_back(std::move(m));
  }

  const Json& noise = field(j, "noise", "");
  if (noise.contains("blocks")) {
    if (noise.contains("R")) parse_fail("noise", "give either R or blocks, not both");
    const Json& blocks = noise["blocks"];
    if (!blocks.is_array() || blocks.empty()) parse_fail("noise.blocks", "expected one matrix per sensor");
    std::vector<Matrix> list;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      list.push_back(matrix_from(blocks[k], "noise.blocks[" + std::to_string(k) + "]"));
      if (list.back().rows() != list.back().cols()) {
        parse_fail("noise.blocks[" + std::to_string(k) + "]", "expected a square matrix");
      }
    }
    s.noise.r_base = {block_diagonal(list)};
  } else {
    s.noise.r_base = model_entry(field(noise, "R", "noise"), "noise.R");
  }
  if (noise.contains("jammer")) {
    const Json& jm = noise["jammer"];
    Jammer jam;
    jam.p0 = number(field(jm, "p0", "noise.jammer"), "noise.jammer.p0");
    jam.alpha = number(field(jm, "alpha", "noise.jammer"), "noise.jammer.alpha");
    jam.n_exp = number(field(jm, "n_exp", "noise.jammer"), "noise.jammer.n_exp");
    jam.position = position_from(field(jm, "position", "noise.jammer"), "noise.jammer.position");
    jam.r0 = matrix_from(field(jm, "R0", "noise.jammer"), "noise.jammer.R0");
    if (!(jam.p0 >= 0.0)) throw Error(ErrorCode::kInvalidScenario, "noise.jammer.p0 must be non-negative");
    s.noise.jammer = jam;
  }
  if (noise.contains("distance")) {
    s.noise.distance = DistanceNoise{number(field(noise["distance"], "alpha1", "noise.distance"),
                                            "noise.distance.alpha1")};
  }

  const Json& c = field(j, "constraints", "");
  s.constraints.per_step = int_list(field(c, "per_step", "constraints"), "constraints.per_step");
  if (c.contains("energy") && !c["energy"].is_null()) {
    s.constraints.energy = int_list(c["energy"], "constraints.energy");
  }
  if (c.contains("linear")) {
    const Json& rows = c["linear"];
    if (!rows.is_array()) parse_fail("constraints.linear", "expected an array");
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const std::string p = "constraints.linear[" + std::to_string(k) + "]";
      LinearConstraint row;
      row.a = vector_from(field(rows[k], "a", p), p + ".a");
      row.relation = relation_from(field(rows[k], "relation", p), p + ".relation");
      row.b = number(field(rows[k], "b", p), p + ".b");
      s.constraints.linear.push_back(std::move(row));
    }
  }

  const Vector w = vector_from(field(j, "weights", ""), "weights");
  s.weights.assign(w.data(), w.data() + w.size());
  s.x0 = vector_from(field(j, "x0", ""), "x0");
  s.p0 = matrix_from(field(j, "P0", ""), "P0");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0)) {
      parse_fail("seed", "expected a non-negative integer");
    }
    s.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("position_indices")) {
    for (int k : int_list(j["position_indices"], "position_indices")) s.position_indices.push_back(k);
  } else {
    s.position_indices = default_position_indices(s.system.state_dim);
  }

  // Dimension checks that must precede assembling the jammed covariance.
  for (std::size_t i = 0; i < s.sensors.size(); ++i) {
    for (const auto& h : s.sensors[i].h) {
      if (h.rows() != s.sensors[i].dim()) {
        throw Error(ErrorCode::kInvalidScenario,
                    "sensors[" + std::to_string(i) + "].H must keep one measurement size across steps");
      }
    }
  }
  const Index total = s.sensors.empty() ? 0 : sensor_offsets(s.sensors).back();
  for (const auto& r : s.noise.r_base) {
    if (r.rows() != total || r.cols() != total) {
      throw Error(ErrorCode::kInvalidScenario, "noise.R must be " + std::to_string(total) + "x" +
                                                   std::to_string(total) + " (stacked measurement size)");
    }
  }
  refresh_noise(s.noise, s.sensors);
  validate(s);
  return s;
}

inline Json scenario_to_json(const Scenario& s) {
  using namespace detail;
  Json j;
  j["name"] = s.name;
  j["state_dim"] = s.system.state_dim;
  j["F"] = entry_json(s.system.f);
  j["Q"] = entry_json(s.system.q);
  Json sensors = Json::array();
  for (const auto& m : s.sensors) {
    sensors.push_back(Json{{"H", entry_json(m.h)}, {"position", {m.position.x(), m.position.y()}}});
  }
  j["sensors"] = std::move(sensors);
  Json noise;
  const auto off = sensor_offsets(s.sensors);
  if (s.noise.r_base.size() == 1 && is_block_diagonal(s.noise.r_base.front(), off)) {
    Json blocks = Json::array();
    for (std::size_t i = 0; i < s.sensors.size(); ++i) {
      blocks.push_back(to_json(sensor_block(s.noise.r_base.front(), off, i, i)));
    }
    noise["blocks"] = std::move(blocks);
  } else {
    noise["R"] = entry_json(s.noise.r_base);
  }
  if (s.noise.jammer) {
    const auto& jm = *s.noise.jammer;
    noise["jammer"] = Json{{"p0", jm.p0},
                           {"alpha", jm.alpha},
                           {"n_exp", jm.n_exp},
                           {"position", {jm.position.x(), jm.position.y()}},
                           {"R0", to_json(jm.r0)}};
  }
  if (s.noise.distance) noise["distance"] = Json{{"alpha1", s.noise.distance->alpha1}};
  j["noise"] = std::move(noise);
  Json c;
  c["per_step"] = s.constraints.per_step;
  if (s.constraints.energy) c["energy"] = *s.constraints.energy;
  Json rows = Json::array();
  for (const auto& row : s.constraints.linear) {
    rows.push_back(Json{{"a", vector_json(row.a)}, {"relation", to_string(row.relation)}, {"b", row.b}});
  }
  c["linear"] = std::move(rows);
  j["constraints"] = std::move(c);
  j["weights"] = s.weights;
  j["x0"] = vector_json(s.x0);
  j["P0"] = to_json(s.p0);
  j["seed"] = s.seed;
  std::vector<long long> idx(s.position_indices.begin(), s.position_indices.end());
  j["position_indices"] = idx;
  return j;
}

inline Scenario parse_scenario(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kParseError, std::string("invalid JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open scenario file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

inline std::string dump_scenario(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

inline void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kParseError, "cannot write scenario file " + path);
  out << dump_scenario(s);
}

}  // namespace sensel
