// Copyright 2026 The bbforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "bbforge/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bbforge/error.hpp"

namespace bbforge::io {

namespace {

void dump_into(const Json& j, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        dump_into(it.value(), indent + 2, out);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::none_of(j.begin(), j.end(), [](const Json& e) { return e.is_structured(); });
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump_into(j[i], indent, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump_into(j[i], indent + 2, out);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

template <typename Fn>
auto guarded(const std::string& what, Fn fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kConfig, what + ": " + e.what());
  }
}

Complex entry_from_json(const Json& e) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) return {e[0].get<double>(), e[1].get<double>()};
  throw Error(ErrorKind::kConfig, "matrix entry must be a number or a [re, im] pair");
}

Json real_vector(const RVector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::kConfig, "cannot parse " + origin + ": " + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfig, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

std::string dump(const Json& j) {
  std::string out;
  dump_into(j, 0, out);
  out += "\n";
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path);
}

Json to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(row);
  }
  return rows;
}

CMatrix matrix_from_json(const Json& j) {
  return guarded("matrix", [&] {
    if (j.is_object() && j.contains("pauli")) {
      CMatrix m;
      for (const auto& term : j.at("pauli")) {
        if (!term.is_array() || term.size() != 2) throw Error(ErrorKind::kConfig, "pauli term must be [label, coefficient]");
        const PauliString p = PauliString::from_label(term[0].get<std::string>());
        const CMatrix pm = p.matrix();
        if (m.size() == 0) m = CMatrix::Zero(pm.rows(), pm.cols());
        if (pm.rows() != m.rows()) throw Error(ErrorKind::kConfig, "pauli terms have different qubit counts");
        m += entry_from_json(term[1]) * pm;
      }
      if (m.size() == 0) throw Error(ErrorKind::kConfig, "empty pauli expansion");
      return m;
    }
    if (!j.is_array() || j.empty()) throw Error(ErrorKind::kConfig, "matrix must be a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    CMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Json& row = j[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw Error(ErrorKind::kConfig, "ragged matrix rows");
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = entry_from_json(row[static_cast<std::size_t>(c)]);
    }
    return m;
  });
}

CVector vector_from_json(const Json& j) {
  return guarded("vector", [&] {
    if (!j.is_array() || j.empty()) throw Error(ErrorKind::kConfig, "state vector must be a non-empty array");
    CVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = entry_from_json(j[i]);
    return v;
  });
}

Json to_json(const AxisAngle& a) { return Json{{"axis", real_vector(a.axis)}, {"angle", a.angle}}; }

Json to_json(const CoordinateVector& v) {
  Json j;
  j["basis"] = v.basis ? v.basis->id() : "";
  j["labels"] = v.basis ? Json(std::vector<std::string>(v.basis->labels().begin() + 1, v.basis->labels().end())) : Json::array();
  j["coords"] = real_vector(v.coords);
  return j;
}

Json to_json(const ErrorReport& r) {
  Json j;
  j["error_vector"] = to_json(r.error_vector);
  j["scalar_distance"] = r.scalar_distance;
  j["stabilizer_distance"] = r.stabilizer_distance ? Json(*r.stabilizer_distance) : Json(nullptr);
  return j;
}

Json to_json(const ChiMatrix& chi) {
  Json j;
  j["basis"] = chi.basis->id();
  j["labels"] = chi.basis->labels();
  j["time_tag"] = chi.time_tag;
  j["skew_norm"] = chi.skew_norm;
  j["residual"] = chi.residual;
  j["entries"] = to_json(chi.entries);
  return j;
}

Json to_json(const EffectiveGenerator& g) {
  Json j;
  j["time_scale"] = g.time_scale;
  Json per = Json::array();
  for (const auto& v : g.xi) per.push_back(real_vector(v.coords));
  j["xi"] = per;
  Json pairs = Json::array();
  for (const auto& [key, m] : g.xi_pair) {
    Json rows = Json::array();
    for (int a = 0; a < 4; ++a) rows.push_back(real_vector(m.row(a).transpose()));
    pairs.push_back(Json{{"pair", Json::array({key.first, key.second})}, {"matrix", rows}});
  }
  j["xi_pair"] = pairs;
  j["full"] = to_json(g.full);
  j["warnings"] = g.warnings;
  return j;
}

Json to_json(const PulseGroup& g) {
  Json j;
  j["group_size"] = g.size();
  j["delta_t"] = g.delta_t();
  j["cycle_time"] = g.cycle_time();
  Json pulses = Json::array();
  for (const auto& p : g.pulses()) pulses.push_back(to_json(p));
  j["pulses"] = pulses;
  return j;
}

Json to_json(const SynthesisResult& r) {
  Json j = to_json(r.group);
  Json summary = Json::array();
  for (const auto& row : r.local_factors) {
    Json factors = Json::array();
    for (const auto& a : row) factors.push_back(to_json(a));
    summary.push_back(factors);
  }
  j["axis_angle"] = summary;
  j["residual"] = to_json(r.residual);
  j["free_parameters"] = r.free_parameters;
  return j;
}

Json to_json(const GenerationRecord& r) {
  Json j;
  j["generation"] = r.generation;
  j["best_J"] = r.best_cost;
  j["mean_J"] = r.mean_cost;
  j["group_size"] = r.best_group.size();
  j["converged"] = r.converged;
  j["best_origin"] = r.best_origin;
  j["residual"] = to_json(r.residual);
  return j;
}

Json to_json(const LearningResult& r) {
  Json j;
  j["converged"] = r.converged;
  j["best_J"] = r.best_cost;
  j["best_group"] = to_json(r.best_group);
  Json summary = Json::array();
  for (const auto& row : r.best_local_factors) {
    Json factors = Json::array();
    for (const auto& a : row) factors.push_back(to_json(a));
    summary.push_back(factors);
  }
  j["axis_angle"] = summary;
  Json records = Json::array();
  for (const auto& rec : r.records) records.push_back(to_json(rec));
  j["generations"] = records;
  j["analysis"] = r.analysis_log;
  return j;
}

Json to_json(const SystemBathModel& model) {
  Json j;
  j["system_hamiltonian"] = to_json(model.system_hamiltonian());
  j["bath_hamiltonian"] = to_json(model.bath_hamiltonian());
  Json couplings = Json::array();
  for (const auto& c : model.couplings()) {
    couplings.push_back(Json{{"name", c.name}, {"system", to_json(c.system)}, {"bath", to_json(c.bath)}});
  }
  j["couplings"] = couplings;
  j["bath_initial"] = to_json(model.bath_initial());
  j["coupling_order"] = model.coupling_order();
  return j;
}

SystemBathModel model_from_json(const Json& j) {
  return guarded("model", [&] {
    if (!j.is_object()) throw Error(ErrorKind::kConfig, "model must be an object");
    const CMatrix hs = matrix_from_json(j.at("system_hamiltonian"));
    if (!j.contains("bath_hamiltonian") && !j.contains("couplings")) {
      return SystemBathModel::closed(hs);
    }
    const CMatrix hb = j.contains("bath_hamiltonian") ? matrix_from_json(j.at("bath_hamiltonian")) : CMatrix::Zero(1, 1);
    std::vector<Coupling> couplings;
    if (j.contains("couplings")) {
      for (const auto& c : j.at("couplings")) {
        couplings.push_back({c.value("name", std::string("coupling")), matrix_from_json(c.at("system")), matrix_from_json(c.at("bath"))});
      }
    }
    CMatrix rho_b;
    if (j.contains("bath_initial")) {
      rho_b = matrix_from_json(j.at("bath_initial"));
    } else if (j.contains("bath_initial_state")) {
      rho_b = DensityMatrix::pure(vector_from_json(j.at("bath_initial_state"))).matrix();
    } else {
      rho_b = identity(hb.rows()) / static_cast<double>(hb.rows());
    }
    return SystemBathModel(hs, hb, std::move(couplings), rho_b, j.value("coupling_order", 1));
  });
}

TargetSpec target_from_json(const Json& j) {
  return guarded("target", [&] {
    if (!j.is_object()) throw Error(ErrorKind::kConfig, "target must be an object");
    const TargetKind kind = target_kind_from_string(j.at("kind").get<std::string>());
    TargetSpec t;
    switch (kind) {
      case TargetKind::kStorage:
        t = TargetSpec::storage();
        if (j.contains("wanted")) {
          for (const auto& v : j.at("wanted")) {
            if (v.is_number() && v.get<double>() != 0.0) throw Error(ErrorKind::kDomain, "storage target must have zero wanted entries");
          }
        }
        break;
      case TargetKind::kSingleQubit: {
        const auto w = j.at("wanted").get<std::vector<double>>();
        if (w.size() != 3) throw Error(ErrorKind::kShape, "single-qubit wanted vector needs 3 entries");
        t = TargetSpec::single_qubit(Eigen::Vector3d(w[0], w[1], w[2]));
        break;
      }
      case TargetKind::kTwoQubit: {
        const auto rows = j.at("wanted").get<std::vector<std::vector<double>>>();
        if (rows.size() != 4) throw Error(ErrorKind::kShape, "two-qubit wanted matrix must be 4x4");
        Eigen::Matrix4d w;
        for (int a = 0; a < 4; ++a) {
          if (rows[static_cast<std::size_t>(a)].size() != 4) throw Error(ErrorKind::kShape, "two-qubit wanted matrix must be 4x4");
          for (int b = 0; b < 4; ++b) w(a, b) = rows[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
        }
        t = TargetSpec::two_qubit(w);
        break;
      }
      case TargetKind::kEncoded: {
        std::optional<StabilizerSpace> stab;
        if (j.contains("stabilizer")) {
          std::vector<CMatrix> gens;
          for (const auto& g : j.at("stabilizer")) gens.push_back(matrix_from_json(g));
          stab = StabilizerSpace::create(std::move(gens));
        }
        const Json& w = j.at("wanted");
        CoordinateVector wanted;
        if (w.is_object() || (w.is_array() && !w.empty() && w[0].is_array())) {
          const CMatrix op = matrix_from_json(w);
          wanted = expand(op, pauli_basis(qubit_count_for_dim(op.rows())));
        } else {
          const auto coords = w.get<std::vector<double>>();
          wanted = {Eigen::Map<const RVector>(coords.data(), static_cast<Eigen::Index>(coords.size())),
                    pauli_basis(j.at("basis_qubits").get<int>())};
        }
        t = TargetSpec::encoded(std::move(wanted), std::move(stab));
        break;
      }
    }
    t.validate();
    return t;
  });
}

LearningLoopConfig loop_config_from_json(const Json& j) {
  return guarded("loop", [&] {
    LearningLoopConfig c;
    if (j.is_null()) return c;
    if (!j.is_object()) throw Error(ErrorKind::kConfig, "loop must be an object");
    c.population = j.value("population", c.population);
    c.generations = j.value("generations", c.generations);
    c.mutation_rate = j.value("mutation_rate", c.mutation_rate);
    c.tolerance = j.value("tolerance", c.tolerance);
    c.seed = j.value("seed", c.seed);
    c.group_size_bound = j.value("group_size_bound", c.group_size_bound);
    c.delta_t = j.value("delta_t", c.delta_t);
    c.horizon_cycles = j.value("horizon_cycles", c.horizon_cycles);
    c.quadrature = j.value("quadrature", c.quadrature);
    c.probe_time = j.value("probe_time", c.probe_time);
    c.detection_threshold = j.value("detection_threshold", c.detection_threshold);
    c.tournament = j.value("tournament", c.tournament);
    c.mutation_sigma = j.value("mutation_sigma", c.mutation_sigma);
    c.elitism = j.value("elitism", c.elitism);
    c.threads = j.value("threads", c.threads);
    c.qubit = j.value("qubit", c.qubit);
    if (j.contains("pair")) {
      const auto p = j.at("pair").get<std::vector<int>>();
      if (p.size() != 2) throw Error(ErrorKind::kConfig, "pair must have two entries");
      c.pair = {p[0], p[1]};
    }
    return c;
  });
}

PulseGroup group_from_json(const Json& j) {
  return guarded("group", [&] {
    std::vector<CMatrix> pulses;
    for (const auto& p : j.at("pulses")) pulses.push_back(matrix_from_json(p));
    return PulseGroup(std::move(pulses), j.at("delta_t").get<double>());
  });
}

std::string records_csv(const std::vector<GenerationRecord>& records) {
  std::string out = "generation,best_J,mean_J,group_size,converged\n";
  for (const auto& r : records) {
    out += std::to_string(r.generation) + "," + format_double(r.best_cost) + "," + format_double(r.mean_cost) + "," +
           std::to_string(r.best_group.size()) + "," + (r.converged ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace bbforge::io
