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


#ifndef BBFORGE_JSON_IO_HPP
#define BBFORGE_JSON_IO_HPP

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bbforge/open_system.hpp"
#include "bbforge/optimizer.hpp"
#include "bbforge/synthesis.hpp"
#include "bbforge/tomography.hpp"

namespace bbforge::io {

using Json = nlohmann::ordered_json;

/// Parses text, mapping syntax errors onto ErrorKind::kConfig.
Json parse_json(const std::string& text, const std::string& origin = "input");
Json read_json_file(const std::string& path);

/// Two-space indented JSON with every floating value printed as %.17g.
std::string dump(const Json& j);
void write_text_file(const std::string& path, const std::string& text);

/// Complex matrices as rows of [re, im] pairs.
Json to_json(const CMatrix& m);
/// Accepts [re, im] pairs or plain reals per entry, or {"pauli": [[label, coeff], ...]}.
CMatrix matrix_from_json(const Json& j);
/// A state vector as a list of [re, im] pairs or reals.
CVector vector_from_json(const Json& j);

Json to_json(const AxisAngle& a);
Json to_json(const CoordinateVector& v);
Json to_json(const ErrorReport& r);
Json to_json(const ChiMatrix& chi);
Json to_json(const EffectiveGenerator& g);
Json to_json(const PulseGroup& g);
Json to_json(const SynthesisResult& r);
Json to_json(const GenerationRecord& r);
Json to_json(const LearningResult& r);
Json to_json(const SystemBathModel& model);

/// Keys: system_hamiltonian, bath_hamiltonian, couplings [{name, system, bath}],
/// bath_initial (matrix) or bath_initial_state (vector), coupling_order.
/// Without bath_hamiltonian and couplings the model is closed. The bath
/// starts maximally mixed when no initial state is given.
SystemBathModel model_from_json(const Json& j);

/// Keys: kind, wanted (3-vector, 4×4 matrix, or coordinates), basis_qubits, stabilizer.
TargetSpec target_from_json(const Json& j);

/// Overrides defaults with any keys present.
LearningLoopConfig loop_config_from_json(const Json& j);

PulseGroup group_from_json(const Json& j);

/// generation,best_J,mean_J,group_size,converged
std::string records_csv(const std::vector<GenerationRecord>& records);

/// %.17g
std::string format_double(double v);

}  // namespace bbforge::io

#endif  // BBFORGE_JSON_IO_HPP
