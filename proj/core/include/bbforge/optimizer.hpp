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


#ifndef BBFORGE_OPTIMIZER_HPP
#define BBFORGE_OPTIMIZER_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bbforge/catalogue.hpp"
#include "bbforge/open_system.hpp"
#include "bbforge/synthesis.hpp"
#include "bbforge/tomography.hpp"

namespace bbforge {

/// Reduced system channel of the pulsed evolution from 0 to t.
Channel evolution_channel(const SystemBathModel& model, const PulseGroup& group, double t);

/// Same for the unpulsed evolution.
Channel evolution_channel(const SystemBathModel& model, double t);

/// J = ∫ ‖S̃(τ) − S_w‖ dτ over `horizon_cycles` cycles, trapezoid rule on
/// `quadrature` nodes per cycle. The integrand at τ comes from tomography of
/// the pulsed evolution up to τ; its value at τ = 0 is taken from the first node.
struct CostFunction {
  TargetSpec wanted;
  int horizon_cycles = 1;
  int quadrature = 1;
  int qubit = 0;                    // single-qubit targets
  std::pair<int, int> pair{0, 1};   // two-qubit targets

  void validate() const;
};

struct CostBreakdown {
  double value = 0.0;
  std::vector<double> node_times;
  std::vector<double> node_values;
  ErrorReport last_node;  // error at the end of the horizon
};

CostBreakdown evaluate_cost_detailed(const SystemBathModel& model, const PulseGroup& group, const CostFunction& cost);
double evaluate_cost(const SystemBathModel& model, const PulseGroup& group, const CostFunction& cost);

struct LearningLoopConfig {
  int population = 32;
  int generations = 20;
  double mutation_rate = 0.2;   // per gene
  double tolerance = 1e-6;
  std::uint64_t seed = 42;
  int group_size_bound = 4;

  double delta_t = 0.1;
  int horizon_cycles = 1;
  int quadrature = 1;
  double probe_time = 0.01;
  /// Generator components below this fraction of the largest one are not
  /// treated as detected errors during the analysis step.
  double detection_threshold = 0.1;
  int tournament = 3;
  double mutation_sigma = 0.1;
  int elitism = 2;
  int threads = 0;              // 0: BBFORGE_THREADS, else hardware concurrency
  int qubit = 0;
  std::pair<int, int> pair{0, 1};

  void validate() const;
};

struct GenerationRecord {
  int generation = 0;
  double best_cost = 0.0;
  double mean_cost = 0.0;
  PulseGroup best_group;
  ErrorReport residual;
  bool converged = false;
  std::string best_origin;
};

struct LearningResult {
  PulseGroup best_group;
  double best_cost = 0.0;
  bool converged = false;
  std::vector<GenerationRecord> records;
  /// One line per analysis step that changed the solver candidate.
  std::vector<std::string> analysis_log;
  std::vector<std::vector<AxisAngle>> best_local_factors;
};

LearningResult learning_loop(const SystemBathModel& model, const TargetSpec& target, const LearningLoopConfig& config);

/// requested > 0 wins, then BBFORGE_THREADS, then the hardware count; at least 1.
int resolve_thread_count(int requested);

}  // namespace bbforge

#endif  // BBFORGE_OPTIMIZER_HPP
