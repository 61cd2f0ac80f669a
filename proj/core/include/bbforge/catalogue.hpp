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


#ifndef BBFORGE_CATALOGUE_HPP
#define BBFORGE_CATALOGUE_HPP

#include <string>
#include <vector>

#include "bbforge/linalg.hpp"
#include "bbforge/open_system.hpp"
#include "bbforge/operator_algebra.hpp"

namespace bbforge {

/// Pulse set without a spacing. `local_factors[k][q]` is the single-qubit
/// factor of pulse k on qubit q (dim 2 has one factor per pulse).
struct GroupSkeleton {
  std::string name;
  std::vector<CMatrix> pulses;
  std::vector<std::vector<AxisAngle>> local_factors;

  std::size_t size() const { return pulses.size(); }
  PulseGroup to_group(double delta_t) const;
};

/// The 26 directions of {−1, 0, 1}³ \ {0}, normalized. Ordered by number of
/// nonzero components, positive representatives first.
std::vector<Eigen::Vector3d> default_axis_grid();

/// Parity kicks, cyclic groups exp(i n̂·σ π/m) for 3 ≤ m ≤ max_size, Pauli
/// frames, and for dim 4 their paired and direct tensor products. Every entry
/// starts with the identity and has a closed adjoint image. Axes that differ
/// only by sign give the same set and are listed once.
std::vector<GroupSkeleton> enumerate_candidate_groups(Eigen::Index dim, int max_size,
                                                      const std::vector<Eigen::Vector3d>& axes = default_axis_grid());

/// Shared copy of the default-grid catalogue.
const std::vector<GroupSkeleton>& candidate_catalogue(Eigen::Index dim, int max_size);

/// True when every product R_a R_b is again in the set (1e-10 entrywise).
bool adjoint_image_closed(const std::vector<AdjointRotation>& rotations, double tolerance = 1e-10);

}  // namespace bbforge

#endif  // BBFORGE_CATALOGUE_HPP
