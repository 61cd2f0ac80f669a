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


#include "bbforge/catalogue.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

#include "bbforge/error.hpp"

namespace bbforge {

namespace {

struct Family {
  enum Kind { kTrivial, kParity, kCyclic, kFrame } kind;
  GroupSkeleton skeleton;
};

std::string axis_name(const Eigen::Vector3d& n) {
  const double scale = n.cwiseAbs().maxCoeff();
  std::string s = "(";
  for (int i = 0; i < 3; ++i) {
    const double v = n(i) / scale;
    const double r = std::round(v);
    if (std::abs(v - r) < 1e-12) {
      s += std::to_string(static_cast<int>(r));
    } else {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4g", v);
      s += buf;
    }
    if (i < 2) s += ",";
  }
  return s + ")";
}

// Representatives up to sign, in grid order.
std::vector<Eigen::Vector3d> distinct_axes(const std::vector<Eigen::Vector3d>& axes) {
  std::vector<Eigen::Vector3d> out;
  for (const auto& raw : axes) {
    if (raw.norm() < 1e-12) continue;
    const Eigen::Vector3d n = raw.normalized();
    bool seen = false;
    for (const auto& m : out) seen = seen || (m - n).norm() < 1e-12 || (m + n).norm() < 1e-12;
    if (!seen) out.push_back(n);
  }
  return out;
}

GroupSkeleton cyclic(const Eigen::Vector3d& n, int m) {
  GroupSkeleton s;
  s.name = (m == 2 ? "parity" : "cyclic" + std::to_string(m)) + axis_name(n);
  for (int k = 0; k < m; ++k) {
    const AxisAngle a = AxisAngle::make(n, k * std::numbers::pi / m);
    s.pulses.push_back(k == 0 ? identity(2) : a.unitary());
    s.local_factors.push_back({k == 0 ? AxisAngle{} : a});
  }
  return s;
}

GroupSkeleton frame(const Eigen::Vector3d& n1, const Eigen::Vector3d& n2, const std::string& name) {
  GroupSkeleton s;
  s.name = name;
  s.pulses.push_back(identity(2));
  s.local_factors.push_back({AxisAngle{}});
  for (const Eigen::Vector3d& n : {n1, n2, Eigen::Vector3d(n1.cross(n2))}) {
    const AxisAngle a = AxisAngle::make(n, std::numbers::pi / 2);
    s.pulses.push_back(a.unitary());
    s.local_factors.push_back({a});
  }
  return s;
}

GroupSkeleton trivial_of_size(int m) {
  GroupSkeleton s;
  s.name = "identity";
  for (int k = 0; k < m; ++k) {
    s.pulses.push_back(identity(2));
    s.local_factors.push_back({AxisAngle{}});
  }
  return s;
}

std::vector<Family> single_qubit_families(int size, const std::vector<Eigen::Vector3d>& axes) {
  std::vector<Family> out;
  for (const auto& n : axes) out.push_back({size == 2 ? Family::kParity : Family::kCyclic, cyclic(n, size)});
  if (size == 4) {
    const double r = 1.0 / std::sqrt(2.0);
    out.push_back({Family::kFrame, frame(Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(), "pauli")});
    out.push_back({Family::kFrame, frame(Eigen::Vector3d(r, r, 0), Eigen::Vector3d(r, -r, 0), "pauli_frame(z45)")});
    out.push_back({Family::kFrame, frame(Eigen::Vector3d(r, 0, r), Eigen::Vector3d(r, 0, -r), "pauli_frame(y45)")});
    out.push_back({Family::kFrame, frame(Eigen::Vector3d(0, r, r), Eigen::Vector3d(0, r, -r), "pauli_frame(x45)")});
  }
  return out;
}

std::vector<AdjointRotation> rotations_of(const std::vector<CMatrix>& pulses) {
  const BasisPtr basis = pauli_basis(qubit_count_for_dim(pulses.front().rows()));
  std::vector<AdjointRotation> out;
  out.reserve(pulses.size());
  for (const auto& p : pulses) out.push_back(adjoint_of(p, *basis));
  return out;
}

GroupSkeleton paired(const GroupSkeleton& a, const GroupSkeleton& b) {
  GroupSkeleton s;
  s.name = a.name + "*" + b.name;
  for (std::size_t k = 0; k < a.size(); ++k) {
    s.pulses.push_back(kron(a.pulses[k], b.pulses[k]));
    s.local_factors.push_back({a.local_factors[k][0], b.local_factors[k][0]});
  }
  return s;
}

GroupSkeleton direct(const GroupSkeleton& a, const GroupSkeleton& b) {
  GroupSkeleton s;
  s.name = a.name + "x" + b.name;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      s.pulses.push_back(kron(a.pulses[i], b.pulses[j]));
      s.local_factors.push_back({a.local_factors[i][0], b.local_factors[j][0]});
    }
  }
  return s;
}

}  // namespace

PulseGroup GroupSkeleton::to_group(double delta_t) const { return PulseGroup(pulses, delta_t); }

std::vector<Eigen::Vector3d> default_axis_grid() {
  std::vector<Eigen::Vector3d> positive;
  for (int weight = 1; weight <= 3; ++weight) {
    for (int a = 1; a >= -1; --a) {
      for (int b = 1; b >= -1; --b) {
        for (int c = 1; c >= -1; --c) {
          const Eigen::Vector3d v(a, b, c);
          if (static_cast<int>(v.cwiseAbs().sum()) != weight) continue;
          // first nonzero component positive
          const double lead = a != 0 ? a : (b != 0 ? b : c);
          if (lead > 0) positive.push_back(v.normalized());
        }
      }
    }
  }
  std::vector<Eigen::Vector3d> grid = positive;
  for (const auto& v : positive) grid.push_back(-v);
  return grid;
}

bool adjoint_image_closed(const std::vector<AdjointRotation>& rotations, double tolerance) {
  for (const auto& a : rotations) {
    for (const auto& b : rotations) {
      const RMatrix prod = a.matrix() * b.matrix();
      bool found = false;
      for (const auto& c : rotations) {
        if ((prod - c.matrix()).cwiseAbs().maxCoeff() < tolerance) {
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
  }
  return true;
}

std::vector<GroupSkeleton> enumerate_candidate_groups(Eigen::Index dim, int max_size,
                                                      const std::vector<Eigen::Vector3d>& axes) {
  if (dim != 2 && dim != 4) throw Error(ErrorKind::kShape, "candidate groups exist for dim 2 or 4 only");
  if (max_size < 2) throw Error(ErrorKind::kDomain, "max_size must be at least 2");
  const std::vector<Eigen::Vector3d> reps = distinct_axes(axes);
  std::vector<GroupSkeleton> out;
  for (int m = 2; m <= max_size; ++m) {
    const std::vector<Family> fams = single_qubit_families(m, reps);
    if (dim == 2) {
      for (const auto& f : fams) out.push_back(f.skeleton);
      continue;
    }
    std::vector<Family> with_pad = fams;
    with_pad.push_back({Family::kTrivial, trivial_of_size(m)});
    for (const auto& f1 : with_pad) {
      for (const auto& f2 : with_pad) {
        if (f1.kind == Family::kTrivial && f2.kind == Family::kTrivial) continue;
        if (f1.kind != f2.kind && f1.kind != Family::kTrivial && f2.kind != Family::kTrivial) continue;
        GroupSkeleton s = paired(f1.skeleton, f2.skeleton);
        if (adjoint_image_closed(rotations_of(s.pulses))) out.push_back(std::move(s));
      }
    }
    for (int a = 2; a <= m / 2; ++a) {
      if (m % a != 0 || m / a < 2) continue;
      const std::vector<Family> fa = single_qubit_families(a, reps);
      const std::vector<Family> fb = single_qubit_families(m / a, reps);
      for (const auto& f1 : fa) {
        for (const auto& f2 : fb) out.push_back(direct(f1.skeleton, f2.skeleton));
      }
    }
  }
  return out;
}

const std::vector<GroupSkeleton>& candidate_catalogue(Eigen::Index dim, int max_size) {
  static std::mutex mutex;
  static std::map<std::pair<Eigen::Index, int>, std::vector<GroupSkeleton>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find({dim, max_size});
  if (it == cache.end()) it = cache.emplace(std::make_pair(dim, max_size), enumerate_candidate_groups(dim, max_size)).first;
  return it->second;
}

}  // namespace bbforge
