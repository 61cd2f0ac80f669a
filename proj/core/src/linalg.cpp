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

#include "bbforge/linalg.hpp"

#include <atomic>
#include <string>

#include <Eigen/Eigenvalues>

#include "bbforge/error.hpp"

namespace bbforge {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kCapacity: return "capacity error";
    case ErrorKind::kShape: return "shape error";
    case ErrorKind::kDomain: return "domain error";
    case ErrorKind::kInfeasible: return "infeasible";
    case ErrorKind::kInconsistency: return "inconsistency";
    case ErrorKind::kDegenerateTime: return "degenerate time";
    case ErrorKind::kNonRepresentable: return "non-representable";
    case ErrorKind::kConfig: return "config error";
    case ErrorKind::kIo: return "io error";
  }
  return "error";
}

namespace {
std::atomic<double> g_hermitian_tol{1e-10};
std::atomic<double> g_orthogonal_tol{1e-10};
}  // namespace

Tolerances default_tolerances() {
  return Tolerances{g_hermitian_tol.load(), g_orthogonal_tol.load()};
}

void set_default_tolerances(const Tolerances& tolerances) {
  g_hermitian_tol.store(tolerances.hermitian);
  g_orthogonal_tol.store(tolerances.orthogonal);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CMatrix identity(Eigen::Index dim) { return CMatrix::Identity(dim, dim); }

CMatrix partial_trace_second(const CMatrix& m, Eigen::Index dim_first, Eigen::Index dim_second) {
  if (m.rows() != dim_first * dim_second || m.cols() != m.rows()) {
    throw Error(ErrorKind::kShape, "partial trace: operator is " + std::to_string(m.rows()) + "x" +
                                       std::to_string(m.cols()) + ", expected " +
                                       std::to_string(dim_first * dim_second));
  }
  CMatrix out = CMatrix::Zero(dim_first, dim_first);
  for (Eigen::Index i = 0; i < dim_first; ++i) {
    for (Eigen::Index j = 0; j < dim_first; ++j) {
      Complex acc = 0.0;
      for (Eigen::Index k = 0; k < dim_second; ++k) {
        acc += m(i * dim_second + k, j * dim_second + k);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

double hermiticity_defect(const CMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).norm();
}

double unitarity_defect(const CMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm();
}

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

double trace_distance(const CMatrix& a, const CMatrix& b) {
  const CMatrix diff = hermitian_part(a - b);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(diff, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

double commutator_norm(const CMatrix& a, const CMatrix& b) { return (a * b - b * a).norm(); }

double anticommutator_norm(const CMatrix& a, const CMatrix& b) { return (a * b + b * a).norm(); }

double phase_insensitive_distance(const CMatrix& a, const CMatrix& b) {
  // ‖a − e^{iφ}b‖² = ‖a‖² + ‖b‖² − 2 Re(e^{iφ} ⟨a, b⟩), minimized at |⟨a, b⟩|.
  const Complex overlap = (a.adjoint() * b).trace();
  const double sq = a.squaredNorm() + b.squaredNorm() - 2.0 * std::abs(overlap);
  return std::sqrt(std::max(sq, 0.0));
}

int qubit_count_for_dim(Eigen::Index dim) {
  int n = 0;
  Eigen::Index d = 1;
  while (d < dim) {
    d *= 2;
    ++n;
  }
  if (d != dim || dim < 2) {
    throw Error(ErrorKind::kShape, "dimension " + std::to_string(dim) + " is not a power of two >= 2");
  }
  return n;
}

}  // namespace bbforge
