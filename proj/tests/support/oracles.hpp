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


// Reference computations for the tests. Everything here is written
// independently of the library: Pauli matrices from literals, products by
// explicit loops, exponentials by Taylor series.

#ifndef BBFORGE_TESTS_ORACLES_HPP
#define BBFORGE_TESTS_ORACLES_HPP

#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using C = std::complex<double>;
using M = Eigen::MatrixXcd;
using V = Eigen::VectorXcd;

inline M pauli(char c) {
  M m(2, 2);
  switch (c) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, C(0, -1), C(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("pauli label");
  }
  return m;
}

inline M kron(const M& a, const M& b) {
  M out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index k = 0; k < b.rows(); ++k)
        for (Eigen::Index l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

/// "XZ" = X on qubit 0 (leftmost factor) times Z on qubit 1.
inline M pauli_string(const std::string& label) {
  M out = M::Identity(1, 1);
  for (char c : label) out = kron(out, pauli(c));
  return out;
}

/// Labels of all Pauli strings on n qubits in lexicographic I < X < Y < Z order.
inline std::vector<std::string> pauli_labels(int n) {
  std::vector<std::string> labels{""};
  for (int q = 0; q < n; ++q) {
    std::vector<std::string> next;
    for (const auto& l : labels)
      for (char c : {'I', 'X', 'Y', 'Z'}) next.push_back(l + c);
    labels = next;
  }
  return labels;
}

inline C trace(const M& a) {
  C t = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

inline double frob(const M& a) {
  double s = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

/// exp(A) by scaling and squaring around a 40-term Taylor series.
inline M taylor_exp(const M& a) {
  int squarings = 0;
  double norm = frob(a);
  while (norm > 0.25) {
    norm /= 2;
    ++squarings;
  }
  const M s = a / std::pow(2.0, squarings);
  M term = M::Identity(a.rows(), a.cols());
  M sum = term;
  for (int k = 1; k <= 40; ++k) {
    term = term * s / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

inline M random_complex(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0, 1);
  M m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = C(n(rng), n(rng));
  return m;
}

inline M random_hermitian(Eigen::Index dim, std::mt19937_64& rng) {
  const M g = random_complex(dim, dim, rng);
  return (g + g.adjoint()) / 2.0;
}

inline M random_traceless_hermitian(Eigen::Index dim, std::mt19937_64& rng) {
  M h = random_hermitian(dim, rng);
  return h - trace(h) / static_cast<double>(dim) * M::Identity(dim, dim);
}

/// Haar-ish unitary from the exponential of a random Hermitian matrix.
inline M random_unitary(Eigen::Index dim, std::mt19937_64& rng) {
  return taylor_exp(C(0, 1) * random_hermitian(dim, rng));
}

/// Random SU(2) element q0 I + i v·σ from a uniform unit quaternion.
inline M random_su2(std::mt19937_64& rng, Eigen::Vector4d* quaternion = nullptr) {
  std::normal_distribution<double> n(0, 1);
  Eigen::Vector4d q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  if (quaternion) *quaternion = q;
  return q(0) * pauli('I') + C(0, q(1)) * pauli('X') + C(0, q(2)) * pauli('Y') + C(0, q(3)) * pauli('Z');
}

inline M random_density(Eigen::Index dim, std::mt19937_64& rng) {
  const M g = random_complex(dim, dim, rng);
  M rho = g * g.adjoint();
  return rho / trace(rho).real();
}

inline M random_pure(Eigen::Index dim, std::mt19937_64& rng) {
  V psi = random_complex(dim, 1, rng);
  psi.normalize();
  return psi * psi.adjoint();
}

/// Kraus operators from a random isometry (Σ A†A = I).
inline std::vector<M> random_kraus(Eigen::Index dim, int count, std::mt19937_64& rng) {
  const M g = random_complex(dim * count, dim, rng);
  Eigen::JacobiSVD<M> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const M iso = svd.matrixU() * svd.matrixV().adjoint();
  std::vector<M> out;
  for (int k = 0; k < count; ++k) out.push_back(iso.middleRows(k * dim, dim));
  return out;
}

inline M apply_kraus(const std::vector<M>& ks, const M& rho) {
  M out = M::Zero(rho.rows(), rho.cols());
  for (const auto& k : ks) out += k * rho * k.adjoint();
  return out;
}

inline M partial_trace_b(const M& m, Eigen::Index da, Eigen::Index db) {
  M out = M::Zero(da, da);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j)
      for (Eigen::Index k = 0; k < db; ++k) out(i, j) += m(i * db + k, j * db + k);
  return out;
}

inline double trace_distance(const M& a, const M& b) {
  const M d = (a - b + (a - b).adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<M> es(d);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

/// R_ij = Re Tr(P_j U† P_i U) / 2^n over non-identity Pauli strings.
inline Eigen::MatrixXd adjoint_dense(const M& u, int qubits) {
  const auto labels = pauli_labels(qubits);
  const auto n = static_cast<Eigen::Index>(labels.size()) - 1;
  const double dim = std::pow(2.0, qubits);
  Eigen::MatrixXd r(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const M conj = u.adjoint() * pauli_string(labels[static_cast<std::size_t>(i + 1)]) * u;
    for (Eigen::Index j = 0; j < n; ++j) r(i, j) = trace(pauli_string(labels[static_cast<std::size_t>(j + 1)]) * conj).real() / dim;
  }
  return r;
}

/// Coefficients c_P = Tr(P A) / 2^n for every non-identity Pauli string.
inline Eigen::VectorXd pauli_coords(const M& a, int qubits) {
  const auto labels = pauli_labels(qubits);
  Eigen::VectorXd c(static_cast<Eigen::Index>(labels.size()) - 1);
  for (std::size_t i = 1; i < labels.size(); ++i) {
    c(static_cast<Eigen::Index>(i - 1)) = trace(pauli_string(labels[i]) * a).real() / std::pow(2.0, qubits);
  }
  return c;
}

inline M from_pauli_coords(const Eigen::VectorXd& c, int qubits) {
  const auto labels = pauli_labels(qubits);
  const auto dim = static_cast<Eigen::Index>(1) << qubits;
  M out = M::Zero(dim, dim);
  for (std::size_t i = 1; i < labels.size(); ++i) out += c(static_cast<Eigen::Index>(i - 1)) * pauli_string(labels[i]);
  return out;
}

/// min over real c of ‖E − Σ c_m G_m‖_F, solved on stacked real and imaginary parts.
inline double dense_projection_distance(const M& e, const std::vector<M>& gens) {
  const Eigen::Index n = e.size();
  Eigen::MatrixXd a(2 * n, static_cast<Eigen::Index>(gens.size()));
  Eigen::VectorXd b(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    b(i) = e.data()[i].real();
    b(n + i) = e.data()[i].imag();
  }
  for (std::size_t m = 0; m < gens.size(); ++m) {
    for (Eigen::Index i = 0; i < n; ++i) {
      a(i, static_cast<Eigen::Index>(m)) = gens[m].data()[i].real();
      a(n + i, static_cast<Eigen::Index>(m)) = gens[m].data()[i].imag();
    }
  }
  const Eigen::VectorXd c = a.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(b);
  return (a * c - b).norm();
}

/// min_φ ‖a − e^{iφ} b‖_F
inline double phase_distance(const M& a, const M& b) {
  const C overlap = trace(b.adjoint() * a);
  const C phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : C(1, 0);
  return frob(a - phase * b);
}

}  // namespace oracle

#endif  // BBFORGE_TESTS_ORACLES_HPP
