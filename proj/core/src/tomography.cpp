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

#include "bbforge/tomography.hpp"

#include <cmath>
#include <mutex>
#include <sstream>

#include <Eigen/SVD>

#include "bbforge/error.hpp"

namespace bbforge {

namespace {

constexpr double kLinearityTol = 1e-8;
constexpr double kResidualTol = 1e-6;
constexpr double kPinvCutoff = 1e-12;

CMatrix call_channel(const Channel& channel, const CMatrix& rho) {
  CMatrix out = channel(rho);
  if (out.rows() != rho.rows() || out.cols() != rho.cols()) {
    throw Error(ErrorKind::kShape, "channel changed the matrix dimension");
  }
  return out;
}

CMatrix projector(const CVector& psi) { return psi * psi.adjoint(); }

std::shared_ptr<const XiTensor> build_xi(const BasisPtr& basis) {
  const Eigen::Index n = basis->dim();
  const Eigen::Index n2 = n * n;
  const auto nb = static_cast<Eigen::Index>(basis->size());
  auto xi = std::make_shared<XiTensor>();
  xi->basis = basis;
  xi->matrix.resize(n2 * n2, nb * nb);
  std::vector<CMatrix> elems;
  elems.reserve(static_cast<std::size_t>(nb));
  for (Eigen::Index a = 0; a < nb; ++a) elems.push_back(basis->element(static_cast<std::size_t>(a)));
  for (Eigen::Index alpha = 0; alpha < nb; ++alpha) {
    const CMatrix& ka = elems[static_cast<std::size_t>(alpha)];
    for (Eigen::Index beta = 0; beta < nb; ++beta) {
      const CMatrix& kb = elems[static_cast<std::size_t>(beta)];
      const Eigen::Index col = alpha * nb + beta;
      // (K_α |a⟩⟨b| K_β†)_{cd} = K_α(c, a) · conj(K_β(d, b))
      for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
          const Eigen::Index j = a * n + b;
          for (Eigen::Index c = 0; c < n; ++c) {
            const Complex kca = ka(c, a);
            for (Eigen::Index d = 0; d < n; ++d) {
              xi->matrix(j * n2 + c * n + d, col) = kca * std::conj(kb(d, b));
            }
          }
        }
      }
    }
  }
  Eigen::BDCSVD<CMatrix> svd(xi->matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  const double smax = s(0);
  RVector inv = RVector::Zero(s.size());
  double smin = smax;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > kPinvCutoff * smax) {
      inv(i) = 1.0 / s(i);
      smin = s(i);
    }
  }
  xi->condition = smax / smin;
  xi->pseudoinverse = svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
  return xi;
}

}  // namespace

std::shared_ptr<const XiTensor> xi_tensor_for(const BasisPtr& basis) {
  if (!basis) throw Error(ErrorKind::kShape, "null basis");
  static std::mutex mutex;
  static std::map<std::string, std::shared_ptr<const XiTensor>> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(basis->id());
    if (it != cache.end() && it->second->basis == basis) return it->second;
  }
  auto built = build_xi(basis);
  std::lock_guard lock(mutex);
  auto [it, inserted] = cache.emplace(basis->id(), built);
  if (!inserted && it->second->basis != basis) it->second = built;
  return it->second;
}

CMatrix ChiMatrix::apply(const CMatrix& rho) const {
  const auto nb = static_cast<Eigen::Index>(basis->size());
  std::vector<CMatrix> elems;
  elems.reserve(static_cast<std::size_t>(nb));
  for (Eigen::Index a = 0; a < nb; ++a) elems.push_back(basis->element(static_cast<std::size_t>(a)));
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (Eigen::Index alpha = 0; alpha < nb; ++alpha) {
    CMatrix weighted = CMatrix::Zero(rho.rows(), rho.cols());
    for (Eigen::Index beta = 0; beta < nb; ++beta) {
      const Complex c = entries(alpha, beta);
      if (c != 0.0) weighted += c * elems[static_cast<std::size_t>(beta)];  // K_β† = K_β (Hermitian basis)
    }
    out += elems[static_cast<std::size_t>(alpha)] * rho * weighted;
  }
  return out;
}

TomographyData run_qpt(const Channel& channel, const BasisPtr& basis, double time_tag) {
  if (!basis) throw Error(ErrorKind::kShape, "null basis");
  const Eigen::Index n = basis->dim();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  std::vector<CMatrix> diag(static_cast<std::size_t>(n));
  for (Eigen::Index a = 0; a < n; ++a) diag[static_cast<std::size_t>(a)] = call_channel(channel, projector(CVector::Unit(n, a)));

  // Superposition check on a convex mixture of two physical preparations.
  {
    const CVector plus = (CVector::Unit(n, 0) + CVector::Unit(n, n - 1)) * inv_sqrt2;
    const CMatrix p0 = projector(CVector::Unit(n, 0));
    const CMatrix pp = projector(plus);
    const CMatrix mixed = call_channel(channel, 0.3 * p0 + 0.7 * pp);
    const CMatrix expected = 0.3 * diag[0] + 0.7 * call_channel(channel, pp);
    const double scale = std::max(1.0, expected.norm());
    if ((mixed - expected).norm() > kLinearityTol * scale) {
      throw Error(ErrorKind::kDomain, "channel failed the superposition test (not linear)");
    }
  }

  const Eigen::Index n2 = n * n;
  CMatrix lambda(n2, n2);
  const auto store = [&](Eigen::Index a, Eigen::Index b, const CMatrix& out) {
    const Eigen::Index j = a * n + b;
    for (Eigen::Index c = 0; c < n; ++c)
      for (Eigen::Index d = 0; d < n; ++d) lambda(j, c * n + d) = out(c, d);
  };
  for (Eigen::Index a = 0; a < n; ++a) store(a, a, diag[static_cast<std::size_t>(a)]);
  const Complex i(0.0, 1.0);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a + 1; b < n; ++b) {
      const CMatrix e_plus = call_channel(channel, projector((CVector::Unit(n, a) + CVector::Unit(n, b)) * inv_sqrt2));
      const CMatrix e_plus_i = call_channel(channel, projector((CVector::Unit(n, a) + i * CVector::Unit(n, b)) * inv_sqrt2));
      const CMatrix pops = diag[static_cast<std::size_t>(a)] + diag[static_cast<std::size_t>(b)];
      store(a, b, e_plus + i * e_plus_i - 0.5 * (1.0 + i) * pops);
      store(b, a, e_plus - i * e_plus_i - 0.5 * (1.0 - i) * pops);
    }
  }
  return TomographyData{std::move(lambda), xi_tensor_for(basis), basis, time_tag};
}

ChiMatrix chi_from_lambda(const TomographyData& data) {
  if (!data.xi || !data.basis) throw Error(ErrorKind::kShape, "tomography data is incomplete");
  const auto nb = static_cast<Eigen::Index>(data.basis->size());
  const Eigen::Index n2 = data.basis->dim() * data.basis->dim();
  if (data.lambda.rows() != n2 || data.lambda.cols() != n2) throw Error(ErrorKind::kShape, "lambda has wrong shape");

  CVector rhs(n2 * n2);
  for (Eigen::Index j = 0; j < n2; ++j)
    for (Eigen::Index k = 0; k < n2; ++k) rhs(j * n2 + k) = data.lambda(j, k);
  const CVector solution = data.xi->pseudoinverse * rhs;

  ChiMatrix chi;
  chi.basis = data.basis;
  chi.time_tag = data.time_tag;
  CMatrix raw(nb, nb);
  for (Eigen::Index a = 0; a < nb; ++a)
    for (Eigen::Index b = 0; b < nb; ++b) raw(a, b) = solution(a * nb + b);
  chi.skew_norm = 0.5 * (raw - raw.adjoint()).norm();
  chi.entries = hermitian_part(raw);

  CVector herm(nb * nb);
  for (Eigen::Index a = 0; a < nb; ++a)
    for (Eigen::Index b = 0; b < nb; ++b) herm(a * nb + b) = chi.entries(a, b);
  chi.residual = (data.xi->matrix * herm - rhs).norm();
  if (chi.residual > kResidualTol) {
    std::ostringstream os;
    os << "chi reconstruction residual " << chi.residual << " exceeds " << kResidualTol
       << " (channel is not Hermiticity preserving or not expressible in basis " << data.basis->id() << ")";
    throw Error(ErrorKind::kInconsistency, os.str());
  }
  return chi;
}

QubitLayout QubitLayout::all_pairs(int num_qubits) {
  QubitLayout layout;
  layout.num_qubits = num_qubits;
  for (int i = 0; i < num_qubits; ++i)
    for (int j = i + 1; j < num_qubits; ++j) layout.pairs.emplace_back(i, j);
  return layout;
}

CoordinateVector EffectiveGenerator::pair_coordinates(const Eigen::Matrix4d& m) {
  RVector coords(15);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (a != 0 || b != 0) coords(4 * a + b - 1) = m(a, b);
  return {std::move(coords), pauli_basis(2)};
}

EffectiveGenerator extract_generator(const ChiMatrix& chi, const QubitLayout& layout) {
  if (!chi.basis || !chi.basis->is_pauli()) throw Error(ErrorKind::kShape, "generator extraction needs a Pauli-string basis");
  if (chi.time_tag == 0.0) throw Error(ErrorKind::kDegenerateTime, "chi matrix has time tag 0");
  if (!(chi.time_tag > 0.0)) throw Error(ErrorKind::kDomain, "chi matrix time tag must be positive");
  const int nq = chi.basis->num_qubits();
  if (layout.num_qubits != nq) throw Error(ErrorKind::kShape, "qubit layout does not match chi basis");
  const double t = chi.time_tag;

  EffectiveGenerator gen;
  gen.time_scale = t;
  RVector full(static_cast<Eigen::Index>(chi.basis->generator_count()));
  for (Eigen::Index a = 1; a < static_cast<Eigen::Index>(chi.basis->size()); ++a) full(a - 1) = chi.entries(a, 0).imag() / t;
  gen.full = {full, chi.basis};

  const auto coord_of = [&](std::vector<std::uint8_t> idx) {
    const std::size_t pos = chi.basis->index_of(PauliString(std::move(idx)));
    return pos == 0 ? 0.0 : full(static_cast<Eigen::Index>(pos - 1));
  };

  const BasisPtr single = pauli_basis(1);
  for (int q = 0; q < nq; ++q) {
    RVector v(3);
    for (std::uint8_t a = 1; a <= 3; ++a) {
      std::vector<std::uint8_t> idx(static_cast<std::size_t>(nq), 0);
      idx[static_cast<std::size_t>(q)] = a;
      v(a - 1) = coord_of(idx);
    }
    gen.xi.push_back({v, single});
  }
  for (const auto& [i, j] : layout.pairs) {
    if (i < 0 || j < 0 || i >= nq || j >= nq || i == j) throw Error(ErrorKind::kShape, "invalid qubit pair in layout");
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    for (std::uint8_t a = 0; a < 4; ++a) {
      for (std::uint8_t b = 0; b < 4; ++b) {
        if (a == 0 && b == 0) continue;
        std::vector<std::uint8_t> idx(static_cast<std::size_t>(nq), 0);
        idx[static_cast<std::size_t>(i)] = a;
        idx[static_cast<std::size_t>(j)] = b;
        m(a, b) = coord_of(idx);
      }
    }
    gen.xi_pair[{i, j}] = m;
  }
  const double strength = t * full.norm();
  if (strength > 0.1) {
    std::ostringstream os;
    os << "probe time " << t << " is not short: t*|xi| = " << strength << " > 0.1; first-order extraction is unreliable";
    gen.warnings.push_back(os.str());
  }
  return gen;
}

ChiMatrix measure_chi(const Channel& channel, const BasisPtr& basis, double t) {
  return chi_from_lambda(run_qpt(channel, basis, t));
}

}  // namespace bbforge
