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


#include <cmath>
#include <random>
#include <thread>

#include <gtest/gtest.h>

#include "bbforge/error.hpp"
#include "bbforge/open_system.hpp"
#include "bbforge/tomography.hpp"
#include "support/oracles.hpp"

namespace bbforge {
namespace {

const Complex kI{0.0, 1.0};
using oracle::kron;
using oracle::pauli;

Channel kraus_channel(std::vector<CMatrix> ks) {
  return [ks = std::move(ks)](const CMatrix& rho) { return oracle::apply_kraus(ks, rho); };
}

// ρ ↦ ρ − it[H, ρ], exact to first order.
Channel first_order(const CMatrix& h, double t) {
  return [h, t](const CMatrix& rho) -> CMatrix { return rho - kI * t * (h * rho - rho * h); };
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no exception";
  return ErrorKind::kIo;
}

TEST(Qpt, IdentityChannel) {
  const auto data = run_qpt([](const CMatrix& r) { return r; }, pauli_basis(1), 0.1);
  EXPECT_LT((data.lambda - CMatrix::Identity(4, 4)).norm(), 1e-14);
  const auto chi = chi_from_lambda(data);
  CMatrix expected = CMatrix::Zero(4, 4);
  expected(0, 0) = 1;
  EXPECT_LT((chi.entries - expected).norm(), 1e-12);
  const auto gen = extract_generator(chi, {1, {}});
  EXPECT_LT(gen.xi[0].coords.norm(), 1e-10);
}

TEST(Qpt, BitFlipConjugationPermutesMatrixUnits) {
  const auto data = run_qpt([](const CMatrix& r) -> CMatrix { return pauli('X') * r * pauli('X'); }, pauli_basis(1));
  CMatrix expected = CMatrix::Zero(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) expected(a * 2 + b, (a ^ 1) * 2 + (b ^ 1)) = 1;
  EXPECT_LT((data.lambda - expected).norm(), 1e-14);
  const auto chi = chi_from_lambda(data);
  EXPECT_NEAR(chi.entries(1, 1).real(), 1.0, 1e-12);
  EXPECT_NEAR(chi.entries.norm(), 1.0, 1e-12);
}

TEST(Qpt, XiTensorIsChannelIndependentAndCached) {
  const auto basis = pauli_basis(1);
  const auto a = run_qpt([](const CMatrix& r) { return r; }, basis);
  const auto b = run_qpt([](const CMatrix& r) -> CMatrix { return pauli('Z') * r * pauli('Z'); }, basis);
  EXPECT_EQ(a.xi.get(), b.xi.get());
}

TEST(Qpt, XiTensorConcurrentAccess) {
  const auto basis = pauli_basis(2);
  std::vector<std::shared_ptr<const XiTensor>> seen(8);
  std::vector<std::thread> threads;
  for (std::size_t k = 0; k < seen.size(); ++k) {
    threads.emplace_back([&, k] { seen[k] = xi_tensor_for(basis); });
  }
  for (auto& t : threads) t.join();
  for (const auto& s : seen) EXPECT_EQ(s.get(), seen[0].get());
  EXPECT_LT(seen[0]->condition, 1e12);
}

TEST(Qpt, MixtureIsLinearInLambda) {
  std::mt19937_64 rng(1);
  const auto k1 = oracle::random_kraus(2, 2, rng);
  const auto k2 = oracle::random_kraus(2, 3, rng);
  const auto basis = pauli_basis(1);
  const auto l1 = run_qpt(kraus_channel(k1), basis).lambda;
  const auto l2 = run_qpt(kraus_channel(k2), basis).lambda;
  const auto mix = run_qpt(
      [&](const CMatrix& r) -> CMatrix { return 0.3 * oracle::apply_kraus(k1, r) + 0.7 * oracle::apply_kraus(k2, r); },
      basis);
  EXPECT_LT((mix.lambda - (0.3 * l1 + 0.7 * l2)).norm(), 1e-10);
}

TEST(Qpt, NonlinearChannelIsRejected) {
  const Channel squaring = [](const CMatrix& r) -> CMatrix { return r * r; };
  EXPECT_EQ(kind_of([&] { run_qpt(squaring, pauli_basis(1)); }), ErrorKind::kDomain);
}

TEST(Chi, NonHermiticityPreservingMapIsInconsistent) {
  CMatrix a(2, 2);
  a << 1, 1, 0, 1;
  const Channel left_only = [a](const CMatrix& r) -> CMatrix { return a * r; };
  const auto data = run_qpt(left_only, pauli_basis(1), 0.01);
  EXPECT_EQ(kind_of([&] { chi_from_lambda(data); }), ErrorKind::kInconsistency);
}

TEST(Chi, RandomKrausRoundTrip) {
  std::mt19937_64 rng(2);
  for (int q = 1; q <= 2; ++q) {
    const auto basis = pauli_basis(q);
    const Eigen::Index dim = Eigen::Index{1} << q;
    for (int trial = 0; trial < 5; ++trial) {
      const auto ks = oracle::random_kraus(dim, 3, rng);
      const auto chi = chi_from_lambda(run_qpt(kraus_channel(ks), basis));
      EXPECT_LT((chi.entries - chi.entries.adjoint()).norm(), 1e-10);
      EXPECT_LT(chi.skew_norm, 1e-8);
      for (int s = 0; s < 20; ++s) {
        const CMatrix rho = oracle::random_density(dim, rng);
        EXPECT_LT((chi.apply(rho) - oracle::apply_kraus(ks, rho)).norm(), 1e-9);
      }
    }
  }
}

TEST(Generator, DephasingExample) {
  const double g = 1.0;
  const double t = 0.01;
  // ρ' = ρ + (igt/2)[ρ, σz]
  const Channel channel = [&](const CMatrix& r) -> CMatrix {
    return r + kI * g * t / 2.0 * (r * pauli('Z') - pauli('Z') * r);
  };
  const auto chi = measure_chi(channel, pauli_basis(1), t);
  EXPECT_NEAR(chi.entries(3, 0).imag(), -g * t / 2, 1e-12);
  const auto gen = extract_generator(chi, {1, {}});
  EXPECT_LT((gen.xi[0].coords - Eigen::Vector3d(0, 0, -g / 2)).norm(), 1e-10);
  EXPECT_DOUBLE_EQ(gen.time_scale, t);
  EXPECT_TRUE(gen.warnings.empty());
}

TEST(Generator, IndependentDephasingPairMatrix) {
  const double g1 = 0.3;
  const double g2 = 0.2;
  const CMatrix h = -(g1 * kron(pauli('Z'), pauli('I')) + g2 * kron(pauli('I'), pauli('Z')));
  const auto chi = measure_chi(first_order(h, 0.001), pauli_basis(2), 0.001);
  const auto gen = extract_generator(chi, QubitLayout::all_pairs(2));
  const Eigen::Matrix4d m = gen.xi_pair.at({0, 1});
  Eigen::Matrix4d expected = Eigen::Matrix4d::Zero();
  expected(3, 0) = g1;
  expected(0, 3) = g2;
  EXPECT_LT((m - expected).norm(), 1e-10);
  EXPECT_NEAR(gen.xi[0].coords(2), g1, 1e-10);
  EXPECT_NEAR(gen.xi[1].coords(2), g2, 1e-10);
}

TEST(Generator, PairCoordinatesEmbedding) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(1, 1) = 2.0;
  m(3, 0) = -1.0;
  const auto c = EffectiveGenerator::pair_coordinates(m);
  const CMatrix op = reconstruct(c);
  EXPECT_LT((op - (2.0 * kron(pauli('X'), pauli('X')) - kron(pauli('Z'), pauli('I')))).norm(), 1e-14);
}

TEST(Generator, MatchesHamiltonianToFirstOrder) {
  std::mt19937_64 rng(3);
  const CMatrix h = oracle::random_traceless_hermitian(4, rng) * 0.5;
  const RVector exact = -oracle::pauli_coords(h, 2);
  const auto basis = pauli_basis(2);
  const auto xi_at = [&](double t) {
    const CMatrix u = oracle::taylor_exp(-kI * t * h);
    const Channel ch = [u](const CMatrix& r) -> CMatrix { return u * r * u.adjoint(); };
    return RVector(extract_generator(measure_chi(ch, basis, t), {2, {}}).full.coords);
  };
  const double t = 0.01;
  const RVector a = xi_at(t);
  const RVector b = xi_at(t / 2);
  const double err_a = (a - exact).norm();
  const double err_b = (b - exact).norm();
  EXPECT_LT(err_a, 10 * t * h.squaredNorm());
  // Halving t at least halves the deviation.
  EXPECT_GT(err_a / err_b, 1.8);
}

TEST(Generator, DegenerateTimeAndWarnings) {
  const auto chi0 = chi_from_lambda(run_qpt([](const CMatrix& r) { return r; }, pauli_basis(1), 0.0));
  EXPECT_EQ(kind_of([&] { extract_generator(chi0, {1, {}}); }), ErrorKind::kDegenerateTime);
  const double t = 1.0;
  const auto chi = measure_chi(first_order(pauli('Z'), t), pauli_basis(1), t);
  EXPECT_FALSE(extract_generator(chi, {1, {}}).warnings.empty());
  EXPECT_EQ(kind_of([&] { extract_generator(chi, {2, {}}); }), ErrorKind::kShape);
}

TEST(Generator, ReducedStateOfDephasingModel) {
  const double g = 1.0;
  CMatrix bath0 = CMatrix::Zero(2, 2);
  bath0(0, 0) = 1;
  const SystemBathModel model(CMatrix::Zero(2, 2), CMatrix::Zero(2, 2), {{"zz", 0.5 * g * pauli('Z'), pauli('Z')}},
                              bath0);
  const double t = 1e-3;
  const Channel ch = [&](const CMatrix& r) { return reduced_state(model, DensityMatrix(r), t).matrix(); };
  // Bath frozen in |0⟩: the system sees H = (g/2)σz exactly.
  const auto gen = extract_generator(measure_chi(ch, pauli_basis(1), t), {1, {}});
  EXPECT_NEAR(gen.xi[0].coords(2), -g / 2, 1e-6);
  EXPECT_NEAR(gen.xi[0].coords(0), 0.0, 1e-12);
}

}  // namespace
}  // namespace bbforge
