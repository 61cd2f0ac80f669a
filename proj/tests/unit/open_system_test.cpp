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
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "bbforge/error.hpp"
#include "bbforge/open_system.hpp"
#include "support/oracles.hpp"

namespace bbforge {
namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

using oracle::kron;
using oracle::pauli;

// H_S = 0, H_B = X, coupling (g/2) Z ⊗ Z, bath in |0⟩.
SystemBathModel dephasing_model(double g = 1.0) {
  CMatrix bath0 = CMatrix::Zero(2, 2);
  bath0(0, 0) = 1;
  return SystemBathModel(CMatrix::Zero(2, 2), pauli('X'), {{"zz", 0.5 * g * pauli('Z'), pauli('Z')}}, bath0);
}

SystemBathModel random_model(std::mt19937_64& rng, Eigen::Index ds, Eigen::Index db) {
  std::vector<Coupling> couplings;
  for (int k = 0; k < 2; ++k) {
    couplings.push_back({"c" + std::to_string(k), oracle::random_hermitian(ds, rng), oracle::random_hermitian(db, rng)});
  }
  return SystemBathModel(oracle::random_hermitian(ds, rng), oracle::random_hermitian(db, rng), couplings,
                         oracle::random_density(db, rng));
}

CMatrix dense_total(const SystemBathModel& m) {
  const auto ds = m.system_dim();
  const auto db = m.bath_dim();
  CMatrix h = kron(m.system_hamiltonian(), CMatrix::Identity(db, db)) + kron(CMatrix::Identity(ds, ds), m.bath_hamiltonian());
  for (const auto& c : m.couplings()) h += kron(c.system, c.bath);
  return h;
}

CMatrix dense_reduced(const SystemBathModel& m, const CMatrix& rho, double t) {
  const CMatrix u = oracle::taylor_exp(-kI * t * dense_total(m));
  return oracle::partial_trace_b(u * kron(rho, m.bath_initial()) * u.adjoint(), m.system_dim(), m.bath_dim());
}

// Independent cycle: g_0 acts first, so later pulses multiply on the left.
CMatrix dense_cycle(const SystemBathModel& m, const std::vector<CMatrix>& pulses, double dt) {
  const auto db = m.bath_dim();
  const CMatrix u0 = oracle::taylor_exp(-kI * dt * dense_total(m));
  CMatrix out = CMatrix::Identity(u0.rows(), u0.cols());
  for (const auto& g : pulses) {
    const CMatrix gf = kron(g, CMatrix::Identity(db, db));
    out = gf.adjoint() * u0 * gf * out;
  }
  return out;
}

TEST(Model, ValidatesInputs) {
  CMatrix bad_bath = CMatrix::Identity(2, 2);
  EXPECT_THROW(SystemBathModel(pauli('Z'), pauli('X'), {}, bad_bath), Error);
  CMatrix non_herm = pauli('X');
  non_herm(0, 1) = 3.0;
  EXPECT_THROW(SystemBathModel::closed(non_herm), Error);
  EXPECT_THROW(SystemBathModel(pauli('Z'), pauli('X'), {{"c", CMatrix::Identity(4, 4), pauli('Z')}},
                               CMatrix::Identity(2, 2) / 2.0),
               Error);
  const auto closed = SystemBathModel::closed(pauli('Z'));
  EXPECT_EQ(closed.bath_dim(), 1);
  EXPECT_EQ(closed.total_dim(), 2);
}

TEST(Model, TotalHamiltonianMatchesDenseSum) {
  std::mt19937_64 rng(1);
  const auto m = random_model(rng, 2, 4);
  EXPECT_LT((m.total_hamiltonian() - dense_total(m)).norm(), 1e-13);
}

TEST(Density, Validation) {
  EXPECT_THROW(DensityMatrix(CMatrix::Identity(2, 2)), Error);
  CMatrix neg = CMatrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  EXPECT_THROW(DensityMatrix{neg}, Error);
  CVector psi(2);
  psi << 3.0, 4.0;
  const auto rho = DensityMatrix::pure(psi);
  EXPECT_NEAR(oracle::trace(rho.matrix()).real(), 1.0, 1e-14);
}

TEST(Propagate, ZeroHamiltonianIsIdentity) {
  const auto m = SystemBathModel::closed(CMatrix::Zero(2, 2));
  EXPECT_LT((propagate(m, 3.7) - CMatrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(Propagate, DiagonalPhases) {
  const double g = 0.8;
  const double t = 1.3;
  const SystemBathModel m(0.5 * g * pauli('Z'), CMatrix::Zero(2, 2), {}, CMatrix::Identity(2, 2) / 2.0);
  const CMatrix u = propagate(m, t);
  CMatrix expected = CMatrix::Zero(4, 4);
  expected(0, 0) = expected(1, 1) = std::exp(-kI * g * t / 2.0);
  expected(2, 2) = expected(3, 3) = std::exp(kI * g * t / 2.0);
  EXPECT_LT((u - expected).norm(), 1e-13);
}

TEST(Propagate, RandomUnitaryAndTaylor) {
  std::mt19937_64 rng(2);
  const auto m = random_model(rng, 2, 4);
  const double t = 0.1;
  const CMatrix u = propagate(m, t);
  EXPECT_LT((u.adjoint() * u - CMatrix::Identity(8, 8)).norm(), 1e-12);
  EXPECT_LT((u - oracle::taylor_exp(-kI * t * dense_total(m))).norm(), 1e-12);
  const CMatrix h = dense_total(m);
  const CMatrix second = CMatrix::Identity(8, 8) - kI * t * h - h * h * t * t / 2.0;
  const double h_norm = h.operatorNorm();
  EXPECT_LT((u - second).norm(), std::pow(h_norm * t, 3) * std::sqrt(8.0));
}

TEST(Propagate, UnitaryForLargeNormTime) {
  std::mt19937_64 rng(3);
  const auto m = random_model(rng, 2, 2);
  const double t = 10.0 / m.total_hamiltonian().operatorNorm();
  const CMatrix u = propagate(m, t);
  EXPECT_LT((u.adjoint() * u - CMatrix::Identity(4, 4)).norm(), 1e-12);
}

TEST(ReducedState, UncoupledZeroHamiltonianIsStatic) {
  std::mt19937_64 rng(4);
  const SystemBathModel m(CMatrix::Zero(2, 2), pauli('X'), {}, CMatrix::Identity(2, 2) / 2.0);
  const DensityMatrix rho(oracle::random_density(2, rng));
  for (double t : {0.0, 0.5, 4.0}) EXPECT_LT((reduced_state(m, rho, t).matrix() - rho.matrix()).norm(), 1e-13);
}

TEST(ReducedState, MatchesDenseOracleAndTimeZero) {
  std::mt19937_64 rng(5);
  const auto m = random_model(rng, 2, 4);
  const DensityMatrix rho(oracle::random_density(2, rng));
  EXPECT_LT((reduced_state(m, rho, 0.0).matrix() - rho.matrix()).norm(), 1e-14);
  EXPECT_LT((reduced_state(m, rho, 0.37).matrix() - dense_reduced(m, rho.matrix(), 0.37)).norm(), 1e-12);
  EXPECT_THROW(reduced_state(m, DensityMatrix(CMatrix::Identity(4, 4) / 4.0), 0.1), Error);
}

TEST(ReducedState, DephasingCoherenceDecaysEarly) {
  const auto m = dephasing_model();
  CVector plus(2);
  plus << 1.0, 1.0;
  const auto rho = DensityMatrix::pure(plus);
  double previous = 0.5;
  for (int k = 1; k <= 10; ++k) {
    const double coherence = std::abs(reduced_state(m, rho, 0.05 * k).matrix()(0, 1));
    EXPECT_LE(coherence, previous + 1e-14);
    previous = coherence;
  }
  EXPECT_LT(previous, 0.5);
}

TEST(Kraus, ZeroHamiltonianGivesScaledIdentities) {
  const SystemBathModel m(CMatrix::Zero(2, 2), CMatrix::Zero(2, 2), {}, CMatrix::Identity(2, 2) / 2.0);
  const auto k = kraus_from_model(m, 0.3);
  EXPECT_LT(k.completeness_defect(), 1e-12);
  for (const auto& a : k.operators) {
    const double scale = std::abs(a(0, 0));
    EXPECT_LT((a - a(0, 0) * CMatrix::Identity(2, 2)).norm(), 1e-13);
    EXPECT_TRUE(scale < 1e-13 || std::abs(scale - std::sqrt(0.5)) < 1e-13);
  }
}

TEST(Kraus, PureBathSingleColumn) {
  const auto m = dephasing_model();
  const auto k = kraus_from_model(m, 0.2);
  ASSERT_EQ(k.operators.size(), 2u);
  const CMatrix u = oracle::taylor_exp(-kI * 0.2 * dense_total(m));
  // ⟨μ| runs over the bath eigenbasis; for ρ_B = |0⟩⟨0| that is {|0⟩, |1⟩} in some order and phase.
  for (Eigen::Index mu = 0; mu < 2; ++mu) {
    CMatrix block(2, 2);
    for (Eigen::Index i = 0; i < 2; ++i)
      for (Eigen::Index j = 0; j < 2; ++j) block(i, j) = u(i * 2 + mu, j * 2 + 0);
    double best = 1e9;
    for (const auto& a : k.operators) best = std::min(best, oracle::phase_distance(a, block));
    EXPECT_LT(best, 1e-12);
  }
}

TEST(Kraus, ChannelMatchesReducedState) {
  std::mt19937_64 rng(6);
  const auto models = {dephasing_model(), random_model(rng, 2, 4), random_model(rng, 4, 2)};
  for (const auto& m : models) {
    const auto k = kraus_from_model(m, 0.05);
    EXPECT_LT(k.completeness_defect(), 1e-10);
    for (int trial = 0; trial < 10; ++trial) {
      const DensityMatrix rho(oracle::random_density(m.system_dim(), rng));
      EXPECT_LT((k.apply(rho.matrix()) - reduced_state(m, rho, 0.05).matrix()).norm(), 1e-10);
    }
  }
}

TEST(PulseGroupType, InvariantsAndCycleTime) {
  const PulseGroup g({CMatrix::Identity(2, 2), kI * pauli('Y')}, 0.1);
  EXPECT_EQ(g.size(), 2u);
  EXPECT_DOUBLE_EQ(g.cycle_time(), 0.2);
  EXPECT_FALSE(g.is_trivial());
  EXPECT_TRUE(PulseGroup::trivial(2, 0.1).is_trivial());
  EXPECT_DOUBLE_EQ(g.with_delta_t(0.05).cycle_time(), 0.1);
  EXPECT_THROW(PulseGroup({pauli('X'), pauli('Y')}, 0.1), Error);
  EXPECT_THROW(PulseGroup({CMatrix::Identity(2, 2), 2.0 * pauli('Y')}, 0.1), Error);
}

TEST(Cycle, MatchesDenseProductOrder) {
  std::mt19937_64 rng(7);
  const auto m = random_model(rng, 2, 2);
  const std::vector<CMatrix> pulses{CMatrix::Identity(2, 2), oracle::random_unitary(2, rng),
                                    oracle::random_unitary(2, rng)};
  const PulseGroup g(pulses, 0.07);
  EXPECT_LT((cycle_unitary(m, g) - dense_cycle(m, pulses, 0.07)).norm(), 1e-12);
}

TEST(BbCycle, TrivialGroupEqualsReducedState) {
  std::mt19937_64 rng(8);
  const auto m = random_model(rng, 2, 4);
  const DensityMatrix rho(oracle::random_density(2, rng));
  const auto out = apply_bb_cycle(m, PulseGroup::trivial(2, 0.1), 7, rho);
  EXPECT_LT((out.matrix() - reduced_state(m, rho, 0.7).matrix()).norm(), 1e-12);
}

TEST(BbCycle, ParityKickErrorShrinksWithSpacing) {
  const auto m = dephasing_model();
  const PulseGroup kick({CMatrix::Identity(2, 2), kI * pauli('Y')}, 0.1);
  CVector plus(2);
  plus << 1.0, 1.0;
  const auto rho = DensityMatrix::pure(plus);
  const double total = 1.0;
  std::vector<double> errors;
  for (double dt : {0.1, 0.05, 0.025}) {
    const int cycles = static_cast<int>(std::lround(total / (2 * dt)));
    const auto pulsed = apply_bb_cycle(m, kick.with_delta_t(dt), cycles, rho);
    // Dense oracle for the same evolution.
    CMatrix u = CMatrix::Identity(4, 4);
    const CMatrix cyc = dense_cycle(m, kick.pulses(), dt);
    for (int c = 0; c < cycles; ++c) u = cyc * u;
    const CMatrix dense = oracle::partial_trace_b(u * kron(rho.matrix(), m.bath_initial()) * u.adjoint(), 2, 2);
    EXPECT_LT((pulsed.matrix() - dense).norm(), 1e-12);
    errors.push_back(oracle::trace_distance(pulsed.matrix(), rho.matrix()));
  }
  const double unpulsed = oracle::trace_distance(reduced_state(m, rho, total).matrix(), rho.matrix());
  EXPECT_LT(errors[0], unpulsed);
  EXPECT_LT(errors[1], errors[0]);
  EXPECT_LT(errors[2], errors[1]);
  EXPECT_NEAR(errors[0] / errors[1], 2.0, 0.4);
  EXPECT_NEAR(errors[1] / errors[2], 2.0, 0.4);
}

TEST(BbCycle, PauliGroupBeatsUnpulsedOnGeneralCoupling) {
  std::mt19937_64 rng(9);
  std::vector<Coupling> couplings{{"x", 0.3 * pauli('X'), oracle::random_hermitian(2, rng)},
                                  {"y", 0.2 * pauli('Y'), oracle::random_hermitian(2, rng)},
                                  {"z", 0.4 * pauli('Z'), oracle::random_hermitian(2, rng)}};
  const SystemBathModel m(CMatrix::Zero(2, 2), oracle::random_hermitian(2, rng), couplings,
                          oracle::random_density(2, rng));
  const PulseGroup pauli_group({CMatrix::Identity(2, 2), pauli('X'), pauli('Y'), pauli('Z')}, 0.01);
  const DensityMatrix rho(oracle::random_pure(2, rng));
  const auto pulsed = apply_bb_cycle(m, pauli_group, 25, rho);
  const double pulsed_err = oracle::trace_distance(pulsed.matrix(), rho.matrix());
  const double free_err = oracle::trace_distance(reduced_state(m, rho, 1.0).matrix(), rho.matrix());
  EXPECT_LT(pulsed_err, free_err);
}

TEST(PulsedUnitary, FullCyclesAndPartialSegments) {
  std::mt19937_64 rng(10);
  const auto m = random_model(rng, 2, 2);
  const std::vector<CMatrix> pulses{CMatrix::Identity(2, 2), kI * pauli('X')};
  const PulseGroup g(pulses, 0.1);
  const CMatrix cyc = dense_cycle(m, pulses, 0.1);
  EXPECT_LT((pulsed_unitary(m, g, 0.4) - cyc * cyc).norm(), 1e-12);
  // Halfway through the second pulse frame of the second cycle.
  const CMatrix u0 = oracle::taylor_exp(-kI * 0.05 * dense_total(m));
  const CMatrix gx = kron(kI * pauli('X'), CMatrix::Identity(2, 2));
  const CMatrix first = oracle::taylor_exp(-kI * 0.1 * dense_total(m));
  EXPECT_LT((pulsed_unitary(m, g, 0.35) - gx.adjoint() * u0 * gx * first * cyc).norm(), 1e-12);
}

TEST(Symmetrize, PauliGroupKillsTracelessOperators) {
  std::mt19937_64 rng(11);
  const PulseGroup pauli_group({CMatrix::Identity(2, 2), pauli('X'), pauli('Y'), pauli('Z')}, 1.0);
  EXPECT_LT(symmetrize_hamiltonian(pauli('Z'), pauli_group).norm(), 1e-15);
  for (int trial = 0; trial < 20; ++trial) {
    EXPECT_LT(symmetrize_hamiltonian(oracle::random_traceless_hermitian(2, rng), pauli_group).norm(), 1e-12);
  }
}

TEST(Symmetrize, TrivialGroupAndIdempotence) {
  std::mt19937_64 rng(12);
  const CMatrix h = oracle::random_hermitian(4, rng);
  EXPECT_LT((symmetrize_hamiltonian(h, PulseGroup::trivial(4, 1.0)) - h).norm(), 1e-15);
  const PulseGroup g({CMatrix::Identity(4, 4), kron(pauli('X'), pauli('X')), kron(pauli('Y'), pauli('Y')),
                      kron(pauli('Z'), pauli('Z'))},
                     1.0);
  const CMatrix once = symmetrize_hamiltonian(h, g, {.verify_centralizer = true});
  EXPECT_LT((symmetrize_hamiltonian(once, g) - once).norm(), 1e-12);
}

TEST(Symmetrize, HeisenbergCommutesWithSwapKick) {
  const CMatrix heis = kron(pauli('X'), pauli('X')) + kron(pauli('Y'), pauli('Y')) + kron(pauli('Z'), pauli('Z'));
  const PulseGroup g({CMatrix::Identity(4, 4), -kron(pauli('X'), pauli('X'))}, 1.0);
  EXPECT_LT((symmetrize_hamiltonian(heis, g) - heis).norm(), 1e-14);
}

TEST(Symmetrize, SystemPlusBathOperand) {
  std::mt19937_64 rng(13);
  const PulseGroup kick({CMatrix::Identity(2, 2), kI * pauli('Y')}, 1.0);
  const CMatrix b = oracle::random_hermitian(3, rng);
  EXPECT_LT(symmetrize_hamiltonian(kron(pauli('Z'), b), kick).norm(), 1e-14);
  EXPECT_LT((symmetrize_hamiltonian(kron(pauli('Y'), b), kick) - kron(pauli('Y'), b)).norm(), 1e-14);
}

TEST(Symmetrize, CentralizerCheckRejectsOpenSet) {
  const Complex c = std::cos(kPi / 8);
  const Complex s = std::sin(kPi / 8);
  const CMatrix rot = c * CMatrix::Identity(2, 2) + kI * s * pauli('X');
  const PulseGroup not_closed({CMatrix::Identity(2, 2), rot}, 1.0);
  EXPECT_THROW(symmetrize_hamiltonian(pauli('Z'), not_closed, {.verify_centralizer = true}), Error);
}

}  // namespace
}  // namespace bbforge
