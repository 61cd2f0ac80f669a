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


// Acceptance checks: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bbforge/error.hpp"
#include "bbforge/open_system.hpp"
#include "bbforge/optimizer.hpp"
#include "bbforge/synthesis.hpp"
#include "bbforge/tomography.hpp"
#include "support/oracles.hpp"

namespace {

using namespace bbforge;
using oracle::kron;
using oracle::pauli;

constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit;  // seconds; 0 = none
  std::function<Outcome()> check;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Outcome dephasing_storage() {
  const double g = 1.0;
  const double t = 0.01;
  const Channel channel = [&](const CMatrix& r) -> CMatrix {
    return r + kI * g * t / 2.0 * (r * pauli('Z') - pauli('Z') * r);
  };
  const auto gen = extract_generator(measure_chi(channel, pauli_basis(1), t), {1, {}});
  const Eigen::Vector3d expected(0, 0, -g / 2);
  const double rel = (gen.xi[0].coords - expected).norm() / expected.norm();
  const auto r = solve_storage(gen, 0, 4);
  const AxisAngle kick = r.local_factors.at(1).at(0);
  const double n3 = std::abs(kick.axis(2));
  const double dtheta = std::abs(std::abs(kick.angle) - kPi / 2);
  const bool ok = rel < 1e-6 && r.group.size() == 2 && n3 < 1e-9 && dtheta < 1e-9;
  return {ok, "xi rel err " + num(rel) + ", |G| = " + std::to_string(r.group.size()) + ", |n3| = " + num(n3) +
                  ", |theta| - pi/2 = " + num(dtheta)};
}

Outcome combined_errors() {
  CMatrix bath0 = CMatrix::Zero(2, 2);
  bath0(0, 0) = 1;
  // Dephasing g = 1 on the system, bit flip g' = 0.05 through the bath in |0⟩.
  const SystemBathModel model(0.5 * pauli('Z'), CMatrix::Zero(2, 2),
                              {{"x", pauli('X'), 0.025 * (CMatrix::Identity(2, 2) + pauli('X'))}}, bath0);
  LearningLoopConfig config;
  const auto r = learning_loop(model, TargetSpec::storage(), config);
  if (r.best_local_factors.size() != 2) return {false, "|G| = " + std::to_string(r.best_group.size())};
  const Eigen::Vector3d axis = r.best_local_factors[1][0].axis;
  const double dev = (axis.cwiseAbs() - Eigen::Vector3d::UnitY()).norm();
  const bool two_pass = r.records.size() >= 2 && r.analysis_log.size() >= 2;
  const bool ok = r.converged && r.best_group.size() == 2 && dev < 1e-8 && two_pass;
  return {ok, "axis dev from y " + num(dev) + ", |G| = " + std::to_string(r.best_group.size()) + ", generations " +
                  std::to_string(r.records.size()) + ", analysis steps " + std::to_string(r.analysis_log.size())};
}

Outcome heisenberg() {
  const double j = 1.0;
  const double g1 = 0.3;
  const double g2 = 0.2;
  Eigen::Matrix4d w = Eigen::Matrix4d::Zero();
  w.block<3, 3>(1, 1) = j * Eigen::Matrix3d::Identity();
  Eigen::Matrix4d xi = w;
  xi(3, 0) = g1;
  xi(0, 3) = g2;
  const auto r = solve_two_qubit_matrix(xi, w, TwoQubitAnsatz::kLocalProducts);
  if (r.group.size() != 2) return {false, "|G| = " + std::to_string(r.group.size())};
  const CMatrix u = r.group.pulses()[1];
  const CMatrix xx = kron(pauli('X'), pauli('X'));
  const CMatrix heis = j * (xx + kron(pauli('Y'), pauli('Y')) + kron(pauli('Z'), pauli('Z')));
  const CMatrix s = g1 * kron(pauli('Z'), pauli('I')) + g2 * kron(pauli('I'), pauli('Z'));
  const double d = oracle::phase_distance(u, -xx);
  const double comm = (u * heis - heis * u).norm();
  const double anti = (u * s + s * u).norm();
  return {d < 1e-8 && comm < 1e-12 && anti < 1e-12,
          "|U - (-XX)| = " + num(d) + ", |[U,H]| = " + num(comm) + ", |{U,S}| = " + num(anti)};
}

Outcome operational() {
  CMatrix bath0 = CMatrix::Zero(2, 2);
  bath0(0, 0) = 1;
  const SystemBathModel model(CMatrix::Zero(2, 2), pauli('X'), {{"zz", 0.5 * pauli('Z'), pauli('Z')}}, bath0);
  const double tp = 1e-3;
  const Channel ch = [&](const CMatrix& r) { return reduced_state(model, DensityMatrix(r), tp).matrix(); };
  const auto kick = solve_storage(extract_generator(measure_chi(ch, pauli_basis(1), tp), {1, {}}), 0, 4);
  if (kick.group.size() != 2) return {false, "no parity kick"};
  CVector plus(2);
  plus << 1.0, 1.0;
  const auto rho = DensityMatrix::pure(plus);
  const CMatrix h = kron(CMatrix::Zero(2, 2), CMatrix::Identity(2, 2)) + kron(CMatrix::Identity(2, 2), pauli('X')) +
                    kron(0.5 * pauli('Z'), pauli('Z'));
  double err[2];
  double oracle_gap = 0.0;
  const double dts[2] = {0.1, 0.05};
  for (int k = 0; k < 2; ++k) {
    const int cycles = static_cast<int>(std::lround(1.0 / (2 * dts[k])));
    const CMatrix sim = apply_bb_cycle(model, kick.group.with_delta_t(dts[k]), cycles, rho).matrix();
    // Dense exact evolution: g_0 = I first, then the kick frame.
    const CMatrix u0 = oracle::taylor_exp(-kI * dts[k] * h);
    const CMatrix g = kron(kick.group.pulses()[1], CMatrix::Identity(2, 2));
    const CMatrix cycle = g.adjoint() * u0 * g * u0;
    CMatrix u = CMatrix::Identity(4, 4);
    for (int c = 0; c < cycles; ++c) u = cycle * u;
    const CMatrix dense = oracle::partial_trace_b(u * kron(rho.matrix(), bath0) * u.adjoint(), 2, 2);
    oracle_gap = std::max(oracle_gap, (sim - dense).norm());
    err[k] = oracle::trace_distance(dense, rho.matrix());
  }
  const double ratio = err[0] / err[1];
  return {ratio >= 1.6 && ratio <= 2.4 && oracle_gap < 1e-10,
          "error(0.1) = " + num(err[0]) + ", error(0.05) = " + num(err[1]) + ", ratio " + num(ratio) +
              ", sim vs oracle " + num(oracle_gap)};
}

Outcome tomography_round_trip() {
  std::mt19937_64 rng(2026);
  double worst = 0.0;
  int channels = 0;
  for (int q = 1; q <= 2; ++q) {
    const Eigen::Index dim = Eigen::Index{1} << q;
    const auto basis = pauli_basis(q);
    for (int c = 0; c < 25; ++c, ++channels) {
      const auto ks = oracle::random_kraus(dim, 1 + c % 4, rng);
      const Channel ch = [&](const CMatrix& r) { return oracle::apply_kraus(ks, r); };
      const auto chi = chi_from_lambda(run_qpt(ch, basis));
      for (int s = 0; s < 20; ++s) {
        const CMatrix rho = oracle::random_density(dim, rng);
        worst = std::max(worst, (chi.apply(rho) - oracle::apply_kraus(ks, rho)).norm());
      }
    }
  }
  return {worst < 1e-9, std::to_string(channels) + " channels x 20 states, worst " + num(worst)};
}

Outcome projector() {
  std::mt19937_64 rng(6);
  const PulseGroup pauli_group({CMatrix::Identity(2, 2), pauli('X'), pauli('Y'), pauli('Z')}, 1.0);
  double kill = 0.0;
  for (int k = 0; k < 100; ++k) {
    kill = std::max(kill, symmetrize_hamiltonian(oracle::random_traceless_hermitian(2, rng), pauli_group).norm());
  }
  double idem = 0.0;
  for (int k = 0; k < 100; ++k) {
    const CMatrix h = oracle::random_hermitian(4, rng);
    const CMatrix once = symmetrize_hamiltonian(h, pauli_group);
    idem = std::max(idem, (symmetrize_hamiltonian(once, pauli_group) - once).norm());
  }
  return {kill < 1e-12 && idem < 1e-12, "max |P(H)| traceless " + num(kill) + ", max |P(P(H)) - P(H)| " + num(idem)};
}

Outcome adjoint_suite() {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0, 1);
  std::uniform_real_distribution<double> angle(-kPi / 2 + 1e-3, kPi / 2 - 1e-3);
  const auto basis = pauli_basis(1);
  double hom = 0.0;
  double orth = 0.0;
  double trip = 0.0;
  for (int k = 0; k < 200; ++k) {
    const CMatrix u = oracle::random_su2(rng);
    const CMatrix v = oracle::random_su2(rng);
    const RMatrix ru = adjoint_of(u, *basis).matrix();
    const RMatrix rv = adjoint_of(v, *basis).matrix();
    hom = std::max(hom, (adjoint_of(u * v, *basis).matrix() - ru * rv).norm());
    orth = std::max(orth, (ru.transpose() * ru - RMatrix::Identity(3, 3)).norm());
    orth = std::max(orth, std::abs(ru.determinant() - 1.0));
    const Eigen::Vector3d axis = Eigen::Vector3d(n(rng), n(rng), n(rng)).normalized();
    const double theta = angle(rng);
    const auto sol = unitary_from_rotation(adjoint_of(AxisAngle::make(axis, theta).unitary(), *basis));
    // (n̂, θ) and (−n̂, −θ) share θ·n̂.
    trip = std::max(trip, (sol.representative.angle * sol.representative.axis - theta * axis).norm());
  }
  return {hom < 1e-9 && orth < 1e-9 && trip < 1e-9,
          "homomorphism " + num(hom) + ", orthogonality " + num(orth) + ", axis-angle round trip " + num(trip)};
}

Outcome learning_loop_dephasing() {
  const auto model = SystemBathModel::closed(0.5 * pauli('Z'));
  LearningLoopConfig config;
  config.population = 32;
  config.generations = 20;
  const auto r = learning_loop(model, TargetSpec::storage(), config);
  bool monotone = true;
  for (std::size_t k = 1; k < r.records.size(); ++k) monotone = monotone && r.records[k].best_cost <= r.records[k - 1].best_cost;
  return {r.converged && r.best_cost <= 1e-6 && r.records.size() <= 20 && monotone,
          "J = " + num(r.best_cost) + " after " + std::to_string(r.records.size()) + " generation(s), monotone " +
              (monotone ? "yes" : "no")};
}

Outcome encoded() {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0, 1);
  const auto basis = pauli_basis(2);
  const CMatrix zz = kron(pauli('Z'), pauli('Z'));
  const auto target = TargetSpec::encoded({RVector::Zero(15), basis}, StabilizerSpace::create({zz}));
  double inside = 0.0;
  for (int k = 0; k < 100; ++k) {
    inside = std::max(inside, *check_encoded(expand(n(rng) * zz, basis), target).stabilizer_distance);
  }
  double gap = 0.0;
  for (int k = 0; k < 100; ++k) {
    const CMatrix e = oracle::random_traceless_hermitian(4, rng);
    const double d = *check_encoded(expand(e, basis), target).stabilizer_distance;
    gap = std::max(gap, std::abs(d - oracle::dense_projection_distance(e, {zz})));
  }
  return {inside < 1e-10 && gap < 1e-10, "inside span " + num(inside) + ", vs dense projection " + num(gap)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "dephasing storage", 1.0, dephasing_storage},
      {2, "combined errors, two-pass learning", 5.0, combined_errors},
      {3, "Heisenberg two-qubit parity kick", 5.0, heisenberg},
      {4, "operational decoupling scaling", 10.0, operational},
      {5, "tomography round trip", 30.0, tomography_round_trip},
      {6, "symmetrization projector", 0.0, projector},
      {7, "adjoint suite", 0.0, adjoint_suite},
      {8, "learning loop convergence", 60.0, learning_loop_dephasing},
      {9, "encoded condition", 0.0, encoded},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.time_limit == 0.0 || secs < c.time_limit;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::ostringstream line;
    line << (pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail << " (" << num(secs)
         << " s";
    if (c.time_limit > 0) line << ", limit " << num(c.time_limit) << " s";
    line << ")";
    std::puts(line.str().c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
