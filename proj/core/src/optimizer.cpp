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


#include "bbforge/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "bbforge/error.hpp"

namespace bbforge {

namespace {

Channel reduced(const SystemBathModel& model, CMatrix u) {
  const CMatrix bath = model.bath_initial();
  const Eigen::Index ds = model.system_dim();
  const Eigen::Index db = model.bath_dim();
  return [u = std::move(u), bath, ds, db](const CMatrix& rho) {
    if (rho.rows() != ds || rho.cols() != ds) throw Error(ErrorKind::kShape, "input has wrong system dimension");
    return partial_trace_second(u * kron(rho, bath) * u.adjoint(), ds, db);
  };
}

ErrorReport integrand(const EffectiveGenerator& gen, const CostFunction& cost) {
  const TargetSpec& t = cost.wanted;
  switch (t.kind) {
    case TargetKind::kStorage:
      return error_report(gen.full, {RVector::Zero(gen.full.coords.size()), gen.full.basis});
    case TargetKind::kSingleQubit:
      if (cost.qubit < 0 || cost.qubit >= static_cast<int>(gen.xi.size())) throw Error(ErrorKind::kShape, "cost qubit out of range");
      return error_report(gen.xi[static_cast<std::size_t>(cost.qubit)], t.wanted);
    case TargetKind::kTwoQubit: {
      const auto [i, j] = cost.pair;
      const bool swapped = i > j;
      const auto it = gen.xi_pair.find(swapped ? std::make_pair(j, i) : cost.pair);
      if (it == gen.xi_pair.end()) throw Error(ErrorKind::kShape, "cost pair not present in the generator");
      const Eigen::Matrix4d m = swapped ? Eigen::Matrix4d(it->second.transpose()) : it->second;
      return error_report(EffectiveGenerator::pair_coordinates(m), EffectiveGenerator::pair_coordinates(*t.wanted_pair));
    }
    case TargetKind::kEncoded: {
      ErrorReport r = check_encoded(gen.full, t);
      r.scalar_distance = *r.stabilizer_distance;
      return r;
    }
  }
  throw Error(ErrorKind::kDomain, "unknown target kind");
}

EffectiveGenerator generator_at(const Channel& channel, int qubits, double t) {
  const ChiMatrix chi = measure_chi(channel, pauli_basis(qubits), t);
  return extract_generator(chi, QubitLayout::all_pairs(qubits));
}

// ---------------------------------------------------------------------------

struct Individual {
  std::vector<CMatrix> pulses;
  RVector genome;  // 3 numbers (θ n̂) per qubit per non-identity pulse; empty if fixed
  std::string origin;
  bool evaluated = false;
  double cost = std::numeric_limits<double>::infinity();
  ErrorReport residual;
};

std::vector<CMatrix> pulses_from_genome(const RVector& genome, int size, int qubits) {
  std::vector<CMatrix> out{identity(Eigen::Index{1} << qubits)};
  for (int k = 0; k < size - 1; ++k) {
    CMatrix u = identity(1);
    for (int q = 0; q < qubits; ++q) {
      const Eigen::Vector3d c = genome.segment<3>(3 * (k * qubits + q));
      const double t = c.norm();
      u = kron(u, t > 0 ? AxisAngle::make(c / t, t).unitary() : identity(2));
    }
    out.push_back(u);
  }
  return out;
}

std::vector<std::vector<AxisAngle>> factors_from_genome(const RVector& genome, int size, int qubits) {
  std::vector<std::vector<AxisAngle>> out{std::vector<AxisAngle>(static_cast<std::size_t>(qubits))};
  for (int k = 0; k < size - 1; ++k) {
    std::vector<AxisAngle> row;
    for (int q = 0; q < qubits; ++q) {
      const Eigen::Vector3d c = genome.segment<3>(3 * (k * qubits + q));
      const double t = c.norm();
      row.push_back(t > 0 ? AxisAngle::make(c / t, t) : AxisAngle{});
    }
    out.push_back(row);
  }
  return out;
}

Individual from_genome(RVector genome, int size, int qubits, std::string origin) {
  Individual ind;
  ind.pulses = pulses_from_genome(genome, size, qubits);
  ind.genome = std::move(genome);
  ind.origin = std::move(origin);
  return ind;
}

// Factors given per pulse for a subset of qubits; other qubits idle.
Individual from_factors(const std::vector<std::vector<AxisAngle>>& factors, const std::vector<int>& on_qubits,
                        int qubits, std::string origin) {
  const int size = static_cast<int>(factors.size());
  RVector genome = RVector::Zero(3 * (size - 1) * qubits);
  for (int k = 1; k < size; ++k) {
    for (std::size_t f = 0; f < on_qubits.size(); ++f) {
      const AxisAngle& a = factors[static_cast<std::size_t>(k)][f];
      genome.segment<3>(3 * ((k - 1) * qubits + on_qubits[f])) = a.axis * a.angle;
    }
  }
  return from_genome(std::move(genome), size, qubits, std::move(origin));
}

int group_size_of(const Individual& ind) { return static_cast<int>(ind.pulses.size()); }

std::string format_vector(const Eigen::Vector3d& v) {
  std::ostringstream os;
  os.precision(6);
  os << "(" << v(0) << ", " << v(1) << ", " << v(2) << ")";
  return os.str();
}

template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, std::min<int>(threads, static_cast<int>(n))));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < n; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Analysis state: error directions seen so far, per qubit.
class Analyst {
 public:
  Analyst(const SystemBathModel& model, const TargetSpec& target, const LearningLoopConfig& config)
      : model_(model), target_(target), config_(config), qubits_(qubit_count_for_dim(model.system_dim())),
        lineage_(static_cast<std::size_t>(qubits_)) {}

  // Steps 1–4 on the unpulsed evolution.
  std::optional<Individual> initial(std::vector<std::string>& log) {
    const EffectiveGenerator gen = generator_at(evolution_channel(model_, config_.probe_time), qubits_, config_.probe_time);
    switch (target_.kind) {
      case TargetKind::kStorage:
        for (int q = 0; q < qubits_; ++q) record_direction(gen, q, "unpulsed", log);
        return storage_candidate("analysis pass 1", log);
      case TargetKind::kSingleQubit:
        try {
          const SynthesisResult r = solve_single_qubit_gate(gen, target_, config_.qubit, config_.group_size_bound, config_.delta_t);
          log.push_back("pass 1: single-qubit solver returned |G| = " + std::to_string(r.group.size()));
          return from_factors(r.local_factors, {config_.qubit}, qubits_, "solver");
        } catch (const InfeasibleError& e) {
          log.push_back(std::string("pass 1: single-qubit solver infeasible: ") + e.what());
        }
        return std::nullopt;
      case TargetKind::kTwoQubit:
        try {
          const SynthesisResult r =
              solve_two_qubit(gen, target_, config_.pair, TwoQubitAnsatz::kLocalProducts, config_.group_size_bound, config_.delta_t);
          log.push_back("pass 1: two-qubit solver returned |G| = " + std::to_string(r.group.size()));
          if (!r.local_factors.empty()) {
            return from_factors(r.local_factors, {config_.pair.first, config_.pair.second}, qubits_, "solver");
          }
        } catch (const InfeasibleError& e) {
          log.push_back(std::string("pass 1: two-qubit solver infeasible: ") + e.what());
        }
        return std::nullopt;
      case TargetKind::kEncoded:
        return std::nullopt;
    }
    return std::nullopt;
  }

  // Step 4 on the best pulsed evolution of a generation. Returns a new
  // candidate when tomography reveals an error direction not yet handled.
  std::optional<Individual> refine(const Individual& best, int generation, std::vector<std::string>& log) {
    if (target_.kind != TargetKind::kStorage) return std::nullopt;
    const PulseGroup group(best.pulses, config_.delta_t);
    const double t = group.cycle_time();
    const EffectiveGenerator gen = generator_at(evolution_channel(model_, group, t), qubits_, t);
    bool changed = false;
    for (int q = 0; q < qubits_; ++q) {
      changed = record_direction(gen, q, "generation " + std::to_string(generation), log) || changed;
    }
    if (!changed) return std::nullopt;
    return storage_candidate("analysis after generation " + std::to_string(generation), log);
  }

 private:
  bool record_direction(const EffectiveGenerator& gen, int q, const std::string& when, std::vector<std::string>& log) {
    Eigen::Vector3d v = gen.xi[static_cast<std::size_t>(q)].coords;
    const double top = v.cwiseAbs().maxCoeff();
    if (top < 1e-10) return false;
    for (int i = 0; i < 3; ++i) {
      if (std::abs(v(i)) < config_.detection_threshold * top) v(i) = 0.0;
    }
    const Eigen::Vector3d d = v.normalized();
    auto& seen = lineage_[static_cast<std::size_t>(q)];
    for (const auto& s : seen) {
      if (std::abs(s.dot(d)) > 1.0 - 1e-9) return false;
    }
    seen.push_back(d);
    log.push_back(when + ": detected error direction " + format_vector(d) + " on qubit " + std::to_string(q));
    return true;
  }

  std::optional<Individual> storage_candidate(const std::string& origin, std::vector<std::string>& log) {
    std::vector<std::vector<std::vector<AxisAngle>>> per_qubit;
    std::size_t size = 1;
    for (int q = 0; q < qubits_; ++q) {
      std::vector<std::vector<AxisAngle>> f;
      try {
        f = solve_storage_directions(lineage_[static_cast<std::size_t>(q)], config_.delta_t).local_factors;
      } catch (const InfeasibleError&) {
        if (config_.group_size_bound < 4) {
          log.push_back("qubit " + std::to_string(q) + ": no parity kick fits and the size bound excludes the Pauli group");
          return std::nullopt;
        }
        for (const auto& s : candidate_catalogue(2, 4)) {
          if (s.name == "pauli") f = s.local_factors;
        }
        log.push_back("qubit " + std::to_string(q) + ": error directions span all axes, using the Pauli group");
      }
      size = std::max(size, f.size());
      per_qubit.push_back(std::move(f));
    }
    // Sizes are 1, 2 or 4; repeating a set keeps its average.
    std::vector<std::vector<AxisAngle>> factors(size, std::vector<AxisAngle>(static_cast<std::size_t>(qubits_)));
    for (std::size_t k = 0; k < size; ++k) {
      for (int q = 0; q < qubits_; ++q) {
        const auto& f = per_qubit[static_cast<std::size_t>(q)];
        factors[k][static_cast<std::size_t>(q)] = f[k % f.size()][0];
      }
    }
    std::vector<int> all(static_cast<std::size_t>(qubits_));
    std::iota(all.begin(), all.end(), 0);
    if (size == 1) return from_genome(RVector(), 1, qubits_, origin);
    return from_factors(factors, all, qubits_, origin);
  }

  const SystemBathModel& model_;
  const TargetSpec& target_;
  const LearningLoopConfig& config_;
  int qubits_;
  std::vector<std::vector<Eigen::Vector3d>> lineage_;
};

}  // namespace

// ---------------------------------------------------------------------------

Channel evolution_channel(const SystemBathModel& model, const PulseGroup& group, double t) {
  return reduced(model, pulsed_unitary(model, group, t));
}

Channel evolution_channel(const SystemBathModel& model, double t) { return reduced(model, propagate(model, t)); }

void CostFunction::validate() const {
  wanted.validate();
  if (horizon_cycles < 1) throw Error(ErrorKind::kDomain, "cost horizon must be at least one cycle");
  if (quadrature < 1) throw Error(ErrorKind::kDomain, "quadrature must be at least 1");
}

CostBreakdown evaluate_cost_detailed(const SystemBathModel& model, const PulseGroup& group, const CostFunction& cost) {
  cost.validate();
  if (group.dim() != model.system_dim()) throw Error(ErrorKind::kShape, "pulse group does not act on the system");
  const int qubits = qubit_count_for_dim(model.system_dim());
  const double h = group.cycle_time() / cost.quadrature;
  const int nodes = cost.horizon_cycles * cost.quadrature;
  CostBreakdown out;
  for (int j = 1; j <= nodes; ++j) {
    const double tau = j * h;
    const EffectiveGenerator gen = generator_at(evolution_channel(model, group, tau), qubits, tau);
    ErrorReport r = integrand(gen, cost);
    out.node_times.push_back(tau);
    out.node_values.push_back(r.scalar_distance);
    if (j == nodes) out.last_node = std::move(r);
  }
  double sum = out.node_values.front();  // f(0) taken equal to f(τ_1)
  for (std::size_t j = 0; j + 1 < out.node_values.size(); ++j) sum += out.node_values[j] + out.node_values[j + 1];
  sum += out.node_values.front();
  out.value = 0.5 * h * sum;
  return out;
}

double evaluate_cost(const SystemBathModel& model, const PulseGroup& group, const CostFunction& cost) {
  return evaluate_cost_detailed(model, group, cost).value;
}

void LearningLoopConfig::validate() const {
  if (population < 2) throw Error(ErrorKind::kConfig, "population must be at least 2");
  if (generations < 1) throw Error(ErrorKind::kConfig, "generations must be at least 1");
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) throw Error(ErrorKind::kConfig, "mutation_rate must lie in [0, 1]");
  if (!(tolerance >= 0.0)) throw Error(ErrorKind::kConfig, "tolerance must be non-negative");
  if (group_size_bound < 2) throw Error(ErrorKind::kConfig, "group_size_bound must be at least 2");
  if (!(delta_t > 0.0)) throw Error(ErrorKind::kConfig, "delta_t must be positive");
  if (horizon_cycles < 1 || quadrature < 1) throw Error(ErrorKind::kConfig, "horizon_cycles and quadrature must be at least 1");
  if (!(probe_time > 0.0)) throw Error(ErrorKind::kConfig, "probe_time must be positive");
  if (!(detection_threshold >= 0.0 && detection_threshold < 1.0)) {
    throw Error(ErrorKind::kConfig, "detection_threshold must lie in [0, 1)");
  }
  if (tournament < 1) throw Error(ErrorKind::kConfig, "tournament size must be at least 1");
  if (!(mutation_sigma >= 0.0)) throw Error(ErrorKind::kConfig, "mutation_sigma must be non-negative");
  if (elitism < 0 || elitism >= population) throw Error(ErrorKind::kConfig, "elitism must lie in [0, population)");
}

int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BBFORGE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 256L));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

LearningResult learning_loop(const SystemBathModel& model, const TargetSpec& target, const LearningLoopConfig& config) {
  config.validate();
  target.validate();
  const int qubits = qubit_count_for_dim(model.system_dim());
  const int threads = resolve_thread_count(config.threads);
  CostFunction cost{target, config.horizon_cycles, config.quadrature, config.qubit, config.pair};
  cost.validate();

  LearningResult result{PulseGroup::trivial(model.system_dim(), config.delta_t), 0.0, false, {}, {}, {}};
  Analyst analyst(model, target, config);

  const auto rng_for = [&](int generation, std::size_t slot) {
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(generation), static_cast<std::uint32_t>(slot)};
    return std::mt19937_64(seq);
  };
  const auto random_individual = [&](std::mt19937_64& rng) {
    std::uniform_int_distribution<int> size_dist(2, config.group_size_bound);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
    const int size = size_dist(rng);
    RVector genome(3 * (size - 1) * qubits);
    for (Eigen::Index i = 0; i < genome.size(); i += 3) {
      Eigen::Vector3d n(normal(rng), normal(rng), normal(rng));
      if (n.norm() < 1e-12) n = Eigen::Vector3d::UnitZ();
      genome.segment<3>(i) = n.normalized() * angle(rng);
    }
    return from_genome(std::move(genome), size, qubits, "random");
  };

  // Generation 0: solver candidate first, then the idle group, then random members.
  std::vector<Individual> population;
  if (auto seeded = analyst.initial(result.analysis_log)) population.push_back(std::move(*seeded));
  population.push_back(from_genome(RVector(), 1, qubits, "identity"));
  for (std::size_t slot = population.size(); population.size() < static_cast<std::size_t>(config.population); ++slot) {
    auto rng = rng_for(0, slot);
    population.push_back(random_individual(rng));
  }

  Individual best_overall;
  for (int g = 0; g < config.generations; ++g) {
    parallel_for(population.size(), threads, [&](std::size_t i) {
      Individual& ind = population[i];
      if (ind.evaluated) return;
      try {
        const CostBreakdown b = evaluate_cost_detailed(model, PulseGroup(ind.pulses, config.delta_t), cost);
        ind.cost = b.value;
        ind.residual = b.last_node;
      } catch (const Error&) {
        ind.cost = std::numeric_limits<double>::infinity();
      }
      ind.evaluated = true;
    });

    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const Individual& x = population[a];
      const Individual& y = population[b];
      // Costs closer than 1e-12 count as ties so round-off cannot beat a smaller group.
      const double kx = std::isfinite(x.cost) ? std::floor(x.cost * 1e12) : std::numeric_limits<double>::infinity();
      const double ky = std::isfinite(y.cost) ? std::floor(y.cost * 1e12) : std::numeric_limits<double>::infinity();
      if (kx != ky) return kx < ky;
      return group_size_of(x) < group_size_of(y);
    });
    const Individual& best = population[order.front()];
    double mean = 0.0;
    int finite = 0;
    for (const auto& ind : population) {
      if (std::isfinite(ind.cost)) {
        mean += ind.cost;
        ++finite;
      }
    }
    mean = finite > 0 ? mean / finite : std::numeric_limits<double>::infinity();
    best_overall = best;
    const bool converged = best.cost <= config.tolerance;
    result.records.push_back(GenerationRecord{g, best.cost, mean, PulseGroup(best.pulses, config.delta_t), best.residual,
                                              converged, best.origin});
    if (converged) {
      result.converged = true;
      break;
    }
    if (g + 1 == config.generations) break;

    // Next generation: elites, any new solver candidate, then offspring.
    std::vector<Individual> next;
    for (int e = 0; e < config.elitism; ++e) next.push_back(population[order[static_cast<std::size_t>(e)]]);
    if (auto refined = analyst.refine(best, g, result.analysis_log)) next.push_back(std::move(*refined));
    std::vector<std::size_t> rank(population.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
    for (std::size_t slot = next.size(); next.size() < static_cast<std::size_t>(config.population); ++slot) {
      auto rng = rng_for(g + 1, slot);
      std::uniform_int_distribution<std::size_t> pick(0, population.size() - 1);
      const auto tournament = [&] {
        std::size_t winner = pick(rng);
        for (int t = 1; t < config.tournament; ++t) {
          const std::size_t c = pick(rng);
          if (rank[c] < rank[winner]) winner = c;
        }
        return winner;
      };
      const Individual& p1 = population[tournament()];
      const Individual& p2 = population[tournament()];
      if (p1.genome.size() == 0) {
        next.push_back(p1.pulses.size() == 1 ? random_individual(rng) : p1);
        next.back().evaluated = p1.pulses.size() != 1 && p1.evaluated;
        continue;
      }
      RVector genome = p1.genome;
      std::bernoulli_distribution coin(0.5);
      if (p2.genome.size() == genome.size()) {
        for (Eigen::Index b = 0; b < genome.size(); b += 3) {
          if (coin(rng)) genome.segment<3>(b) = p2.genome.segment<3>(b);
        }
      }
      std::bernoulli_distribution mutate(config.mutation_rate);
      std::normal_distribution<double> step(0.0, config.mutation_sigma);
      for (Eigen::Index i = 0; i < genome.size(); ++i) {
        if (mutate(rng)) genome(i) += step(rng);
      }
      next.push_back(from_genome(std::move(genome), group_size_of(p1), qubits, "offspring"));
    }
    population = std::move(next);
  }

  result.best_group = PulseGroup(best_overall.pulses, config.delta_t);
  result.best_cost = best_overall.cost;
  if (best_overall.genome.size() > 0 || best_overall.pulses.size() == 1) {
    result.best_local_factors =
        factors_from_genome(best_overall.genome, static_cast<int>(best_overall.pulses.size()), qubits);
  }
  return result;
}

}  // namespace bbforge
