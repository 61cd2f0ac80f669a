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


#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "CLI11.hpp"

#include "bbforge/error.hpp"
#include "bbforge/json_io.hpp"
#include "bbforge/optimizer.hpp"
#include "bbforge/synthesis.hpp"
#include "bbforge/tomography.hpp"

namespace bbforge::cli {

namespace {

namespace fs = std::filesystem;
using io::Json;

struct Flags {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> probe_time;
};

struct Experiment {
  Json raw;
  fs::path base_dir;
  std::optional<SystemBathModel> model;
  std::optional<Channel> channel;  // explicit channel instead of a model
  int qubits = 1;
  double probe_time = 0.01;
  std::optional<TargetSpec> target;
  LearningLoopConfig loop;
  int max_group_size = 4;
  double delta_t = 0.1;
  int qubit = 0;
  std::pair<int, int> pair{0, 1};
  TwoQubitAnsatz ansatz = TwoQubitAnsatz::kLocalProducts;
  std::uint64_t seed = 42;
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInconsistency: return kTomographyInconsistent;
    case ErrorKind::kConfig:
    case ErrorKind::kIo:
    case ErrorKind::kShape:
    case ErrorKind::kDomain:
    case ErrorKind::kDegenerateTime:
    case ErrorKind::kCapacity: return kConfigError;
    default: return kFailure;
  }
}

Channel channel_from_json(const Json& j) {
  std::vector<std::pair<CMatrix, CMatrix>> terms;
  if (j.contains("kraus")) {
    for (const auto& k : j.at("kraus")) {
      const CMatrix a = io::matrix_from_json(k);
      terms.emplace_back(a, a.adjoint());
    }
  } else if (j.contains("left_right")) {
    for (const auto& t : j.at("left_right")) {
      if (!t.is_array() || t.size() != 2) throw Error(ErrorKind::kConfig, "left_right entries must be [L, R] pairs");
      terms.emplace_back(io::matrix_from_json(t[0]), io::matrix_from_json(t[1]));
    }
  } else {
    throw Error(ErrorKind::kConfig, "channel needs 'kraus' or 'left_right'");
  }
  if (terms.empty()) throw Error(ErrorKind::kConfig, "channel has no terms");
  const Eigen::Index dim = terms.front().first.rows();
  for (const auto& [l, r] : terms) {
    if (l.rows() != dim || l.cols() != dim || r.rows() != dim || r.cols() != dim) {
      throw Error(ErrorKind::kConfig, "channel operators must be square and share one dimension");
    }
  }
  return [terms](const CMatrix& rho) {
    CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
    for (const auto& [l, r] : terms) out += l * rho * r;
    return out;
  };
}

Eigen::Index channel_dim(const Json& j) {
  const Json& first = j.contains("kraus") ? j.at("kraus").at(0) : j.at("left_right").at(0).at(0);
  return io::matrix_from_json(first).rows();
}

Experiment load(const Flags& flags) {
  Experiment e;
  e.raw = io::read_json_file(flags.config);
  e.base_dir = fs::path(flags.config).parent_path();
  const Json& c = e.raw;
  if (!c.is_object()) throw Error(ErrorKind::kConfig, "config must be a JSON object");
  try {
    if (c.contains("model_file")) {
      const fs::path p = e.base_dir / c.at("model_file").get<std::string>();
      if (!fs::exists(p)) throw Error(ErrorKind::kConfig, "model file " + p.string() + " does not exist");
      e.model = io::model_from_json(io::read_json_file(p.string()));
    } else if (c.contains("model")) {
      e.model = io::model_from_json(c.at("model"));
    }
    if (c.contains("channel")) {
      e.channel = channel_from_json(c.at("channel"));
      e.qubits = qubit_count_for_dim(channel_dim(c.at("channel")));
    }
    if (!e.model && !e.channel) throw Error(ErrorKind::kConfig, "config needs 'model', 'model_file', or 'channel'");
    if (e.model) e.qubits = qubit_count_for_dim(e.model->system_dim());

    e.probe_time = flags.probe_time.value_or(c.value("probe_time", 0.01));
    if (!(e.probe_time > 0.0)) throw Error(ErrorKind::kConfig, "probe_time must be positive");
    if (c.contains("target")) e.target = io::target_from_json(c.at("target"));
    e.max_group_size = c.value("max_group_size", 4);
    e.delta_t = c.value("delta_t", 0.1);
    e.qubit = c.value("qubit", 0);
    if (c.contains("pair")) {
      const auto p = c.at("pair").get<std::vector<int>>();
      if (p.size() != 2) throw Error(ErrorKind::kConfig, "pair must have two entries");
      e.pair = {p[0], p[1]};
    }
    const std::string ansatz = c.value("ansatz", std::string("local_products"));
    if (ansatz == "general") {
      e.ansatz = TwoQubitAnsatz::kGeneral;
    } else if (ansatz != "local_products") {
      throw Error(ErrorKind::kConfig, "ansatz must be local_products or general");
    }
    e.loop = io::loop_config_from_json(c.contains("loop") ? c.at("loop") : Json());
    if (!c.contains("loop") || !c.at("loop").contains("probe_time")) e.loop.probe_time = e.probe_time;
    if (flags.probe_time) e.loop.probe_time = *flags.probe_time;
    if (!c.contains("loop") || !c.at("loop").contains("delta_t")) e.loop.delta_t = e.delta_t;
    if (!c.contains("loop") || !c.at("loop").contains("qubit")) e.loop.qubit = e.qubit;
    if (!c.contains("loop") || !c.at("loop").contains("pair")) e.loop.pair = e.pair;
    e.seed = flags.seed.value_or(c.value("seed", e.loop.seed));
    e.loop.seed = flags.seed.value_or(e.loop.seed);
  } catch (const Json::exception& ex) {
    throw Error(ErrorKind::kConfig, ex.what());
  }
  return e;
}

const SystemBathModel& require_model(const Experiment& e, const char* command) {
  if (!e.model) throw Error(ErrorKind::kConfig, std::string(command) + " needs a model");
  return *e.model;
}

const TargetSpec& require_target(const Experiment& e, const char* command) {
  if (!e.target) throw Error(ErrorKind::kConfig, std::string(command) + " needs a target");
  return *e.target;
}

fs::path out_dir(const Flags& flags) {
  const fs::path p(flags.out);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create output directory " + p.string());
  return p;
}

Channel probe_channel(const Experiment& e) {
  return e.channel ? *e.channel : evolution_channel(*e.model, e.probe_time);
}

CMatrix initial_state(const Experiment& e, const Json& section) {
  const Eigen::Index dim = Eigen::Index{1} << e.qubits;
  if (section.contains("initial_density")) return DensityMatrix(io::matrix_from_json(section.at("initial_density"))).matrix();
  if (section.contains("initial_state")) {
    const CVector psi = io::vector_from_json(section.at("initial_state"));
    if (psi.size() != dim) throw Error(ErrorKind::kConfig, "initial_state has the wrong dimension");
    return DensityMatrix::pure(psi).matrix();
  }
  return CMatrix::Constant(dim, dim, Complex(1.0 / static_cast<double>(dim), 0.0));  // |+…+⟩
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

std::string pauli_expansion(const CMatrix& u) {
  const BasisPtr basis = pauli_basis(qubit_count_for_dim(u.rows()));
  std::string s;
  for (std::size_t i = 0; i < basis->size(); ++i) {
    const Complex c = basis->trace_with(i, u) / basis->normalization();
    if (std::abs(c) < 1e-9) continue;
    if (!s.empty()) s += " + ";
    const double re = std::abs(c.real()) < 1e-12 ? 0.0 : c.real();
    const double im = std::abs(c.imag()) < 1e-12 ? 0.0 : c.imag();
    if (im == 0.0) {
      s += "(" + fmt(re) + ")";
    } else if (re == 0.0) {
      s += "(" + fmt(im) + "i)";
    } else {
      s += "(" + fmt(re) + (im < 0 ? "" : "+") + fmt(im) + "i)";
    }
    s += basis->label(i);
  }
  return s.empty() ? "0" : s;
}

void print_summary(const SynthesisResult& r, std::ostream& out) {
  out << "|G| = " << r.group.size() << ", delta_t = " << fmt(r.group.delta_t()) << "\n";
  for (std::size_t k = 0; k < r.group.size(); ++k) {
    out << "  g" << k << " = " << pauli_expansion(r.group.pulses()[k]);
    if (k < r.local_factors.size()) {
      for (std::size_t q = 0; q < r.local_factors[k].size(); ++q) {
        const AxisAngle& a = r.local_factors[k][q];
        out << "  [q" << q << ": axis (" << fmt(a.axis(0)) << ", " << fmt(a.axis(1)) << ", " << fmt(a.axis(2))
            << "), angle " << fmt(a.angle) << "]";
      }
    }
    out << "\n";
  }
  out << "residual d = " << fmt(r.residual.scalar_distance, 3) << "\n";
  out << "free parameters: " << r.free_parameters << "\n";
}

struct Synthesis {
  ChiMatrix chi;
  EffectiveGenerator generator;
  SynthesisResult result;
  std::optional<ErrorReport> encoded;
};

Synthesis synthesize(const Experiment& e) {
  const TargetSpec& target = require_target(e, "synthesize");
  ChiMatrix chi = measure_chi(probe_channel(e), pauli_basis(e.qubits), e.probe_time);
  EffectiveGenerator gen = extract_generator(chi, QubitLayout::all_pairs(e.qubits));
  std::optional<ErrorReport> encoded;
  const auto make = [&]() -> SynthesisResult {
    switch (target.kind) {
      case TargetKind::kStorage: return solve_storage(gen, e.qubit, e.max_group_size, e.delta_t);
      case TargetKind::kSingleQubit: return solve_single_qubit_gate(gen, target, e.qubit, e.max_group_size, e.delta_t);
      case TargetKind::kTwoQubit: return solve_two_qubit(gen, target, e.pair, e.ansatz, e.max_group_size, e.delta_t);
      case TargetKind::kEncoded: {
        // No closed-form solver: report the unpulsed generator against the code space.
        encoded = check_encoded(gen.full, target);
        const auto dim = static_cast<Eigen::Index>(Eigen::Index{1} << e.qubits);
        return SynthesisResult{PulseGroup::trivial(dim, e.delta_t), *encoded, "no encoded solver; trivial group reported", {}};
      }
    }
    throw Error(ErrorKind::kConfig, "unknown target kind");
  };
  SynthesisResult result = make();
  return Synthesis{std::move(chi), std::move(gen), std::move(result), std::move(encoded)};
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Flags& flags, std::ostream& out) {
  const Experiment e = load(flags);
  const SystemBathModel& model = require_model(e, "simulate");
  const Json section = e.raw.contains("simulate") ? e.raw.at("simulate") : Json::object();
  const double t_final = section.value("t_final", 1.0);
  const int steps = section.value("steps", 50);
  if (!(t_final > 0.0) || steps < 1) throw Error(ErrorKind::kConfig, "simulate needs t_final > 0 and steps >= 1");
  const DensityMatrix rho0(initial_state(e, section));
  std::string csv = "time,trace_distance,purity\n";
  for (int k = 0; k <= steps; ++k) {
    const double t = t_final * k / steps;
    const DensityMatrix rho = reduced_state(model, rho0, t);
    const double purity = (rho.matrix() * rho.matrix()).trace().real();
    csv += io::format_double(t) + "," + io::format_double(trace_distance(rho.matrix(), rho0.matrix())) + "," +
           io::format_double(purity) + "\n";
  }
  const fs::path dir = out_dir(flags);
  io::write_text_file((dir / "trajectory.csv").string(), csv);
  out << "wrote " << (dir / "trajectory.csv").string() << " (" << steps + 1 << " rows)\n";
  return kOk;
}

int cmd_tomography(const Flags& flags, std::ostream& out) {
  const Experiment e = load(flags);
  const Channel channel = probe_channel(e);
  const ChiMatrix chi = chi_from_lambda(run_qpt(channel, pauli_basis(e.qubits), e.probe_time));
  const EffectiveGenerator gen = extract_generator(chi, QubitLayout::all_pairs(e.qubits));

  // Forward check on seeded random states.
  std::mt19937_64 rng(e.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index dim = chi.basis->dim();
  double round_trip = 0.0;
  for (int s = 0; s < 20; ++s) {
    CVector psi(dim);
    for (Eigen::Index i = 0; i < dim; ++i) psi(i) = Complex(normal(rng), normal(rng));
    const CMatrix rho = DensityMatrix::pure(psi).matrix();
    round_trip = std::max(round_trip, (chi.apply(rho) - channel(rho)).norm());
  }

  Json j;
  j["probe_time"] = e.probe_time;
  j["chi"] = io::to_json(chi);
  j["generator"] = io::to_json(gen);
  j["round_trip_residual"] = round_trip;
  const fs::path dir = out_dir(flags);
  io::write_text_file((dir / "chi.json").string(), io::dump(j));
  out << "chi on " << chi.basis->id() << " at t = " << fmt(e.probe_time) << ", round-trip residual "
      << fmt(round_trip, 3) << "\n";
  for (int q = 0; q < e.qubits; ++q) {
    const RVector& x = gen.xi[static_cast<std::size_t>(q)].coords;
    out << "  xi[q" << q << "] = (" << fmt(x(0)) << ", " << fmt(x(1)) << ", " << fmt(x(2)) << ")\n";
  }
  for (const auto& w : gen.warnings) out << "warning: " << w << "\n";
  return kOk;
}

int cmd_synthesize(const Flags& flags, std::ostream& out) {
  const Experiment e = load(flags);
  const Synthesis s = synthesize(e);
  Json j;
  j["target"] = std::string(to_string(e.target->kind));
  j["probe_time"] = e.probe_time;
  j["generator"] = io::to_json(s.generator);
  j["result"] = io::to_json(s.result);
  const fs::path dir = out_dir(flags);
  io::write_text_file((dir / "synthesis.json").string(), io::dump(j));
  print_summary(s.result, out);
  return kOk;
}

int cmd_verify(const Flags& flags, std::ostream& out) {
  const Experiment e = load(flags);
  const SystemBathModel& model = require_model(e, "verify");
  const Synthesis s = synthesize(e);
  const Json section = e.raw.contains("verify") ? e.raw.at("verify") : Json::object();
  const double total = section.value("total_time", 1.0);
  const auto steps = section.value("delta_ts", std::vector<double>{0.1, 0.05, 0.025});
  const DensityMatrix rho0(initial_state(e, section));

  // Ideal evolution under the wanted generator.
  const TargetSpec& target = *e.target;
  const BasisPtr full_basis = pauli_basis(e.qubits);
  RVector wanted_full = RVector::Zero(static_cast<Eigen::Index>(full_basis->generator_count()));
  if (target.kind == TargetKind::kSingleQubit || target.kind == TargetKind::kTwoQubit) {
    const std::vector<int> qs = target.kind == TargetKind::kSingleQubit ? std::vector<int>{e.qubit}
                                                                        : std::vector<int>{e.pair.first, e.pair.second};
    const BasisPtr local = pauli_basis(static_cast<int>(qs.size()));
    for (std::size_t i = 1; i < local->size(); ++i) {
      std::vector<std::uint8_t> idx(static_cast<std::size_t>(e.qubits), 0);
      for (std::size_t f = 0; f < qs.size(); ++f) idx[static_cast<std::size_t>(qs[f])] = local->pauli_strings()[i].indices()[f];
      wanted_full(static_cast<Eigen::Index>(full_basis->index_of(PauliString(idx)) - 1)) = target.wanted.coords(static_cast<Eigen::Index>(i - 1));
    }
  } else if (target.kind == TargetKind::kEncoded && target.wanted.basis->id() == full_basis->id()) {
    wanted_full = target.wanted.coords;
  }
  // ξ = Im χ_{α0}/t is minus the Hamiltonian coefficient.
  const CMatrix h_wanted = -reconstruct({wanted_full, full_basis});
  const CMatrix generator = Complex(0, -total) * h_wanted;
  const CMatrix u_ideal = generator.exp();
  const CMatrix rho_ideal = u_ideal * rho0.matrix() * u_ideal.adjoint();

  const double unpulsed = trace_distance(reduced_state(model, rho0, total).matrix(), rho_ideal);
  Json rows = Json::array();
  std::vector<double> errors;
  out << "unpulsed error at T = " << fmt(total) << ": " << fmt(unpulsed) << "\n";
  for (double dt : steps) {
    const PulseGroup group = s.result.group.with_delta_t(dt);
    const double cycles_f = total / group.cycle_time();
    const int cycles = static_cast<int>(std::lround(cycles_f));
    if (cycles < 1 || std::abs(cycles_f - cycles) > 1e-9) {
      throw Error(ErrorKind::kConfig, "total_time must be a whole number of cycles for delta_t " + fmt(dt));
    }
    const double err = trace_distance(apply_bb_cycle(model, group, cycles, rho0).matrix(), rho_ideal);
    errors.push_back(err);
    rows.push_back(Json{{"delta_t", dt}, {"cycles", cycles}, {"trace_distance", err}});
    out << "  delta_t = " << fmt(dt) << ": error " << fmt(err) << "\n";
  }
  bool monotone = true;
  for (std::size_t i = 1; i < errors.size(); ++i) monotone = monotone && errors[i] <= errors[i - 1];
  Json j;
  j["target"] = std::string(to_string(target.kind));
  j["result"] = io::to_json(s.result);
  j["total_time"] = total;
  j["unpulsed_trace_distance"] = unpulsed;
  j["pulsed"] = rows;
  j["monotone"] = monotone;
  const fs::path dir = out_dir(flags);
  io::write_text_file((dir / "verify.json").string(), io::dump(j));
  out << (monotone ? "error decreases with delta_t\n" : "error does not decrease monotonically with delta_t\n");
  return kOk;
}

int cmd_optimize(const Flags& flags, std::ostream& out) {
  const Experiment e = load(flags);
  const SystemBathModel& model = require_model(e, "optimize");
  const TargetSpec& target = require_target(e, "optimize");
  const LearningResult r = learning_loop(model, target, e.loop);
  const fs::path dir = out_dir(flags);
  io::write_text_file((dir / "generations.csv").string(), io::records_csv(r.records));
  io::write_text_file((dir / "optimize.json").string(), io::dump(io::to_json(r)));
  for (const auto& line : r.analysis_log) out << line << "\n";
  out << (r.converged ? "converged" : "not converged") << " after " << r.records.size() << " generation(s), best J = "
      << fmt(r.best_cost, 3) << ", |G| = " << r.best_group.size() << "\n";
  return r.converged ? kOk : kUnconverged;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bang-bang decoupling pulse design from process tomography", "bbforge"};
  app.require_subcommand(1);
  Flags flags;
  const auto add_flags = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "experiment config (JSON)")->required();
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--seed", flags.seed, "RNG seed override");
    sub->add_option("--probe-time", flags.probe_time, "tomography probe time override");
  };
  CLI::App* simulate = app.add_subcommand("simulate", "reduced-state trajectory of the configured model");
  CLI::App* tomography = app.add_subcommand("tomography", "chi matrix and first-order generator at the probe time");
  CLI::App* synth = app.add_subcommand("synthesize", "solve for a decoupling pulse group");
  CLI::App* verify = app.add_subcommand("verify", "synthesize, then check the pulses by re-simulation");
  CLI::App* optimize = app.add_subcommand("optimize", "run the learning loop");
  for (CLI::App* sub : {simulate, tomography, synth, verify, optimize}) add_flags(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*simulate) return cmd_simulate(flags, out);
    if (*tomography) return cmd_tomography(flags, out);
    if (*synth) return cmd_synthesize(flags, out);
    if (*verify) return cmd_verify(flags, out);
    if (*optimize) return cmd_optimize(flags, out);
  } catch (const Error& e) {
    err << "bbforge: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "bbforge: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

}  // namespace bbforge::cli
