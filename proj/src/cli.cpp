#include "krauslab/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "krauslab/json_io.hpp"
#include "krauslab/kraus.hpp"
#include "krauslab/open_dynamics.hpp"
#include "krauslab/quantum_state.hpp"

namespace krauslab::cli {

namespace {

struct RunConfig {
  std::optional<double> tol_flag;
  std::optional<std::string> format;  // sweep defaults to csv, the rest are json
  std::uint64_t seed = 0;
  std::string out_path;

  std::string state_path, target_path, kraus_path, scenario_path, unitary_path, matrix_path;
  std::string method = "general";
  double t = 0.0;
  double t_start = 0.0, t_end = 0.0;
  int steps = 0;
  std::vector<std::size_t> dims;

  double tol = kDefaultTol;
};

double resolve_tol(const RunConfig& cfg) {
  if (cfg.tol_flag) {
    if (!(*cfg.tol_flag > 0.0)) throw InputError("--tol must be positive");
    return *cfg.tol_flag;
  }
  if (const char* env = std::getenv("KRAUSLAB_TOL"); env && *env) {
    char* end = nullptr;
    const double value = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(value > 0.0)) {
      throw InputError(std::string("KRAUSLAB_TOL is not a positive number: ") + env);
    }
    return value;
  }
  return kDefaultTol;
}

DensityMatrix load_state(const std::string& path, double tol) {
  const auto m = state_matrix_from_json(read_json_file(path), tol);
  auto validation = validate_density(m, tol);
  if (!validation.ok()) throw InputError(path + ": " + validation.describe());
  return std::move(*validation.state);
}

void emit(const std::string& text, const RunConfig& cfg, std::ostream& out) {
  out << text;
  if (!cfg.out_path.empty()) {
    std::ofstream file(cfg.out_path);
    if (!file) throw InputError("cannot write " + cfg.out_path);
    file << text;
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream file(path);
  if (!file) throw InputError("cannot write " + path);
  file << text;
}

ComplexMatrix random_unitary(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<std::vector<Complex>> cols(n, std::vector<Complex>(n));
  for (auto& col : cols)
    for (auto& z : col) z = {gauss(rng), gauss(rng)};
  // Gram-Schmidt, run twice for stability.
  for (std::size_t j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < j; ++k) {
        Complex overlap = 0.0;
        for (std::size_t i = 0; i < n; ++i) overlap += std::conj(cols[k][i]) * cols[j][i];
        for (std::size_t i = 0; i < n; ++i) cols[j][i] -= overlap * cols[k][i];
      }
    double norm = 0.0;
    for (const auto& z : cols[j]) norm += std::norm(z);
    for (auto& z : cols[j]) z /= std::sqrt(norm);
  }
  ComplexMatrix u(n, n);
  for (std::size_t j = 0; j < n; ++j) u.set_column(j, cols[j]);
  return u;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  const auto m = state_matrix_from_json(read_json_file(cfg.state_path), cfg.tol);
  const auto validation = validate_density(m, cfg.tol);
  json violations = json::array();
  for (const auto& v : validation.violations) {
    violations.push_back({{"check", v.check}, {"residual", v.residual}});
  }
  json result{{"valid", validation.ok()},
              {"violations", violations},
              {"eigenvalues", validation.eigenvalues}};
  if (validation.ok() && validation.state->dim() == 2) {
    result["bloch"] = bloch_to_json(density_to_bloch(*validation.state, cfg.tol));
  }
  emit(dump(result), cfg, out);
  return validation.ok() ? kOk : kInvalidInput;
}

int cmd_kraus(const RunConfig& cfg, std::ostream& out) {
  const auto rho0 = load_state(cfg.state_path, cfg.tol);
  const auto rhot = load_state(cfg.target_path, cfg.tol);
  if (rho0.dim() != rhot.dim()) throw InputError("states have different dimensions");
  if (cfg.method != "measure-prepare" && rho0.dim() != 2) {
    throw InputError("method " + cfg.method + " needs qubit states");
  }

  std::optional<KrausSet> kraus;
  if (cfg.method == "general") {
    kraus = general_qubit_kraus(rho0, rhot, cfg.tol);
  } else if (cfg.method == "closed-form") {
    kraus = closed_form_qubit_kraus(density_to_bloch(rho0, cfg.tol), density_to_bloch(rhot, cfg.tol),
                                    cfg.tol);
  } else {
    kraus = measure_prepare_kraus(rho0, rhot, cfg.tol);
  }
  const auto report = verify_channel(*kraus, rho0, rhot);
  const bool passed = report.passes(cfg.tol);

  if (!cfg.out_path.empty()) write_file(cfg.out_path, dump(kraus_to_json(*kraus)));
  out << dump({{"method", cfg.method},
               {"kraus", kraus_to_json(*kraus)},
               {"report", report_to_json(report)},
               {"passed", passed}});
  return passed ? kOk : kCheckFailed;
}

struct ScenarioContext {
  ComplexMatrix hamiltonian;
  CompositeState initial;
  std::optional<CnotScenario> cnot;
};

ScenarioContext load_scenario(const RunConfig& cfg, std::ostream& err) {
  const auto scenario = scenario_from_json(read_json_file(cfg.scenario_path), cfg.tol);
  if (const auto* cnot = std::get_if<CnotScenario>(&scenario)) {
    if (cnot->is_endpoint()) {
      err << "warning: r0 = " << cnot->r0()
          << " makes the initial state a product state; delta_rho vanishes identically\n";
    }
    return {cnot_hamiltonian(), cnot->initial_state(), *cnot};
  }
  const auto& custom = std::get<CustomScenario>(scenario);
  return {custom.hamiltonian, custom.initial, std::nullopt};
}

int cmd_evolve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto ctx = load_scenario(cfg, err);
  const auto parts = decompose_dynamics(ctx.hamiltonian, ctx.initial, cfg.t, cfg.tol);
  const auto rho0 = reduced_state(ctx.initial, cfg.tol);

  json result{{"t", cfg.t},
              {"rho_i_0", matrix_to_json(rho0.mat())},
              {"rho_i_t", matrix_to_json(parts.reduced.mat())},
              {"delta_rho", matrix_to_json(parts.delta)},
              {"rho_cor_0", matrix_to_json(parts.correlation)},
              {"delta_rho_maxnorm", norm_max(parts.delta)},
              {"decomposition_residual", parts.residual}};
  bool passed = parts.residual <= cfg.tol;
  if (parts.reduced.dim() == 2) {
    result["bloch_t"] = bloch_to_json(density_to_bloch(parts.reduced, cfg.tol));
  }
  if (ctx.cnot) {
    const double analytic = norm_max(cnot_analytic_rho(*ctx.cnot, cfg.t).mat() - parts.reduced.mat());
    result["analytic_residual"] = analytic;
    passed = passed && analytic <= cfg.tol;
  }
  result["passed"] = passed;
  emit(dump(result), cfg, out);
  return passed ? kOk : kCheckFailed;
}

struct SweepRow {
  double t = 0, r = 0, theta = 0, phi = 0, r_t = 0, delta = 0;
  double completeness = 0, reconstruction = 0, distance = 0;
};

SweepRow sweep_point(const ScenarioContext& ctx, const DensityMatrix& rho0, double t, double tol) {
  const auto evolved = evolve_joint(ctx.hamiltonian, ctx.initial, t, tol);
  const auto rho_t = reduced_state(evolved, tol);
  const auto bloch = density_to_bloch(rho_t, tol);

  SweepRow row{t, bloch.r, bloch.theta, bloch.phi, bloch.r};
  row.delta = norm_max(delta_rho(ctx.hamiltonian, ctx.initial, t, tol));

  const auto kraus =
      ctx.cnot ? cnot_analytic_kraus(*ctx.cnot, t, tol) : general_qubit_kraus(rho0, rho_t, tol);
  const auto reconstructed = apply_kraus(kraus, rho0.mat());
  row.completeness = completeness_residual(kraus);
  row.reconstruction = norm_max(reconstructed - rho_t.mat());
  if (ctx.cnot) {
    row.r_t = ctx.cnot->r_t(t);
    row.distance = trace_distance(cnot_analytic_rho(*ctx.cnot, t, tol), rho_t);
  } else {
    row.distance = trace_distance(reconstructed, rho_t.mat());
  }
  return row;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.steps < 2) throw InputError("sweep needs at least 2 steps");
  if (cfg.t_start == cfg.t_end) throw InputError("degenerate grid: t_start equals t_end");
  const auto ctx = load_scenario(cfg, err);
  if (ctx.initial.dims().system != 2) throw InputError("sweep needs a qubit system");
  const auto rho0 = reduced_state(ctx.initial, cfg.tol);

  const std::size_t n = static_cast<std::size_t>(cfg.steps);
  std::vector<SweepRow> rows(n);
  std::vector<std::exception_ptr> failures(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const double t = cfg.t_start + (cfg.t_end - cfg.t_start) * static_cast<double>(i) /
                                         static_cast<double>(n - 1);
      try {
        rows[i] = sweep_point(ctx, rho0, t, cfg.tol);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const unsigned workers = std::clamp(std::thread::hardware_concurrency(), 1u, 8u);
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  pool.clear();
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  bool passed = true;
  for (const auto& row : rows) {
    passed = passed && row.completeness <= cfg.tol && row.reconstruction <= cfg.tol &&
             row.distance <= cfg.tol;
  }

  std::ostringstream text;
  if (cfg.format.value_or("csv") == "csv") {
    text << kSweepHeader << '\n' << std::setprecision(12);
    for (const auto& r : rows) {
      text << r.t << ',' << r.r << ',' << r.theta << ',' << r.phi << ',' << r.r_t << ',' << r.delta
           << ',' << r.completeness << ',' << r.reconstruction << ',' << r.distance << '\n';
    }
  } else {
    json table = json::array();
    for (const auto& r : rows) {
      table.push_back({{"t", r.t},
                       {"r", r.r},
                       {"theta", r.theta},
                       {"phi", r.phi},
                       {"r_t", r.r_t},
                       {"delta_rho_maxnorm", r.delta},
                       {"completeness_residual", r.completeness},
                       {"reconstruction_residual", r.reconstruction},
                       {"trace_distance_analytic_vs_numeric", r.distance}});
    }
    text << dump({{"rows", table}, {"passed", passed}});
  }
  emit(text.str(), cfg, out);
  return passed ? kOk : kCheckFailed;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const auto kraus = kraus_from_json(read_json_file(cfg.kraus_path));
  const auto rho0 = load_state(cfg.state_path, cfg.tol);
  const auto rhot = load_state(cfg.target_path, cfg.tol);
  if (rho0.dim() != kraus.d_in() || rhot.dim() != kraus.d_out()) {
    throw InputError("state dimensions do not match the Kraus set");
  }
  const auto report = verify_channel(kraus, rho0, rhot);
  const bool passed = report.passes(cfg.tol);
  emit(dump({{"report", report_to_json(report)}, {"passed", passed}}), cfg, out);
  return passed ? kOk : kCheckFailed;
}

int cmd_remix(const RunConfig& cfg, std::ostream& out) {
  const auto kraus = kraus_from_json(read_json_file(cfg.kraus_path));
  const auto v = cfg.unitary_path.empty() ? random_unitary(kraus.size(), cfg.seed)
                                          : matrix_from_json(read_json_file(cfg.unitary_path));
  if (!v.is_square() || unitarity_residual(v) > cfg.tol) throw InputError("remix matrix is not unitary");
  if (v.rows() < kraus.size()) throw InputError("remix unitary is smaller than the Kraus set");

  const auto remixed = unitary_remix(kraus, v, cfg.tol);
  const double before = completeness_residual(kraus);
  const double after = completeness_residual(remixed);
  const bool passed = after <= std::max(cfg.tol, before + cfg.tol);

  if (!cfg.out_path.empty()) write_file(cfg.out_path, dump(kraus_to_json(remixed)));
  out << dump({{"kraus", kraus_to_json(remixed)},
               {"unitary", matrix_to_json(v)},
               {"completeness_residual", after},
               {"passed", passed}});
  return passed ? kOk : kCheckFailed;
}

int cmd_factor(const RunConfig& cfg, std::ostream& out) {
  const auto doc = read_json_file(cfg.matrix_path);
  const auto u = matrix_from_json(doc.contains("unitary") ? doc.at("unitary") : doc);
  if (cfg.dims.size() != 2) throw InputError("--dims takes two integers");
  const SubsystemDims dims{cfg.dims[0], cfg.dims[1]};
  if (u.rows() != dims.joint() || u.cols() != dims.joint()) {
    throw InputError("matrix does not match --dims");
  }
  const auto factors = factor_local_unitary(u, dims, cfg.tol);
  json result{{"factorable", factors.has_value()}};
  if (factors) {
    result["system"] = matrix_to_json(factors->system);
    result["environment"] = matrix_to_json(factors->environment);
    result["residual"] = factors->residual;
  }
  emit(dump(result), cfg, out);
  return factors ? kOk : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Construct and verify Kraus representations of qubit dynamics", "krauslab"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  app.add_option("--tol", cfg.tol_flag, "Absolute max-norm tolerance (default 1e-10)");
  app.add_option("--format", cfg.format, "Output format for tables")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", cfg.seed, "Seed for randomized subcommands");
  app.add_option("--out", cfg.out_path, "Also write the primary result to this path");

  auto* validate = app.add_subcommand("validate", "Check a state file");
  validate->add_option("state", cfg.state_path)->required();

  auto* kraus = app.add_subcommand("kraus", "Build Kraus operators connecting two states");
  kraus->add_option("rho0", cfg.state_path)->required();
  kraus->add_option("rhot", cfg.target_path)->required();
  kraus->add_option("--method", cfg.method)
      ->check(CLI::IsMember({"general", "closed-form", "measure-prepare"}));

  auto* evolve = app.add_subcommand("evolve", "Reduced dynamics and delta_rho at one time");
  evolve->add_option("scenario", cfg.scenario_path)->required();
  evolve->add_option("--t", cfg.t)->required();

  auto* sweep = app.add_subcommand("sweep", "Tabulate the dynamics over a time grid");
  sweep->add_option("scenario", cfg.scenario_path)->required();
  sweep->add_option("--t-start", cfg.t_start)->required();
  sweep->add_option("--t-end", cfg.t_end)->required();
  sweep->add_option("--steps", cfg.steps)->required();

  auto* verify = app.add_subcommand("verify", "Check a Kraus set against a state pair");
  verify->add_option("kraus", cfg.kraus_path)->required();
  verify->add_option("rho0", cfg.state_path)->required();
  verify->add_option("rhot", cfg.target_path)->required();

  auto* remix = app.add_subcommand("remix", "Mix Kraus operators with a unitary");
  remix->add_option("kraus", cfg.kraus_path)->required();
  remix->add_option("--unitary", cfg.unitary_path, "Matrix JSON; random from --seed if absent");

  auto* factor = app.add_subcommand("factor", "Test whether a joint unitary is local");
  factor->add_option("unitary", cfg.matrix_path)->required();
  factor->add_option("--dims", cfg.dims)->expected(2)->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    cfg.tol = resolve_tol(cfg);
    if (validate->parsed()) return cmd_validate(cfg, out);
    if (kraus->parsed()) return cmd_kraus(cfg, out);
    if (evolve->parsed()) return cmd_evolve(cfg, out, err);
    if (sweep->parsed()) return cmd_sweep(cfg, out, err);
    if (verify->parsed()) return cmd_verify(cfg, out);
    if (remix->parsed()) return cmd_remix(cfg, out);
    if (factor->parsed()) return cmd_factor(cfg, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kCheckFailed;
  }
  return kInvalidInput;
}

}  // namespace krauslab::cli
