#include "ocal/harness.hpp"

#include "ocal/offline.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace ocal {

namespace {

const std::vector<std::string> kProblems{"nra", "olr", "oqcqp"};
const std::vector<std::string> kAlgos{"malm", "mosp", "cl", "ny", "czp", "ny-delayed"};

bool delayed_algo(const std::string& algo) { return algo == "malm" || algo == "czp" || algo == "ny-delayed"; }

bool contains_name(const std::vector<std::string>& names, const std::string& s) {
  return std::find(names.begin(), names.end(), s) != names.end();
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  if (!contains_name(kProblems, cfg.problem)) throw UsageError("unknown problem '" + cfg.problem + "'");
  if (cfg.algos.empty()) throw UsageError("no algorithm given");
  if (cfg.seeds.empty()) throw UsageError("at least one seed is required");
  if (cfg.taus.empty()) throw UsageError("at least one delay is required");
  for (const std::string& a : cfg.algos) {
    if (!contains_name(kAlgos, a)) throw UsageError("unknown algorithm '" + a + "'");
    if (a == "mosp" && cfg.problem != "nra") throw UsageError("mosp needs affine constraints (problem nra)");
    for (std::size_t tau : cfg.taus) {
      if (tau != 0 && !delayed_algo(a)) throw UsageError("algorithm '" + a + "' has no delayed variant");
    }
  }
  for (std::size_t tau : cfg.taus) {
    if (cfg.horizon <= tau) throw UsageError("T must exceed every delay");
  }
  if (!(cfg.tol_inner > 0.0) || !(cfg.tol_comparator > 0.0)) throw UsageError("tolerances must be positive");
  if (cfg.nra.mapping_nodes == 0 || cfg.nra.data_centers == 0) throw UsageError("nra needs J, K >= 1");
  if (cfg.olr.dim == 0 || cfg.olr.samples == 0) throw UsageError("olr needs n, k >= 1");
  if (!(cfg.olr.bound > 0.0) || !std::isfinite(cfg.olr.bound)) throw UsageError("olr needs M > 0");
  if (cfg.oqcqp.dim == 0 || cfg.oqcqp.constraints == 0) throw UsageError("oqcqp needs n, p >= 1");
  if (!(cfg.oqcqp.radius > 0.0) || !std::isfinite(cfg.oqcqp.radius)) throw UsageError("oqcqp needs R > 0");
  if (cfg.model && *cfg.model == ModelKind::Plain && cfg.problem == "olr" &&
      contains_name(cfg.algos, "malm")) {
    throw UsageError("the plain model needs a differentiable problem; olr is not");
  }
}

std::string to_ini(const ExperimentConfig& cfg, const std::string& section) {
  auto join = [](const auto& items) {
    std::ostringstream os;
    for (std::size_t i = 0; i < items.size(); ++i) os << (i ? "," : "") << items[i];
    return os.str();
  };
  std::ostringstream os;
  os << '[' << section << "]\n";
  os << "problem=" << cfg.problem << '\n';
  os << "algo=\"" << join(cfg.algos) << "\"\n";
  os << "T=" << cfg.horizon << '\n';
  os << "tau=\"" << join(cfg.taus) << "\"\n";
  os << "seed=\"" << join(cfg.seeds) << "\"\n";
  os << "out=" << cfg.out << '\n';
  os << "tol-inner=" << format_double(cfg.tol_inner) << '\n';
  os << "tol-comparator=" << format_double(cfg.tol_comparator) << '\n';
  if (cfg.model) os << "model=" << to_string(*cfg.model) << '\n';
  os << "nra-J=" << cfg.nra.mapping_nodes << '\n';
  os << "nra-K=" << cfg.nra.data_centers << '\n';
  os << "olr-n=" << cfg.olr.dim << '\n';
  os << "olr-k=" << cfg.olr.samples << '\n';
  os << "olr-M=" << format_double(cfg.olr.bound) << '\n';
  os << "oqcqp-n=" << cfg.oqcqp.dim << '\n';
  os << "oqcqp-p=" << cfg.oqcqp.constraints << '\n';
  os << "oqcqp-R=" << format_double(cfg.oqcqp.radius) << '\n';
  return os.str();
}

std::vector<std::string> preset_names() { return {"nra-paper", "olr-paper", "oqcqp-paper", "smoke"}; }

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig cfg;
  if (name == "nra-paper") {
    cfg.problem = "nra";
    cfg.algos = {"malm", "mosp", "cl", "ny"};
    cfg.horizon = 10000;
  } else if (name == "olr-paper") {
    cfg.problem = "olr";
    cfg.algos = {"malm", "cl", "ny"};
    cfg.horizon = 5000;
  } else if (name == "oqcqp-paper") {
    cfg.problem = "oqcqp";
    cfg.algos = {"malm", "czp", "ny-delayed"};
    cfg.horizon = 1000;
    cfg.taus = {0, 10, 20, 50, 100};
  } else if (name == "smoke") {
    cfg.problem = "oqcqp";
    cfg.algos = {"malm", "cl", "ny", "czp", "ny-delayed"};
    cfg.horizon = 100;
  } else {
    throw UsageError("unknown preset '" + name + "'");
  }
  return cfg;
}

ProblemInstance make_problem(const ExperimentConfig& cfg, std::uint64_t seed, std::size_t horizon) {
  if (cfg.problem == "nra") return generate_nra(cfg.nra, horizon, seed);
  if (cfg.problem == "olr") return generate_olr(cfg.olr, horizon, seed);
  if (cfg.problem == "oqcqp") return generate_oqcqp(cfg.oqcqp, horizon, seed);
  throw UsageError("unknown problem '" + cfg.problem + "'");
}

MalmConfig malm_preset(const std::string& problem, std::size_t horizon, std::size_t tau) {
  const double rootT = std::sqrt(static_cast<double>(horizon));
  if (problem == "nra") {
    MalmConfig cfg = MalmConfig::standard_stepsizes(horizon, tau, ModelKind::Plain);
    cfg.alpha = 0.1 * rootT;
    cfg.sigma = 100.0 / rootT;
    return cfg;
  }
  if (problem == "olr") {
    MalmConfig cfg = MalmConfig::standard_stepsizes(horizon, tau, ModelKind::Linearized);
    cfg.alpha = 10.0 * rootT;
    cfg.sigma = 10.0 / rootT;
    return cfg;
  }
  if (problem == "oqcqp") return MalmConfig::standard_stepsizes(horizon, tau, ModelKind::Linearized);
  throw UsageError("unknown problem '" + problem + "'");
}

BaselineKind parse_baseline(const std::string& algo) {
  if (algo == "mosp") return BaselineKind::Mosp;
  if (algo == "cl") return BaselineKind::Cl;
  if (algo == "ny") return BaselineKind::Ny;
  if (algo == "czp") return BaselineKind::Czp;
  if (algo == "ny-delayed") return BaselineKind::NyDelayed;
  throw UsageError("unknown baseline '" + algo + "'");
}

namespace {

Trajectory run_algorithm(const ExperimentConfig& cfg, const ProblemInstance& problem, const std::string& algo,
                         std::size_t tau) {
  if (algo == "malm") {
    MalmConfig mc = malm_preset(cfg.problem, cfg.horizon, tau);
    if (cfg.model) mc.model = *cfg.model;
    mc.inner.tol = cfg.tol_inner;
    return run_malm(problem, mc);
  }
  return run_baseline(problem, BaselineConfig::reference_preset(parse_baseline(algo), cfg.horizon, tau));
}

void run_cells(const ExperimentConfig& cfg, ExperimentResult& result, std::ostream& csv) {
  for (std::uint64_t seed : cfg.seeds) {
    std::optional<ProblemInstance> problem;
    Vector x_star;
    std::string setup_error;
    try {
      problem = make_problem(cfg, seed, cfg.horizon);
    } catch (const InfeasibleProblem& e) {
      throw UsageError(e.what());
    }
    try {
      x_star = solve_comparator(*problem, cfg.tol_comparator);
    } catch (const std::exception& e) {
      setup_error = e.what();
    }
    for (std::size_t tau : cfg.taus) {
      for (const std::string& algo : cfg.algos) {
        RunLabel label{cfg.problem, algo, seed, tau, cfg.horizon};
        if (!setup_error.empty()) {
          result.failures.push_back({label, setup_error});
          continue;
        }
        try {
          const Trajectory traj = run_algorithm(cfg, *problem, algo, tau);
          MetricsSeries series = compute_metrics(traj, *problem, x_star);
          write_csv_rows(csv, label, series);
          result.cells.push_back({label, std::move(series)});
        } catch (const UsageError&) {
          throw;
        } catch (const InvalidArgument& e) {
          throw UsageError(e.what());
        } catch (const UnsupportedProblem& e) {
          throw UsageError(e.what());
        } catch (const std::exception& e) {
          result.failures.push_back({label, e.what()});
        }
      }
    }
  }
}

std::size_t constraint_count(const ExperimentConfig& cfg) {
  if (cfg.problem == "nra") return cfg.nra.mapping_nodes + cfg.nra.data_centers;
  if (cfg.problem == "olr") return 1;
  return cfg.oqcqp.constraints;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream& csv) {
  validate(cfg);
  csv << csv_header(constraint_count(cfg)) << '\n';
  ExperimentResult result;
  run_cells(cfg, result, csv);
  return result;
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "tau") return SweepAxis::Tau;
  if (name == "T") return SweepAxis::Horizon;
  if (name == "seed") return SweepAxis::Seed;
  throw UsageError("unknown sweep axis '" + name + "' (expected tau, T or seed)");
}

ExperimentResult sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<std::uint64_t>& values,
                       std::ostream& csv) {
  if (values.empty()) throw UsageError("sweep needs at least one axis value");
  std::vector<ExperimentConfig> cells;
  for (std::uint64_t v : values) {
    ExperimentConfig c = cfg;
    switch (axis) {
      case SweepAxis::Tau: c.taus = {static_cast<std::size_t>(v)}; break;
      case SweepAxis::Horizon: c.horizon = static_cast<std::size_t>(v); break;
      case SweepAxis::Seed: c.seeds = {v}; break;
    }
    validate(c);
    cells.push_back(std::move(c));
  }
  csv << csv_header(constraint_count(cfg)) << '\n';
  ExperimentResult result;
  for (const ExperimentConfig& c : cells) run_cells(c, result, csv);
  return result;
}

}  // namespace ocal
