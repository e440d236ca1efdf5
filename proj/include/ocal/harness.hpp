#pragma once

#include "ocal/baselines.hpp"
#include "ocal/instance.hpp"
#include "ocal/malm.hpp"
#include "ocal/metrics.hpp"
#include "ocal/problems.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ocal {

/// Configuration error in an experiment description (maps to exit code 2).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

struct ExperimentConfig {
  std::string problem = "oqcqp";  // nra | olr | oqcqp
  std::vector<std::string> algos{"malm"};  // malm | mosp | cl | ny | czp | ny-delayed
  std::size_t horizon = 1000;
  std::vector<std::size_t> taus{0};
  std::vector<std::uint64_t> seeds{1};
  std::string out = "-";  // "-" writes to stdout
  double tol_inner = 1e-9;
  double tol_comparator = 1e-7;
  std::optional<ModelKind> model;  // overrides the MALM model of the problem preset

  NraParams nra;
  OlrParams olr;
  OqcqpParams oqcqp;
};

/// Throws UsageError when the configuration cannot run.
void validate(const ExperimentConfig& cfg);

/// The configuration as an INI section that the command-line tool reads back
/// with --config, so a run can be repeated exactly.
std::string to_ini(const ExperimentConfig& cfg, const std::string& section = "run");

/// Named presets: nra-paper, olr-paper, oqcqp-paper, smoke.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

ProblemInstance make_problem(const ExperimentConfig& cfg, std::uint64_t seed, std::size_t horizon);

/// MALM parameters used for a problem: plain model with alpha = 0.1 sqrt(T),
/// sigma = 100/sqrt(T) and x0 = 0 for nra; linearized with alpha = 10 sqrt(T),
/// sigma = 10/sqrt(T) for olr; linearized with the standard stepsizes for oqcqp.
MalmConfig malm_preset(const std::string& problem, std::size_t horizon, std::size_t tau);

BaselineKind parse_baseline(const std::string& algo);

struct CellFailure {
  RunLabel label;
  std::string message;
};

struct ExperimentResult {
  std::vector<LabeledSeries> cells;
  std::vector<CellFailure> failures;
  int exit_code() const { return failures.empty() ? kExitSuccess : kExitNumeric; }
};

/// Runs every (seed, tau, algo) cell. The instance and comparator are computed
/// once per seed. A numeric failure aborts only its own cell; when the
/// comparator fails every cell of that seed fails.
/// Rows are written to `csv` (header first) in seed, tau, algo order.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream& csv);

enum class SweepAxis { Tau, Horizon, Seed };
SweepAxis parse_sweep_axis(const std::string& name);

/// Runs the configuration once per axis value and concatenates the cells in
/// value order under a single header. Throws UsageError for an empty list.
ExperimentResult sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<std::uint64_t>& values,
                       std::ostream& csv);

}  // namespace ocal
