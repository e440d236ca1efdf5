#pragma once

#include "ocal/core.hpp"
#include "ocal/instance.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ocal {

/// Per-round records of one run. Index k holds the prefix ending at round k
/// (rounds counted from 1 in reports, so k = t - 1).
struct MetricsSeries {
  std::vector<double> cum_regret;     // Reg(t)
  std::vector<Vector> cum_violation;  // Vio^(i)(t), one entry per constraint
  std::vector<double> lambda_norm;    // ||lambda_t||; empty when not tracked

  std::size_t rounds() const { return cum_regret.size(); }
  double avg_regret(std::size_t k) const;
  /// max_i Vio^(i)(t) / t.
  double max_avg_violation(std::size_t k) const;
  /// ||[Vio(t)]_+||.
  double dynamic_violation(std::size_t k) const;
};

/// Reg(t) = sum_{s < t} [f_s(x_s) - f_s(x*)] for t = 1..T.
std::vector<double> regret_series(const Trajectory& trajectory, const ProblemInstance& problem, const Vector& x_star);

/// Per-constraint prefix sums of g_s(x_s).
std::vector<Vector> violation_series(const Trajectory& trajectory, const ProblemInstance& problem);

/// ||[v]_+|| for a cumulative violation vector.
double dynamic_violation(const Vector& cumulative);

MetricsSeries compute_metrics(const Trajectory& trajectory, const ProblemInstance& problem, const Vector& x_star);

/// Coefficients of the multiplier bound
/// psi(sigma, alpha, s) = k0 + (tau+1) k1 alpha / s + k2 sigma + k3 sigma s.
struct PsiCoefficients {
  double k0 = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
};

/// k0 = 4 kappa_f D / eps0, k1 = D^2 / eps0, k2 = nu_g^2 / eps0 - nu_g,
/// k3 = 2 nu_g + eps0 / 2 + (8 nu_g^2 / eps0) ln(32 nu_g^2 / eps0^2).
/// Throws InvalidArgument for eps0 <= 0 and NumericError if k2 < 0, which
/// would contradict eps0 <= nu_g.
PsiCoefficients psi_coefficients(const ProblemConstants& constants);

double psi_bound(const PsiCoefficients& k, double sigma, double alpha, std::size_t tau, long s);
double psi_bound(const ProblemConstants& constants, double sigma, double alpha, std::size_t tau, long s);

/// Minimum of psi over s = 1 .. 2 ceil(sqrt(T (tau+1))).
double min_psi_bound(const ProblemConstants& constants, double sigma, double alpha, std::size_t tau,
                     std::size_t horizon);

/// max_t ||lambda_t||.
double max_multiplier_norm(const Trajectory& trajectory);

/// max_t | ||lambda_{t+1}|| - ||lambda_t|| |.
double max_multiplier_step(const Trajectory& trajectory);

/// sum_{l < s} [w_{t-tau+l} - w_{t+l+1}]; requires t >= tau and t + s < w.size().
double delayed_telescoping_sum(const std::vector<double>& w, std::size_t tau, std::size_t t, std::size_t s);

// ---------------------------------------------------------------------------
// CSV

/// Identifies the cell a CSV row belongs to.
struct RunLabel {
  std::string problem;
  std::string algo;
  std::uint64_t seed = 0;
  std::size_t tau = 0;
  std::size_t horizon = 0;
};

struct LabeledSeries {
  RunLabel label;
  MetricsSeries series;
};

/// Round-trip exact text for a double (17 significant digits).
std::string format_double(double v);

/// problem,algo,seed,tau,T,t,cum_regret,avg_regret,max_avg_vio,vio_1..vio_p,lambda_norm
std::string csv_header(std::size_t num_constraints);

void write_csv_rows(std::ostream& out, const RunLabel& label, const MetricsSeries& series);

/// Reads a CSV written by write_csv_rows back into series grouped by label, in
/// order of first appearance. Throws InvalidArgument on malformed input.
std::vector<LabeledSeries> read_csv(std::istream& in);

}  // namespace ocal
