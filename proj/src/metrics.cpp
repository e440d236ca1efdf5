#include "ocal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace ocal {

double MetricsSeries::avg_regret(std::size_t k) const { return cum_regret.at(k) / static_cast<double>(k + 1); }

double MetricsSeries::max_avg_violation(std::size_t k) const {
  return cum_violation.at(k).maxCoeff() / static_cast<double>(k + 1);
}

double MetricsSeries::dynamic_violation(std::size_t k) const { return ocal::dynamic_violation(cum_violation.at(k)); }

namespace {

void check_lengths(const Trajectory& trajectory, const ProblemInstance& problem) {
  if (trajectory.decisions.size() > problem.horizon()) {
    throw InvalidArgument("metrics: trajectory is longer than the problem horizon");
  }
}

}  // namespace

std::vector<double> regret_series(const Trajectory& trajectory, const ProblemInstance& problem, const Vector& x_star) {
  check_lengths(trajectory, problem);
  std::vector<double> out;
  out.reserve(trajectory.decisions.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < trajectory.decisions.size(); ++t) {
    const RoundOracle& r = problem.round(t);
    sum += r.loss(trajectory.decisions[t]) - r.loss(x_star);
    out.push_back(sum);
  }
  return out;
}

std::vector<Vector> violation_series(const Trajectory& trajectory, const ProblemInstance& problem) {
  check_lengths(trajectory, problem);
  std::vector<Vector> out;
  out.reserve(trajectory.decisions.size());
  Vector sum = Vector::Zero(static_cast<Eigen::Index>(problem.num_constraints()));
  for (std::size_t t = 0; t < trajectory.decisions.size(); ++t) {
    sum += problem.round(t).constraints(trajectory.decisions[t]);
    out.push_back(sum);
  }
  return out;
}

double dynamic_violation(const Vector& cumulative) { return cumulative.cwiseMax(0.0).norm(); }

MetricsSeries compute_metrics(const Trajectory& trajectory, const ProblemInstance& problem, const Vector& x_star) {
  MetricsSeries m;
  m.cum_regret = regret_series(trajectory, problem, x_star);
  m.cum_violation = violation_series(trajectory, problem);
  m.lambda_norm.reserve(trajectory.multipliers.size());
  for (const Vector& l : trajectory.multipliers) m.lambda_norm.push_back(l.norm());
  return m;
}

PsiCoefficients psi_coefficients(const ProblemConstants& c) {
  if (!(c.eps0 > 0.0)) throw InvalidArgument("psi: the Slater margin eps0 must be positive");
  const double D = c.diameter, nu = c.nu_g, eps = c.eps0;
  PsiCoefficients k;
  k.k0 = 4.0 * c.kappa_f * D / eps;
  k.k1 = D * D / eps;
  k.k2 = nu * nu / eps - nu;
  k.k3 = 2.0 * nu + eps / 2.0 + (8.0 * nu * nu / eps) * std::log(32.0 * nu * nu / (eps * eps));
  if (k.k2 < 0.0) throw NumericError("psi: nu_g is smaller than eps0, so the constants are inconsistent");
  return k;
}

double psi_bound(const PsiCoefficients& k, double sigma, double alpha, std::size_t tau, long s) {
  if (s < 1) throw InvalidArgument("psi: s must be a positive integer");
  const double sd = static_cast<double>(s);
  return k.k0 + static_cast<double>(tau + 1) * k.k1 * alpha / sd + k.k2 * sigma + k.k3 * sigma * sd;
}

double psi_bound(const ProblemConstants& constants, double sigma, double alpha, std::size_t tau, long s) {
  return psi_bound(psi_coefficients(constants), sigma, alpha, tau, s);
}

double min_psi_bound(const ProblemConstants& constants, double sigma, double alpha, std::size_t tau,
                     std::size_t horizon) {
  const PsiCoefficients k = psi_coefficients(constants);
  const auto s_max = static_cast<long>(2.0 * std::ceil(std::sqrt(static_cast<double>(horizon) * static_cast<double>(tau + 1))));
  double best = std::numeric_limits<double>::infinity();
  for (long s = 1; s <= std::max(s_max, 1L); ++s) best = std::min(best, psi_bound(k, sigma, alpha, tau, s));
  return best;
}

double max_multiplier_norm(const Trajectory& trajectory) {
  double m = 0.0;
  for (const Vector& l : trajectory.multipliers) m = std::max(m, l.norm());
  return m;
}

double max_multiplier_step(const Trajectory& trajectory) {
  double m = 0.0;
  for (std::size_t t = 1; t < trajectory.multipliers.size(); ++t) {
    m = std::max(m, std::abs(trajectory.multipliers[t].norm() - trajectory.multipliers[t - 1].norm()));
  }
  return m;
}

double delayed_telescoping_sum(const std::vector<double>& w, std::size_t tau, std::size_t t, std::size_t s) {
  if (t < tau || t + s >= w.size()) throw InvalidArgument("telescoping sum: index out of range");
  double sum = 0.0;
  for (std::size_t l = 0; l < s; ++l) sum += w[t - tau + l] - w[t + l + 1];
  return sum;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_header(std::size_t num_constraints) {
  std::string h = "problem,algo,seed,tau,T,t,cum_regret,avg_regret,max_avg_vio";
  for (std::size_t i = 1; i <= num_constraints; ++i) h += ",vio_" + std::to_string(i);
  h += ",lambda_norm";
  return h;
}

void write_csv_rows(std::ostream& out, const RunLabel& label, const MetricsSeries& series) {
  if (series.cum_violation.size() != series.rounds()) throw InvalidArgument("csv: series lengths differ");
  if (!series.lambda_norm.empty() && series.lambda_norm.size() != series.rounds()) {
    throw InvalidArgument("csv: multiplier series length differs");
  }
  const std::string prefix = label.problem + "," + label.algo + "," + std::to_string(label.seed) + "," +
                             std::to_string(label.tau) + "," + std::to_string(label.horizon) + ",";
  for (std::size_t k = 0; k < series.rounds(); ++k) {
    out << prefix << (k + 1) << ',' << format_double(series.cum_regret[k]) << ','
        << format_double(series.avg_regret(k)) << ',' << format_double(series.max_avg_violation(k));
    const Vector& v = series.cum_violation[k];
    for (Eigen::Index i = 0; i < v.size(); ++i) out << ',' << format_double(v(i));
    out << ',';
    if (!series.lambda_norm.empty()) out << format_double(series.lambda_norm[k]);
    out << '\n';
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw InvalidArgument("csv: bad number '" + s + "'");
  return v;
}

unsigned long long parse_unsigned(const std::string& s) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) throw InvalidArgument("csv: bad integer '" + s + "'");
  return v;
}

}  // namespace

std::vector<LabeledSeries> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("csv: missing header");
  const std::vector<std::string> header = split(line);
  if (header.size() < 10 || header.back() != "lambda_norm") throw InvalidArgument("csv: unrecognized header");
  const std::size_t p = header.size() - 10;
  if (line != csv_header(p)) throw InvalidArgument("csv: unrecognized header");

  std::vector<LabeledSeries> cells;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split(line);
    if (f.size() != header.size()) throw InvalidArgument("csv: wrong field count in '" + line + "'");
    RunLabel label{f[0], f[1], parse_unsigned(f[2]), static_cast<std::size_t>(parse_unsigned(f[3])),
                   static_cast<std::size_t>(parse_unsigned(f[4]))};
    auto same = [&](const LabeledSeries& c) {
      return c.label.problem == label.problem && c.label.algo == label.algo && c.label.seed == label.seed &&
             c.label.tau == label.tau && c.label.horizon == label.horizon;
    };
    if (cells.empty() || !same(cells.back())) {
      if (std::any_of(cells.begin(), cells.end(), same)) throw InvalidArgument("csv: interleaved cell rows");
      cells.push_back(LabeledSeries{label, {}});
    }
    MetricsSeries& s = cells.back().series;
    if (parse_unsigned(f[5]) != s.rounds() + 1) throw InvalidArgument("csv: rounds out of order");
    s.cum_regret.push_back(parse_double(f[6]));
    Vector v(static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i) v(static_cast<Eigen::Index>(i)) = parse_double(f[9 + i]);
    s.cum_violation.push_back(std::move(v));
    const std::string& lam = f.back();
    if (!lam.empty()) {
      if (s.lambda_norm.size() + 1 != s.rounds()) throw InvalidArgument("csv: partially missing multiplier norms");
      s.lambda_norm.push_back(parse_double(lam));
    } else if (!s.lambda_norm.empty()) {
      throw InvalidArgument("csv: partially missing multiplier norms");
    }
  }
  return cells;
}

}  // namespace ocal
