#include "ocal/baselines.hpp"

#include <cmath>
#include <deque>
#include <string>

namespace ocal {

std::string_view to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::Mosp: return "mosp";
    case BaselineKind::Cl: return "cl";
    case BaselineKind::Ny: return "ny";
    case BaselineKind::Czp: return "czp";
    case BaselineKind::NyDelayed: return "ny-delayed";
  }
  return "unknown";
}

BaselineConfig BaselineConfig::reference_preset(BaselineKind kind, std::size_t horizon, std::size_t tau) {
  const double T = static_cast<double>(horizon);
  const double tT = tau >= 1 ? static_cast<double>(tau) * T : T;
  BaselineConfig cfg;
  cfg.kind = kind;
  cfg.tau = tau;
  cfg.horizon = horizon;
  switch (kind) {
    case BaselineKind::Mosp:
      cfg.alpha = cfg.mu = std::pow(T, -1.0 / 3.0);
      break;
    case BaselineKind::Cl:
      cfg.eta = 2.0 / std::sqrt(T);
      cfg.delta = 0.01;
      break;
    case BaselineKind::Ny:
      cfg.alpha = T;
      cfg.nu = std::sqrt(T);
      break;
    case BaselineKind::Czp:
      cfg.eta = 1.0 / std::sqrt(tT);
      cfg.delta = 10.0;
      break;
    case BaselineKind::NyDelayed:
      cfg.alpha = tT;
      cfg.nu = std::sqrt(tT);
      break;
  }
  return cfg;
}

void validate(const BaselineConfig& cfg) {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string("baseline: ") + what + " must be positive");
  };
  switch (cfg.kind) {
    case BaselineKind::Mosp: positive(cfg.alpha, "alpha"); positive(cfg.mu, "mu"); break;
    case BaselineKind::Cl:
    case BaselineKind::Czp:
      positive(cfg.eta, "eta");
      if (!(cfg.delta >= 0.0)) throw InvalidArgument("baseline: delta must be nonnegative");
      break;
    case BaselineKind::Ny:
    case BaselineKind::NyDelayed: positive(cfg.alpha, "alpha"); positive(cfg.nu, "nu"); break;
  }
  const bool delayed = cfg.kind == BaselineKind::Czp || cfg.kind == BaselineKind::NyDelayed;
  if (!delayed && cfg.tau != 0) {
    throw InvalidArgument("baseline: " + std::string(to_string(cfg.kind)) + " has no delayed variant");
  }
  if (cfg.horizon <= cfg.tau) throw InvalidArgument("baseline: horizon must exceed the delay");
}

namespace {

Vector lagrangian_direction(const RoundOracle& oracle, const Vector& x, const Vector& lambda, double loss_weight) {
  return loss_weight * oracle.loss_subgradient(x) + oracle.constraint_jacobian(x) * lambda;
}

}  // namespace

BaselineState mosp_step(const BaselineState& state, const RoundOracle& oracle, const FeasibleSet& set,
                        double alpha, double mu) {
  if (!oracle.linear_constraints()) {
    throw UnsupportedProblem("mosp: the saddle-point step is only tractable for affine constraints");
  }
  BaselineState next;
  next.x = project(set, state.x - alpha * lagrangian_direction(oracle, state.x, state.lambda, 1.0));
  next.lambda = positive_part(state.lambda + mu * oracle.constraints(next.x));
  return next;
}

BaselineState cl_step(const BaselineState& state, const RoundOracle& oracle, const FeasibleSet& set,
                      double eta, double delta) {
  BaselineState next;
  next.x = project(set, state.x - eta * lagrangian_direction(oracle, state.x, state.lambda, 1.0));
  next.lambda = positive_part(state.lambda + eta * (oracle.constraints(state.x) - delta * eta * state.lambda));
  return next;
}

BaselineState ny_step(const BaselineState& current, const BaselineState& delayed, const RoundOracle& oracle,
                      const FeasibleSet& set, double alpha, double nu, std::size_t tau) {
  BaselineState next;
  next.x = project(set, current.x - lagrangian_direction(oracle, delayed.x, delayed.lambda, nu) / (2.0 * alpha));
  if (tau == 0) {
    next.lambda = positive_part(current.lambda + oracle.constraints(next.x));
  } else {
    const Vector linearized = oracle.constraints(delayed.x) +
                              oracle.constraint_jacobian(delayed.x).transpose() * (next.x - delayed.x);
    next.lambda = positive_part(current.lambda + linearized);
  }
  return next;
}

BaselineState czp_step(const BaselineState& current, const BaselineState& delayed, const RoundOracle& oracle,
                       const FeasibleSet& set, double eta, double delta) {
  BaselineState next;
  next.x = project(set, current.x - eta * lagrangian_direction(oracle, delayed.x, delayed.lambda, 1.0));
  next.lambda = positive_part(current.lambda + eta * (oracle.constraints(delayed.x) - delta * eta * delayed.lambda));
  return next;
}

Trajectory run_baseline(const ProblemInstance& problem, const BaselineConfig& cfg) {
  validate(cfg);
  const std::size_t T = cfg.horizon;
  const std::size_t tau = cfg.tau;
  if (problem.horizon() < T) throw InvalidArgument("run_baseline: problem has fewer rounds than the horizon");
  const FeasibleSet& set = problem.set;
  const Vector x0 = cfg.x0 ? project(set, *cfg.x0) : project(set, Vector::Zero(static_cast<Eigen::Index>(set.dim())));

  // history holds (x_s, lambda_s) for s = t - tau .. t.
  std::deque<BaselineState> history(tau + 1, BaselineState{x0, Vector::Zero(static_cast<Eigen::Index>(problem.num_constraints()))});
  Trajectory traj;
  traj.decisions.reserve(T);
  traj.multipliers.reserve(T);
  for (std::size_t t = 0; t < tau + T; ++t) {
    const BaselineState& current = history.back();
    if (t < T) {
      traj.decisions.push_back(current.x);
      traj.multipliers.push_back(current.lambda);
    }
    if (t < tau) {
      // Blind rounds: the first tau+1 states are already x_0, lambda_0 = 0.
      continue;
    }
    const RoundOracle& oracle = problem.round(t - tau);
    const BaselineState& delayed = history.front();
    BaselineState next;
    switch (cfg.kind) {
      case BaselineKind::Mosp: next = mosp_step(current, oracle, set, cfg.alpha, cfg.mu); break;
      case BaselineKind::Cl: next = cl_step(current, oracle, set, cfg.eta, cfg.delta); break;
      case BaselineKind::Ny: next = ny_step(current, current, oracle, set, cfg.alpha, cfg.nu, 0); break;
      case BaselineKind::Czp: next = czp_step(current, delayed, oracle, set, cfg.eta, cfg.delta); break;
      case BaselineKind::NyDelayed: next = ny_step(current, delayed, oracle, set, cfg.alpha, cfg.nu, tau); break;
    }
    history.push_back(std::move(next));
    history.pop_front();
  }
  return traj;
}

}  // namespace ocal
