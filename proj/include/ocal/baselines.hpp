#pragma once

#include "ocal/core.hpp"
#include "ocal/instance.hpp"

#include <optional>
#include <string_view>

namespace ocal {

// Online primal-dual baselines. All of them are projected primal steps on a
// (modified) Lagrangian followed by a projected dual step.

enum class BaselineKind { Mosp, Cl, Ny, Czp, NyDelayed };

std::string_view to_string(BaselineKind kind);

struct BaselineConfig {
  BaselineKind kind = BaselineKind::Cl;
  double alpha = 0.0;  // MOSP primal step; NY proximal weight
  double mu = 0.0;     // MOSP dual step
  double eta = 0.0;    // CL / CZP step
  double delta = 0.0;  // CL / CZP dual regularization
  double nu = 0.0;     // NY loss weight
  std::size_t tau = 0;
  std::size_t horizon = 0;
  std::optional<Vector> x0;

  /// Parameter settings of the reference experiments:
  /// MOSP alpha = mu = T^{-1/3}; CL eta = 2 T^{-1/2}, delta = 0.01;
  /// NY alpha = T, nu = T^{1/2}; CZP eta = (tau T)^{-1/2} (T^{-1/2} if tau = 0),
  /// delta = 10; delayed NY alpha = tau T, nu = (tau T)^{1/2} (T, T^{1/2} if tau = 0).
  static BaselineConfig reference_preset(BaselineKind kind, std::size_t horizon, std::size_t tau);
};

void validate(const BaselineConfig& cfg);

struct BaselineState {
  Vector x;
  Vector lambda;
};

/// x+ = P[x - alpha (grad f(x) + J(x) lambda)], lambda+ = [lambda + mu g(x+)]_+.
/// Throws UnsupportedProblem unless the constraints are affine.
BaselineState mosp_step(const BaselineState& state, const RoundOracle& oracle, const FeasibleSet& set,
                        double alpha, double mu);

/// x+ = P[x - eta (grad f(x) + J(x) lambda)], lambda+ = [lambda + eta (g(x) - delta eta lambda)]_+.
BaselineState cl_step(const BaselineState& state, const RoundOracle& oracle, const FeasibleSet& set,
                      double eta, double delta);

/// Primal step from the delayed pair (x_{t-tau}, lambda_{t-tau}) with the oracle of
/// round t - tau:  x+ = P[x_t - (nu grad f(x_{t-tau}) + J(x_{t-tau}) lambda_{t-tau}) / (2 alpha)].
/// Dual step: [lambda_t + g(x+)]_+ when tau = 0, otherwise the linearized
/// [lambda_t + g(x_{t-tau}) + J(x_{t-tau})^T (x+ - x_{t-tau})]_+.
BaselineState ny_step(const BaselineState& current, const BaselineState& delayed, const RoundOracle& oracle,
                      const FeasibleSet& set, double alpha, double nu, std::size_t tau);

/// x+ = P[x_t - eta (grad f(x_{t-tau}) + J(x_{t-tau}) lambda_{t-tau})],
/// lambda+ = [lambda_t + eta (g(x_{t-tau}) - delta eta lambda_{t-tau})]_+.
BaselineState czp_step(const BaselineState& current, const BaselineState& delayed, const RoundOracle& oracle,
                       const FeasibleSet& set, double eta, double delta);

/// Runs the baseline on the delayed-feedback schedule used for MALM.
Trajectory run_baseline(const ProblemInstance& problem, const BaselineConfig& cfg);

}  // namespace ocal
