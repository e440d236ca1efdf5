#pragma once

#include "ocal/core.hpp"
#include "ocal/instance.hpp"
#include "ocal/models.hpp"

#include <cstddef>
#include <deque>
#include <optional>

namespace ocal {

struct InnerSolverConfig {
  double tol = 1e-9;  // projected-gradient residual
  long max_iters = 100000;
};

struct MalmConfig {
  double alpha = 1.0;  // proximal weight
  double sigma = 1.0;  // penalty
  std::size_t tau = 0;
  std::size_t horizon = 0;
  ModelKind model = ModelKind::Linearized;
  double iota = -1.0;  // quadratic model modulus; negative: take it from the oracle
  InnerSolverConfig inner;
  std::optional<Vector> x0;  // defaults to the projection of the origin

  /// alpha = sqrt(T/(tau+1)), sigma = sqrt((tau+1)/T).
  static MalmConfig standard_stepsizes(std::size_t horizon, std::size_t tau, ModelKind model);
};

void validate(const MalmConfig& cfg);

/// Current decision and multiplier plus the last tau+1 decisions x_{t-tau}..x_t.
struct SolverState {
  Vector x;
  Vector lambda;
  std::deque<Vector> buffer;
  std::size_t t = 0;
};

struct SubproblemSolution {
  Vector x;
  double residual = 0.0;
  long iterations = 0;
  bool closed_form = false;
};

/// F(x) + (1/(2 sigma)) (||[lambda + sigma G(x)]_+||^2 - ||lambda||^2).
double aug_lagrangian(const ModelAt& model, const Vector& x, const Vector& lambda, double sigma);

/// Augmented Lagrangian plus (alpha/2)||x - prox_center||^2.
double subproblem_objective(const ModelAt& model, const Vector& x, const Vector& prox_center,
                            const Vector& lambda, double alpha, double sigma);

/// Minimizer of (alpha/2)||x||^2 + a^T x + (sigma/2)[b^T x + gamma]_+^2 over R^n.
Vector unconstrained_linearized_p1(const Vector& a, const Vector& b, double gamma, double alpha,
                                   double sigma);

/// Minimizer of (alpha/2)||x||^2 + a^T x + (sigma/2)[b^T x + gamma]_+^2 over the set.
///
/// Equals the projection of the unconstrained minimizer when that point is
/// feasible. Otherwise the penalty slope theta = sigma [b^T x + gamma]_+ is the
/// root of a monotone scalar equation with x(theta) = P(-(a + theta b)/alpha),
/// which is bracketed and bisected to machine precision.
Vector closed_form_linearized_p1(const Vector& a, const Vector& b, double gamma, double alpha,
                                 double sigma, const FeasibleSet& set);

/// argmin over the set of aug_lagrangian(model, ., lambda, sigma) + (alpha/2)||. - prox_center||^2.
SubproblemSolution solve_subproblem_detailed(const ModelAt& model, const Vector& prox_center,
                                             const Vector& lambda, double alpha, double sigma,
                                             const InnerSolverConfig& inner, const FeasibleSet& set);

Vector solve_subproblem(const ModelAt& model, const Vector& prox_center, const Vector& lambda,
                        const MalmConfig& cfg, const FeasibleSet& set);

/// [lambda + sigma G(x_next)]_+.
Vector multiplier_update(const Vector& lambda, const ModelAt& model, const Vector& x_next, double sigma);

/// Online solver with feedback delay tau. With tau = 0 this is the undelayed method.
class MalmSolver {
 public:
  MalmSolver(const FeasibleSet& set, std::size_t num_constraints, MalmConfig cfg);

  /// Decision to submit at the current round.
  const Vector& decision() const noexcept { return state_.x; }
  const Vector& multiplier() const noexcept { return state_.lambda; }
  const SolverState& state() const noexcept { return state_; }
  /// Feedback can only arrive once t >= tau.
  bool awaiting_feedback() const noexcept { return state_.t >= cfg_.tau; }

  /// Consumes the feedback of round t - tau and advances to round t + 1.
  void receive(std::shared_ptr<const RoundOracle> delayed);
  /// Advances a round in which no feedback is due (t < tau).
  void skip();

 private:
  FeasibleSet set_;
  MalmConfig cfg_;
  SolverState state_;
};

/// Delayed-feedback schedule: x_0 = ... = x_tau, lambda_0 = ... = lambda_tau = 0,
/// then for t = tau .. tau+T-1 the solver consumes oracle t - tau. Returns x_t
/// and lambda_t for t in [T].
Trajectory run_malm(const ProblemInstance& problem, const MalmConfig& cfg);

/// The undelayed method written directly: model of round t anchored at x_t,
/// prox center x_t. Requires cfg.tau == 0.
Trajectory run_malm_undelayed(const ProblemInstance& problem, const MalmConfig& cfg);

}  // namespace ocal
