#include "ocal/malm.hpp"

#include "ocal/apg.hpp"

#include <cmath>
#include <string>

namespace ocal {

MalmConfig MalmConfig::standard_stepsizes(std::size_t horizon, std::size_t tau, ModelKind model) {
  MalmConfig cfg;
  const double ratio = static_cast<double>(horizon) / static_cast<double>(tau + 1);
  cfg.alpha = std::sqrt(ratio);
  cfg.sigma = 1.0 / std::sqrt(ratio);
  cfg.tau = tau;
  cfg.horizon = horizon;
  cfg.model = model;
  return cfg;
}

void validate(const MalmConfig& cfg) {
  if (!(cfg.alpha > 0.0) || !std::isfinite(cfg.alpha)) throw InvalidArgument("malm: alpha must be positive");
  if (!(cfg.sigma > 0.0) || !std::isfinite(cfg.sigma)) throw InvalidArgument("malm: sigma must be positive");
  if (cfg.horizon <= cfg.tau) throw InvalidArgument("malm: horizon must exceed the delay");
  if (!(cfg.inner.tol > 0.0)) throw InvalidArgument("malm: inner tolerance must be positive");
  if (cfg.inner.max_iters <= 0) throw InvalidArgument("malm: inner max_iters must be positive");
}

double aug_lagrangian(const ModelAt& model, const Vector& x, const Vector& lambda, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("aug_lagrangian: sigma must be positive");
  const Vector shifted = positive_part(lambda + sigma * model.eval_G(x));
  return model.eval_F(x) + (shifted.squaredNorm() - lambda.squaredNorm()) / (2.0 * sigma);
}

double subproblem_objective(const ModelAt& model, const Vector& x, const Vector& prox_center,
                            const Vector& lambda, double alpha, double sigma) {
  return aug_lagrangian(model, x, lambda, sigma) + 0.5 * alpha * (x - prox_center).squaredNorm();
}

Vector unconstrained_linearized_p1(const Vector& a, const Vector& b, double gamma, double alpha,
                                   double sigma) {
  if (alpha * gamma <= a.dot(b)) return -a / alpha;
  // (alpha I + sigma b b^T) x = -(a + sigma gamma b), solved by Sherman-Morrison.
  const Vector rhs = a + sigma * gamma * b;
  const double coeff = sigma * b.dot(rhs) / (alpha * (alpha + sigma * b.squaredNorm()));
  return -rhs / alpha + coeff * b;
}

Vector closed_form_linearized_p1(const Vector& a, const Vector& b, double gamma, double alpha,
                                 double sigma, const FeasibleSet& set) {
  if (!(alpha > 0.0) || !(sigma > 0.0)) throw InvalidArgument("closed form: alpha and sigma must be positive");
  const Vector free_min = unconstrained_linearized_p1(a, b, gamma, alpha, sigma);
  if (contains(set, free_min)) return free_min;

  auto point = [&](double theta) -> Vector { return project(set, -(a + theta * b) / alpha); };
  auto excess = [&](double theta) { return theta - sigma * std::max(b.dot(point(theta)) + gamma, 0.0); };

  double lo = 0.0;
  if (excess(lo) >= 0.0) return point(lo);
  double hi = sigma * std::max(support(set, b) + gamma, 0.0);
  if (excess(hi) <= 0.0) return point(hi);
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (excess(mid) < 0.0 ? lo : hi) = mid;
  }
  return point(0.5 * (lo + hi));
}

namespace {

// Gradient of the subproblem objective with the loss model's slope scaled by
// `loss_weight` (only the truncated kind uses weights other than 1).
void subproblem_gradient(const ModelAt& model, const Vector& x, const Vector& prox_center,
                         const Vector& lambda, double alpha, double sigma, double loss_weight,
                         Vector& grad) {
  if (model.kind() == ModelKind::Truncated) {
    grad = loss_weight * model.loss_slope();
  } else {
    grad = model.subgrad_F(x);
  }
  grad.noalias() += alpha * (x - prox_center);
  const Vector weights = positive_part(lambda + sigma * model.eval_G(x));
  if (model.affine_constraints()) {
    grad.noalias() += model.constraint_slopes() * weights;
  } else {
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      if (weights(i) > 0.0) grad.noalias() += weights(i) * model.subgrad_G(x, static_cast<std::size_t>(i));
    }
  }
}

SubproblemSolution solve_weighted(const ModelAt& model, const Vector& prox_center, const Vector& lambda,
                                  double alpha, double sigma, double loss_weight,
                                  const InnerSolverConfig& inner, const FeasibleSet& set,
                                  const Vector& start) {
  const bool affine_loss = model.kind() == ModelKind::Linearized ||
                           model.kind() == ModelKind::QuadraticLinearized ||
                           model.kind() == ModelKind::Truncated;
  if (affine_loss && model.num_constraints() == 1) {
    const double iota = model.kind() == ModelKind::QuadraticLinearized ? model.iota() : 0.0;
    const double curvature = alpha + iota;
    const Vector slope = model.kind() == ModelKind::Truncated ? Vector(loss_weight * model.loss_slope())
                                                               : model.loss_slope();
    const Vector b = model.constraint_slopes().col(0);
    const Vector a = slope - alpha * prox_center - iota * model.anchor();
    const double gamma = lambda(0) / sigma + model.constraints_at_anchor()(0) - b.dot(model.anchor());
    SubproblemSolution sol;
    sol.x = closed_form_linearized_p1(a, b, gamma, curvature, sigma, set);
    sol.closed_form = true;
    Vector grad;
    subproblem_gradient(model, sol.x, prox_center, lambda, alpha, sigma, loss_weight, grad);
    sol.residual = projected_gradient_residual(sol.x, grad, [&](const Vector& v) { return project(set, v); });
    return sol;
  }

  ApgOptions opts;
  opts.tol = inner.tol;
  opts.max_iters = inner.max_iters;
  opts.strong_convexity = alpha + (model.kind() == ModelKind::QuadraticLinearized ? model.iota() : 0.0);
  const ApgResult res = minimize_apg(
      [&](const Vector& x, Vector& g) {
        subproblem_gradient(model, x, prox_center, lambda, alpha, sigma, loss_weight, g);
      },
      [&](const Vector& v) { return project(set, v); }, start, opts);
  if (!res.converged) {
    throw ConvergenceError("inner solver stopped after " + std::to_string(res.iterations) +
                               " iterations with residual " + std::to_string(res.residual),
                           res.residual, res.iterations);
  }
  return {res.x, res.residual, res.iterations, false};
}

}  // namespace

SubproblemSolution solve_subproblem_detailed(const ModelAt& model, const Vector& prox_center,
                                             const Vector& lambda, double alpha, double sigma,
                                             const InnerSolverConfig& inner, const FeasibleSet& set) {
  if (!(alpha > 0.0) || !(sigma > 0.0)) throw InvalidArgument("subproblem: alpha and sigma must be positive");
  if (static_cast<std::size_t>(lambda.size()) != model.num_constraints()) {
    throw InvalidArgument("subproblem: multiplier size does not match the constraint count");
  }
  if (model.kind() == ModelKind::Plain && !model.smooth()) {
    throw UnsupportedProblem("plain model needs differentiable loss and constraints");
  }
  if (model.kind() != ModelKind::Truncated) {
    return solve_weighted(model, prox_center, lambda, alpha, sigma, 1.0, inner, set, prox_center);
  }

  // F = max(l, floor) = floor + max over w in [0,1] of w (l - floor). For fixed w
  // the problem is smooth; l(x_w) - floor is nonincreasing in w and the optimal
  // weight is where it crosses zero.
  auto excess = [&](const SubproblemSolution& s) { return model.linear_F(s.x) - model.floor(); };
  SubproblemSolution lo_sol = solve_weighted(model, prox_center, lambda, alpha, sigma, 0.0, inner, set, prox_center);
  if (excess(lo_sol) <= 0.0) return lo_sol;
  SubproblemSolution hi_sol = solve_weighted(model, prox_center, lambda, alpha, sigma, 1.0, inner, set, lo_sol.x);
  if (excess(hi_sol) >= 0.0) return hi_sol;
  double lo = 0.0, hi = 1.0;
  SubproblemSolution mid_sol = hi_sol;
  for (int k = 0; k < 100; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    mid_sol = solve_weighted(model, prox_center, lambda, alpha, sigma, mid, inner, set, mid_sol.x);
    const double e = excess(mid_sol);
    if (std::abs(e) <= inner.tol * 1e-3) break;
    (e > 0.0 ? lo : hi) = mid;
  }
  return mid_sol;
}

Vector solve_subproblem(const ModelAt& model, const Vector& prox_center, const Vector& lambda,
                        const MalmConfig& cfg, const FeasibleSet& set) {
  return solve_subproblem_detailed(model, prox_center, lambda, cfg.alpha, cfg.sigma, cfg.inner, set).x;
}

Vector multiplier_update(const Vector& lambda, const ModelAt& model, const Vector& x_next, double sigma) {
  return positive_part(lambda + sigma * model.eval_G(x_next));
}

MalmSolver::MalmSolver(const FeasibleSet& set, std::size_t num_constraints, MalmConfig cfg)
    : set_(set), cfg_(std::move(cfg)) {
  validate(cfg_);
  const Vector x0 = cfg_.x0 ? project(set_, *cfg_.x0) : project(set_, Vector::Zero(static_cast<Eigen::Index>(set_.dim())));
  state_.x = x0;
  state_.lambda = Vector::Zero(static_cast<Eigen::Index>(num_constraints));
  state_.buffer.assign(cfg_.tau + 1, x0);
  state_.t = 0;
}

void MalmSolver::skip() {
  if (awaiting_feedback()) throw InvalidArgument("malm: feedback is due at this round");
  // Blind rounds keep x_t = x_0 and lambda_t = 0; the buffer already holds x_0..x_tau.
  ++state_.t;
}

void MalmSolver::receive(std::shared_ptr<const RoundOracle> delayed) {
  if (!awaiting_feedback()) throw InvalidArgument("malm: no feedback is due before round tau");
  const std::size_t expected = state_.t - cfg_.tau;
  if (delayed->round() != expected) {
    throw InvalidArgument("malm: expected feedback of round " + std::to_string(expected) + ", got " +
                          std::to_string(delayed->round()));
  }
  const Vector& anchor = state_.buffer.front();  // x_{t - tau}
  const ModelAt model = build_model(cfg_.model, std::move(delayed), anchor, set_, cfg_.iota);
  Vector next;
  try {
    next = solve_subproblem(model, anchor, state_.lambda, cfg_, set_);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError("round " + std::to_string(state_.t) + ": " + e.what(), e.residual(), e.iterations());
  }
  state_.lambda = multiplier_update(state_.lambda, model, next, cfg_.sigma);
  state_.x = next;
  state_.buffer.push_back(std::move(next));
  if (state_.buffer.size() > cfg_.tau + 1) state_.buffer.pop_front();
  ++state_.t;
}

Trajectory run_malm(const ProblemInstance& problem, const MalmConfig& cfg) {
  validate(cfg);
  const std::size_t T = cfg.horizon;
  if (problem.horizon() < T) throw InvalidArgument("run_malm: problem has fewer rounds than the horizon");
  MalmSolver solver(problem.set, problem.num_constraints(), cfg);
  Trajectory traj;
  traj.decisions.reserve(T);
  traj.multipliers.reserve(T);
  for (std::size_t t = 0; t < cfg.tau + T; ++t) {
    if (t < T) {
      traj.decisions.push_back(solver.decision());
      traj.multipliers.push_back(solver.multiplier());
    }
    if (solver.awaiting_feedback()) {
      solver.receive(problem.rounds[t - cfg.tau]);
    } else {
      solver.skip();
    }
  }
  return traj;
}

Trajectory run_malm_undelayed(const ProblemInstance& problem, const MalmConfig& cfg) {
  validate(cfg);
  if (cfg.tau != 0) throw InvalidArgument("run_malm_undelayed: delay must be zero");
  const std::size_t T = cfg.horizon;
  if (problem.horizon() < T) throw InvalidArgument("run_malm_undelayed: problem has fewer rounds than the horizon");
  const FeasibleSet& set = problem.set;
  Vector x = cfg.x0 ? project(set, *cfg.x0) : project(set, Vector::Zero(static_cast<Eigen::Index>(set.dim())));
  Vector lambda = Vector::Zero(static_cast<Eigen::Index>(problem.num_constraints()));
  Trajectory traj;
  traj.decisions.reserve(T);
  traj.multipliers.reserve(T);
  for (std::size_t t = 0; t < T; ++t) {
    traj.decisions.push_back(x);
    traj.multipliers.push_back(lambda);
    const ModelAt model = build_model(cfg.model, problem.rounds[t], x, set, cfg.iota);
    Vector next = solve_subproblem(model, x, lambda, cfg, set);
    lambda = multiplier_update(lambda, model, next, cfg.sigma);
    x = std::move(next);
  }
  return traj;
}

}  // namespace ocal
