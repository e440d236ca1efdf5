#include "ocal/offline.hpp"

#include "ocal/apg.hpp"
#include "ocal/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace ocal {

namespace {

// min over the set of obj(x) s.t. c(x) <= 0 with m constraints.
struct AlProblem {
  Eigen::Index m = 0;
  GradientFn objective_gradient;                                        // writes grad
  std::function<void(const Vector&, Vector&)> constraints;             // writes m values
  std::function<void(const Vector&, const Vector&, Vector&)> add_jtw;  // grad += J(x) w
  ProjectionFn project;
  Vector x0;
};

struct AlOutcome {
  Vector x;
  double max_violation = 0.0;
  double residual = 0.0;
  int outer = 0;
};

AlOutcome augmented_lagrangian(const AlProblem& prob, double tol) {
  constexpr int kMaxOuter = 200;
  constexpr double kMaxPenalty = 1e14;
  Vector x = prob.project(prob.x0);
  Vector mu = Vector::Zero(prob.m);
  Vector g(prob.m);
  Vector weights(prob.m);
  double rho = 1.0;
  double previous = std::numeric_limits<double>::infinity();

  for (int outer = 1; outer <= kMaxOuter; ++outer) {
    GradientFn gradient = [&](const Vector& y, Vector& grad) {
      prob.objective_gradient(y, grad);
      prob.constraints(y, g);
      weights = (mu + rho * g).cwiseMax(0.0);
      prob.add_jtw(y, weights, grad);
    };
    // Stationarity is measured relative to the iterate scale; an absolute
    // target sits below rounding noise once x is in the hundreds.
    const double scale = 1.0 + x.lpNorm<Eigen::Infinity>();
    ApgOptions opts;
    opts.tol = 0.1 * tol * scale;
    opts.max_iters = 200000;
    const ApgResult inner = minimize_apg(gradient, prob.project, x, opts);
    x = inner.x;

    prob.constraints(x, g);
    mu = (mu + rho * g).cwiseMax(0.0);
    const double violation = std::max(g.maxCoeff(), 0.0);
    const double complementarity = (-g).cwiseMin(mu).cwiseAbs().maxCoeff();
    const double kkt = std::max(violation, complementarity);
    if (kkt <= tol && inner.residual <= tol * scale) {
      return AlOutcome{x, g.maxCoeff(), inner.residual, outer};
    }
    if (kkt > 0.5 * previous) rho *= 10.0;
    previous = kkt;
    if (rho > kMaxPenalty) {
      if (violation > tol) {
        throw InfeasibleProblem("comparator: penalty diverged with constraint violation " + std::to_string(violation));
      }
      throw ConvergenceError("comparator: penalty diverged", kkt, outer);
    }
  }
  throw ConvergenceError("comparator: outer iteration cap reached", previous, kMaxOuter);
}

Vector start_point(const ProblemInstance& problem) {
  const Vector& s = problem.constants.slater_point;
  if (s.size() == static_cast<Eigen::Index>(problem.dim())) return project(problem.set, s);
  return project(problem.set, Vector::Zero(static_cast<Eigen::Index>(problem.dim())));
}

double max_violation(const ProblemInstance& problem, const Vector& x) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& r : problem.rounds) worst = std::max(worst, r->constraints(x).maxCoeff());
  return worst;
}

ComparatorResult finish(const ProblemInstance& problem, const AlOutcome& out) {
  return ComparatorResult{out.x, comparator_objective(problem, out.x), max_violation(problem, out.x), out.residual,
                          out.outer};
}

// Loss gradient averaged over rounds, through the oracles.
GradientFn averaged_loss_gradient(const ProblemInstance& problem) {
  const double inv_T = 1.0 / static_cast<double>(problem.horizon());
  return [&problem, inv_T](const Vector& x, Vector& grad) {
    grad.setZero(x.size());
    for (const auto& r : problem.rounds) grad += r->loss_subgradient(x);
    grad *= inv_T;
  };
}

AlProblem full_problem(const ProblemInstance& problem) {
  const auto p = static_cast<Eigen::Index>(problem.num_constraints());
  AlProblem prob;
  prob.m = p * static_cast<Eigen::Index>(problem.horizon());
  prob.objective_gradient = averaged_loss_gradient(problem);
  prob.constraints = [&problem, p](const Vector& x, Vector& g) {
    for (std::size_t t = 0; t < problem.horizon(); ++t) {
      g.segment(static_cast<Eigen::Index>(t) * p, p) = problem.rounds[t]->constraints(x);
    }
  };
  prob.add_jtw = [&problem, p](const Vector& x, const Vector& w, Vector& grad) {
    for (std::size_t t = 0; t < problem.horizon(); ++t) {
      for (Eigen::Index i = 0; i < p; ++i) {
        const double wi = w(static_cast<Eigen::Index>(t) * p + i);
        if (wi > 0.0) grad += wi * problem.rounds[t]->constraint_subgradient(x, static_cast<std::size_t>(i));
      }
    }
  };
  prob.project = [&problem](const Vector& y) { return project(problem.set, y); };
  prob.x0 = start_point(problem);
  return prob;
}

// Network allocation: the losses add up to a diagonal quadratic and the
// constraints A x + b_t <= 0 collapse to A x + max_t b_t <= 0.
ComparatorResult solve_nra(const ProblemInstance& problem, double tol) {
  const auto& first = dynamic_cast<const NraOracle&>(problem.round(0));
  const NraNetwork& net = first.network();
  const auto JK = static_cast<Eigen::Index>(net.J * net.K);
  const auto K = static_cast<Eigen::Index>(net.K);
  const double T = static_cast<double>(problem.horizon());
  Vector price_sum = Vector::Zero(K);
  Vector b_max = first.request();
  for (const auto& r : problem.rounds) {
    const auto& o = dynamic_cast<const NraOracle&>(*r);
    price_sum += o.price();
    b_max = b_max.cwiseMax(o.request());
  }
  Vector diag(JK + K);
  diag.head(JK) = 2.0 * net.cost;
  diag.tail(K) = 2.0 * price_sum / T;

  AlProblem prob;
  prob.m = net.incidence.rows();
  prob.objective_gradient = [diag](const Vector& x, Vector& grad) { grad = diag.cwiseProduct(x); };
  prob.constraints = [&net, b_max](const Vector& x, Vector& g) { g.noalias() = net.incidence * x + b_max; };
  prob.add_jtw = [&net](const Vector&, const Vector& w, Vector& grad) { grad.noalias() += net.incidence.transpose() * w; };
  prob.project = [&problem](const Vector& y) { return project(problem.set, y); };
  prob.x0 = start_point(problem);
  return finish(problem, augmented_lagrangian(prob, tol));
}

// Logistic regression: every round's budget is implied by the tightest one, so
// the comparator is a projected-gradient solve over the l1/box intersection.
ComparatorResult solve_olr(const ProblemInstance& problem, double tol) {
  double a_min = std::numeric_limits<double>::infinity();
  double M = 0.0;
  for (const auto& r : problem.rounds) a_min = std::min(a_min, dynamic_cast<const OlrOracle&>(*r).threshold());
  M = std::get<SupNormBall>(problem.set.shape()).bound;
  ApgOptions opts;
  opts.tol = tol;
  opts.max_iters = 1000000;
  const ApgResult res = minimize_apg(averaged_loss_gradient(problem), [a_min, M](const Vector& y) {
    return project_l1_box(y, a_min, M);
  }, Vector::Zero(static_cast<Eigen::Index>(problem.dim())), opts);
  if (!res.converged) throw ConvergenceError("comparator: projected gradient did not converge", res.residual, res.iterations);
  return ComparatorResult{res.x, comparator_objective(problem, res.x), max_violation(problem, res.x), res.residual, 1};
}

// Quadratic programs: the losses aggregate exactly; the p*T quadratic
// constraints are evaluated from the round data without per-call allocation.
ComparatorResult solve_qcqp(const ProblemInstance& problem, double tol) {
  const auto n = static_cast<Eigen::Index>(problem.dim());
  const auto p = static_cast<Eigen::Index>(problem.num_constraints());
  const auto T = static_cast<Eigen::Index>(problem.horizon());
  Matrix A_sum = Matrix::Zero(n, n);
  Vector b_sum = Vector::Zero(n);
  std::vector<const QuadraticRound*> data;
  data.reserve(static_cast<std::size_t>(T));
  for (const auto& r : problem.rounds) {
    const auto& q = dynamic_cast<const OqcqpOracle&>(*r).data();
    A_sum += q.A;
    b_sum += q.b;
    data.push_back(&q);
  }
  A_sum /= static_cast<double>(T);
  b_sum /= static_cast<double>(T);

  // Cx products are shared between values and gradients of the last point.
  auto cx = std::make_shared<Matrix>(n, p * T);
  auto evaluated = std::make_shared<Vector>();
  auto refresh = [=](const Vector& x) {
    if (evaluated->size() == x.size() && *evaluated == x) return;
    for (Eigen::Index t = 0; t < T; ++t) {
      const QuadraticRound& q = *data[static_cast<std::size_t>(t)];
      for (Eigen::Index i = 0; i < p; ++i) cx->col(t * p + i).noalias() = q.C[static_cast<std::size_t>(i)] * x;
    }
    *evaluated = x;
  };

  AlProblem prob;
  prob.m = p * T;
  prob.objective_gradient = [A_sum, b_sum](const Vector& x, Vector& grad) { grad.noalias() = A_sum * x + b_sum; };
  prob.constraints = [=](const Vector& x, Vector& g) {
    refresh(x);
    for (Eigen::Index t = 0; t < T; ++t) {
      const QuadraticRound& q = *data[static_cast<std::size_t>(t)];
      for (Eigen::Index i = 0; i < p; ++i) {
        g(t * p + i) = 0.5 * x.dot(cx->col(t * p + i)) + q.d.col(i).dot(x) + q.e(i);
      }
    }
  };
  prob.add_jtw = [=](const Vector& x, const Vector& w, Vector& grad) {
    refresh(x);
    for (Eigen::Index t = 0; t < T; ++t) {
      const QuadraticRound& q = *data[static_cast<std::size_t>(t)];
      for (Eigen::Index i = 0; i < p; ++i) {
        const double wi = w(t * p + i);
        if (wi > 0.0) grad += wi * (cx->col(t * p + i) + q.d.col(i));
      }
    }
  };
  prob.project = [&problem](const Vector& y) { return project(problem.set, y); };
  prob.x0 = start_point(problem);
  return finish(problem, augmented_lagrangian(prob, tol));
}

}  // namespace

double comparator_objective(const ProblemInstance& problem, const Vector& x) {
  double sum = 0.0;
  for (const auto& r : problem.rounds) sum += r->loss(x);
  return sum;
}

ComparatorResult solve_comparator_full(const ProblemInstance& problem, double tol) {
  if (problem.horizon() == 0) throw InvalidArgument("comparator: empty problem");
  if (!(tol > 0.0)) throw InvalidArgument("comparator: tol must be positive");
  return finish(problem, augmented_lagrangian(full_problem(problem), tol));
}

ComparatorResult solve_comparator_detailed(const ProblemInstance& problem, double tol) {
  if (problem.horizon() == 0) throw InvalidArgument("comparator: empty problem");
  if (!(tol > 0.0)) throw InvalidArgument("comparator: tol must be positive");
  switch (problem.kind) {
    case ProblemKind::NetworkAllocation: return solve_nra(problem, tol);
    case ProblemKind::LogisticRegression: return solve_olr(problem, tol);
    case ProblemKind::Qcqp: return solve_qcqp(problem, tol);
    case ProblemKind::Generic: break;
  }
  return solve_comparator_full(problem, tol);
}

Vector solve_comparator(const ProblemInstance& problem, double tol) {
  return solve_comparator_detailed(problem, tol).x;
}

Vector project_l1_box(const Vector& point, double a, double M) {
  if (!(a >= 0.0) || !(M > 0.0)) throw InvalidArgument("project_l1_box: need a >= 0 and M > 0");
  const Vector mag = point.cwiseAbs();
  auto shrink = [&](double theta) { return (mag.array() - theta).max(0.0).min(M).matrix(); };
  auto mass = [&](double theta) { return shrink(theta).sum(); };
  Vector out;
  if (mass(0.0) <= a) {
    out = shrink(0.0);
  } else {
    // mass(theta) is piecewise linear and nonincreasing with kinks at |v_i| - M
    // and |v_i|; locate the segment holding the level a and interpolate.
    std::vector<double> kinks{0.0};
    for (Eigen::Index i = 0; i < mag.size(); ++i) {
      if (mag(i) - M > 0.0) kinks.push_back(mag(i) - M);
      kinks.push_back(mag(i));
    }
    std::sort(kinks.begin(), kinks.end());
    double theta = kinks.back();
    for (std::size_t k = 1; k < kinks.size(); ++k) {
      const double lo = kinks[k - 1], hi = kinks[k];
      const double m_lo = mass(lo), m_hi = mass(hi);
      if (m_hi <= a && m_lo >= a) {
        theta = m_lo == m_hi ? lo : lo + (m_lo - a) * (hi - lo) / (m_lo - m_hi);
        break;
      }
    }
    out = shrink(theta);
  }
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (point(i) < 0.0) out(i) = -out(i);
  }
  return out;
}

}  // namespace ocal
