#pragma once

#include "ocal/core.hpp"
#include "ocal/instance.hpp"

namespace ocal {

struct ComparatorResult {
  Vector x;
  double objective = 0.0;      // sum_t f_t(x)
  double max_violation = 0.0;  // max_{t,i} g_t^(i)(x)
  double residual = 0.0;       // projected-gradient residual of the final inner problem, at most tol (1 + ‖x‖∞)
  int outer_iterations = 0;
};

/// Best fixed decision in hindsight: argmin over the set of sum_t f_t(x)
/// subject to g_t(x) <= 0 for every round.
///
/// Uses the structure of the generated problems where it is exact (aggregated
/// linear constraints for network allocation, an l1/box set for logistic
/// regression) and the general augmented Lagrangian loop otherwise.
/// Throws InfeasibleProblem when the penalty blows up with a stalled residual.
ComparatorResult solve_comparator_detailed(const ProblemInstance& problem, double tol = 1e-7);

Vector solve_comparator(const ProblemInstance& problem, double tol = 1e-7);

/// The general augmented Lagrangian loop over all p*T constraints through the
/// oracle interface, ignoring any special structure.
ComparatorResult solve_comparator_full(const ProblemInstance& problem, double tol = 1e-7);

/// Euclidean projection onto {||x||_1 <= a} intersected with {||x||_inf <= M}.
Vector project_l1_box(const Vector& point, double a, double M);

/// sum_t f_t(x) over the whole horizon.
double comparator_objective(const ProblemInstance& problem, const Vector& x);

}  // namespace ocal
