#pragma once

#include "ocal/core.hpp"

#include <functional>

namespace ocal {

/// Writes the gradient of a smooth convex objective at x into the second argument.
using GradientFn = std::function<void(const Vector&, Vector&)>;
using ProjectionFn = std::function<Vector(const Vector&)>;

struct ApgOptions {
  double tol = 1e-9;              // stop when ||x - P(x - grad(x))|| <= tol
  long max_iters = 100000;
  double strong_convexity = 0.0;  // known lower bound on the modulus
  int power_iterations = 6;       // for the initial Lipschitz estimate
};

struct ApgResult {
  Vector x;
  double residual = 0.0;
  long iterations = 0;
  bool converged = false;
};

/// ||x - P(x - g)||: zero exactly at a minimizer over the set.
double projected_gradient_residual(const Vector& x, const Vector& grad, const ProjectionFn& project);

/// Largest-eigenvalue estimate of the local Hessian via power iteration on
/// gradient differences.
double estimate_lipschitz(const GradientFn& gradient, const Vector& x, int iterations);

/// Accelerated projected gradient with backtracking and gradient-based restart.
///
/// The sufficient-decrease test is <grad(x+) - grad(y), x+ - y> <= (L/2)||x+ - y||^2,
/// which by convexity implies the usual descent inequality without evaluating
/// the objective.
ApgResult minimize_apg(const GradientFn& gradient, const ProjectionFn& project, const Vector& x0,
                       const ApgOptions& options);

}  // namespace ocal
