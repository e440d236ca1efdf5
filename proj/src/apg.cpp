#include "ocal/apg.hpp"

#include <algorithm>
#include <cmath>

namespace ocal {

double projected_gradient_residual(const Vector& x, const Vector& grad, const ProjectionFn& project) {
  return (x - project(x - grad)).norm();
}

double estimate_lipschitz(const GradientFn& gradient, const Vector& x, int iterations) {
  const Eigen::Index n = x.size();
  Vector g0(n), g1(n);
  gradient(x, g0);
  // Decaying alternating entries avoid the symmetric directions that are
  // eigenvectors of many structured Hessians.
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = (i % 2 == 0 ? 1.0 : -1.0) / static_cast<double>(i + 1);
  v.normalize();
  const double h = 1e-4 * (1.0 + x.norm());
  double estimate = 0.0;
  for (int k = 0; k < iterations; ++k) {
    gradient(x + h * v, g1);
    Vector hv = (g1 - g0) / h;
    const double norm = hv.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) break;
    estimate = norm;
    v = hv / norm;
  }
  return estimate;
}

ApgResult minimize_apg(const GradientFn& gradient, const ProjectionFn& project, const Vector& x0,
                       const ApgOptions& options) {
  const Eigen::Index n = x0.size();
  const double mu = std::max(options.strong_convexity, 0.0);

  ApgResult out;
  Vector x = project(x0);
  Vector gx(n);
  gradient(x, gx);
  out.residual = projected_gradient_residual(x, gx, project);
  if (out.residual <= options.tol) {
    out.x = std::move(x);
    out.converged = true;
    return out;
  }

  double lipschitz = std::max({estimate_lipschitz(gradient, x, options.power_iterations), mu, 1e-12});
  Vector y = x;
  Vector gy = gx;
  Vector x_new(n), g_new(n);

  for (long k = 1; k <= options.max_iters; ++k) {
    // Backtracking on the local Lipschitz constant.
    for (int bt = 0;; ++bt) {
      x_new = project(y - gy / lipschitz);
      gradient(x_new, g_new);
      const Vector d = x_new - y;
      const double dd = d.squaredNorm();
      if (dd == 0.0 || (g_new - gy).dot(d) <= 0.5 * lipschitz * dd * (1.0 + 1e-12)) break;
      lipschitz *= 2.0;
      if (bt > 200 || !std::isfinite(lipschitz)) {
        out.x = std::move(x);
        out.iterations = k;
        return out;
      }
    }

    out.iterations = k;
    out.residual = projected_gradient_residual(x_new, g_new, project);
    if (!std::isfinite(out.residual)) {
      out.x = std::move(x_new);
      return out;
    }
    if (out.residual <= options.tol) {
      out.x = std::move(x_new);
      out.converged = true;
      return out;
    }

    const double q = std::min(mu / lipschitz, 1.0);
    const double beta = (1.0 - std::sqrt(q)) / (1.0 + std::sqrt(q));
    // Restart when the momentum direction opposes the gradient-mapping step.
    const bool restart = (y - x_new).dot(x_new - x) > 0.0;
    if (restart) {
      y = x_new;
      gy = g_new;
    } else {
      y = x_new + beta * (x_new - x);
      gradient(y, gy);
    }
    x.swap(x_new);
  }
  out.x = std::move(x);
  return out;
}

}  // namespace ocal
