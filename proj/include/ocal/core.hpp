#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>

namespace ocal {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Errors

/// Bad input to an operation: dimension mismatch, negative parameter, etc.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Floating-point failure: non-finite data, failed factorization.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver hit its iteration cap before reaching tolerance.
class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, double residual, long iterations)
      : NumericError(what), residual_(residual), iterations_(iterations) {}
  double residual() const noexcept { return residual_; }
  long iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  long iterations_;
};

/// The comparator problem has no (strictly) feasible point.
class InfeasibleProblem : public NumericError {
 public:
  using NumericError::NumericError;
};

/// The algorithm cannot handle this problem class (e.g. nonlinear constraints).
class UnsupportedProblem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Feasible sets

struct Box {
  Vector lower;
  Vector upper;
};

struct EuclideanBall {
  std::size_t dim = 0;
  double radius = 1.0;
};

struct SupNormBall {
  std::size_t dim = 0;
  double bound = 1.0;
};

/// Nonempty compact convex set with an exact Euclidean projection.
class FeasibleSet {
 public:
  using Variant = std::variant<Box, EuclideanBall, SupNormBall>;

  static FeasibleSet box(Vector lower, Vector upper);
  static FeasibleSet ball(std::size_t dim, double radius);
  static FeasibleSet sup_ball(std::size_t dim, double bound);

  std::size_t dim() const;
  const Variant& shape() const noexcept { return shape_; }

 private:
  explicit FeasibleSet(Variant v) : shape_(std::move(v)) {}
  Variant shape_;
};

/// Euclidean projection onto `set`. Throws InvalidArgument on dimension mismatch.
Vector project(const FeasibleSet& set, const Vector& point);

/// Largest distance between two points of the set.
double diameter(const FeasibleSet& set);

/// Support function: max over y in the set of <direction, y>.
double support(const FeasibleSet& set, const Vector& direction);

bool contains(const FeasibleSet& set, const Vector& point, double tol = 0.0);

/// Frobenius-nearest positive semidefinite matrix. The input is symmetrized first.
Matrix project_psd(const Matrix& matrix);

/// Componentwise [v]_+.
inline Vector positive_part(const Vector& v) { return v.cwiseMax(0.0); }

// ---------------------------------------------------------------------------
// Round data

/// The loss f_t and constraint map g_t revealed for one round.
///
/// Implementations must be convex on the feasible set and return valid
/// subgradients. The capability queries let algorithms decide which
/// specialised routines apply.
class RoundOracle {
 public:
  virtual ~RoundOracle() = default;

  virtual std::size_t round() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::size_t num_constraints() const = 0;

  virtual double loss(const Vector& x) const = 0;
  virtual Vector loss_subgradient(const Vector& x) const = 0;
  virtual Vector constraints(const Vector& x) const = 0;
  virtual Vector constraint_subgradient(const Vector& x, std::size_t i) const = 0;

  /// Both f_t and every g_t^(i) are continuously differentiable.
  virtual bool differentiable() const { return true; }
  /// Every g_t^(i) is affine.
  virtual bool linear_constraints() const { return false; }
  /// A modulus iota with f_t iota-strongly convex (0 when none is known).
  virtual double strong_convexity() const { return 0.0; }
  /// A lower bound on f_t over the feasible set, or -inf when unknown.
  virtual double loss_lower_bound() const {
    return -std::numeric_limits<double>::infinity();
  }
  /// A bound on ||g_t(y)|| over the feasible set, or +inf when unknown.
  virtual double constraint_norm_bound() const {
    return std::numeric_limits<double>::infinity();
  }

  /// Constraint Jacobian transpose: column i is the (sub)gradient of g^(i).
  Matrix constraint_jacobian(const Vector& x) const;
};

/// RoundOracle assembled from callables; used for hand-made instances.
class FunctionOracle final : public RoundOracle {
 public:
  struct Functions {
    std::function<double(const Vector&)> loss;
    std::function<Vector(const Vector&)> loss_subgradient;
    std::function<Vector(const Vector&)> constraints;
    std::function<Vector(const Vector&, std::size_t)> constraint_subgradient;
  };

  FunctionOracle(std::size_t round, std::size_t dim, std::size_t num_constraints,
                 Functions fns, bool linear_constraints = false,
                 double strong_convexity = 0.0,
                 double loss_lower_bound = -std::numeric_limits<double>::infinity());

  std::size_t round() const override { return round_; }
  std::size_t dim() const override { return dim_; }
  std::size_t num_constraints() const override { return p_; }
  double loss(const Vector& x) const override { return fns_.loss(x); }
  Vector loss_subgradient(const Vector& x) const override { return fns_.loss_subgradient(x); }
  Vector constraints(const Vector& x) const override { return fns_.constraints(x); }
  Vector constraint_subgradient(const Vector& x, std::size_t i) const override {
    return fns_.constraint_subgradient(x, i);
  }
  bool linear_constraints() const override { return linear_; }
  double strong_convexity() const override { return iota_; }
  double loss_lower_bound() const override { return lower_; }

 private:
  std::size_t round_;
  std::size_t dim_;
  std::size_t p_;
  Functions fns_;
  bool linear_;
  double iota_;
  double lower_;
};

/// Regularity constants of a problem instance.
struct ProblemConstants {
  double diameter = 0.0;        // D
  double kappa_f = 0.0;         // bound on loss subgradients over the set
  double kappa_g = 0.0;         // bound on each constraint subgradient
  double nu_g = 0.0;            // bound on ||G(y)|| for every supported model
  double eps0 = 0.0;            // Slater margin
  Vector slater_point;          // g_t(slater_point) <= -eps0 for every round
};

}  // namespace ocal
