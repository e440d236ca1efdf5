#include "ocal/core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace ocal {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_dim(const FeasibleSet& set, const Vector& v, const char* op) {
  if (static_cast<std::size_t>(v.size()) != set.dim()) {
    throw InvalidArgument(std::string(op) + ": dimension " + std::to_string(v.size()) +
                          " does not match set dimension " + std::to_string(set.dim()));
  }
}

}  // namespace

FeasibleSet FeasibleSet::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size()) throw InvalidArgument("box: bound sizes differ");
  if (lower.size() == 0) throw InvalidArgument("box: empty dimension");
  if ((lower.array() > upper.array()).any()) throw InvalidArgument("box: lower > upper");
  if (!lower.allFinite() || !upper.allFinite()) throw InvalidArgument("box: non-finite bound");
  return FeasibleSet(Box{std::move(lower), std::move(upper)});
}

FeasibleSet FeasibleSet::ball(std::size_t dim, double radius) {
  if (dim == 0) throw InvalidArgument("ball: empty dimension");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("ball: radius must be positive");
  return FeasibleSet(EuclideanBall{dim, radius});
}

FeasibleSet FeasibleSet::sup_ball(std::size_t dim, double bound) {
  if (dim == 0) throw InvalidArgument("sup_ball: empty dimension");
  if (!(bound > 0.0) || !std::isfinite(bound)) throw InvalidArgument("sup_ball: bound must be positive");
  return FeasibleSet(SupNormBall{dim, bound});
}

std::size_t FeasibleSet::dim() const {
  return std::visit(Overloaded{
                        [](const Box& b) { return static_cast<std::size_t>(b.lower.size()); },
                        [](const EuclideanBall& b) { return b.dim; },
                        [](const SupNormBall& b) { return b.dim; },
                    },
                    shape_);
}

Vector project(const FeasibleSet& set, const Vector& point) {
  check_dim(set, point, "project");
  return std::visit(Overloaded{
                        [&](const Box& b) -> Vector {
                          return point.cwiseMax(b.lower).cwiseMin(b.upper);
                        },
                        [&](const EuclideanBall& b) -> Vector {
                          const double norm = point.norm();
                          if (norm <= b.radius) return point;
                          // Shrink by an ulp at a time until the computed norm is
                          // inside, so projecting again returns the point unchanged.
                          double scale = b.radius / norm;
                          Vector out = point * scale;
                          while (out.norm() > b.radius) {
                            scale = std::nextafter(scale, 0.0);
                            out = point * scale;
                          }
                          return out;
                        },
                        [&](const SupNormBall& b) -> Vector {
                          return point.cwiseMax(-b.bound).cwiseMin(b.bound);
                        },
                    },
                    set.shape());
}

double diameter(const FeasibleSet& set) {
  return std::visit(Overloaded{
                        [](const Box& b) { return (b.upper - b.lower).norm(); },
                        [](const EuclideanBall& b) { return 2.0 * b.radius; },
                        [](const SupNormBall& b) {
                          return 2.0 * b.bound * std::sqrt(static_cast<double>(b.dim));
                        },
                    },
                    set.shape());
}

double support(const FeasibleSet& set, const Vector& direction) {
  check_dim(set, direction, "support");
  return std::visit(Overloaded{
                        [&](const Box& b) {
                          return direction.cwiseProduct(b.lower)
                              .cwiseMax(direction.cwiseProduct(b.upper))
                              .sum();
                        },
                        [&](const EuclideanBall& b) { return b.radius * direction.norm(); },
                        [&](const SupNormBall& b) { return b.bound * direction.lpNorm<1>(); },
                    },
                    set.shape());
}

bool contains(const FeasibleSet& set, const Vector& point, double tol) {
  check_dim(set, point, "contains");
  return std::visit(Overloaded{
                        [&](const Box& b) {
                          return ((point - b.lower).array() >= -tol).all() &&
                                 ((b.upper - point).array() >= -tol).all();
                        },
                        [&](const EuclideanBall& b) { return point.norm() <= b.radius + tol; },
                        [&](const SupNormBall& b) {
                          return point.lpNorm<Eigen::Infinity>() <= b.bound + tol;
                        },
                    },
                    set.shape());
}

Matrix project_psd(const Matrix& matrix) {
  if (matrix.rows() != matrix.cols()) throw InvalidArgument("project_psd: matrix is not square");
  if (!matrix.allFinite()) throw NumericError("project_psd: non-finite entries");
  const Matrix sym = 0.5 * (matrix + matrix.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericError("project_psd: eigendecomposition failed");
  const Vector clamped = eig.eigenvalues().cwiseMax(0.0);
  const Matrix& q = eig.eigenvectors();
  Matrix out = q * clamped.asDiagonal() * q.transpose();
  return 0.5 * (out + out.transpose());
}

Matrix RoundOracle::constraint_jacobian(const Vector& x) const {
  const std::size_t p = num_constraints();
  Matrix jac(dim(), p);
  for (std::size_t i = 0; i < p; ++i) jac.col(static_cast<Eigen::Index>(i)) = constraint_subgradient(x, i);
  return jac;
}

FunctionOracle::FunctionOracle(std::size_t round, std::size_t dim, std::size_t num_constraints,
                               Functions fns, bool linear_constraints, double strong_convexity,
                               double loss_lower_bound)
    : round_(round),
      dim_(dim),
      p_(num_constraints),
      fns_(std::move(fns)),
      linear_(linear_constraints),
      iota_(strong_convexity),
      lower_(loss_lower_bound) {}

}  // namespace ocal
