#include "ocal/models.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ocal {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Plain: return "plain";
    case ModelKind::Linearized: return "linearized";
    case ModelKind::QuadraticLinearized: return "quadratic";
    case ModelKind::Truncated: return "truncated";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "plain") return ModelKind::Plain;
  if (name == "linearized" || name == "linear") return ModelKind::Linearized;
  if (name == "quadratic" || name == "quadratic-linearized") return ModelKind::QuadraticLinearized;
  if (name == "truncated") return ModelKind::Truncated;
  throw InvalidArgument("unknown model kind '" + std::string(name) + "'");
}

namespace {

// Per-component range of an affine map over the set, folded into a norm bound.
double affine_norm_bound(const Vector& offset, const Matrix& slopes, const FeasibleSet& set) {
  double sq = 0.0;
  for (Eigen::Index i = 0; i < slopes.cols(); ++i) {
    const Vector v = slopes.col(i);
    const double hi = offset(i) + support(set, v);
    const double lo = offset(i) - support(set, -v);
    const double b = std::max(std::abs(hi), std::abs(lo));
    sq += b * b;
  }
  return std::sqrt(sq);
}

void check_anchor(const RoundOracle& oracle, const Vector& anchor, const FeasibleSet& set) {
  if (static_cast<std::size_t>(anchor.size()) != oracle.dim() || oracle.dim() != set.dim()) {
    throw InvalidArgument("model: anchor, oracle and set dimensions disagree");
  }
  if (!anchor.allFinite()) throw NumericError("model: non-finite anchor");
}

}  // namespace

double constraint_norm_bound(const RoundOracle& oracle, const FeasibleSet& set) {
  if (oracle.linear_constraints()) {
    const Vector origin = Vector::Zero(static_cast<Eigen::Index>(oracle.dim()));
    return affine_norm_bound(oracle.constraints(origin), oracle.constraint_jacobian(origin), set);
  }
  return oracle.constraint_norm_bound();
}

ModelAt build_linearized(std::shared_ptr<const RoundOracle> oracle, const Vector& anchor,
                         const FeasibleSet& set) {
  check_anchor(*oracle, anchor, set);
  ModelAt m;
  m.kind_ = ModelKind::Linearized;
  m.anchor_ = anchor;
  m.p_ = oracle->num_constraints();
  m.f_anchor_ = oracle->loss(anchor);
  m.u_ = oracle->loss_subgradient(anchor);
  m.g_anchor_ = oracle->constraints(anchor);
  m.v_ = oracle->constraint_jacobian(anchor);
  m.nu_g_ = affine_norm_bound(m.g_anchor_ - m.v_.transpose() * anchor, m.v_, set);
  return m;
}

ModelAt build_quadratic_linearized(std::shared_ptr<const RoundOracle> oracle, const Vector& anchor,
                                   double iota, const FeasibleSet& set) {
  if (!(iota >= 0.0) || !std::isfinite(iota)) {
    throw InvalidArgument("quadratic-linearized model: iota must be a finite value >= 0");
  }
  ModelAt m = build_linearized(std::move(oracle), anchor, set);
  m.kind_ = ModelKind::QuadraticLinearized;
  m.iota_ = iota;
  return m;
}

ModelAt build_truncated(std::shared_ptr<const RoundOracle> oracle, const Vector& anchor,
                        const FeasibleSet& set, double floor) {
  if (!std::isfinite(floor)) throw InvalidArgument("truncated model: floor must be finite");
  ModelAt m = build_linearized(std::move(oracle), anchor, set);
  m.kind_ = ModelKind::Truncated;
  m.floor_ = floor;
  return m;
}

ModelAt build_plain(std::shared_ptr<const RoundOracle> oracle, const Vector& anchor,
                    const FeasibleSet& set) {
  check_anchor(*oracle, anchor, set);
  ModelAt m;
  m.kind_ = ModelKind::Plain;
  m.anchor_ = anchor;
  m.p_ = oracle->num_constraints();
  m.nu_g_ = constraint_norm_bound(*oracle, set);
  m.oracle_ = std::move(oracle);
  return m;
}

ModelAt build_model(ModelKind kind, std::shared_ptr<const RoundOracle> oracle, const Vector& anchor,
                    const FeasibleSet& set, double iota) {
  switch (kind) {
    case ModelKind::Plain: return build_plain(std::move(oracle), anchor, set);
    case ModelKind::Linearized: return build_linearized(std::move(oracle), anchor, set);
    case ModelKind::QuadraticLinearized: {
      const double modulus = iota < 0.0 ? oracle->strong_convexity() : iota;
      return build_quadratic_linearized(std::move(oracle), anchor, modulus, set);
    }
    case ModelKind::Truncated: {
      const double lower = oracle->loss_lower_bound();
      if (!std::isfinite(lower)) {
        throw UnsupportedProblem("truncated model needs a finite lower bound on the loss");
      }
      return build_truncated(std::move(oracle), anchor, set, std::min(lower, 0.0));
    }
  }
  throw InvalidArgument("build_model: unknown kind");
}

double ModelAt::linear_F(const Vector& x) const { return f_anchor_ + u_.dot(x - anchor_); }

double ModelAt::eval_F(const Vector& x) const {
  switch (kind_) {
    case ModelKind::Plain: return oracle_->loss(x);
    case ModelKind::Linearized: return linear_F(x);
    case ModelKind::QuadraticLinearized: return linear_F(x) + 0.5 * iota_ * (x - anchor_).squaredNorm();
    case ModelKind::Truncated: return std::max(linear_F(x), floor_);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

Vector ModelAt::subgrad_F(const Vector& x) const {
  switch (kind_) {
    case ModelKind::Plain: return oracle_->loss_subgradient(x);
    case ModelKind::Linearized: return u_;
    case ModelKind::QuadraticLinearized: return u_ + iota_ * (x - anchor_);
    case ModelKind::Truncated:
      return linear_F(x) > floor_ ? Vector(u_) : Vector(Vector::Zero(u_.size()));
  }
  return {};
}

Vector ModelAt::eval_G(const Vector& x) const {
  if (kind_ == ModelKind::Plain) return oracle_->constraints(x);
  return g_anchor_ + v_.transpose() * (x - anchor_);
}

Vector ModelAt::subgrad_G(const Vector& x, std::size_t i) const {
  if (kind_ == ModelKind::Plain) return oracle_->constraint_subgradient(x, i);
  return v_.col(static_cast<Eigen::Index>(i));
}

bool ModelAt::smooth() const {
  switch (kind_) {
    case ModelKind::Plain: return oracle_->differentiable();
    case ModelKind::Truncated: return false;
    default: return true;
  }
}

}  // namespace ocal
