#pragma once

#include "ocal/core.hpp"

#include <memory>
#include <string_view>

namespace ocal {

enum class ModelKind { Plain, Linearized, QuadraticLinearized, Truncated };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

/// Conservative approximation (F, G) of one round's (f_t, g_t), anchored at x_t.
///
/// Every model satisfies F <= f_t and G <= g_t on the feasible set with equality
/// at the anchor. The affine kinds capture f_t(x_t), g_t(x_t) and the chosen
/// subgradients at construction; the plain kind keeps a handle to the oracle.
class ModelAt {
 public:
  ModelKind kind() const noexcept { return kind_; }
  const Vector& anchor() const noexcept { return anchor_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(anchor_.size()); }
  std::size_t num_constraints() const noexcept { return p_; }
  double nu_g() const noexcept { return nu_g_; }

  double eval_F(const Vector& x) const;
  Vector subgrad_F(const Vector& x) const;
  Vector eval_G(const Vector& x) const;
  Vector subgrad_G(const Vector& x, std::size_t i) const;

  /// Both F and G are differentiable, so the subproblem is smooth.
  bool smooth() const;
  /// G is affine: G(x) = g_anchor + V^T (x - anchor).
  bool affine_constraints() const { return kind_ != ModelKind::Plain; }

  // Captured anchor data for the affine kinds.
  double loss_at_anchor() const noexcept { return f_anchor_; }
  const Vector& loss_slope() const noexcept { return u_; }
  const Vector& constraints_at_anchor() const noexcept { return g_anchor_; }
  /// Column i is the chosen subgradient of g^(i) at the anchor.
  const Matrix& constraint_slopes() const noexcept { return v_; }
  double iota() const noexcept { return iota_; }
  /// Floor of the truncated model (0 for a nonnegative loss).
  double floor() const noexcept { return floor_; }
  /// Affine part f(x_t) + <u_t, x - x_t> used by the linearized kinds.
  double linear_F(const Vector& x) const;

  friend ModelAt build_linearized(std::shared_ptr<const RoundOracle>, const Vector&, const FeasibleSet&);
  friend ModelAt build_quadratic_linearized(std::shared_ptr<const RoundOracle>, const Vector&, double,
                                            const FeasibleSet&);
  friend ModelAt build_truncated(std::shared_ptr<const RoundOracle>, const Vector&, const FeasibleSet&,
                                 double);
  friend ModelAt build_plain(std::shared_ptr<const RoundOracle>, const Vector&, const FeasibleSet&);

 private:
  ModelAt() = default;

  ModelKind kind_ = ModelKind::Linearized;
  Vector anchor_;
  std::size_t p_ = 0;
  double nu_g_ = 0.0;
  double f_anchor_ = 0.0;
  Vector u_;
  Vector g_anchor_;
  Matrix v_;
  double iota_ = 0.0;
  double floor_ = 0.0;
  std::shared_ptr<const RoundOracle> oracle_;
};

/// F(x) = f(x_t) + <u_t, x - x_t>, G^(i)(x) = g^(i)(x_t) + <v^(i)_t, x - x_t>.
ModelAt build_linearized(std::shared_ptr<const RoundOracle> oracle, const Vector& anchor,
                         const FeasibleSet& set);

/// Linearized model plus (iota/2)||x - x_t||^2 on F. Requires iota >= 0.
ModelAt build_quadratic_linearized(std::shared_ptr<const RoundOracle> oracle, const Vector& anchor,
                                   double iota, const FeasibleSet& set);

/// F(x) = max(f(x_t) + <u_t, x - x_t>, floor); conservative when f >= floor on the set.
ModelAt build_truncated(std::shared_ptr<const RoundOracle> oracle, const Vector& anchor,
                        const FeasibleSet& set, double floor = 0.0);

/// F = f_t, G = g_t. The anchor is recorded but does not enter the model.
ModelAt build_plain(std::shared_ptr<const RoundOracle> oracle, const Vector& anchor,
                    const FeasibleSet& set);

/// Plain constraint-norm bound used when the oracle does not provide one.
double constraint_norm_bound(const RoundOracle& oracle, const FeasibleSet& set);

/// Builds the model of the requested kind. For QuadraticLinearized a negative
/// `iota` means "use the oracle's strong-convexity modulus"; for Truncated the
/// floor is the oracle's loss lower bound clipped to at most 0.
ModelAt build_model(ModelKind kind, std::shared_ptr<const RoundOracle> oracle, const Vector& anchor,
                    const FeasibleSet& set, double iota = -1.0);

}  // namespace ocal
