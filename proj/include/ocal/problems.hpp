#pragma once

#include "ocal/core.hpp"
#include "ocal/instance.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace ocal {

// ---------------------------------------------------------------------------
// Online network resource allocation
//
// Variables x = [z^{11}, z^{21}, ..., z^{JK}, y^1, ..., y^K]: z^{jk} is the flow
// from mapping node j to data center k (j varies fastest), y^k the workload of
// data center k. Rows of the node-incidence matrix are the J mapping nodes
// followed by the K data centers.

struct NraParams {
  std::size_t mapping_nodes = 10;  // J
  std::size_t data_centers = 10;   // K
};

struct NraNetwork {
  std::size_t J = 0;
  std::size_t K = 0;
  Matrix incidence;  // I x E
  Vector cost;       // c^{jk}, length JK
  Vector capacity;   // upper corner of the box, length E
};

/// Largest request any mapping node can see: 50 + 101.
inline constexpr double kNraRequestBound = 151.0;

class NraOracle final : public RoundOracle {
 public:
  NraOracle(std::size_t round, std::shared_ptr<const NraNetwork> net, Vector price, Vector request);

  std::size_t round() const override { return round_; }
  std::size_t dim() const override { return static_cast<std::size_t>(net_->capacity.size()); }
  std::size_t num_constraints() const override { return static_cast<std::size_t>(request_.size()); }
  double loss(const Vector& x) const override;
  Vector loss_subgradient(const Vector& x) const override;
  Vector constraints(const Vector& x) const override;
  Vector constraint_subgradient(const Vector& x, std::size_t i) const override;
  bool linear_constraints() const override { return true; }
  double strong_convexity() const override;
  double loss_lower_bound() const override { return 0.0; }

  const NraNetwork& network() const { return *net_; }
  const Vector& price() const { return price_; }
  /// b_t: requests on mapping rows, zeros on data-center rows.
  const Vector& request() const { return request_; }

 private:
  std::size_t round_;
  std::shared_ptr<const NraNetwork> net_;
  Vector price_;
  Vector request_;
};

/// I x E node-incidence matrix: +1 where an edge enters a node, -1 where it leaves.
Matrix nra_incidence(std::size_t J, std::size_t K);

/// Largest s such that some x in the box has A x + b + s <= 0 for every request
/// vector b with mapping entries up to `request_bound`; the maximizing flow is
/// written to `slater_point`. Returns a negative value when no such x exists.
double nra_max_slack(const NraNetwork& net, double request_bound, Vector* slater_point);

ProblemInstance generate_nra(const NraParams& params, std::size_t horizon, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Online logistic regression with an l1 budget

struct OlrParams {
  std::size_t dim = 5;      // n
  std::size_t samples = 10; // k
  double bound = 10.0;      // M, the sup-norm radius of the feasible set
};

class OlrOracle final : public RoundOracle {
 public:
  OlrOracle(std::size_t round, Matrix features, Vector labels, double threshold, double bound);

  std::size_t round() const override { return round_; }
  std::size_t dim() const override { return static_cast<std::size_t>(features_.rows()); }
  std::size_t num_constraints() const override { return 1; }
  double loss(const Vector& x) const override;
  Vector loss_subgradient(const Vector& x) const override;
  Vector constraints(const Vector& x) const override;
  /// sign(x) with the zero subgradient at 0.
  Vector constraint_subgradient(const Vector& x, std::size_t i) const override;
  bool differentiable() const override { return false; }
  double loss_lower_bound() const override { return 0.0; }
  double constraint_norm_bound() const override;

  const Matrix& features() const { return features_; }  // column i is u_{i,t}
  const Vector& labels() const { return labels_; }
  double threshold() const { return threshold_; }

 private:
  std::size_t round_;
  Matrix features_;
  Vector labels_;
  double threshold_;
  double bound_;
};

ProblemInstance generate_olr(const OlrParams& params, std::size_t horizon, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Online quadratically constrained quadratic program

struct OqcqpParams {
  std::size_t dim = 8;          // n
  std::size_t constraints = 3;  // p
  double radius = 10.0;         // R
};

struct QuadraticRound {
  Matrix A;
  Vector b;
  std::vector<Matrix> C;
  Matrix d;  // column i is d^(i)
  Vector e;
  Vector h;  // Slater slack: g^(i)(x_hat) = -h^(i)
};

class OqcqpOracle final : public RoundOracle {
 public:
  OqcqpOracle(std::size_t round, QuadraticRound data, double radius);

  std::size_t round() const override { return round_; }
  std::size_t dim() const override { return static_cast<std::size_t>(data_.b.size()); }
  std::size_t num_constraints() const override { return data_.C.size(); }
  double loss(const Vector& x) const override;
  Vector loss_subgradient(const Vector& x) const override;
  Vector constraints(const Vector& x) const override;
  Vector constraint_subgradient(const Vector& x, std::size_t i) const override;
  double strong_convexity() const override { return min_eig_A_; }
  double loss_lower_bound() const override;
  double constraint_norm_bound() const override;

  const QuadraticRound& data() const { return data_; }
  /// Spectral norm of each C^(i).
  const Vector& constraint_curvature() const { return norm_C_; }
  double loss_curvature() const { return norm_A_; }

 private:
  std::size_t round_;
  QuadraticRound data_;
  double radius_;
  double min_eig_A_ = 0.0;
  double norm_A_ = 0.0;
  Vector norm_C_;
};

ProblemInstance generate_oqcqp(const OqcqpParams& params, std::size_t horizon, std::uint64_t seed);

}  // namespace ocal
