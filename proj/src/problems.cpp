#include "ocal/problems.hpp"

#include "ocal/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>

namespace ocal {

namespace {

// Substream ids. Each random quantity owns its stream so the rounds already
// drawn do not change when the horizon grows.
enum Stream : std::uint64_t {
  kNraCapacity = 1,
  kNraPrice = 2,
  kNraRequest = 3,
  kOlrFeatures = 11,
  kOlrLabels = 12,
  kOlrThreshold = 13,
  kQpObjectiveMatrix = 21,
  kQpObjectiveVector = 22,
  kQpSlack = 23,
  kQpSlater = 24,
  kQpConstraintMatrix = 100,  // + i
  kQpConstraintVector = 200,  // + i
};

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }
double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double ez = std::exp(z);
  return ez / (1.0 + ez);
}

// Dense Edmonds-Karp on a small graph; capacities are overwritten with residuals.
double max_flow(Matrix& cap, Eigen::Index source, Eigen::Index sink) {
  const Eigen::Index n = cap.rows();
  double total = 0.0;
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
  for (;;) {
    std::fill(parent.begin(), parent.end(), -1);
    parent[static_cast<std::size_t>(source)] = source;
    std::queue<Eigen::Index> q;
    q.push(source);
    while (!q.empty() && parent[static_cast<std::size_t>(sink)] < 0) {
      const Eigen::Index u = q.front();
      q.pop();
      for (Eigen::Index v = 0; v < n; ++v) {
        if (parent[static_cast<std::size_t>(v)] < 0 && cap(u, v) > 1e-12) {
          parent[static_cast<std::size_t>(v)] = u;
          q.push(v);
        }
      }
    }
    if (parent[static_cast<std::size_t>(sink)] < 0) return total;
    double push = std::numeric_limits<double>::infinity();
    for (Eigen::Index v = sink; v != source; v = parent[static_cast<std::size_t>(v)]) {
      push = std::min(push, cap(parent[static_cast<std::size_t>(v)], v));
    }
    for (Eigen::Index v = sink; v != source; v = parent[static_cast<std::size_t>(v)]) {
      const Eigen::Index u = parent[static_cast<std::size_t>(v)];
      cap(u, v) -= push;
      cap(v, u) += push;
    }
    total += push;
  }
}

// Routes `demand` out of every mapping node with data-center intake capped at
// capacity - slack. Returns true and the edge flows when every demand is met.
bool route_demand(const NraNetwork& net, double demand, double slack, Vector* flows) {
  const auto J = static_cast<Eigen::Index>(net.J);
  const auto K = static_cast<Eigen::Index>(net.K);
  const Eigen::Index source = 0, sink = J + K + 1;
  Matrix cap = Matrix::Zero(J + K + 2, J + K + 2);
  for (Eigen::Index j = 0; j < J; ++j) cap(source, 1 + j) = demand;
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index j = 0; j < J; ++j) cap(1 + j, 1 + J + k) = net.capacity(k * J + j);
    const double intake = net.capacity(J * K + k) - slack;
    if (intake < 0.0) return false;
    cap(1 + J + k, sink) = intake;
  }
  const Matrix original = cap;
  const double flow = max_flow(cap, source, sink);
  if (flow < static_cast<double>(J) * demand * (1.0 - 1e-12) - 1e-9) return false;
  if (flows) {
    flows->resize(J * K + K);
    for (Eigen::Index k = 0; k < K; ++k) {
      for (Eigen::Index j = 0; j < J; ++j) {
        (*flows)(k * J + j) = std::clamp(original(1 + j, 1 + J + k) - cap(1 + j, 1 + J + k), 0.0,
                                         net.capacity(k * J + j));
      }
      (*flows)(J * K + k) = net.capacity(J * K + k);
    }
  }
  return true;
}

Matrix random_symmetric(Rng& rng, Eigen::Index n, double half_width) {
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      m(i, j) = rng.uniform(-half_width, half_width);
      m(j, i) = m(i, j);
    }
  }
  return m;
}

Vector random_vector(Rng& rng, Eigen::Index n, double lo, double hi) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// NRA

Matrix nra_incidence(std::size_t J, std::size_t K) {
  const auto j_count = static_cast<Eigen::Index>(J);
  const auto k_count = static_cast<Eigen::Index>(K);
  Matrix A = Matrix::Zero(j_count + k_count, j_count * k_count + k_count);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    for (Eigen::Index j = 0; j < j_count; ++j) {
      const Eigen::Index edge = k * j_count + j;
      A(j, edge) = -1.0;           // leaves mapping node j
      A(j_count + k, edge) = 1.0;  // enters data center k
    }
    A(j_count + k, j_count * k_count + k) = -1.0;  // virtual edge (k, *) leaves k
  }
  return A;
}

double nra_max_slack(const NraNetwork& net, double request_bound, Vector* slater_point) {
  if (!route_demand(net, request_bound, 0.0, nullptr)) return -1.0;
  double lo = 0.0;
  double hi = net.capacity.tail(static_cast<Eigen::Index>(net.K)).minCoeff();
  for (int it = 0; it < 80 && hi - lo > 1e-10 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (route_demand(net, request_bound + mid, mid, nullptr) ? lo : hi) = mid;
  }
  if (slater_point) route_demand(net, request_bound + lo, lo, slater_point);
  return lo;
}

NraOracle::NraOracle(std::size_t round, std::shared_ptr<const NraNetwork> net, Vector price, Vector request)
    : round_(round), net_(std::move(net)), price_(std::move(price)), request_(std::move(request)) {}

double NraOracle::loss(const Vector& x) const {
  const auto JK = static_cast<Eigen::Index>(net_->J * net_->K);
  const auto K = static_cast<Eigen::Index>(net_->K);
  return net_->cost.dot(x.head(JK).cwiseAbs2()) + price_.dot(x.tail(K).cwiseAbs2());
}

Vector NraOracle::loss_subgradient(const Vector& x) const {
  const auto JK = static_cast<Eigen::Index>(net_->J * net_->K);
  const auto K = static_cast<Eigen::Index>(net_->K);
  Vector g(x.size());
  g.head(JK) = 2.0 * net_->cost.cwiseProduct(x.head(JK));
  g.tail(K) = 2.0 * price_.cwiseProduct(x.tail(K));
  return g;
}

Vector NraOracle::constraints(const Vector& x) const { return net_->incidence * x + request_; }

Vector NraOracle::constraint_subgradient(const Vector&, std::size_t i) const {
  return net_->incidence.row(static_cast<Eigen::Index>(i)).transpose();
}

double NraOracle::strong_convexity() const {
  return 2.0 * std::min(net_->cost.minCoeff(), price_.minCoeff());
}

ProblemInstance generate_nra(const NraParams& params, std::size_t horizon, std::uint64_t seed) {
  if (params.mapping_nodes == 0 || params.data_centers == 0) {
    throw InvalidArgument("nra: J and K must be at least 1");
  }
  const std::size_t J = params.mapping_nodes, K = params.data_centers;
  const auto j_count = static_cast<Eigen::Index>(J);
  const auto k_count = static_cast<Eigen::Index>(K);
  const Eigen::Index E = j_count * k_count + k_count;
  const Eigen::Index I = j_count + k_count;

  // Capacities are redrawn until the network admits a Slater point with at
  // least one unit of slack against the largest possible request.
  auto net = std::make_shared<NraNetwork>();
  net->J = J;
  net->K = K;
  net->incidence = nra_incidence(J, K);
  Rng cap_rng(seed, kNraCapacity);
  Vector slater;
  double slack = -1.0;
  for (int attempt = 0; attempt < 1000 && slack < 1.0; ++attempt) {
    net->capacity.resize(E);
    for (Eigen::Index e = 0; e < j_count * k_count; ++e) net->capacity(e) = cap_rng.uniform(10.0, 100.0);
    for (Eigen::Index k = 0; k < k_count; ++k) net->capacity(j_count * k_count + k) = cap_rng.uniform(100.0, 200.0);
    slack = nra_max_slack(*net, kNraRequestBound, &slater);
  }
  if (slack < 1.0) {
    throw InfeasibleProblem("nra: no capacity draw admits a strictly feasible allocation for J=" +
                            std::to_string(J) + ", K=" + std::to_string(K));
  }
  net->cost = (40.0 / net->capacity.head(j_count * k_count).array()).matrix();

  ProblemInstance inst{"nra", ProblemKind::NetworkAllocation,
                       FeasibleSet::box(Vector::Zero(E), net->capacity), {}, {}, seed};
  inst.rounds.reserve(horizon);
  Rng price_rng(seed, kNraPrice);
  Rng request_rng(seed, kNraRequest);
  for (std::size_t t = 0; t < horizon; ++t) {
    const double wave = std::sin(std::numbers::pi * static_cast<double>(t) / 12.0);
    Vector price(k_count);
    for (Eigen::Index k = 0; k < k_count; ++k) price(k) = wave + price_rng.uniform(1.0, 3.0);
    Vector request = Vector::Zero(I);
    for (Eigen::Index j = 0; j < j_count; ++j) request(j) = 50.0 * wave + request_rng.uniform(99.0, 101.0);
    inst.rounds.push_back(std::make_shared<NraOracle>(t, net, std::move(price), std::move(request)));
  }

  // Constants. Prices lie in [0, 4] and mapping requests in [49, 151].
  ProblemConstants& c = inst.constants;
  c.diameter = net->capacity.norm();
  const Vector zcap = net->capacity.head(j_count * k_count);
  const Vector ycap = net->capacity.tail(k_count);
  c.kappa_f = std::sqrt((2.0 * net->cost.cwiseProduct(zcap)).squaredNorm() + (8.0 * ycap).squaredNorm());
  c.kappa_g = net->incidence.rowwise().norm().maxCoeff();
  Vector row_bound(I);
  for (Eigen::Index j = 0; j < j_count; ++j) {
    double out = 0.0;
    for (Eigen::Index k = 0; k < k_count; ++k) out += zcap(k * j_count + j);
    row_bound(j) = std::max(kNraRequestBound, out - 49.0);
  }
  for (Eigen::Index k = 0; k < k_count; ++k) {
    row_bound(j_count + k) = std::max(ycap(k), zcap.segment(k * j_count, j_count).sum());
  }
  c.nu_g = row_bound.norm();
  c.eps0 = slack;
  c.slater_point = slater;
  return inst;
}

// ---------------------------------------------------------------------------
// OLR

OlrOracle::OlrOracle(std::size_t round, Matrix features, Vector labels, double threshold, double bound)
    : round_(round), features_(std::move(features)), labels_(std::move(labels)), threshold_(threshold), bound_(bound) {}

double OlrOracle::loss(const Vector& x) const {
  const Vector margins = labels_.cwiseProduct(features_.transpose() * x);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) sum += softplus(-margins(i));
  return sum;
}

Vector OlrOracle::loss_subgradient(const Vector& x) const {
  const Vector margins = labels_.cwiseProduct(features_.transpose() * x);
  Vector weights(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i) weights(i) = -labels_(i) * logistic(-margins(i));
  return features_ * weights;
}

Vector OlrOracle::constraints(const Vector& x) const {
  Vector g(1);
  g(0) = x.lpNorm<1>() - threshold_;
  return g;
}

Vector OlrOracle::constraint_subgradient(const Vector& x, std::size_t) const {
  return x.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

double OlrOracle::constraint_norm_bound() const {
  const double max_l1 = bound_ * static_cast<double>(features_.rows());
  return std::max(max_l1 - threshold_, threshold_);
}

ProblemInstance generate_olr(const OlrParams& params, std::size_t horizon, std::uint64_t seed) {
  if (params.dim == 0 || params.samples == 0) throw InvalidArgument("olr: n and k must be at least 1");
  if (!(params.bound > 0.0)) throw InvalidArgument("olr: M must be positive");
  const auto n = static_cast<Eigen::Index>(params.dim);
  const auto k = static_cast<Eigen::Index>(params.samples);

  ProblemInstance inst{"olr", ProblemKind::LogisticRegression, FeasibleSet::sup_ball(params.dim, params.bound),
                       {}, {}, seed};
  inst.rounds.reserve(horizon);
  Rng feature_rng(seed, kOlrFeatures);
  Rng label_rng(seed, kOlrLabels);
  Rng threshold_rng(seed, kOlrThreshold);

  Matrix U(n, k);
  for (Eigen::Index i = 0; i < k; ++i) U.col(i) = random_vector(feature_rng, n, -1.0, 1.0);
  double a = 1.0;
  double a_min = a, a_max = a, kappa_f = 0.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    if (t > 0) {
      // Step t -> t+1 with drift width 1/(2t), t >= 1.
      const double w = 0.5 / static_cast<double>(t);
      for (Eigen::Index i = 0; i < k; ++i) U.col(i) += random_vector(feature_rng, n, -w, w);
      a = std::max(a + threshold_rng.uniform(-w, w), 0.0);
    }
    Vector labels(k);
    for (Eigen::Index i = 0; i < k; ++i) labels(i) = label_rng.sign();
    a_min = std::min(a_min, a);
    a_max = std::max(a_max, a);
    kappa_f = std::max(kappa_f, U.colwise().norm().sum());
    inst.rounds.push_back(std::make_shared<OlrOracle>(t, U, std::move(labels), a, params.bound));
  }

  ProblemConstants& c = inst.constants;
  c.diameter = diameter(inst.set);
  c.kappa_f = kappa_f;
  c.kappa_g = std::sqrt(static_cast<double>(n));
  // Linearized: G(y) = sign(x)^T y - a, so |G| <= nM + a; the plain model is tighter.
  c.nu_g = params.bound * static_cast<double>(n) + a_max;
  c.eps0 = a_min;
  c.slater_point = Vector::Zero(n);
  return inst;
}

// ---------------------------------------------------------------------------
// OQCQP

OqcqpOracle::OqcqpOracle(std::size_t round, QuadraticRound data, double radius)
    : round_(round), data_(std::move(data)), radius_(radius) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(data_.A, Eigen::EigenvaluesOnly);
  min_eig_A_ = std::max(eig.eigenvalues().minCoeff(), 0.0);
  norm_A_ = std::max(eig.eigenvalues().maxCoeff(), 0.0);
  norm_C_.resize(static_cast<Eigen::Index>(data_.C.size()));
  for (std::size_t i = 0; i < data_.C.size(); ++i) {
    Eigen::SelfAdjointEigenSolver<Matrix> ec(data_.C[i], Eigen::EigenvaluesOnly);
    norm_C_(static_cast<Eigen::Index>(i)) = std::max(ec.eigenvalues().maxCoeff(), 0.0);
  }
}

double OqcqpOracle::loss(const Vector& x) const { return 0.5 * x.dot(data_.A * x) + data_.b.dot(x); }

Vector OqcqpOracle::loss_subgradient(const Vector& x) const { return data_.A * x + data_.b; }

Vector OqcqpOracle::constraints(const Vector& x) const {
  Vector g(static_cast<Eigen::Index>(data_.C.size()));
  for (std::size_t i = 0; i < data_.C.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    g(ii) = 0.5 * x.dot(data_.C[i] * x) + data_.d.col(ii).dot(x) + data_.e(ii);
  }
  return g;
}

Vector OqcqpOracle::constraint_subgradient(const Vector& x, std::size_t i) const {
  return data_.C[i] * x + data_.d.col(static_cast<Eigen::Index>(i));
}

double OqcqpOracle::loss_lower_bound() const { return -data_.b.norm() * radius_; }

double OqcqpOracle::constraint_norm_bound() const {
  double sq = 0.0;
  for (std::size_t i = 0; i < data_.C.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double b = 0.5 * norm_C_(ii) * radius_ * radius_ + data_.d.col(ii).norm() * radius_ + std::abs(data_.e(ii));
    sq += b * b;
  }
  return std::sqrt(sq);
}

ProblemInstance generate_oqcqp(const OqcqpParams& params, std::size_t horizon, std::uint64_t seed) {
  if (params.dim == 0 || params.constraints == 0) throw InvalidArgument("oqcqp: n and p must be at least 1");
  if (!(params.radius > 0.0)) throw InvalidArgument("oqcqp: R must be positive");
  const auto n = static_cast<Eigen::Index>(params.dim);
  const std::size_t p = params.constraints;
  const double R = params.radius;

  ProblemInstance inst{"oqcqp", ProblemKind::Qcqp, FeasibleSet::ball(params.dim, R), {}, {}, seed};
  inst.rounds.reserve(horizon);

  Rng slater_rng(seed, kQpSlater);
  const double half = R / std::sqrt(static_cast<double>(n));
  const Vector x_hat = random_vector(slater_rng, n, -half, half);

  Rng a_rng(seed, kQpObjectiveMatrix), b_rng(seed, kQpObjectiveVector), h_rng(seed, kQpSlack);
  std::vector<Rng> c_rng, d_rng;
  for (std::size_t i = 0; i < p; ++i) {
    c_rng.emplace_back(seed, kQpConstraintMatrix + i);
    d_rng.emplace_back(seed, kQpConstraintVector + i);
  }

  QuadraticRound cur;
  cur.C.resize(p);
  cur.d.resize(n, static_cast<Eigen::Index>(p));
  cur.e.resize(static_cast<Eigen::Index>(p));
  cur.h.resize(static_cast<Eigen::Index>(p));

  double kappa_f = 0.0, kappa_g = 0.0, eps0 = std::numeric_limits<double>::infinity();
  std::vector<Vector> g_sup;
  g_sup.reserve(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    if (t == 0) {
      cur.A = Matrix::Identity(n, n);
      cur.b = random_vector(b_rng, n, -1.0, 1.0);
      for (std::size_t i = 0; i < p; ++i) {
        cur.C[i] = Matrix::Identity(n, n);
        cur.d.col(static_cast<Eigen::Index>(i)) = random_vector(d_rng[i], n, -1.0, 1.0);
      }
    } else {
      cur.A = project_psd(cur.A + random_symmetric(a_rng, n, 0.1));
      cur.b += random_vector(b_rng, n, -0.1, 0.1);
      for (std::size_t i = 0; i < p; ++i) {
        cur.C[i] = project_psd(cur.C[i] + random_symmetric(c_rng[i], n, 0.1));
        cur.d.col(static_cast<Eigen::Index>(i)) += random_vector(d_rng[i], n, -0.1, 0.1);
      }
    }
    for (std::size_t i = 0; i < p; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      cur.h(ii) = h_rng.uniform(0.0, 1.0);
      cur.e(ii) = -0.5 * x_hat.dot(cur.C[i] * x_hat) - cur.d.col(ii).dot(x_hat) - cur.h(ii);
    }
    auto oracle = std::make_shared<OqcqpOracle>(t, cur, R);
    kappa_f = std::max(kappa_f, oracle->loss_curvature() * R + cur.b.norm());
    Vector sup(static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double cn = oracle->constraint_curvature()(ii);
      kappa_g = std::max(kappa_g, cn * R + cur.d.col(ii).norm());
      sup(ii) = 0.5 * cn * R * R + cur.d.col(ii).norm() * R + std::abs(cur.e(ii));
    }
    g_sup.push_back(std::move(sup));
    eps0 = std::min(eps0, cur.h.minCoeff());
    inst.rounds.push_back(std::move(oracle));
  }

  ProblemConstants& c = inst.constants;
  c.diameter = 2.0 * R;
  c.kappa_f = kappa_f;
  c.kappa_g = kappa_g;
  // |G^(i)(y)| <= |g^(i)(x)| + kappa_g ||y - x|| covers the plain and linearized models.
  double nu = 0.0;
  for (const Vector& sup : g_sup) nu = std::max(nu, (sup.array() + 2.0 * R * kappa_g).matrix().norm());
  c.nu_g = nu;
  c.eps0 = horizon > 0 ? eps0 : 0.0;
  c.slater_point = x_hat;
  return inst;
}

}  // namespace ocal
