#include "doctest.h"
#include "test_util.hpp"

#include "ocal/problems.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace ocal;
using ocal::testing::vec;

namespace {

double min_eig(const Matrix& m) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

void check_midpoint_convexity(const ProblemInstance& p, double spread, double tol) {
  Rng rng(77, 1);
  for (std::size_t t = 0; t < p.horizon(); t += 3) {
    const RoundOracle& o = p.round(t);
    for (int k = 0; k < 10; ++k) {
      const Vector x = ocal::testing::random_point(rng, p.set, spread);
      const Vector y = ocal::testing::random_point(rng, p.set, spread);
      const Vector mid = 0.5 * (x + y);
      const double fx = o.loss(x), fy = o.loss(y);
      CHECK(o.loss(mid) <= 0.5 * (fx + fy) + tol * (1.0 + std::abs(fx) + std::abs(fy)));
      const Vector gx = o.constraints(x), gy = o.constraints(y), gm = o.constraints(mid);
      for (Eigen::Index i = 0; i < gm.size(); ++i) {
        CHECK(gm(i) <= 0.5 * (gx(i) + gy(i)) + tol * (1.0 + std::abs(gx(i)) + std::abs(gy(i))));
      }
    }
  }
}

void check_reproducible(const ProblemInstance& a, const ProblemInstance& b, double spread) {
  REQUIRE(a.horizon() == b.horizon());
  Rng rng(5, 5);
  for (std::size_t t = 0; t < a.horizon(); ++t) {
    const Vector x = ocal::testing::random_point(rng, a.set, spread);
    CHECK(a.round(t).loss(x) == b.round(t).loss(x));
    CHECK(a.round(t).constraints(x) == b.round(t).constraints(x));
    CHECK(a.round(t).loss_subgradient(x) == b.round(t).loss_subgradient(x));
  }
}

void check_slater(const ProblemInstance& p) {
  const ProblemConstants& c = p.constants;
  CHECK(c.diameter > 0.0);
  CHECK(c.kappa_f > 0.0);
  CHECK(c.kappa_g > 0.0);
  CHECK(c.nu_g > 0.0);
  CHECK(c.eps0 > 0.0);
  CHECK(contains(p.set, c.slater_point, 1e-12));
  for (std::size_t t = 0; t < p.horizon(); ++t) {
    CHECK(p.round(t).constraints(c.slater_point).maxCoeff() <= -c.eps0 + 1e-9);
  }
}

}  // namespace

TEST_CASE("nra incidence matrix") {
  Matrix one(2, 2);
  one << -1, 0, 1, -1;
  CHECK(nra_incidence(1, 1) == one);

  const Matrix A = nra_incidence(3, 2);
  CHECK(A.rows() == 5);
  CHECK(A.cols() == 8);
  // Every flow edge leaves one mapping node and enters one data center; every
  // workload edge only leaves its data center.
  for (Eigen::Index e = 0; e < 6; ++e) CHECK(A.col(e).sum() == 0.0);
  for (Eigen::Index e = 6; e < 8; ++e) CHECK(A.col(e).sum() == -1.0);
  CHECK(A(1, 1) == -1.0);  // z^{21} leaves mapping node 2
  CHECK(A(3, 1) == 1.0);   // and enters data center 1
}

TEST_CASE("nra generator") {
  const ProblemInstance p = generate_nra({}, 48, 11);
  CHECK(p.dim() == 110);
  CHECK(p.num_constraints() == 20);
  const auto& o = dynamic_cast<const NraOracle&>(p.round(5));
  const NraNetwork& net = o.network();
  CHECK(o.constraints(Vector::Zero(110)).tail(10).isZero(0.0));
  for (Eigen::Index e = 0; e < 100; ++e) {
    CHECK(net.capacity(e) >= 10.0);
    CHECK(net.capacity(e) <= 100.0);
    CHECK(net.cost(e) == doctest::Approx(40.0 / net.capacity(e)));
  }
  for (Eigen::Index e = 100; e < 110; ++e) {
    CHECK(net.capacity(e) >= 100.0);
    CHECK(net.capacity(e) <= 200.0);
  }
  const double s = std::sin(M_PI * 5.0 / 12.0);
  for (Eigen::Index k = 0; k < 10; ++k) {
    CHECK(o.price()(k) >= s + 1.0);
    CHECK(o.price()(k) <= s + 3.0);
    CHECK(o.request()(k) >= 50.0 * s + 99.0);
    CHECK(o.request()(k) <= 50.0 * s + 101.0);
    CHECK(o.request()(k) <= kNraRequestBound);
  }
  check_slater(p);
  check_reproducible(p, generate_nra({}, 48, 11), 150.0);
  check_midpoint_convexity(p, 150.0, 1e-12);

  // Longer horizons extend the stream without changing earlier rounds.
  const ProblemInstance longer = generate_nra({}, 60, 11);
  CHECK(longer.round(47).constraints(Vector::Ones(110)) == p.round(47).constraints(Vector::Ones(110)));
}

TEST_CASE("nra linear constraints aggregate to the componentwise maximum") {
  const ProblemInstance p = generate_nra({2, 2}, 30, 3);
  const auto& first = dynamic_cast<const NraOracle&>(p.round(0));
  const Matrix& A = first.network().incidence;
  Vector b_max = first.request();
  for (std::size_t t = 1; t < 30; ++t) {
    b_max = b_max.cwiseMax(dynamic_cast<const NraOracle&>(p.round(t)).request());
  }
  Rng rng(2, 2);
  int feasible = 0;
  for (int k = 0; k < 3000; ++k) {
    const Vector x = ocal::testing::random_point(rng, p.set, 200.0);
    bool all = true;
    for (std::size_t t = 0; t < 30; ++t) all = all && p.round(t).constraints(x).maxCoeff() <= 0.0;
    CHECK(all == ((A * x + b_max).maxCoeff() <= 0.0));
    feasible += all ? 1 : 0;
  }
  // The Slater flow is feasible for the aggregate with margin eps0.
  CHECK((A * p.constants.slater_point + b_max).maxCoeff() <= -p.constants.eps0 + 1e-9);
  MESSAGE("sampled feasible points: " << feasible);
}

TEST_CASE("olr generator") {
  const ProblemInstance p = generate_olr({}, 40, 6);
  CHECK(p.dim() == 5);
  CHECK(p.num_constraints() == 1);
  for (std::size_t t = 0; t < 40; ++t) {
    const auto& o = dynamic_cast<const OlrOracle&>(p.round(t));
    CHECK(o.loss(Vector::Zero(5)) == doctest::Approx(10.0 * std::log(2.0)).epsilon(1e-14));
    const Vector expected = -0.5 * o.features() * o.labels();
    CHECK((o.loss_subgradient(Vector::Zero(5)) - expected).norm() < 1e-14);
    for (Eigen::Index i = 0; i < o.labels().size(); ++i) CHECK(std::abs(o.labels()(i)) == 1.0);
    CHECK(o.threshold() >= 0.0);
    CHECK(o.constraints(Vector::Zero(5))(0) == -o.threshold());
  }
  CHECK(dynamic_cast<const OlrOracle&>(p.round(0)).threshold() == 1.0);
  // Drift of the features is bounded by the step width 1/(2t).
  const auto& o1 = dynamic_cast<const OlrOracle&>(p.round(1));
  const auto& o2 = dynamic_cast<const OlrOracle&>(p.round(2));
  CHECK((o2.features() - o1.features()).cwiseAbs().maxCoeff() <= 0.25 + 1e-15);
  check_slater(p);
  check_reproducible(p, generate_olr({}, 40, 6), 10.0);
  check_midpoint_convexity(p, 10.0, 1e-12);
}

TEST_CASE("oqcqp generator") {
  const ProblemInstance p = generate_oqcqp({}, 50, 21);
  CHECK(p.dim() == 8);
  CHECK(p.num_constraints() == 3);
  const Vector& xhat = p.constants.slater_point;
  CHECK(xhat.cwiseAbs().maxCoeff() < 10.0 / std::sqrt(8.0));
  const auto& first = dynamic_cast<const OqcqpOracle&>(p.round(0));
  CHECK(first.data().A == Matrix::Identity(8, 8));
  for (std::size_t t = 0; t < 50; ++t) {
    const auto& o = dynamic_cast<const OqcqpOracle&>(p.round(t));
    const QuadraticRound& d = o.data();
    CHECK(min_eig(d.A) >= -1e-10);
    for (const Matrix& C : d.C) CHECK(min_eig(C) >= -1e-10);
    const Vector g = o.constraints(xhat);
    for (Eigen::Index i = 0; i < 3; ++i) {
      CHECK(g(i) == doctest::Approx(-d.h(i)).epsilon(1e-12));
      CHECK(d.h(i) > 0.0);
      CHECK(d.h(i) <= 1.0);
    }
    if (t > 0) {
      const auto& prev = dynamic_cast<const OqcqpOracle&>(p.round(t - 1));
      CHECK((d.b - prev.data().b).cwiseAbs().maxCoeff() <= 0.1);
    }
  }
  check_slater(p);
  check_reproducible(p, generate_oqcqp({}, 50, 21), 5.0);
  check_midpoint_convexity(p, 5.0, 1e-12);
}

TEST_CASE("different seeds give different instances") {
  const ProblemInstance a = generate_oqcqp({}, 3, 1), b = generate_oqcqp({}, 3, 2);
  CHECK(a.round(2).loss(Vector::Ones(8)) != b.round(2).loss(Vector::Ones(8)));
}
