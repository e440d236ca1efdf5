#include "doctest.h"
#include "test_util.hpp"

#include "ocal/baselines.hpp"
#include "ocal/problems.hpp"

#include <cmath>

using namespace ocal;
using ocal::testing::vec;

namespace {

const FeasibleSet kLine = FeasibleSet::box(vec({-2}), vec({2}));

// f = x, g = x - 1.
std::shared_ptr<const RoundOracle> unit_round() { return ocal::testing::scalar_round(0, 0.0, 0.0, 1.0, 1.0); }

// Zero loss, constant constraint value g.
std::shared_ptr<const RoundOracle> flat_round(double g) {
  FunctionOracle::Functions fns;
  fns.loss = [](const Vector&) { return 0.0; };
  fns.loss_subgradient = [](const Vector& x) { return Vector(Vector::Zero(x.size())); };
  fns.constraints = [g](const Vector&) { return vec({g}); };
  fns.constraint_subgradient = [](const Vector& x, std::size_t) { return Vector(Vector::Zero(x.size())); };
  return std::make_shared<FunctionOracle>(0, 1, 1, std::move(fns), true);
}

std::shared_ptr<const RoundOracle> circle_round() {
  FunctionOracle::Functions fns;
  fns.loss = [](const Vector& x) { return x.sum(); };
  fns.loss_subgradient = [](const Vector& x) { return Vector(Vector::Ones(x.size())); };
  fns.constraints = [](const Vector& x) { return vec({x.squaredNorm() - 1.0}); };
  fns.constraint_subgradient = [](const Vector& x, std::size_t) { return Vector(2.0 * x); };
  return std::make_shared<FunctionOracle>(0, 2, 1, std::move(fns), false);
}

}  // namespace

TEST_CASE("mosp step examples") {
  const BaselineState s = mosp_step({vec({0}), vec({2})}, *unit_round(), kLine, 0.1, 0.1);
  CHECK(s.x(0) == doctest::Approx(-0.3));
  CHECK(s.lambda(0) == doctest::Approx(1.87));

  const BaselineState still = mosp_step({vec({0.7}), vec({0})}, *flat_round(-1.0), kLine, 0.5, 0.5);
  CHECK(still.x == vec({0.7}));
  CHECK(still.lambda(0) == 0.0);

  CHECK_THROWS_AS(mosp_step({vec({0, 0}), vec({0})}, *circle_round(), FeasibleSet::ball(2, 2.0), 0.1, 0.1),
                  UnsupportedProblem);
}

TEST_CASE("cl step examples") {
  const BaselineState s = cl_step({vec({0}), vec({1})}, *unit_round(), kLine, 0.5, 0.01);
  CHECK(s.x(0) == doctest::Approx(-1.0));
  CHECK(s.lambda(0) == doctest::Approx(0.4975));

  const BaselineState still = cl_step({vec({0.2}), vec({0})}, *flat_round(-0.5), kLine, 0.3, 0.01);
  CHECK(still.x == vec({0.2}));
  CHECK(still.lambda(0) == 0.0);

  // delta = 0 is the plain primal-dual gradient step.
  const BaselineState plain = cl_step({vec({0}), vec({1})}, *unit_round(), kLine, 0.5, 0.0);
  CHECK(plain.lambda(0) == doctest::Approx(0.5));
}

TEST_CASE("ny step examples") {
  const BaselineState start{vec({0}), vec({0})};
  const BaselineState s = ny_step(start, start, *unit_round(), kLine, 1.0, 1.0, 0);
  CHECK(s.x(0) == doctest::Approx(-0.5));
  CHECK(s.lambda(0) == 0.0);

  const BaselineState idle{vec({0.4}), vec({0})};
  const BaselineState still = ny_step(idle, idle, *flat_round(-2.0), kLine, 3.0, 2.0, 0);
  CHECK(still.x == vec({0.4}));
  CHECK(still.lambda(0) == 0.0);

  // For linear g the delayed rule at tau = 0 reproduces the undelayed one.
  Rng rng(1, 2);
  for (int k = 0; k < 20; ++k) {
    const BaselineState st{vec({rng.uniform(-2, 2)}), vec({rng.uniform(0, 3)})};
    const auto r = ocal::testing::scalar_round(0, rng.uniform(0, 2), rng.uniform(-1, 1), rng.uniform(-1, 1),
                                               rng.uniform(-1, 1));
    const BaselineState undelayed = ny_step(st, st, *r, kLine, 2.0, 1.5, 0);
    const Vector lin = (st.lambda + r->constraints(st.x) +
                        r->constraint_jacobian(st.x).transpose() * (undelayed.x - st.x))
                           .cwiseMax(0.0);
    CHECK(std::abs(lin(0) - undelayed.lambda(0)) < 1e-12);
  }
}

TEST_CASE("czp step examples") {
  const BaselineState current{vec({0.5}), vec({0.5})};
  const BaselineState delayed{vec({0.0}), vec({1.0})};
  const BaselineState s = czp_step(current, delayed, *unit_round(), kLine, 0.1, 10.0);
  CHECK(s.x(0) == doctest::Approx(0.3));
  CHECK(s.lambda(0) == doctest::Approx(0.3));

  // tau = 0 is CL.
  Rng rng(8, 1);
  for (int k = 0; k < 10; ++k) {
    const BaselineState st{vec({rng.uniform(-2, 2)}), vec({rng.uniform(0, 3)})};
    const BaselineState a = czp_step(st, st, *unit_round(), kLine, 0.3, 0.5);
    const BaselineState b = cl_step(st, *unit_round(), kLine, 0.3, 0.5);
    CHECK(a.x == b.x);
    CHECK(a.lambda == b.lambda);
  }

  const BaselineState idle{vec({-1.0}), vec({0})};
  const BaselineState still = czp_step(idle, idle, *flat_round(-0.1), kLine, 0.2, 10.0);
  CHECK(still.x == idle.x);
  CHECK(still.lambda(0) == 0.0);
}

TEST_CASE("presets") {
  const auto mosp = BaselineConfig::reference_preset(BaselineKind::Mosp, 1000, 0);
  CHECK(mosp.alpha == doctest::Approx(0.1));
  CHECK(mosp.mu == doctest::Approx(0.1));
  const auto cl = BaselineConfig::reference_preset(BaselineKind::Cl, 10000, 0);
  CHECK(cl.eta == doctest::Approx(0.02));
  CHECK(cl.delta == 0.01);
  const auto ny = BaselineConfig::reference_preset(BaselineKind::Ny, 10000, 0);
  CHECK(ny.alpha == 10000.0);
  CHECK(ny.nu == doctest::Approx(100.0));
  const auto czp0 = BaselineConfig::reference_preset(BaselineKind::Czp, 100, 0);
  CHECK(czp0.eta == doctest::Approx(0.1));
  const auto czp = BaselineConfig::reference_preset(BaselineKind::Czp, 1000, 10);
  CHECK(czp.eta == doctest::Approx(0.01));
  CHECK(czp.delta == 10.0);
  const auto nyd = BaselineConfig::reference_preset(BaselineKind::NyDelayed, 1000, 10);
  CHECK(nyd.alpha == 10000.0);
  CHECK(nyd.nu == doctest::Approx(100.0));

  BaselineConfig bad = cl;
  bad.tau = 2;
  CHECK_THROWS_AS(validate(bad), InvalidArgument);
  bad = cl;
  bad.eta = -1.0;
  CHECK_THROWS_AS(validate(bad), InvalidArgument);
}

TEST_CASE("runs stay feasible for the set, keep nonnegative multipliers and replay exactly") {
  const ProblemInstance nra = generate_nra({2, 3}, 60, 4);
  const ProblemInstance q = generate_oqcqp({}, 60, 4);
  struct Case {
    const ProblemInstance* p;
    BaselineKind kind;
    std::size_t tau;
  };
  const Case cases[] = {{&nra, BaselineKind::Mosp, 0}, {&nra, BaselineKind::Cl, 0}, {&nra, BaselineKind::Ny, 0},
                        {&q, BaselineKind::Cl, 0},     {&q, BaselineKind::Czp, 5}, {&q, BaselineKind::NyDelayed, 5},
                        {&q, BaselineKind::Ny, 0}};
  for (const Case& c : cases) {
    INFO(to_string(c.kind) << " on " << c.p->name);
    const BaselineConfig cfg = BaselineConfig::reference_preset(c.kind, 60, c.tau);
    const Trajectory a = run_baseline(*c.p, cfg);
    const Trajectory b = run_baseline(*c.p, cfg);
    REQUIRE(a.decisions.size() == 60);
    for (std::size_t t = 0; t < 60; ++t) {
      CHECK(contains(c.p->set, a.decisions[t], 0.0));
      CHECK(a.multipliers[t].minCoeff() >= 0.0);
      CHECK(a.decisions[t] == b.decisions[t]);
      CHECK(a.multipliers[t] == b.multipliers[t]);
    }
    for (std::size_t t = 0; t <= c.tau; ++t) CHECK(a.decisions[t] == a.decisions[0]);
  }
  CHECK_THROWS_AS(run_baseline(q, BaselineConfig::reference_preset(BaselineKind::Mosp, 60, 0)), UnsupportedProblem);
}
