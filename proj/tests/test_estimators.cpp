#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <cmath>
#include <optional>

#include "doctest.h"
#include "evfact/errors.hpp"
#include "evfact/estimators.hpp"
#include "evfact/rng.hpp"
#include "evfact/scenarios.hpp"
#include "evfact/table.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace evfact;

namespace {

VectorXd vec(std::initializer_list<double> xs) {
  VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

ObservationTable iv_table(VectorXd y, VectorXd a, VectorXd z) {
  ColumnMapping map;
  map.instrument = "z";
  return ObservationTable::from_columns(map, std::move(y), std::move(a),
                                        std::move(z), std::nullopt,
                                        MatrixXd(4, 0));
}

}  // namespace

TEST_CASE("covariate-adjustment contributions, exact nuisances") {
  // Four rows, y = 2a, true nuisances mu(a) = 2a and pi = 1/2. The residual
  // term vanishes and every contribution equals mu(1) - mu(0) = 2.
  const VectorXd y = vec({2, 2, 0, 0});
  const VectorXd a = vec({1, 1, 0, 0});
  const VectorXd mu_obs = vec({2, 2, 0, 0});
  const VectorXd mu1 = VectorXd::Constant(4, 2.0);
  const VectorXd mu0 = VectorXd::Zero(4);
  const VectorXd pi = VectorXd::Constant(4, 0.5);
  const VectorXd contrib = backdoor_contributions(y, a, mu_obs, mu1, mu0, pi);
  for (int i = 0; i < 4; ++i) CHECK(contrib[i] == 2.0);
}

TEST_CASE("mediator-based contributions, exact nuisances") {
  // Perfect mediation: M = A, Y = M, randomized treatment. With the exact
  // nuisances (and the denominator floor off) each contribution is 1.
  const VectorXd y = vec({1, 1, 0, 0});
  const VectorXd m = vec({1, 1, 0, 0});
  const VectorXd a = vec({1, 1, 0, 0});
  FrontdoorNuisances nu;
  nu.pi = VectorXd::Constant(4, 0.5);
  nu.alpha1_a1 = VectorXd::Constant(4, 1.0);
  nu.alpha1_a0 = VectorXd::Zero(4);
  nu.mu11 = VectorXd::Constant(4, 1.0);  // E[Y | M=1, A=1]
  nu.mu10 = VectorXd::Constant(4, 1.0);  // E[Y | M=1, A=0]
  nu.mu01 = VectorXd::Zero(4);           // E[Y | M=0, A=1]
  nu.mu00 = VectorXd::Zero(4);
  const VectorXd contrib = frontdoor_contributions(y, m, a, nu, 0.0);
  for (int i = 0; i < 4; ++i) CHECK(contrib[i] == 1.0);
}

TEST_CASE("instrument arm means on a worked example") {
  const VectorXd y = vec({1, 3, 5, 7});
  const VectorXd a = vec({0, 1, 1, 1});
  const VectorXd z = vec({0, 0, 1, 1});
  const IvArmMeans m = iv_arm_means(y, a, z);
  CHECK(m.mu1 == 6.0);
  CHECK(m.mu0 == 2.0);
  CHECK(m.pi1 == 1.0);
  CHECK(m.pi0 == 0.5);
  CHECK(m.zeta == 0.5);
  CHECK((m.mu1 - m.mu0) / (m.pi1 - m.pi0) == 8.0);

  const VectorXd phi = iv_influence_values(y, a, z, m);
  CHECK(std::abs(phi.mean()) < 1e-12);
  // Row 0: z=0 arm, y - mu0 = -1, a - pi0 = -0.5, dpi = 0.5, dmu = 4:
  // [(-1)(0.5) - (-0.5)(4)] * (-1/0.5) / 0.25 = -12.
  CHECK(phi[0] == doctest::Approx(-12.0).epsilon(1e-12));
}

TEST_CASE("fitted ratio estimator equals the brute-force arm means") {
  const int n = 500;
  SplitMix64 g(31);
  VectorXd y(n), a(n), z(n);
  for (int i = 0; i < n; ++i) {
    z[i] = g.bernoulli(0.5);
    a[i] = g.bernoulli(0.2 + 0.6 * z[i]);
    y[i] = g.normal(2.0 * a[i] + 1.0, 1.5);
  }
  ColumnMapping map;
  map.instrument = "z";
  const ObservationTable t = ObservationTable::from_columns(
      map, y, a, z, std::nullopt, MatrixXd(n, 0));
  ModelSpec spec;
  spec.kind = ModelKind::kInstrumental;
  const EstimatorOutput out = estimate_iv_wald(t, spec);

  double sy1 = 0, sy0 = 0, sa1 = 0, sa0 = 0, n1 = 0, n0 = 0;
  for (int i = 0; i < n; ++i) {
    if (z[i] == 1.0) {
      sy1 += y[i];
      sa1 += a[i];
      n1 += 1;
    } else {
      sy0 += y[i];
      sa0 += a[i];
      n0 += 1;
    }
  }
  const double brute = (sy1 / n1 - sy0 / n0) / (sa1 / n1 - sa0 / n0);
  CHECK(out.psi_hat == doctest::Approx(brute).epsilon(1e-12));
  CHECK(std::abs(out.if_values.mean()) < 1e-10);
  CHECK(out.psi_hat == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("instrument error cases") {
  ModelSpec spec;
  spec.kind = ModelKind::kInstrumental;

  // One instrument arm empty.
  CHECK_THROWS_AS(estimate_iv_wald(iv_table(vec({1, 2, 3, 4}),
                                            vec({0, 1, 0, 1}),
                                            vec({1, 1, 1, 1})),
                                   spec),
                  InstrumentConstantError);

  // First stage identical across arms.
  CHECK_THROWS_AS(estimate_iv_wald(iv_table(vec({1, 2, 3, 4}),
                                            vec({0, 1, 0, 1}),
                                            vec({0, 0, 1, 1})),
                                   spec),
                  WeakInstrumentDegenerateError);

  // No instrument mapped at all.
  ColumnMapping map;
  const ObservationTable no_z = ObservationTable::from_columns(
      map, vec({1, 2}), vec({0, 1}), std::nullopt, std::nullopt,
      MatrixXd(2, 0));
  CHECK_THROWS_AS(estimate_iv_wald(no_z, spec), SpecRequiresInstrumentError);
}

TEST_CASE("degenerate treatment and mediator columns are rejected") {
  ColumnMapping map;
  map.mediator = "m";
  map.covariates = {"c1"};
  MatrixXd c(4, 1);
  c << -1, 0, 1, 2;

  ModelSpec bd;
  bd.kind = ModelKind::kBackdoor;
  bd.adjustment = {"c1"};
  bd.basis = BasisSpec::linear();
  const ObservationTable all_treated = ObservationTable::from_columns(
      map, vec({1, 2, 3, 4}), vec({1, 1, 1, 1}), std::nullopt,
      vec({0, 1, 0, 1}), c);
  CHECK_THROWS_AS(estimate_backdoor_aipw(all_treated, bd),
                  AllTreatedOrAllControlError);

  ModelSpec fd;
  fd.kind = ModelKind::kFrontDoor;
  fd.adjustment = {"c1"};
  fd.basis = BasisSpec::linear();
  const ObservationTable const_m = ObservationTable::from_columns(
      map, vec({1, 2, 3, 4}), vec({0, 1, 0, 1}), std::nullopt,
      vec({1, 1, 1, 1}), c);
  CHECK_THROWS_AS(estimate_frontdoor_apipw(const_m, fd),
                  MediatorConstantError);

  ColumnMapping no_m;
  no_m.covariates = {"c1"};
  const ObservationTable bare = ObservationTable::from_columns(
      no_m, vec({1, 2, 3, 4}), vec({0, 1, 0, 1}), std::nullopt, std::nullopt,
      c);
  CHECK_THROWS_AS(estimate_frontdoor_apipw(bare, fd),
                  SpecRequiresMediatorError);
}

TEST_CASE("fitted estimators recover a simple randomized effect") {
  const int n = 4000;
  SplitMix64 g(57);
  VectorXd y(n), a(n), m(n);
  MatrixXd c(n, 1);
  for (int i = 0; i < n; ++i) {
    c(i, 0) = g.uniform(-2, 2);
    a[i] = g.bernoulli(0.5);
    // Mediator follows treatment with 5% flips; outcome depends on the
    // mediator and the covariate only.
    m[i] = g.bernoulli(a[i] == 1.0 ? 0.95 : 0.05);
    y[i] = g.normal(2.0 * m[i] + 0.5 * c(i, 0), 1.0);
  }
  ColumnMapping map;
  map.mediator = "m";
  map.covariates = {"c1"};
  const ObservationTable t =
      ObservationTable::from_columns(map, y, a, std::nullopt, m, c);

  ModelSpec bd;
  bd.kind = ModelKind::kBackdoor;
  bd.adjustment = {"c1"};
  bd.basis = BasisSpec::linear();
  const EstimatorOutput back = estimate_backdoor_aipw(t, bd);
  // True effect of A on Y: 2 * (0.95 - 0.05) = 1.8.
  CHECK(back.psi_hat == doctest::Approx(1.8).epsilon(0.1));
  CHECK(std::abs(back.if_values.mean()) < 1e-8);
  CHECK_FALSE(back.nuisance_report.empty());

  ModelSpec fd;
  fd.kind = ModelKind::kFrontDoor;
  fd.adjustment = {"c1"};
  fd.basis = BasisSpec::linear();
  const EstimatorOutput front = estimate_frontdoor_apipw(t, fd);
  CHECK(front.psi_hat == doctest::Approx(1.8).epsilon(0.15));
  CHECK(std::abs(front.if_values.mean()) < 1e-8);
  CHECK(front.if_values.size() == n);
}

TEST_CASE("influence values have mean zero on a registry design") {
  ScenarioConfig cfg;
  cfg.scenario = "BFI-a";
  cfg.n = 600;
  cfg.beta = 1.0;
  cfg.seed = 99;
  const ObservationTable t = generate(cfg);
  for (const ModelSpec& spec :
       find_scenario("BFI-a").default_models(BasisSpec::linear())) {
    EstimatorOutput out;
    switch (spec.kind) {
      case ModelKind::kBackdoor:
        out = estimate_backdoor_aipw(t, spec);
        break;
      case ModelKind::kFrontDoor:
        out = estimate_frontdoor_apipw(t, spec);
        break;
      case ModelKind::kInstrumental:
        out = estimate_iv_wald(t, spec);
        break;
    }
    CHECK(std::abs(out.if_values.mean()) < 1e-8);
    CHECK(std::isfinite(out.psi_hat));
    CHECK(out.label == spec.label());
  }
}

TEST_CASE("normal-approximation interval on the frozen example") {
  EstimatorOutput out;
  out.psi_hat = 0.32;
  // Four centered influence values chosen so the standard error is
  // sqrt(1.53^2) / sqrt(4) = 0.765.
  out.if_values = vec({1.53, -1.53, 1.53, -1.53});
  const WaldInterval w = wald_interval(out, 0.95);
  CHECK(w.estimate == 0.32);
  CHECK(w.std_error == doctest::Approx(0.765).epsilon(1e-12));
  CHECK(w.lower == doctest::Approx(-1.1793724481731414).epsilon(1e-9));
  CHECK(w.upper == doctest::Approx(1.8193724481731415).epsilon(1e-9));
  CHECK(w.p_value == doctest::Approx(0.6757273118384615).epsilon(1e-9));
  CHECK(w.level == 0.95);

  CHECK_THROWS_AS(wald_interval(out, 0.0), DimensionMismatchError);
  CHECK_THROWS_AS(wald_interval(out, 1.0), DimensionMismatchError);

  EstimatorOutput flat;
  flat.psi_hat = 1.0;
  flat.if_values = VectorXd::Zero(4);
  CHECK_THROWS_AS(wald_interval(flat, 0.95), DegenerateVarianceError);
}
