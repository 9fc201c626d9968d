#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "doctest.h"
#include "evfact/combine.hpp"
#include "evfact/errors.hpp"
#include "evfact/rng.hpp"
#include "evfact/scenarios.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace evfact;

namespace {

EstimatorOutput fake_output(const std::string& label, double psi,
                            const VectorXd& ifs) {
  EstimatorOutput out;
  out.label = label;
  out.psi_hat = psi;
  out.if_values = ifs;
  return out;
}

JointEstimate fake_joint(const VectorXd& psi, Eigen::Index n) {
  JointEstimate je;
  je.psi = psi;
  je.if_matrix = MatrixXd::Zero(n, psi.size());
  for (Eigen::Index k = 0; k < psi.size(); ++k) {
    je.labels.push_back("m" + std::to_string(k));
  }
  return je;
}

std::vector<ModelSpec> linear_models(const std::string& key) {
  return find_scenario(key).default_models(BasisSpec::linear());
}

}  // namespace

TEST_CASE("stacking estimator outputs checks labels and lengths") {
  const VectorXd ifs = VectorXd::LinSpaced(6, -1.0, 1.0);
  const auto a = fake_output("a", 1.0, ifs);
  const auto b = fake_output("b", 2.0, ifs);

  CHECK_THROWS_AS(joint({a}), TooFewModelsError);
  CHECK_THROWS_AS(joint({a, fake_output("a", 2.0, ifs)}), DuplicateLabelError);
  CHECK_THROWS_AS(joint({a, fake_output("b", 2.0, VectorXd::Zero(5))}),
                  LengthMismatchError);

  const JointEstimate je = joint({a, b});
  CHECK(je.n() == 6);
  CHECK(je.k() == 2);
  CHECK(je.psi[0] == 1.0);
  CHECK(je.psi[1] == 2.0);
  CHECK(je.labels[1] == "b");
}

TEST_CASE("influence covariance equals the brute-force double loop") {
  JointEstimate je;
  je.labels = {"a", "b", "c"};
  je.psi = VectorXd::Ones(3);
  const Eigen::Index n = 60;
  MatrixXd phi(n, 3);
  SplitMix64 g(12);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = 0; k < 3; ++k) phi(i, k) = g.normal();
  }
  // Center columns the way estimator outputs arrive.
  for (int k = 0; k < 3; ++k) phi.col(k).array() -= phi.col(k).mean();
  je.if_matrix = phi;

  const CovarianceEstimate cov = estimate_covariance(je);
  CHECK(cov.sigma.rows() == 3);
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      double s = 0;
      for (Eigen::Index i = 0; i < n; ++i) s += phi(i, j) * phi(i, k);
      CHECK(cov.sigma(j, k) ==
            doctest::Approx(s / static_cast<double>(n)).epsilon(1e-12));
    }
  }
  // Symmetry and positive semidefiniteness.
  CHECK((cov.sigma - cov.sigma.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(cov.sigma);
  CHECK(es.eigenvalues().minCoeff() > -1e-12);
}

TEST_CASE("two-column covariance worked example") {
  JointEstimate je;
  je.labels = {"a", "b"};
  je.psi = VectorXd::Ones(2);
  je.if_matrix = MatrixXd(2, 2);
  je.if_matrix << 1, -1, -1, 1;
  const CovarianceEstimate cov = estimate_covariance(je);
  CHECK(cov.sigma(0, 0) == 1.0);
  CHECK(cov.sigma(0, 1) == -1.0);
  CHECK(cov.sigma(1, 0) == -1.0);
  CHECK(cov.sigma(1, 1) == 1.0);
}

TEST_CASE("product statistic on a frozen example") {
  VectorXd psi(2);
  psi << 2.0, 3.0;
  const JointEstimate je = fake_joint(psi, 100);
  CovarianceEstimate cov;
  cov.sigma = MatrixXd::Identity(2, 2);
  const ProductTestResult res = product_test(je, cov, {0.05, 0.01});

  // gamma = (3, 2); variance 13; t = 10 * 6 / sqrt(13).
  CHECK(res.gamma[0] == 3.0);
  CHECK(res.gamma[1] == 2.0);
  CHECK(res.product == 6.0);
  CHECK(res.variance == doctest::Approx(13.0).epsilon(1e-14));
  CHECK(res.t_stat == doctest::Approx(16.641005886756876).epsilon(1e-13));
  CHECK(res.p_value < 1e-8);
  CHECK_FALSE(res.degenerate);
  CHECK(res.reject_at.at(0.05));
  CHECK(res.reject_at.at(0.01));
  CHECK(res.sigma_condition == doctest::Approx(1.0));
}

TEST_CASE("one zero estimate forces t = 0 and p = 1 without degeneracy") {
  VectorXd psi(2);
  psi << 0.0, 5.0;
  const JointEstimate je = fake_joint(psi, 50);
  CovarianceEstimate cov;
  cov.sigma = MatrixXd::Identity(2, 2);
  const ProductTestResult res = product_test(je, cov, {0.05});
  CHECK(res.t_stat == 0.0);
  CHECK(res.p_value == 1.0);
  CHECK_FALSE(res.degenerate);  // gamma = (5, 0) still carries variance
  CHECK_FALSE(res.reject_at.at(0.05));
}

TEST_CASE("all-zero estimates collapse the variance and flag degeneracy") {
  const JointEstimate je = fake_joint(VectorXd::Zero(2), 50);
  CovarianceEstimate cov;
  cov.sigma = MatrixXd::Identity(2, 2);
  const ProductTestResult res = product_test(je, cov, {0.05, 0.5});
  CHECK(res.degenerate);
  CHECK(res.t_stat == 0.0);
  CHECK(res.p_value == 1.0);
  CHECK_FALSE(res.reject_at.at(0.05));
  CHECK_FALSE(res.reject_at.at(0.5));  // degenerate never rejects
}

TEST_CASE("near-zero variance below the threshold is flagged") {
  // gamma = (psi2, psi1) = (1e-7, 1); with Sigma = diag(1, 1e-15) the
  // quadratic form is ~1.1e-14, under the cutoff 1e-12 * maxdiag * 1.
  VectorXd psi(2);
  psi << 1.0, 1e-7;
  const JointEstimate je = fake_joint(psi, 50);
  CovarianceEstimate cov;
  cov.sigma = MatrixXd::Zero(2, 2);
  cov.sigma(0, 0) = 1.0;
  cov.sigma(1, 1) = 1e-15;
  ProductTestResult res = product_test(je, cov, {0.05});
  CHECK(res.degenerate);
  CHECK(res.t_stat == 0.0);
  CHECK(res.p_value == 1.0);

  // Raising the second variance lifts the quadratic form over the cutoff.
  cov.sigma(1, 1) = 1e-6;
  res = product_test(je, cov, {0.05});
  CHECK_FALSE(res.degenerate);
  CHECK(res.t_stat != 0.0);
}

TEST_CASE("model order does not change the combined statistic") {
  ScenarioConfig cfg;
  cfg.scenario = "BFI-a";
  cfg.n = 400;
  cfg.beta = 2.0;
  cfg.seed = 4242;
  const ObservationTable t = generate(cfg);
  std::vector<ModelSpec> specs = linear_models("BFI-a");
  const AnalysisResult forward = analyze_all(t, specs, {0.05});
  std::reverse(specs.begin(), specs.end());
  const AnalysisResult backward = analyze_all(t, specs, {0.05});
  CHECK(forward.combined.t_stat ==
        doctest::Approx(backward.combined.t_stat).epsilon(1e-12));
  CHECK(forward.combined.p_value ==
        doctest::Approx(backward.combined.p_value).epsilon(1e-12));
}

TEST_CASE("rescaling the outcome leaves the statistic unchanged") {
  ScenarioConfig cfg;
  cfg.scenario = "BFI-a";
  cfg.n = 400;
  cfg.beta = 2.0;
  cfg.seed = 777;
  const ObservationTable t = generate(cfg);
  const ObservationTable scaled = ObservationTable::from_columns(
      t.mapping(), 3.0 * t.outcome(), t.treatment(),
      t.has_instrument() ? std::optional<VectorXd>(t.instrument())
                         : std::nullopt,
      t.has_mediator() ? std::optional<VectorXd>(t.mediator()) : std::nullopt,
      t.covariates());

  const std::vector<ModelSpec> specs = linear_models("BFI-a");
  const AnalysisResult base = analyze_all(t, specs, {0.05});
  const AnalysisResult big = analyze_all(scaled, specs, {0.05});
  CHECK(base.combined.t_stat ==
        doctest::Approx(big.combined.t_stat).epsilon(1e-8));
  // The per-model estimates themselves scale by 3.
  for (std::size_t k = 0; k < base.outputs.size(); ++k) {
    CHECK(big.outputs[k].psi_hat ==
          doctest::Approx(3.0 * base.outputs[k].psi_hat).epsilon(1e-8));
  }
}

TEST_CASE("full analysis bundles intervals and matches its own parts") {
  ScenarioConfig cfg;
  cfg.scenario = "BFI-a";
  cfg.n = 500;
  cfg.beta = 5.0;
  cfg.seed = 2024;
  const ObservationTable t = generate(cfg);
  const std::vector<ModelSpec> specs = linear_models("BFI-a");
  const AnalysisResult res = analyze_all(t, specs, {0.05, 0.01});

  REQUIRE(res.outputs.size() == 3);
  REQUIRE(res.intervals.size() == 3);
  for (std::size_t k = 0; k < res.outputs.size(); ++k) {
    CHECK(res.intervals[k].estimate == res.outputs[k].psi_hat);
    CHECK(res.intervals[k].level == doctest::Approx(0.95));
  }

  // Recombining the recorded outputs reproduces the combined row.
  const JointEstimate je = joint(res.outputs);
  const ProductTestResult redo =
      product_test(je, estimate_covariance(je), {0.05, 0.01});
  CHECK(redo.t_stat == res.combined.t_stat);
  CHECK(redo.p_value == res.combined.p_value);
  CHECK(res.combined.reject_at.size() == 2);

  CHECK_THROWS_AS(analyze_all(t, {specs[0]}, {0.05}), TooFewModelsError);
  CHECK_THROWS_AS(analyze_all(t, specs, {}), DimensionMismatchError);
  CHECK_THROWS_AS(analyze_all(t, specs, {1.5}), DimensionMismatchError);
}
