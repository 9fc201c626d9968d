#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "evfact/errors.hpp"
#include "evfact/regression.hpp"
#include "evfact/rng.hpp"

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;
using namespace evfact;

TEST_CASE("basis spec parsing and printing round-trip") {
  CHECK(BasisSpec::parse("linear").kind == BasisSpec::Kind::kLinear);
  CHECK(BasisSpec::parse("poly:3").degree == 3);
  CHECK(BasisSpec::parse("spline:4").knots == 4);
  CHECK(BasisSpec::parse("spline:2+ix").interactions);

  for (const std::string text : {"linear", "poly:2", "spline:3", "poly:4+ix"}) {
    CHECK(BasisSpec::parse(text).to_string() == text);
  }

  CHECK_THROWS_AS(BasisSpec::parse("poly:0"), DimensionMismatchError);
  CHECK_THROWS_AS(BasisSpec::parse("poly:6"), DimensionMismatchError);
  CHECK_THROWS_AS(BasisSpec::parse("spline:0"), DimensionMismatchError);
  CHECK_THROWS_AS(BasisSpec::parse("spline:11"), DimensionMismatchError);
  CHECK_THROWS_AS(BasisSpec::parse("garbage"), DimensionMismatchError);
  CHECK_THROWS_AS(BasisSpec::parse("poly:abc"), DimensionMismatchError);
}

TEST_CASE("spline expansion of one covariate has seven columns") {
  const int n = 50;
  MatrixXd x(n, 1);
  for (int i = 0; i < n; ++i) x(i, 0) = -2.0 + 4.0 * i / (n - 1);
  const Design d =
      expand_basis(x, {"x"}, MatrixXd(n, 0), {}, BasisSpec::spline(3));
  // intercept + x + x^2 + x^3 + three hinge columns
  CHECK(d.X.cols() == 7);
  CHECK(d.names.size() == 7);
  CHECK(d.X.col(0).isConstant(1.0));
  for (int i = 0; i < n; ++i) {
    CHECK(d.X(i, 1) == x(i, 0));
    CHECK(d.X(i, 2) == doctest::Approx(x(i, 0) * x(i, 0)));
    CHECK(d.X(i, 3) == doctest::Approx(std::pow(x(i, 0), 3)));
    for (int j = 4; j < 7; ++j) CHECK(d.X(i, j) >= 0.0);  // hinges
  }
}

TEST_CASE("spline knots sit at empirical quantiles") {
  // 9 points 1..9 with a single knot: the knot is the median 5, so the
  // hinge column is (x - 5)_+^3.
  MatrixXd x(9, 1);
  for (int i = 0; i < 9; ++i) x(i, 0) = 9.0 - i;  // unsorted on purpose
  const Design d =
      expand_basis(x, {"x"}, MatrixXd(9, 0), {}, BasisSpec::spline(1));
  CHECK(d.X.cols() == 5);
  for (int i = 0; i < 9; ++i) {
    const double hinge = std::max(x(i, 0) - 5.0, 0.0);
    CHECK(d.X(i, 4) == doctest::Approx(hinge * hinge * hinge));
  }
}

TEST_CASE("binary columns pass through and interactions multiply") {
  const int n = 20;
  MatrixXd x(n, 1);
  MatrixXd b(n, 1);
  evfact::SplitMix64 g(3);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = g.uniform(-1, 1);
    b(i, 0) = g.bernoulli(0.5);
  }
  BasisSpec spec = BasisSpec::linear();
  const Design plain = expand_basis(x, {"x"}, b, {"a"}, spec);
  CHECK(plain.X.cols() == 3);  // intercept, a, x
  for (int i = 0; i < n; ++i) CHECK(plain.X(i, 1) == b(i, 0));

  spec.interactions = true;
  const Design inter = expand_basis(x, {"x"}, b, {"a"}, spec);
  CHECK(inter.X.cols() == 4);  // + a*x
  for (int i = 0; i < n; ++i) {
    CHECK(inter.X(i, 3) == doctest::Approx(b(i, 0) * x(i, 0)));
  }
}

TEST_CASE("constant covariate cannot support spline knots") {
  MatrixXd x = MatrixXd::Constant(10, 1, 2.5);
  CHECK_THROWS_AS(
      expand_basis(x, {"x"}, MatrixXd(10, 0), {}, BasisSpec::spline(2)),
      DegenerateCovariateError);
}

TEST_CASE("unpenalized least squares is exact on a line") {
  MatrixXd X(3, 2);
  X << 1, 0, 1, 1, 1, 2;
  VectorXd y(3);
  y << 1, 3, 5;  // y = 1 + 2x
  const FittedRegression fit =
      fit_regression(Family::kGaussian, X, y, 0.0, {"const", "x"});
  CHECK(fit.coef[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.coef[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.iterations == 0);
  CHECK(predict(fit, RowVectorXd::Constant(2, 1.0).eval()) ==
        doctest::Approx(3.0));
}

TEST_CASE("ridge shrinks toward zero and tiny ridge approximates ols") {
  MatrixXd X(4, 2);
  X << 1, -1, 1, 0, 1, 1, 1, 2;
  VectorXd y(4);
  y << -1, 1, 3, 5;
  const double b_ols =
      fit_regression(Family::kGaussian, X, y, 0.0).coef[1];
  const double b_tiny =
      fit_regression(Family::kGaussian, X, y, 1e-10).coef[1];
  const double b_big =
      fit_regression(Family::kGaussian, X, y, 100.0).coef[1];
  CHECK(b_tiny == doctest::Approx(b_ols).epsilon(1e-8));
  CHECK(std::abs(b_big) < std::abs(b_ols));
}

TEST_CASE("saturated gaussian fit interpolates") {
  MatrixXd X(2, 2);
  X << 1, 0, 1, 3;
  VectorXd y(2);
  y << -4, 2;
  const FittedRegression fit = fit_regression(Family::kGaussian, X, y, 0.0);
  const VectorXd pred = predict_many(fit, X);
  CHECK(pred[0] == doctest::Approx(-4.0).epsilon(1e-12));
  CHECK(pred[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("rank-deficient designs need a positive ridge") {
  MatrixXd X(5, 3);
  for (int i = 0; i < 5; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = i;
    X(i, 2) = 2.0 * i;  // collinear with column 1
  }
  VectorXd y(5);
  y << 0, 1, 2, 3, 4;
  CHECK_THROWS_AS(fit_regression(Family::kGaussian, X, y, 0.0),
                  SingularDesignError);
  CHECK_NOTHROW(fit_regression(Family::kGaussian, X, y, kDefaultRidge));
}

TEST_CASE("input validation on fit and predict") {
  MatrixXd X(3, 1);
  X << 1, 1, 1;
  VectorXd y(3);
  y << 1, 2, 3;
  CHECK_THROWS_AS(fit_regression(Family::kGaussian, X, VectorXd(2), 0.0),
                  DimensionMismatchError);
  CHECK_THROWS_AS(fit_regression(Family::kGaussian, X, y, -1.0),
                  DimensionMismatchError);
  CHECK_THROWS_AS(
      fit_regression(Family::kGaussian, MatrixXd(0, 1), VectorXd(0), 0.0),
      DimensionMismatchError);
  CHECK_THROWS_AS(
      fit_regression(Family::kGaussian, X, y, 0.0, {"a", "b"}),
      DimensionMismatchError);

  const FittedRegression fit = fit_regression(Family::kGaussian, X, y, 0.0);
  CHECK_THROWS_AS(predict(fit, RowVectorXd::Zero(2).eval()),
                  DimensionMismatchError);
  CHECK_THROWS_AS(predict_many(fit, MatrixXd(2, 2)), DimensionMismatchError);
}

TEST_CASE("logistic fit satisfies its optimality condition") {
  const int n = 600;
  evfact::SplitMix64 g(17);
  MatrixXd X(n, 3);
  VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = g.uniform(-2, 2);
    X(i, 2) = g.uniform(-2, 2);
    y[i] = g.bernoulli(expit(0.5 + 1.0 * X(i, 1) - 0.7 * X(i, 2)));
  }
  const double ridge = kDefaultRidge;
  const FittedRegression fit = fit_regression(Family::kBernoulli, X, y, ridge);
  CHECK(fit.iterations > 0);

  // First-order condition of the penalized likelihood.
  VectorXd mu(n);
  for (int i = 0; i < n; ++i) mu[i] = expit(X.row(i).dot(fit.coef));
  const VectorXd score = X.transpose() * (y - mu) - ridge * fit.coef;
  CHECK(score.cwiseAbs().maxCoeff() < 1e-8);

  // Loose recovery of the generating coefficients.
  CHECK(fit.coef[1] == doctest::Approx(1.0).epsilon(0.25));
  CHECK(fit.coef[2] == doctest::Approx(-0.7).epsilon(0.25));
}

TEST_CASE("logistic optimality holds on an ill-conditioned spline design") {
  const int n = 400;
  evfact::SplitMix64 g(23);
  MatrixXd c(n, 4);
  MatrixXd b(n, 0);
  VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    y[i] = g.bernoulli(expit(c(i, 0) - 0.5 * c(i, 2)));
  }
  const Design d =
      expand_basis(c, {"c1", "c2", "c3", "c4"}, b, {}, BasisSpec::spline(3));
  const FittedRegression fit =
      fit_regression(Family::kBernoulli, d.X, y, kDefaultRidge);
  VectorXd mu(n);
  for (int i = 0; i < n; ++i) mu[i] = expit(d.X.row(i).dot(fit.coef));
  const VectorXd score = d.X.transpose() * (y - mu) - kDefaultRidge * fit.coef;
  CHECK(score.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("bernoulli predictions are clamped away from 0 and 1") {
  FittedRegression fit;
  fit.family = Family::kBernoulli;
  fit.coef = VectorXd(1);
  fit.coef << 50.0;  // expit(50) rounds to 1 without the clamp
  RowVectorXd row(1);
  row << 1.0;
  CHECK(predict(fit, row) == 1.0 - kProbClamp);
  row << -1.0;
  CHECK(predict(fit, row) == kProbClamp);

  MatrixXd X(2, 1);
  X << 1.0, -1.0;
  const VectorXd p = predict_many(fit, X);
  CHECK(p[0] == 1.0 - kProbClamp);
  CHECK(p[1] == kProbClamp);
}
