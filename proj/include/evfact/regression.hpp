#ifndef EVFACT_REGRESSION_HPP
#define EVFACT_REGRESSION_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace evfact {

enum class Family { kGaussian, kBernoulli };

// Fitted Bernoulli probabilities are clamped to [kProbClamp, 1 - kProbClamp]
// before they reach any weighting denominator.
inline constexpr double kProbClamp = 0.01;
inline constexpr double kDefaultRidge = 1e-8;

inline double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// How continuous covariates are expanded into design columns. Binary columns
// always enter as-is; every continuous covariate gets one block:
//   Linear       -> x
//   Polynomial   -> x, x^2, ..., x^degree          (degree <= 5)
//   SplineLike   -> x, x^2, x^3, (x - k_j)_+^3     (one term per knot, <= 10)
// Spline knots sit at the empirical j/(knots+1) quantiles of that covariate
// (order statistics, linear interpolation), so expansion is data-dependent
// but deterministic. With interactions on, pairwise products of the raw
// columns (binary and continuous) are appended after the blocks.
struct BasisSpec {
  enum class Kind { kLinear, kPolynomial, kSplineLike };

  Kind kind = Kind::kSplineLike;
  int degree = 2;   // Polynomial only
  int knots = 3;    // SplineLike only
  bool interactions = false;

  static BasisSpec linear() { return {Kind::kLinear, 0, 0, false}; }
  static BasisSpec polynomial(int degree) {
    return {Kind::kPolynomial, degree, 0, false};
  }
  static BasisSpec spline(int knots) {
    return {Kind::kSplineLike, 0, knots, false};
  }

  void validate() const;           // throws DimensionMismatchError
  std::string to_string() const;   // "linear", "poly:2", "spline:3" [+ "+ix"]
  static BasisSpec parse(const std::string& text);
};

// Expanded design matrix plus one name per column, in column order:
// intercept, binary columns, per-covariate blocks, interactions.
struct Design {
  Eigen::MatrixXd X;
  std::vector<std::string> names;
};

Design expand_basis(const Eigen::MatrixXd& covariates,
                    const std::vector<std::string>& covariate_names,
                    const Eigen::MatrixXd& binaries,
                    const std::vector<std::string>& binary_names,
                    const BasisSpec& spec);

struct FittedRegression {
  Family family = Family::kGaussian;
  Eigen::VectorXd coef;
  std::vector<std::string> feature_names;
  double ridge = 0.0;
  int iterations = 0;  // IRLS steps; 0 for the closed-form Gaussian solve
};

// Gaussian: ridge-penalized least squares, closed form. Bernoulli: logistic
// fit by iteratively reweighted least squares from beta = 0, stopping when
// max|delta beta| < 1e-10 or the penalized score is flat
// (max|X'(y - mu) - ridge*beta| < 1e-8), at most 100 sweeps. ridge = 0
// demands a full-column-rank design and solves by column-pivoted QR instead.
FittedRegression fit_regression(Family family, const Eigen::MatrixXd& X,
                                const Eigen::VectorXd& y, double ridge,
                                std::vector<std::string> feature_names = {});

// Mean response for one design row: X.b for Gaussian, clamped expit(X.b)
// for Bernoulli.
double predict(const FittedRegression& fit,
               const Eigen::Ref<const Eigen::RowVectorXd>& row);

Eigen::VectorXd predict_many(const FittedRegression& fit,
                             const Eigen::MatrixXd& X);

}  // namespace evfact

#endif
