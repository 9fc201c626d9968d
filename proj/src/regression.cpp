#include "evfact/regression.hpp"

#include <algorithm>
#include <cmath>

#include "evfact/errors.hpp"

namespace evfact {

void BasisSpec::validate() const {
  if (kind == Kind::kPolynomial && (degree < 1 || degree > 5))
    throw DimensionMismatchError("polynomial degree must lie in [1, 5]");
  if (kind == Kind::kSplineLike && (knots < 1 || knots > 10))
    throw DimensionMismatchError("spline knot count must lie in [1, 10]");
}

std::string BasisSpec::to_string() const {
  std::string s;
  switch (kind) {
    case Kind::kLinear: s = "linear"; break;
    case Kind::kPolynomial: s = "poly:" + std::to_string(degree); break;
    case Kind::kSplineLike: s = "spline:" + std::to_string(knots); break;
  }
  if (interactions) s += "+ix";
  return s;
}

BasisSpec BasisSpec::parse(const std::string& text) {
  std::string body = text;
  bool ix = false;
  if (body.size() > 3 && body.substr(body.size() - 3) == "+ix") {
    ix = true;
    body = body.substr(0, body.size() - 3);
  }
  BasisSpec spec;
  if (body == "linear") {
    spec = linear();
  } else if (body.rfind("poly:", 0) == 0 || body.rfind("spline:", 0) == 0) {
    const auto colon = body.find(':');
    int arg = 0;
    try {
      size_t used = 0;
      arg = std::stoi(body.substr(colon + 1), &used);
      if (used != body.size() - colon - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw DimensionMismatchError("malformed basis spec '" + text + "'");
    }
    spec = body[0] == 'p' ? polynomial(arg) : spline(arg);
  } else {
    throw DimensionMismatchError("unknown basis spec '" + text + "'");
  }
  spec.interactions = ix;
  spec.validate();
  return spec;
}

namespace {

// Empirical quantile with linear interpolation between order statistics.
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

Design expand_basis(const Eigen::MatrixXd& covariates,
                    const std::vector<std::string>& covariate_names,
                    const Eigen::MatrixXd& binaries,
                    const std::vector<std::string>& binary_names,
                    const BasisSpec& spec) {
  spec.validate();
  const Eigen::Index n = covariates.rows() > 0 ? covariates.rows() : binaries.rows();
  if (n == 0) throw DimensionMismatchError("basis expansion over zero rows");
  if (binaries.cols() > 0 && covariates.rows() > 0 && binaries.rows() != n)
    throw DimensionMismatchError("binary and covariate row counts differ");
  if (static_cast<std::size_t>(covariates.cols()) != covariate_names.size())
    throw DimensionMismatchError("covariate name count mismatch");
  if (static_cast<std::size_t>(binaries.cols()) != binary_names.size())
    throw DimensionMismatchError("binary name count mismatch");

  const Eigen::Index p = covariates.cols();
  const Eigen::Index b = binaries.cols();
  Eigen::Index per_block = 1;
  switch (spec.kind) {
    case BasisSpec::Kind::kLinear: per_block = 1; break;
    case BasisSpec::Kind::kPolynomial: per_block = spec.degree; break;
    case BasisSpec::Kind::kSplineLike: per_block = 3 + spec.knots; break;
  }
  Eigen::Index d = 1 + b + p * per_block;
  if (spec.interactions) d += (b + p) * (b + p - 1) / 2;

  Design design;
  design.X.resize(n, d);
  design.names.reserve(static_cast<std::size_t>(d));

  Eigen::Index col = 0;
  design.X.col(col++).setOnes();
  design.names.push_back("const");

  for (Eigen::Index j = 0; j < b; ++j) {
    design.X.col(col++) = binaries.col(j);
    design.names.push_back(binary_names[static_cast<std::size_t>(j)]);
  }

  std::vector<double> sorted;
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto& name = covariate_names[static_cast<std::size_t>(j)];
    const Eigen::VectorXd x = covariates.col(j);
    design.X.col(col) = x;
    design.names.push_back(name);
    ++col;
    if (spec.kind == BasisSpec::Kind::kPolynomial) {
      for (int k = 2; k <= spec.degree; ++k) {
        design.X.col(col) = design.X.col(col - 1).cwiseProduct(x);
        design.names.push_back(name + "^" + std::to_string(k));
        ++col;
      }
    } else if (spec.kind == BasisSpec::Kind::kSplineLike) {
      design.X.col(col) = x.cwiseProduct(x);
      design.names.push_back(name + "^2");
      ++col;
      design.X.col(col) = design.X.col(col - 1).cwiseProduct(x);
      design.names.push_back(name + "^3");
      ++col;
      sorted.assign(x.data(), x.data() + n);
      std::sort(sorted.begin(), sorted.end());
      if (sorted.front() == sorted.back()) throw DegenerateCovariateError(name);
      for (int k = 1; k <= spec.knots; ++k) {
        const double knot =
            quantile_sorted(sorted, static_cast<double>(k) / (spec.knots + 1));
        design.X.col(col) = (x.array() - knot)
                                .max(0.0)
                                .pow(3)
                                .matrix();
        design.names.push_back(name + "_s" + std::to_string(k));
        ++col;
      }
    }
  }

  if (spec.interactions) {
    // Raw columns in declaration order: binaries first, then covariates.
    Eigen::MatrixXd raw(n, b + p);
    std::vector<std::string> raw_names;
    raw_names.reserve(static_cast<std::size_t>(b + p));
    for (Eigen::Index j = 0; j < b; ++j) {
      raw.col(j) = binaries.col(j);
      raw_names.push_back(binary_names[static_cast<std::size_t>(j)]);
    }
    for (Eigen::Index j = 0; j < p; ++j) {
      raw.col(b + j) = covariates.col(j);
      raw_names.push_back(covariate_names[static_cast<std::size_t>(j)]);
    }
    for (Eigen::Index i = 0; i < raw.cols(); ++i) {
      for (Eigen::Index j = i + 1; j < raw.cols(); ++j) {
        design.X.col(col) = raw.col(i).cwiseProduct(raw.col(j));
        design.names.push_back(raw_names[static_cast<std::size_t>(i)] + ":" +
                               raw_names[static_cast<std::size_t>(j)]);
        ++col;
      }
    }
  }

  return design;
}

namespace {

Eigen::VectorXd solve_wls(const Eigen::MatrixXd& X, const Eigen::VectorXd& w,
                          const Eigen::VectorXd& z, double ridge) {
  const Eigen::Index d = X.cols();
  if (ridge > 0.0) {
    Eigen::MatrixXd xtwx =
        X.transpose() * w.asDiagonal() * X +
        ridge * Eigen::MatrixXd::Identity(d, d);
    return Eigen::LDLT<Eigen::MatrixXd>(xtwx).solve(X.transpose() *
                                                    w.cwiseProduct(z));
  }
  // Unpenalized: rank-revealing QR on the weighted design.
  const Eigen::VectorXd sw = w.cwiseSqrt();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sw.asDiagonal() * X);
  if (qr.rank() < d)
    throw SingularDesignError("design matrix is rank deficient (rank " +
                              std::to_string(qr.rank()) + " of " +
                              std::to_string(d) + ")");
  return qr.solve(sw.cwiseProduct(z));
}

}  // namespace

FittedRegression fit_regression(Family family, const Eigen::MatrixXd& X,
                                const Eigen::VectorXd& y, double ridge,
                                std::vector<std::string> feature_names) {
  if (X.rows() != y.size())
    throw DimensionMismatchError("design has " + std::to_string(X.rows()) +
                                 " rows but response has " +
                                 std::to_string(y.size()));
  if (X.rows() == 0) throw DimensionMismatchError("empty design matrix");
  if (!feature_names.empty() &&
      feature_names.size() != static_cast<std::size_t>(X.cols()))
    throw DimensionMismatchError("feature name count mismatch");
  if (ridge < 0.0) throw DimensionMismatchError("ridge must be >= 0");

  FittedRegression fit;
  fit.family = family;
  fit.ridge = ridge;
  fit.feature_names = std::move(feature_names);

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(X.rows());
  if (family == Family::kGaussian) {
    fit.coef = solve_wls(X, ones, y, ridge);
    return fit;
  }

  // Logistic IRLS. Weights are floored away from zero so saturated
  // observations cannot blow up the working response. Two stopping rules:
  // a tiny coefficient change, or first-order optimality of the penalized
  // likelihood, score(beta) = X'(y - mu) - ridge*beta ~ 0. The second is
  // the authoritative one: with ill-conditioned expanded designs the
  // coefficient-change rule alone can stall in solver noise around 1e-9
  // even though the optimum was reached several sweeps earlier.
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(X.cols());
  constexpr double kTol = 1e-10;
  constexpr double kScoreTol = 1e-8;
  constexpr int kMaxIter = 100;
  constexpr double kWeightFloor = 1e-10;
  for (int iter = 1; iter <= kMaxIter; ++iter) {
    const Eigen::VectorXd eta = X * beta;
    const Eigen::VectorXd mu = eta.unaryExpr([](double v) { return expit(v); });
    const Eigen::VectorXd w =
        mu.cwiseProduct(ones - mu).cwiseMax(kWeightFloor);
    const Eigen::VectorXd z = eta + (y - mu).cwiseQuotient(w);
    const Eigen::VectorXd next = solve_wls(X, w, z, ridge);
    const double delta = (next - beta).cwiseAbs().maxCoeff();
    beta = next;
    fit.iterations = iter;
    const Eigen::VectorXd mu_next =
        (X * beta).unaryExpr([](double v) { return expit(v); });
    const double score_gap =
        (X.transpose() * (y - mu_next) - ridge * beta).cwiseAbs().maxCoeff();
    if (delta < kTol || score_gap < kScoreTol) {
      fit.coef = beta;
      return fit;
    }
  }
  throw NoConvergenceError("logistic fit did not converge in " +
                           std::to_string(kMaxIter) + " iterations");
}

double predict(const FittedRegression& fit,
               const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  if (row.size() != fit.coef.size())
    throw DimensionMismatchError("prediction row has " +
                                 std::to_string(row.size()) +
                                 " entries, expected " +
                                 std::to_string(fit.coef.size()));
  const double eta = row * fit.coef;
  if (fit.family == Family::kGaussian) return eta;
  return std::clamp(expit(eta), kProbClamp, 1.0 - kProbClamp);
}

Eigen::VectorXd predict_many(const FittedRegression& fit,
                             const Eigen::MatrixXd& X) {
  if (X.cols() != fit.coef.size())
    throw DimensionMismatchError("prediction matrix has " +
                                 std::to_string(X.cols()) +
                                 " columns, expected " +
                                 std::to_string(fit.coef.size()));
  Eigen::VectorXd eta = X * fit.coef;
  if (fit.family == Family::kGaussian) return eta;
  return eta.unaryExpr([](double v) {
    return std::clamp(expit(v), kProbClamp, 1.0 - kProbClamp);
  });
}

}  // namespace evfact
