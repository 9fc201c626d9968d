#ifndef EVFACT_COMBINE_HPP
#define EVFACT_COMBINE_HPP

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "evfact/estimators.hpp"

namespace evfact {

// K estimators stacked over the same n observations: estimates in `psi`,
// per-row influence values as columns of `if_matrix`.
struct JointEstimate {
  std::vector<std::string> labels;
  Eigen::VectorXd psi;
  Eigen::MatrixXd if_matrix;  // n x K

  Eigen::Index n() const { return if_matrix.rows(); }
  Eigen::Index k() const { return if_matrix.cols(); }
};

// Requires >= 2 outputs with distinct labels and equal lengths.
JointEstimate joint(const std::vector<EstimatorOutput>& outputs);

// Empirical covariance of the influence columns:
// sigma(j,k) = mean over rows of phi_j * phi_k.
struct CovarianceEstimate {
  Eigen::MatrixXd sigma;
};

CovarianceEstimate estimate_covariance(const JointEstimate& je);

// Delta-method test of the product of the K estimates. gamma_k is the
// product of the other K-1 estimates; the statistic is
//   t = sqrt(n) * prod(psi) / sqrt(gamma' Sigma gamma).
// When the delta-method variance falls below
//   1e-12 * maxdiag(Sigma) * max(||gamma||_inf^2, 1)
// the result is flagged degenerate and reported as t = 0, p = 1.
struct ProductTestResult {
  double product = 0.0;
  double variance = 0.0;  // gamma' Sigma gamma
  double t_stat = 0.0;
  double p_value = 1.0;
  Eigen::VectorXd gamma;
  std::map<double, bool> reject_at;  // test level -> rejected?
  bool degenerate = false;
  double sigma_condition = 0.0;  // eigenvalue ratio of Sigma
};

ProductTestResult product_test(const JointEstimate& je,
                               const CovarianceEstimate& cov,
                               const std::vector<double>& levels);

// Everything the CLI needs for one dataset: per-model outputs and intervals
// (level 1 - alphas.front()) plus the combined product test at each alpha.
struct AnalysisResult {
  std::vector<EstimatorOutput> outputs;
  std::vector<WaldInterval> intervals;
  ProductTestResult combined;
};

AnalysisResult analyze_all(const ObservationTable& table,
                           const std::vector<ModelSpec>& specs,
                           const std::vector<double>& alphas,
                           double ridge = kDefaultRidge);

}  // namespace evfact

#endif
