#include "evfact/combine.hpp"

#include <cmath>
#include <limits>
#include <unordered_set>

#include "evfact/errors.hpp"
#include "evfact/stats.hpp"

namespace evfact {

JointEstimate joint(const std::vector<EstimatorOutput>& outputs) {
  if (outputs.size() < 2) throw TooFewModelsError();
  const Eigen::Index n = outputs.front().if_values.size();
  std::unordered_set<std::string> labels;
  for (const auto& o : outputs) {
    if (o.if_values.size() != n)
      throw LengthMismatchError("influence vectors span different row counts (" +
                                std::to_string(o.if_values.size()) + " vs " +
                                std::to_string(n) + ")");
    if (!labels.insert(o.label).second) throw DuplicateLabelError(o.label);
  }

  JointEstimate je;
  je.psi.resize(static_cast<Eigen::Index>(outputs.size()));
  je.if_matrix.resize(n, static_cast<Eigen::Index>(outputs.size()));
  for (std::size_t k = 0; k < outputs.size(); ++k) {
    je.labels.push_back(outputs[k].label);
    je.psi[static_cast<Eigen::Index>(k)] = outputs[k].psi_hat;
    je.if_matrix.col(static_cast<Eigen::Index>(k)) = outputs[k].if_values;
  }
  return je;
}

CovarianceEstimate estimate_covariance(const JointEstimate& je) {
  if (je.n() == 0) throw LengthMismatchError("joint estimate has no rows");
  CovarianceEstimate cov;
  cov.sigma = je.if_matrix.transpose() * je.if_matrix /
              static_cast<double>(je.n());
  return cov;
}

ProductTestResult product_test(const JointEstimate& je,
                               const CovarianceEstimate& cov,
                               const std::vector<double>& levels) {
  const Eigen::Index k = je.k();
  if (cov.sigma.rows() != k || cov.sigma.cols() != k)
    throw LengthMismatchError("covariance dimension does not match estimates");

  ProductTestResult res;
  res.product = je.psi.prod();
  res.gamma.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    double g = 1.0;
    for (Eigen::Index l = 0; l < k; ++l)
      if (l != j) g *= je.psi[l];
    res.gamma[j] = g;
  }
  res.variance = res.gamma.dot(cov.sigma * res.gamma);

  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov.sigma);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    res.sigma_condition =
        lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  }

  const double gamma_max = res.gamma.cwiseAbs().maxCoeff();
  const double threshold = 1e-12 * cov.sigma.diagonal().maxCoeff() *
                           std::max(gamma_max * gamma_max, 1.0);
  if (!(res.variance > threshold)) {
    res.degenerate = true;
    res.t_stat = 0.0;
    res.p_value = 1.0;
  } else {
    res.t_stat = std::sqrt(static_cast<double>(je.n())) * res.product /
                 std::sqrt(res.variance);
    res.p_value = stats::two_sided_p(res.t_stat);
  }

  for (const double alpha : levels) {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw DimensionMismatchError("test level must lie in (0, 1)");
    const double q = stats::normal_quantile(1.0 - alpha / 2.0);
    res.reject_at[alpha] = !res.degenerate && std::abs(res.t_stat) > q;
  }
  return res;
}

AnalysisResult analyze_all(const ObservationTable& table,
                           const std::vector<ModelSpec>& specs,
                           const std::vector<double>& alphas,
                           double ridge) {
  if (specs.size() < 2) throw TooFewModelsError();
  if (alphas.empty())
    throw DimensionMismatchError("at least one test level is required");

  AnalysisResult res;
  for (const auto& spec : specs) {
    switch (spec.kind) {
      case ModelKind::kBackdoor:
        res.outputs.push_back(estimate_backdoor_aipw(table, spec, ridge));
        break;
      case ModelKind::kFrontDoor:
        res.outputs.push_back(estimate_frontdoor_apipw(table, spec, ridge));
        break;
      case ModelKind::kInstrumental:
        res.outputs.push_back(estimate_iv_wald(table, spec));
        break;
    }
  }
  const double level = 1.0 - alphas.front();
  for (const auto& out : res.outputs)
    res.intervals.push_back(wald_interval(out, level));

  const JointEstimate je = joint(res.outputs);
  res.combined = product_test(je, estimate_covariance(je), alphas);
  return res;
}

}  // namespace evfact
