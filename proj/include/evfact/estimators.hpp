#ifndef EVFACT_ESTIMATORS_HPP
#define EVFACT_ESTIMATORS_HPP

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "evfact/table.hpp"

namespace evfact {

// Floor applied to the mediator-density ratio's denominator. The pure
// evaluators accept an explicit floor so tests can switch it off.
inline constexpr double kAlphaFloor = 0.01;

// One fitted causal model: point estimate, centered per-row influence values
// (empirical mean zero by construction), and a note per nuisance regression.
struct EstimatorOutput {
  std::string label;
  double psi_hat = 0.0;
  Eigen::VectorXd if_values;
  std::vector<std::pair<std::string, std::string>> nuisance_report;
};

struct WaldInterval {
  double estimate = 0.0;
  double std_error = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double p_value = 1.0;
  double level = 0.95;
};

// ---- pure per-row evaluators -------------------------------------------
// These take nuisance values (not models) so exact numbers can be fed in.

// Augmented inverse-probability-weighted contribution for covariate
// adjustment:
//   (y - mu(a,c)) * (a - pi(c)) / (pi(c)(1 - pi(c))) + mu(1,c) - mu(0,c)
// Uncentered: subtract the mean to get influence values.
Eigen::VectorXd backdoor_contributions(const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& a,
                                       const Eigen::VectorXd& mu_obs,
                                       const Eigen::VectorXd& mu1,
                                       const Eigen::VectorXd& mu0,
                                       const Eigen::VectorXd& pi);

// Per-row nuisance values for the mediator-based estimator. alpha1_aX is
// P(M=1 | A=X, c); mu_MA is E[Y | M, A, c] at the four binary combinations.
struct FrontdoorNuisances {
  Eigen::VectorXd pi;
  Eigen::VectorXd alpha1_a1, alpha1_a0;
  Eigen::VectorXd mu00, mu10, mu01, mu11;  // mu_MA, first index mediator
};

// Augmented primal IPW contribution; binary mediator sums are exact:
//   gamma(m,c)   = sum_a' mu(m,a',c) P(A=a'|c)
//   eta(a0,a,c)  = sum_m mu(m,a,c) alpha(m|a0,c)
//   tau(a,c)     = sum_a' eta(a,a',c) P(A=a'|c)
//   term1 = (alpha(m|1,c) - alpha(m|0,c)) / alpha(m|a,c) * (y - mu(m,a,c))
//   term2 = (a - pi(c)) / (pi(c)(1-pi(c))) * (gamma(m,c) - tau(a,c))
//   term3 = eta(1,a,c) - eta(0,a,c)
Eigen::VectorXd frontdoor_contributions(const Eigen::VectorXd& y,
                                        const Eigen::VectorXd& m,
                                        const Eigen::VectorXd& a,
                                        const FrontdoorNuisances& nu,
                                        double alpha_floor);

// Arm summaries behind the Wald ratio: mu_z = mean outcome and pi_z = mean
// treatment within instrument arm z; zeta = mean instrument.
struct IvArmMeans {
  double mu1 = 0.0, mu0 = 0.0;
  double pi1 = 0.0, pi0 = 0.0;
  double zeta = 0.0;
};

IvArmMeans iv_arm_means(const Eigen::VectorXd& y, const Eigen::VectorXd& a,
                        const Eigen::VectorXd& z);

// Influence values of the Wald ratio (already centered in expectation and,
// because arm means are exact sample means, with empirical mean zero too):
//   [ (y - mu_z)(pi1 - pi0) - (a - pi_z)(mu1 - mu0) ]
//     * (z/zeta - (1-z)/(1-zeta)) / (pi1 - pi0)^2
Eigen::VectorXd iv_influence_values(const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& a,
                                    const Eigen::VectorXd& z,
                                    const IvArmMeans& means);

// ---- fitting front ends ------------------------------------------------

// Covariate-adjustment estimator. Nuisances share spec.basis:
// outcome regression y ~ const + a + basis(adjustment), Gaussian;
// propensity a ~ const + basis(adjustment), logistic.
EstimatorOutput estimate_backdoor_aipw(const ObservationTable& table,
                                       const ModelSpec& spec,
                                       double ridge = kDefaultRidge);

// Mediator-based estimator; adds m ~ const + a + basis(adjustment)
// (logistic) and y ~ const + m + a + basis(adjustment) (Gaussian).
EstimatorOutput estimate_frontdoor_apipw(const ObservationTable& table,
                                         const ModelSpec& spec,
                                         double ridge = kDefaultRidge);

// Unconditional Wald ratio; spec.adjustment and spec.basis are unused.
EstimatorOutput estimate_iv_wald(const ObservationTable& table,
                                 const ModelSpec& spec);

// Normal-approximation interval at the given confidence level, with the
// two-sided p-value for the zero null.
WaldInterval wald_interval(const EstimatorOutput& output, double level);

}  // namespace evfact

#endif
