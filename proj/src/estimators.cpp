#include "evfact/estimators.hpp"

#include <cmath>

#include "evfact/errors.hpp"
#include "evfact/stats.hpp"

namespace evfact {

namespace {

void require_same_length(std::initializer_list<const Eigen::VectorXd*> cols) {
  const Eigen::Index n = (*cols.begin())->size();
  for (const auto* c : cols)
    if (c->size() != n)
      throw DimensionMismatchError("estimator inputs differ in length");
}

void require_both_arms(const Eigen::VectorXd& a) {
  const double s = a.sum();
  if (s == 0.0 || s == static_cast<double>(a.size()))
    throw AllTreatedOrAllControlError();
}

// Centers contributions and packages the output, checking the mean-zero
// and finiteness guarantees the estimators promise.
EstimatorOutput finish(std::string label, const Eigen::VectorXd& contributions,
                       std::vector<std::pair<std::string, std::string>> notes) {
  EstimatorOutput out;
  out.label = std::move(label);
  out.psi_hat = contributions.mean();
  out.if_values = contributions.array() - out.psi_hat;
  out.nuisance_report = std::move(notes);
  if (!out.if_values.allFinite() || !std::isfinite(out.psi_hat))
    throw Error("estimator '" + out.label +
                "' produced non-finite influence values");
  const double scale = std::max(1.0, out.if_values.cwiseAbs().maxCoeff());
  if (std::abs(out.if_values.mean()) > 1e-8 * scale)
    throw Error("estimator '" + out.label +
                "' influence values failed to center");
  return out;
}

}  // namespace

Eigen::VectorXd backdoor_contributions(const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& a,
                                       const Eigen::VectorXd& mu_obs,
                                       const Eigen::VectorXd& mu1,
                                       const Eigen::VectorXd& mu0,
                                       const Eigen::VectorXd& pi) {
  require_same_length({&y, &a, &mu_obs, &mu1, &mu0, &pi});
  const auto weight =
      (a.array() - pi.array()) / (pi.array() * (1.0 - pi.array()));
  return ((y.array() - mu_obs.array()) * weight + mu1.array() - mu0.array())
      .matrix();
}

Eigen::VectorXd frontdoor_contributions(const Eigen::VectorXd& y,
                                        const Eigen::VectorXd& m,
                                        const Eigen::VectorXd& a,
                                        const FrontdoorNuisances& nu,
                                        double alpha_floor) {
  require_same_length({&y, &m, &a, &nu.pi, &nu.alpha1_a1, &nu.alpha1_a0,
                       &nu.mu00, &nu.mu10, &nu.mu01, &nu.mu11});
  const Eigen::Index n = y.size();
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double pi = nu.pi[i];
    const double a1 = nu.alpha1_a1[i];  // P(M=1 | A=1, c)
    const double a0 = nu.alpha1_a0[i];  // P(M=1 | A=0, c)
    const bool mi = m[i] != 0.0;
    const bool ai = a[i] != 0.0;

    // alpha(m_i | a', c) for both arms, and the observed-arm denominator.
    const double alpha_obs_arm1 = mi ? a1 : 1.0 - a1;
    const double alpha_obs_arm0 = mi ? a0 : 1.0 - a0;
    const double denom =
        std::max(ai ? alpha_obs_arm1 : alpha_obs_arm0, alpha_floor);

    // mu at the observed (m, a) and marginal pieces.
    const double mu_oa = mi ? (ai ? nu.mu11[i] : nu.mu10[i])
                            : (ai ? nu.mu01[i] : nu.mu00[i]);
    const double mu_m1 = mi ? nu.mu11[i] : nu.mu01[i];  // mu(m_i, a=1, c)
    const double mu_m0 = mi ? nu.mu10[i] : nu.mu00[i];  // mu(m_i, a=0, c)
    const double gamma_mc = mu_m1 * pi + mu_m0 * (1.0 - pi);

    // eta(a0', a', c) = mu(1,a',c) alpha(1|a0',c) + mu(0,a',c) alpha(0|a0',c)
    const double eta_11 = nu.mu11[i] * a1 + nu.mu01[i] * (1.0 - a1);
    const double eta_10 = nu.mu10[i] * a1 + nu.mu00[i] * (1.0 - a1);
    const double eta_01 = nu.mu11[i] * a0 + nu.mu01[i] * (1.0 - a0);
    const double eta_00 = nu.mu10[i] * a0 + nu.mu00[i] * (1.0 - a0);
    const double tau_a = ai ? eta_11 * pi + eta_10 * (1.0 - pi)
                            : eta_01 * pi + eta_00 * (1.0 - pi);

    const double term1 =
        (alpha_obs_arm1 - alpha_obs_arm0) / denom * (y[i] - mu_oa);
    const double term2 =
        (a[i] - pi) / (pi * (1.0 - pi)) * (gamma_mc - tau_a);
    const double term3 = ai ? eta_11 - eta_01 : eta_10 - eta_00;
    out[i] = term1 + term2 + term3;
  }
  return out;
}

IvArmMeans iv_arm_means(const Eigen::VectorXd& y, const Eigen::VectorXd& a,
                        const Eigen::VectorXd& z) {
  require_same_length({&y, &a, &z});
  const double n1 = z.sum();
  const double n0 = static_cast<double>(z.size()) - n1;
  if (n1 == 0.0 || n0 == 0.0) throw InstrumentConstantError();
  IvArmMeans m;
  m.zeta = n1 / static_cast<double>(z.size());
  m.mu1 = y.dot(z) / n1;
  m.mu0 = y.dot(Eigen::VectorXd::Ones(z.size()) - z) / n0;
  m.pi1 = a.dot(z) / n1;
  m.pi0 = a.dot(Eigen::VectorXd::Ones(z.size()) - z) / n0;
  return m;
}

Eigen::VectorXd iv_influence_values(const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& a,
                                    const Eigen::VectorXd& z,
                                    const IvArmMeans& means) {
  require_same_length({&y, &a, &z});
  const double dpi = means.pi1 - means.pi0;
  if (dpi == 0.0) throw WeakInstrumentDegenerateError();
  const double dmu = means.mu1 - means.mu0;
  const Eigen::Index n = y.size();
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool zi = z[i] != 0.0;
    const double mu_z = zi ? means.mu1 : means.mu0;
    const double pi_z = zi ? means.pi1 : means.pi0;
    const double w =
        zi ? 1.0 / means.zeta : -1.0 / (1.0 - means.zeta);
    out[i] = ((y[i] - mu_z) * dpi - (a[i] - pi_z) * dmu) * w / (dpi * dpi);
  }
  return out;
}

namespace {

struct AdjustmentData {
  Eigen::MatrixXd covariates;
  std::vector<std::string> names;
};

AdjustmentData adjustment_columns(const ObservationTable& table,
                                  const ModelSpec& spec) {
  return {table.covariate_subset(spec.adjustment), spec.adjustment};
}

std::string basis_note(const ModelSpec& spec, Family family) {
  return (family == Family::kGaussian ? std::string("gaussian ")
                                      : std::string("logistic ")) +
         spec.basis.to_string();
}

}  // namespace

EstimatorOutput estimate_backdoor_aipw(const ObservationTable& table,
                                       const ModelSpec& spec, double ridge) {
  validate_spec(table, spec);
  require_both_arms(table.treatment());
  const auto adj = adjustment_columns(table, spec);
  const Eigen::VectorXd& y = table.outcome();
  const Eigen::VectorXd& a = table.treatment();
  const Eigen::Index n = table.n_rows();

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(n);

  // Outcome regression with the treatment as a toggleable binary column.
  const Design d_obs =
      expand_basis(adj.covariates, adj.names, a, {"a"}, spec.basis);
  const auto mu_fit =
      fit_regression(Family::kGaussian, d_obs.X, y, ridge, d_obs.names);
  const Eigen::VectorXd mu_obs = predict_many(mu_fit, d_obs.X);
  const Eigen::VectorXd mu1 = predict_many(
      mu_fit,
      expand_basis(adj.covariates, adj.names, ones, {"a"}, spec.basis).X);
  const Eigen::VectorXd mu0 = predict_many(
      mu_fit,
      expand_basis(adj.covariates, adj.names, zeros, {"a"}, spec.basis).X);

  const Design d_pi = expand_basis(adj.covariates, adj.names,
                                   Eigen::MatrixXd(n, 0), {}, spec.basis);
  const auto pi_fit =
      fit_regression(Family::kBernoulli, d_pi.X, a, ridge, d_pi.names);
  const Eigen::VectorXd pi = predict_many(pi_fit, d_pi.X);

  return finish(spec.label(),
                backdoor_contributions(y, a, mu_obs, mu1, mu0, pi),
                {{"mu(a,c)", basis_note(spec, Family::kGaussian)},
                 {"pi(c)", basis_note(spec, Family::kBernoulli)}});
}

EstimatorOutput estimate_frontdoor_apipw(const ObservationTable& table,
                                         const ModelSpec& spec, double ridge) {
  validate_spec(table, spec);
  require_both_arms(table.treatment());
  const Eigen::VectorXd& m = table.mediator();
  {
    const double s = m.sum();
    if (s == 0.0 || s == static_cast<double>(m.size()))
      throw MediatorConstantError();
  }
  const auto adj = adjustment_columns(table, spec);
  const Eigen::VectorXd& y = table.outcome();
  const Eigen::VectorXd& a = table.treatment();
  const Eigen::Index n = table.n_rows();

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(n);

  const Design d_pi = expand_basis(adj.covariates, adj.names,
                                   Eigen::MatrixXd(n, 0), {}, spec.basis);
  const auto pi_fit =
      fit_regression(Family::kBernoulli, d_pi.X, a, ridge, d_pi.names);

  const Design d_alpha =
      expand_basis(adj.covariates, adj.names, a, {"a"}, spec.basis);
  const auto alpha_fit =
      fit_regression(Family::kBernoulli, d_alpha.X, m, ridge, d_alpha.names);

  Eigen::MatrixXd ma(n, 2);
  ma.col(0) = m;
  ma.col(1) = a;
  const Design d_mu =
      expand_basis(adj.covariates, adj.names, ma, {"m", "a"}, spec.basis);
  const auto mu_fit =
      fit_regression(Family::kGaussian, d_mu.X, y, ridge, d_mu.names);

  auto alpha_at = [&](const Eigen::VectorXd& arm) {
    return predict_many(
        alpha_fit,
        expand_basis(adj.covariates, adj.names, arm, {"a"}, spec.basis).X);
  };
  auto mu_at = [&](const Eigen::VectorXd& mm, const Eigen::VectorXd& aa) {
    Eigen::MatrixXd cols(n, 2);
    cols.col(0) = mm;
    cols.col(1) = aa;
    return predict_many(
        mu_fit,
        expand_basis(adj.covariates, adj.names, cols, {"m", "a"}, spec.basis)
            .X);
  };

  FrontdoorNuisances nu;
  nu.pi = predict_many(pi_fit, d_pi.X);
  nu.alpha1_a1 = alpha_at(ones);
  nu.alpha1_a0 = alpha_at(zeros);
  nu.mu00 = mu_at(zeros, zeros);
  nu.mu10 = mu_at(ones, zeros);
  nu.mu01 = mu_at(zeros, ones);
  nu.mu11 = mu_at(ones, ones);

  return finish(spec.label(),
                frontdoor_contributions(y, m, a, nu, kAlphaFloor),
                {{"pi(c)", basis_note(spec, Family::kBernoulli)},
                 {"alpha(m|a,c)", basis_note(spec, Family::kBernoulli)},
                 {"mu(m,a,c)", basis_note(spec, Family::kGaussian)}});
}

EstimatorOutput estimate_iv_wald(const ObservationTable& table,
                                 const ModelSpec& spec) {
  validate_spec(table, spec);
  const Eigen::VectorXd& z = table.instrument();
  const auto means = iv_arm_means(table.outcome(), table.treatment(), z);
  const double dpi = means.pi1 - means.pi0;
  if (dpi == 0.0) throw WeakInstrumentDegenerateError();

  EstimatorOutput out;
  out.label = spec.label();
  out.psi_hat = (means.mu1 - means.mu0) / dpi;
  out.if_values =
      iv_influence_values(table.outcome(), table.treatment(), z, means);
  out.nuisance_report = {{"arm means", "sample averages"}};
  if (!out.if_values.allFinite() || !std::isfinite(out.psi_hat))
    throw Error("estimator 'iv' produced non-finite influence values");
  return out;
}

WaldInterval wald_interval(const EstimatorOutput& output, double level) {
  if (!(level > 0.0 && level < 1.0))
    throw DimensionMismatchError("confidence level must lie in (0, 1)");
  const Eigen::Index n = output.if_values.size();
  if (n == 0) throw DimensionMismatchError("no influence values");
  const double mean_sq = output.if_values.squaredNorm() / static_cast<double>(n);
  if (mean_sq <= 0.0)
    throw DegenerateVarianceError("influence values are identically zero");

  WaldInterval w;
  w.level = level;
  w.estimate = output.psi_hat;
  w.std_error = std::sqrt(mean_sq / static_cast<double>(n));
  const double q = stats::normal_quantile(0.5 + level / 2.0);
  w.lower = w.estimate - q * w.std_error;
  w.upper = w.estimate + q * w.std_error;
  w.p_value = stats::two_sided_p(w.estimate / w.std_error);
  return w;
}

}  // namespace evfact
