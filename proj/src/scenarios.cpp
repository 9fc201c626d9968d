#include "evfact/scenarios.hpp"

#include <cmath>
#include <optional>
#include <unordered_map>

#include "evfact/errors.hpp"
#include "evfact/regression.hpp"
#include "evfact/rng.hpp"

// Each generator spells out its structural equations inline, in draw order,
// so a design can be audited top to bottom. Helpers cover only the stanzas
// that are identical everywhere: latent/covariate heads, the defier
// treatment blocks, and table assembly. Draws are consumed row by row in a
// fixed order (confounders, covariates, extra latents, instrument,
// treatment pair, mediator, outcome, post-outcome covariates), and every
// draw uses a fixed number of stream steps, so a (scenario, n, beta, seed)
// tuple pins the dataset bit for bit.

namespace evfact {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double sq2(double c1) { return 2.0 * std::sqrt(std::abs(c1)); }

void trace_reserve(ScenarioTrace* tr, Index n, bool potentials, bool with_v) {
  if (!tr) return;
  *tr = ScenarioTrace{};
  tr->u.resize(n);
  if (with_v) tr->v.resize(n);
  if (potentials) {
    tr->a1.resize(n);
    tr->a0.resize(n);
    tr->has_potentials = true;
  }
}

// Potential treatments drawn as abar(1) ~ Bern(p1), abar(0) ~ Bern(p0);
// callers spell out the designs' usual p0 = 1 - pi. A (0,1) pair is a
// defier. `convert` flips defiers to compliers (1,0). Returns the observed
// a = a(z) and reports the pair through a1/a0.
double draw_treatment(SplitMix64& g, double p1, double p0, double z,
                      bool convert, Index i, ScenarioTrace* tr, double& a1,
                      double& a0) {
  a1 = g.bernoulli(p1);
  a0 = g.bernoulli(p0);
  if (a1 == 0.0 && a0 == 1.0) {
    if (convert) {
      a1 = 1.0;
      a0 = 0.0;
      if (tr) ++tr->defiers_converted;
    } else if (tr) {
      ++tr->defiers_present;
    }
  }
  if (tr) {
    tr->a1[i] = a1;
    tr->a0[i] = a0;
  }
  return z != 0.0 ? a1 : a0;
}

ObservationTable make_table(VectorXd y, VectorXd a, std::optional<VectorXd> z,
                            std::optional<VectorXd> m, MatrixXd c,
                            std::vector<std::string> cnames) {
  ColumnMapping map;
  map.outcome = "y";
  map.treatment = "a";
  if (z) map.instrument = "z";
  if (m) map.mediator = "m";
  map.covariates = std::move(cnames);
  return ObservationTable::from_columns(std::move(map), std::move(y),
                                        std::move(a), std::move(z),
                                        std::move(m), std::move(c));
}

const std::vector<std::string> kC4 = {"c1", "c2", "c3", "c4"};
const std::vector<std::string> kC5 = {"c1", "c2", "c3", "c4", "c5"};
const std::vector<std::string> kC4Z = {"c1", "c2", "c3", "c4", "zc"};

// =====================================================================
// Designs with treatment, mediator, and instrument (three models).
// Shared head: U ~ Unif(-2,2); C1..C4 ~ Unif(-2,2); Z ~ Bern(0.5).
// =====================================================================

// All correct.
//   pi(c)   = expit{c1 + expit(c2) + sin(c3)}
//   abar(1) ~ Bern(pi), abar(0) ~ Bern(1 - pi), defiers converted
//   M ~ Bern(expit{5A - 1 + C2});  Y ~ N(beta*M + 3U + 2*sqrt|C1| + sin C4, 1)
ObservationTable gen_bfi_a(const ScenarioConfig& cfg, ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, true, false);
  VectorXd y(n), a(n), z(n), m(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    z[i] = g.bernoulli(0.5);
    const double pi = expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2)));
    double a1, a0;
    a[i] = draw_treatment(g, pi, 1.0 - pi, z[i], true, i, tr, a1, a0);
    m[i] = g.bernoulli(expit(5.0 * a[i] - 1.0 + c(i, 1)));
    y[i] = g.normal(cfg.beta * m[i] + 3.0 * u + sq2(c(i, 0)) +
                        std::sin(c(i, 3)),
                    1.0);
  }
  return make_table(y, a, z, m, c, kC4);
}

// As BFI-a but the treatment probability also loads on U:
//   pi(c,u) = expit{c1 + expit(c2) + sin(c3) + u}
ObservationTable gen_bfi_b_nonzero(const ScenarioConfig& cfg,
                                   ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, true, false);
  VectorXd y(n), a(n), z(n), m(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    z[i] = g.bernoulli(0.5);
    const double pi = expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2)) + u);
    double a1, a0;
    a[i] = draw_treatment(g, pi, 1.0 - pi, z[i], true, i, tr, a1, a0);
    m[i] = g.bernoulli(expit(5.0 * a[i] - 1.0 + c(i, 1)));
    y[i] = g.normal(cfg.beta * m[i] + 3.0 * u + sq2(c(i, 0)) +
                        std::sin(c(i, 3)),
                    1.0);
  }
  return make_table(y, a, z, m, c, kC4);
}

// As BFI-a with
//   pi(c,u) = expit{c1 + expit(c2) + sin(c3) - u}
//   Y ~ N(beta*M + U + 2*sqrt|C1| + sin C4, 1)
// tuned so the adjusted-model functional sits at zero under the null.
ObservationTable gen_bfi_b_zero_null(const ScenarioConfig& cfg,
                                     ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, true, false);
  VectorXd y(n), a(n), z(n), m(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    z[i] = g.bernoulli(0.5);
    const double pi = expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2)) - u);
    double a1, a0;
    a[i] = draw_treatment(g, pi, 1.0 - pi, z[i], true, i, tr, a1, a0);
    m[i] = g.bernoulli(expit(5.0 * a[i] - 1.0 + c(i, 1)));
    y[i] = g.normal(cfg.beta * m[i] + u + sq2(c(i, 0)) + std::sin(c(i, 3)),
                    1.0);
  }
  return make_table(y, a, z, m, c, kC4);
}

// Treatment probability takes the instrument arm as an argument; each
// potential arm draws at its own instrument value,
//   abar(z) ~ Bern(pi(C1, C2, z, U)), defiers converted,
// which is the reading that reproduces the tuned -0.97 cancellation of the
// adjusted-model functional at beta = 10.
//   pi(c1,c2,z,u) = expit{-0.5 + 5z + c1 + expit(c2) - 0.97u}
//   M ~ Bern(expit{2A - 1 + C2})
//   Y ~ N(beta*M + 5U - 2*sqrt|C1| + sin C4, 1)
ObservationTable gen_bfi_b_zero_alt(const ScenarioConfig& cfg,
                                    ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, true, false);
  VectorXd y(n), a(n), z(n), m(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    z[i] = g.bernoulli(0.5);
    auto pi = [&](double z_arm) {
      return expit(-0.5 + 5.0 * z_arm + c(i, 0) + expit(c(i, 1)) - 0.97 * u);
    };
    double a1, a0;
    a[i] = draw_treatment(g, pi(1.0), pi(0.0), z[i], true, i, tr, a1, a0);
    m[i] = g.bernoulli(expit(2.0 * a[i] - 1.0 + c(i, 1)));
    y[i] = g.normal(cfg.beta * m[i] + 5.0 * u - sq2(c(i, 0)) +
                        std::sin(c(i, 3)),
                    1.0);
  }
  return make_table(y, a, z, m, c, kC4);
}

// As BFI-a but the instrument leaks directly into the outcome:
//   Y ~ N(beta*M + U + 2*sqrt|C1| + sin C4 + 2Z, 1)
ObservationTable gen_bfi_iv_exclusion(const ScenarioConfig& cfg,
                                      ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, true, false);
  VectorXd y(n), a(n), z(n), m(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    z[i] = g.bernoulli(0.5);
    const double pi = expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2)));
    double a1, a0;
    a[i] = draw_treatment(g, pi, 1.0 - pi, z[i], true, i, tr, a1, a0);
    m[i] = g.bernoulli(expit(5.0 * a[i] - 1.0 + c(i, 1)));
    y[i] = g.normal(cfg.beta * m[i] + u + sq2(c(i, 0)) + std::sin(c(i, 3)) +
                        2.0 * z[i],
                    1.0);
  }
  return make_table(y, a, z, m, c, kC4);
}

// Monotonicity broken: potential treatments drawn without conversion and the
// mediator reacts to complier status.
//   A(1) ~ Bern(pi), A(0) ~ Bern(1 - pi), pi as in BFI-a
//   M ~ Bern(expit{alpha1*A + alpha2*1{A(0) < A(1)}*A - 1 + C2})
//   Y ~ N(beta*M + U + 2*sqrt|C1| + sin C4, 1)
ObservationTable gen_bfi_mono(const ScenarioConfig& cfg, ScenarioTrace* tr,
                              double alpha1, double alpha2) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, true, false);
  VectorXd y(n), a(n), z(n), m(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    z[i] = g.bernoulli(0.5);
    const double pi = expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2)));
    double a1, a0;
    a[i] = draw_treatment(g, pi, 1.0 - pi, z[i], false, i, tr, a1, a0);
    const double complier = a0 < a1 ? 1.0 : 0.0;
    m[i] = g.bernoulli(
        expit(alpha1 * a[i] + alpha2 * complier * a[i] - 1.0 + c(i, 1)));
    y[i] = g.normal(cfg.beta * m[i] + u + sq2(c(i, 0)) + std::sin(c(i, 3)),
                    1.0);
  }
  return make_table(y, a, z, m, c, kC4);
}

ObservationTable gen_bfi_mono_null(const ScenarioConfig& cfg,
                                   ScenarioTrace* tr) {
  return gen_bfi_mono(cfg, tr, 5.0, -3.0);
}
ObservationTable gen_bfi_mono_zero_alt(const ScenarioConfig& cfg,
                                       ScenarioTrace* tr) {
  return gen_bfi_mono(cfg, tr, 5.0, -2.838);
}
ObservationTable gen_bfi_mono_nonzero_alt(const ScenarioConfig& cfg,
                                          ScenarioTrace* tr) {
  return gen_bfi_mono(cfg, tr, 2.0, 3.0);
}

// Only the mediator model correct. A second latent V confounds A-Y and the
// instrument is driven by U:
//   V ~ Unif(-2,2);  Z ~ Bern(expit{2 + 2U})
//   pi(c,v) = expit{c1 + expit(c2) + sin(c3) + v}, defiers converted
//   M ~ Bern(expit{2A - 1 + C2})
//   Y ~ N(beta*M + 2U + V + 2*sqrt|C1| + sin C4, 1)
ObservationTable gen_bfi_fdonly_nonzero(const ScenarioConfig& cfg,
                                        ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, true, true);
  VectorXd y(n), a(n), z(n), m(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    const double v = g.uniform(-2, 2);
    if (tr) tr->v[i] = v;
    z[i] = g.bernoulli(expit(2.0 + 2.0 * u));
    const double pi = expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2)) + v);
    double a1, a0;
    a[i] = draw_treatment(g, pi, 1.0 - pi, z[i], true, i, tr, a1, a0);
    m[i] = g.bernoulli(expit(2.0 * a[i] - 1.0 + c(i, 1)));
    y[i] = g.normal(cfg.beta * m[i] + 2.0 * u + v + sq2(c(i, 0)) +
                        std::sin(c(i, 3)),
                    1.0);
  }
  return make_table(y, a, z, m, c, kC4);
}

// Only the mediator model correct; treatment confounded by U and
// monotonicity broken:
//   pi(c,u) = expit{c1 + expit(c2) + sin(c3) + u}
//   A(1) ~ Bern(pi), A(0) ~ Bern(1 - pi), no conversion
//   M ~ Bern(expit{alpha1*A + alpha2*1{A(0) < A(1)}*A - 1 + C2})
//   Y ~ N(beta*M + U + 2*sqrt|C1| + sin C4, 1)
ObservationTable gen_bfi_fdonly_mono(const ScenarioConfig& cfg,
                                     ScenarioTrace* tr, double alpha1,
                                     double alpha2) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, true, false);
  VectorXd y(n), a(n), z(n), m(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    z[i] = g.bernoulli(0.5);
    const double pi = expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2)) + u);
    double a1, a0;
    a[i] = draw_treatment(g, pi, 1.0 - pi, z[i], false, i, tr, a1, a0);
    const double complier = a0 < a1 ? 1.0 : 0.0;
    m[i] = g.bernoulli(
        expit(alpha1 * a[i] + alpha2 * complier * a[i] - 1.0 + c(i, 1)));
    y[i] = g.normal(cfg.beta * m[i] + u + sq2(c(i, 0)) + std::sin(c(i, 3)),
                    1.0);
  }
  return make_table(y, a, z, m, c, kC4);
}

ObservationTable gen_bfi_fdonly_mono_null(const ScenarioConfig& cfg,
                                          ScenarioTrace* tr) {
  return gen_bfi_fdonly_mono(cfg, tr, 5.0, -3.0);
}
ObservationTable gen_bfi_fdonly_mono_zero_alt(const ScenarioConfig& cfg,
                                              ScenarioTrace* tr) {
  return gen_bfi_fdonly_mono(cfg, tr, 5.0, -2.63);
}

// Only the mediator model correct; the instrument affects the outcome
// directly and is not adjusted for:
//   pi as BFI-a;  M ~ Bern(expit{2A - 1 + C2})
//   Y ~ N(beta*M + 3U + 2*sqrt|C1| + sin C4 + 2Z, 1)
ObservationTable gen_bfi_fdonly_exclusion_alt(const ScenarioConfig& cfg,
                                              ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, true, false);
  VectorXd y(n), a(n), z(n), m(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    z[i] = g.bernoulli(0.5);
    const double pi = expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2)));
    double a1, a0;
    a[i] = draw_treatment(g, pi, 1.0 - pi, z[i], true, i, tr, a1, a0);
    m[i] = g.bernoulli(expit(2.0 * a[i] - 1.0 + c(i, 1)));
    y[i] = g.normal(cfg.beta * m[i] + 3.0 * u + sq2(c(i, 0)) +
                        std::sin(c(i, 3)) + 2.0 * z[i],
                    1.0);
  }
  return make_table(y, a, z, m, c, kC4);
}

// Only the instrumented model correct; the adjustment set picks up a
// treatment-outcome collider C5 and the mediator is confounded:
//   pi = expit{c4 + expit(c2) + sin(c3)}   (argument list in the source
//                                           design is stale; body used)
//   M ~ Bern(expit{5A - 1 + C2 + 2U});  Y ~ N(beta*M + U + sin C4, 1)
//   C5 ~ N(3A - Y, 1), appended to the adjustment set
ObservationTable gen_bfi_ivonly_collider_null(const ScenarioConfig& cfg,
                                              ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, true, false);
  VectorXd y(n), a(n), z(n), m(n);
  MatrixXd c(n, 5);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    z[i] = g.bernoulli(0.5);
    const double pi = expit(c(i, 3) + expit(c(i, 1)) + std::sin(c(i, 2)));
    double a1, a0;
    a[i] = draw_treatment(g, pi, 1.0 - pi, z[i], true, i, tr, a1, a0);
    m[i] = g.bernoulli(expit(5.0 * a[i] - 1.0 + c(i, 1) + 2.0 * u));
    y[i] = g.normal(cfg.beta * m[i] + u + std::sin(c(i, 3)), 1.0);
    c(i, 4) = g.normal(3.0 * a[i] - y[i], 1.0);
  }
  return make_table(y, a, z, m, c, kC5);
}

// Only the instrumented model correct; treatment and mediator share U:
//   pi(c,u) = expit{c1 + expit(c2) + sin(c3) + u}
//   M ~ Bern(expit{3A - 1 + C2 + U});  Y as BFI-a
ObservationTable gen_bfi_ivonly_confounded(const ScenarioConfig& cfg,
                                           ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, true, false);
  VectorXd y(n), a(n), z(n), m(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    z[i] = g.bernoulli(0.5);
    const double pi = expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2)) + u);
    double a1, a0;
    a[i] = draw_treatment(g, pi, 1.0 - pi, z[i], true, i, tr, a1, a0);
    m[i] = g.bernoulli(expit(3.0 * a[i] - 1.0 + c(i, 1) + u));
    y[i] = g.normal(cfg.beta * m[i] + 3.0 * u + sq2(c(i, 0)) +
                        std::sin(c(i, 3)),
                    1.0);
  }
  return make_table(y, a, z, m, c, kC4);
}

// Only the instrumented model correct, zero-functional flavor:
//   pi = expit{c4 + sin(c3) - u}        (stale argument list in the source)
//   M ~ Bern(expit{5A - 1 + C2 - 2U});  Y ~ N(beta*M - 5*sin C4, 1)
//   C5 ~ N(-2A - 5Y, 1), appended to the adjustment set
ObservationTable gen_bfi_ivonly_collider_zero_alt(const ScenarioConfig& cfg,
                                                  ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, true, false);
  VectorXd y(n), a(n), z(n), m(n);
  MatrixXd c(n, 5);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    z[i] = g.bernoulli(0.5);
    const double pi = expit(c(i, 3) + std::sin(c(i, 2)) - u);
    double a1, a0;
    a[i] = draw_treatment(g, pi, 1.0 - pi, z[i], true, i, tr, a1, a0);
    m[i] = g.bernoulli(expit(5.0 * a[i] - 1.0 + c(i, 1) - 2.0 * u));
    y[i] = g.normal(cfg.beta * m[i] - 5.0 * std::sin(c(i, 3)), 1.0);
    c(i, 4) = g.normal(-2.0 * a[i] - 5.0 * y[i], 1.0);
  }
  return make_table(y, a, z, m, c, kC5);
}

// Only the adjusted model correct; the instrument leaks into the outcome, so
// it joins the adjustment set as covariate "zc":
//   M ~ Bern(expit{2A - 1 + C2 + U})
//   Y ~ N(beta*M - 3U + 2*sqrt|C1| + sin C4 + 2Z, 1)
ObservationTable gen_bfi_bdonly_nonzero_null(const ScenarioConfig& cfg,
                                             ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, true, false);
  VectorXd y(n), a(n), z(n), m(n);
  MatrixXd c(n, 5);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    z[i] = g.bernoulli(0.5);
    const double pi = expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2)));
    double a1, a0;
    a[i] = draw_treatment(g, pi, 1.0 - pi, z[i], true, i, tr, a1, a0);
    m[i] = g.bernoulli(expit(2.0 * a[i] - 1.0 + c(i, 1) + u));
    y[i] = g.normal(cfg.beta * m[i] - 3.0 * u + sq2(c(i, 0)) +
                        std::sin(c(i, 3)) + 2.0 * z[i],
                    1.0);
    c(i, 4) = z[i];  // duplicate of the instrument, exported as "zc"
  }
  return make_table(y, a, z, m, c, kC4Z);
}

// Only the adjusted model correct; monotonicity broken and the mediator law
// differs between compliers and the rest:
//   pi as BFI-a;  A(1) ~ Bern(pi), A(0) ~ Bern(1 - pi), no conversion
//   M ~ 1{A(0) < A(1)} Bern(expit{5A - 1 + C2 + U})
//     + 1{A(0) >= A(1)} Bern(expit{2A - 1 + C2 + U})
//   Y ~ N(beta*M - 3U + 2*sqrt|C1| + sin C4, 1)
ObservationTable gen_bfi_bdonly_mono(const ScenarioConfig& cfg,
                                     ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, true, false);
  VectorXd y(n), a(n), z(n), m(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    z[i] = g.bernoulli(0.5);
    const double pi = expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2)));
    double a1, a0;
    a[i] = draw_treatment(g, pi, 1.0 - pi, z[i], false, i, tr, a1, a0);
    const double logit = a0 < a1 ? 5.0 * a[i] - 1.0 + c(i, 1) + u
                                 : 2.0 * a[i] - 1.0 + c(i, 1) + u;
    m[i] = g.bernoulli(expit(logit));
    y[i] = g.normal(cfg.beta * m[i] - 3.0 * u + sq2(c(i, 0)) +
                        std::sin(c(i, 3)),
                    1.0);
  }
  return make_table(y, a, z, m, c, kC4);
}

// Only the adjusted model correct; the outcome depends on A directly so the
// mediator-model functional is exactly zero:
//   M ~ 1{A(0) < A(1)} Bern(expit{2A - 1 + C2})
//     + 1{A(0) >= A(1)} Bern(expit{5A - 1 + C2})
//   Y ~ N(beta*A + 3U + 2*sqrt|C1| + sin C4, 1)
ObservationTable gen_bfi_bdonly_mono_zero_alt(const ScenarioConfig& cfg,
                                              ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, true, false);
  VectorXd y(n), a(n), z(n), m(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    z[i] = g.bernoulli(0.5);
    const double pi = expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2)));
    double a1, a0;
    a[i] = draw_treatment(g, pi, 1.0 - pi, z[i], false, i, tr, a1, a0);
    const double logit = a0 < a1 ? 2.0 * a[i] - 1.0 + c(i, 1)
                                 : 5.0 * a[i] - 1.0 + c(i, 1);
    m[i] = g.bernoulli(expit(logit));
    y[i] = g.normal(cfg.beta * a[i] + 3.0 * u + sq2(c(i, 0)) +
                        std::sin(c(i, 3)),
                    1.0);
  }
  return make_table(y, a, z, m, c, kC4);
}

// =====================================================================
// Designs with treatment and mediator only (adjusted + mediator models).
// Shared head: U ~ Unif(-2,2); C1..C4 ~ Unif(-2,2).
// =====================================================================

// Both correct:
//   A ~ Bern(expit{C1 + expit(C2) + sin(C3)})
//   M ~ Bern(expit{2A - 1 + C2})
//   Y ~ N(beta*M + 2U + 2*sqrt|C1| + sin C4, 1)
ObservationTable gen_bf_a(const ScenarioConfig& cfg, ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, false, false);
  VectorXd y(n), a(n), m(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    a[i] = g.bernoulli(expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2))));
    m[i] = g.bernoulli(expit(2.0 * a[i] - 1.0 + c(i, 1)));
    y[i] = g.normal(cfg.beta * m[i] + 2.0 * u + sq2(c(i, 0)) +
                        std::sin(c(i, 3)),
                    1.0);
  }
  return make_table(y, a, std::nullopt, m, c, kC4);
}

// As BF-a with U in the treatment:
//   A ~ Bern(expit{C1 + expit(C2) + sin(C3) + U})
ObservationTable gen_bf_b_nonzero(const ScenarioConfig& cfg,
                                  ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, false, false);
  VectorXd y(n), a(n), m(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    a[i] = g.bernoulli(
        expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2)) + u));
    m[i] = g.bernoulli(expit(2.0 * a[i] - 1.0 + c(i, 1)));
    y[i] = g.normal(cfg.beta * m[i] + 2.0 * u + sq2(c(i, 0)) +
                        std::sin(c(i, 3)),
                    1.0);
  }
  return make_table(y, a, std::nullopt, m, c, kC4);
}

// Weak-confounding variant tuned so the adjusted functional is ~0 under
// the null:
//   A ~ Bern(expit{C1 + expit(C2) + sin(C3) - 0.05U})
//   M ~ Bern(expit{5A - 1 + C2})
//   Y ~ N(beta*M + 0.05U + 2*sqrt|C1| + sin C4, 1)
ObservationTable gen_bf_b_zero_null(const ScenarioConfig& cfg,
                                    ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, false, false);
  VectorXd y(n), a(n), m(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    a[i] = g.bernoulli(
        expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2)) - 0.05 * u));
    m[i] = g.bernoulli(expit(5.0 * a[i] - 1.0 + c(i, 1)));
    y[i] = g.normal(cfg.beta * m[i] + 0.05 * u + sq2(c(i, 0)) +
                        std::sin(c(i, 3)),
                    1.0);
  }
  return make_table(y, a, std::nullopt, m, c, kC4);
}

// Cancellation variant with the adjusted functional ~0 under the
// alternative:
//   A ~ Bern(expit{C1 - expit(C2) - sin(C3) + 0.6U})
//   M ~ Bern(expit{0.37A - 1 + C2})
//   Y ~ N(beta*M - 0.9U + 2*sqrt|C1| + sin C4, 1)
ObservationTable gen_bf_b_zero_alt(const ScenarioConfig& cfg,
                                   ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, false, false);
  VectorXd y(n), a(n), m(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    a[i] = g.bernoulli(
        expit(c(i, 0) - expit(c(i, 1)) - std::sin(c(i, 2)) + 0.6 * u));
    m[i] = g.bernoulli(expit(0.37 * a[i] - 1.0 + c(i, 1)));
    y[i] = g.normal(cfg.beta * m[i] - 0.9 * u + sq2(c(i, 0)) +
                        std::sin(c(i, 3)),
                    1.0);
  }
  return make_table(y, a, std::nullopt, m, c, kC4);
}

// As BF-a but the treatment acts on the outcome directly, so the mediator
// functional is exactly zero:
//   Y ~ N(beta*A + 2U + 2*sqrt|C1| + sin C4, 1)
ObservationTable gen_bf_fd_direct(const ScenarioConfig& cfg,
                                  ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, false, false);
  VectorXd y(n), a(n), m(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    a[i] = g.bernoulli(expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2))));
    m[i] = g.bernoulli(expit(2.0 * a[i] - 1.0 + c(i, 1)));
    y[i] = g.normal(cfg.beta * a[i] + 2.0 * u + sq2(c(i, 0)) +
                        std::sin(c(i, 3)),
                    1.0);
  }
  return make_table(y, a, std::nullopt, m, c, kC4);
}

// As BF-a but U reaches the mediator too:
//   M ~ Bern(expit{2A - 1 + C2 + U})
ObservationTable gen_bf_fd_confounded(const ScenarioConfig& cfg,
                                      ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, false, false);
  VectorXd y(n), a(n), m(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    a[i] = g.bernoulli(expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2))));
    m[i] = g.bernoulli(expit(2.0 * a[i] - 1.0 + c(i, 1) + u));
    y[i] = g.normal(cfg.beta * m[i] + 2.0 * u + sq2(c(i, 0)) +
                        std::sin(c(i, 3)),
                    1.0);
  }
  return make_table(y, a, std::nullopt, m, c, kC4);
}

// =====================================================================
// Designs with treatment and instrument only (adjusted + instrumented).
// Shared head: U ~ Unif(-2,2); C1..C4 ~ Unif(-2,2); Z ~ Bern(0.5).
// =====================================================================

// Both correct:
//   pi as BFI-a, defiers converted
//   Y ~ N(beta*A + 2U + 2*sqrt|C1| + sin C4, 1)
ObservationTable gen_bi_a(const ScenarioConfig& cfg, ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, true, false);
  VectorXd y(n), a(n), z(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    z[i] = g.bernoulli(0.5);
    const double pi = expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2)));
    double a1, a0;
    a[i] = draw_treatment(g, pi, 1.0 - pi, z[i], true, i, tr, a1, a0);
    y[i] = g.normal(cfg.beta * a[i] + 2.0 * u + sq2(c(i, 0)) +
                        std::sin(c(i, 3)),
                    1.0);
  }
  return make_table(y, a, z, std::nullopt, c, kC4);
}

// Treatment confounded by U (the source design files this under a zero
// functional in the misspecified model, which does not obviously follow
// from the equations; transcribed as stated):
//   pi(c,u) = expit{c1 + expit(c2) + sin(c3) + u}
ObservationTable gen_bi_b_confounded_null(const ScenarioConfig& cfg,
                                          ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, true, false);
  VectorXd y(n), a(n), z(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    z[i] = g.bernoulli(0.5);
    const double pi = expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2)) + u);
    double a1, a0;
    a[i] = draw_treatment(g, pi, 1.0 - pi, z[i], true, i, tr, a1, a0);
    y[i] = g.normal(cfg.beta * a[i] + 2.0 * u + sq2(c(i, 0)) +
                        std::sin(c(i, 3)),
                    1.0);
  }
  return make_table(y, a, z, std::nullopt, c, kC4);
}

// Collider variants: the adjustment set includes C5 ~ N(k1*A + k2*Y, 1).
//   pi = expit{c4 + expit(c2) + sin(c3)}   (stale argument list in source)
ObservationTable gen_bi_collider(const ScenarioConfig& cfg, ScenarioTrace* tr,
                                 double y_u, double y_sin, double k1,
                                 double k2) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, true, false);
  VectorXd y(n), a(n), z(n);
  MatrixXd c(n, 5);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    z[i] = g.bernoulli(0.5);
    const double pi = expit(c(i, 3) + expit(c(i, 1)) + std::sin(c(i, 2)));
    double a1, a0;
    a[i] = draw_treatment(g, pi, 1.0 - pi, z[i], true, i, tr, a1, a0);
    y[i] = g.normal(cfg.beta * a[i] + y_u * u + y_sin * std::sin(c(i, 3)),
                    1.0);
    c(i, 4) = g.normal(k1 * a[i] + k2 * y[i], 1.0);
  }
  return make_table(y, a, z, std::nullopt, c, kC5);
}

//   Y ~ N(beta*A + 2U + sin C4, 1);  C5 ~ N(2A + Y, 1)
ObservationTable gen_bi_collider_nonzero_null(const ScenarioConfig& cfg,
                                              ScenarioTrace* tr) {
  return gen_bi_collider(cfg, tr, 2.0, 1.0, 2.0, 1.0);
}
//   Y ~ N(beta*A + 2U + sin C4, 1);  C5 ~ N(A + Y, 1)
ObservationTable gen_bi_collider_nonzero_alt(const ScenarioConfig& cfg,
                                             ScenarioTrace* tr) {
  return gen_bi_collider(cfg, tr, 2.0, 1.0, 1.0, 1.0);
}
//   Y ~ N(beta*A - 3U - sin C4, 1);  C5 ~ N(0.6A + 2Y, 1)
ObservationTable gen_bi_collider_zero_alt(const ScenarioConfig& cfg,
                                          ScenarioTrace* tr) {
  return gen_bi_collider(cfg, tr, -3.0, -1.0, 0.6, 2.0);
}

// As BI-a but the instrument leaks into the outcome:
//   Y ~ N(beta*A + 2U + 2*sqrt|C1| + sin C4 + 2Z, 1)
// The adjusted model stays correct only if the instrument joins its
// adjustment set (covariate "zc"), since Z is now a common cause of A and
// Y; the design is stated with the adjusted model correct.
ObservationTable gen_bi_iv_exclusion_null(const ScenarioConfig& cfg,
                                          ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, true, false);
  VectorXd y(n), a(n), z(n);
  MatrixXd c(n, 5);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    z[i] = g.bernoulli(0.5);
    const double pi = expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2)));
    double a1, a0;
    a[i] = draw_treatment(g, pi, 1.0 - pi, z[i], true, i, tr, a1, a0);
    y[i] = g.normal(cfg.beta * a[i] + 2.0 * u + sq2(c(i, 0)) +
                        std::sin(c(i, 3)) + 2.0 * z[i],
                    1.0);
    c(i, 4) = z[i];  // duplicate of the instrument, exported as "zc"
  }
  return make_table(y, a, z, std::nullopt, c, kC4Z);
}

// Monotonicity broken, with the outcome reacting to defier status. The two
// outcome coefficients are fixed by the design, so the configured beta is
// unused here:
//   A(1) ~ Bern(pi), A(0) ~ Bern(1 - pi), pi as BI-a, no conversion
//   Y ~ N(b1*A + b2*1{A(0) > A(1)}*A + 2U + 2*sqrt|C1| + sin C4, 1)
ObservationTable gen_bi_mono(const ScenarioConfig& cfg, ScenarioTrace* tr,
                             double b1, double b2) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, true, false);
  VectorXd y(n), a(n), z(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    z[i] = g.bernoulli(0.5);
    const double pi = expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2)));
    double a1, a0;
    a[i] = draw_treatment(g, pi, 1.0 - pi, z[i], false, i, tr, a1, a0);
    const double defier = a0 > a1 ? 1.0 : 0.0;
    y[i] = g.normal(b1 * a[i] + b2 * defier * a[i] + 2.0 * u + sq2(c(i, 0)) +
                        std::sin(c(i, 3)),
                    1.0);
  }
  return make_table(y, a, z, std::nullopt, c, kC4);
}

ObservationTable gen_bi_mono_null(const ScenarioConfig& cfg,
                                  ScenarioTrace* tr) {
  return gen_bi_mono(cfg, tr, 0.0, 0.0);
}
ObservationTable gen_bi_mono_zero_alt(const ScenarioConfig& cfg,
                                      ScenarioTrace* tr) {
  return gen_bi_mono(cfg, tr, 5.75, 4.25);
}
ObservationTable gen_bi_mono_nonzero_alt(const ScenarioConfig& cfg,
                                         ScenarioTrace* tr) {
  return gen_bi_mono(cfg, tr, 10.0, -8.0);
}

// =====================================================================
// Designs with mediator and instrument only (mediator + instrumented).
// Shared head: U ~ Unif(-2,2); C1..C4 ~ Unif(-2,2); Z ~ Bern(0.5).
// =====================================================================

// Both correct; treatment is confounded by U (allowed for both models):
//   pi(c,u) = expit{c1 + expit(c2) + sin(c3) + u}, defiers converted
//   M ~ Bern(expit{5A - 1 + C2})
//   Y ~ N(beta*M + 3U + 2*sqrt|C1| + sin C4, 1)
ObservationTable gen_fi_a(const ScenarioConfig& cfg, ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, true, false);
  VectorXd y(n), a(n), z(n), m(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    z[i] = g.bernoulli(0.5);
    const double pi = expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2)) + u);
    double a1, a0;
    a[i] = draw_treatment(g, pi, 1.0 - pi, z[i], true, i, tr, a1, a0);
    m[i] = g.bernoulli(expit(5.0 * a[i] - 1.0 + c(i, 1)));
    y[i] = g.normal(cfg.beta * m[i] + 3.0 * u + sq2(c(i, 0)) +
                        std::sin(c(i, 3)),
                    1.0);
  }
  return make_table(y, a, z, m, c, kC4);
}

// Only the instrumented model correct; the treatment hits the outcome
// directly so the mediator functional is exactly zero:
//   pi = expit{c1 + expit(c2) + sin(c3)}   (U dropped)
//   Y ~ N(beta*A + 3U + 2*sqrt|C1| + sin C4, 1)
ObservationTable gen_fi_fd_direct(const ScenarioConfig& cfg,
                                  ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, true, false);
  VectorXd y(n), a(n), z(n), m(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    z[i] = g.bernoulli(0.5);
    const double pi = expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2)));
    double a1, a0;
    a[i] = draw_treatment(g, pi, 1.0 - pi, z[i], true, i, tr, a1, a0);
    m[i] = g.bernoulli(expit(5.0 * a[i] - 1.0 + c(i, 1)));
    y[i] = g.normal(cfg.beta * a[i] + 3.0 * u + sq2(c(i, 0)) +
                        std::sin(c(i, 3)),
                    1.0);
  }
  return make_table(y, a, z, m, c, kC4);
}

// Only the instrumented model correct; U reaches the mediator:
//   pi = expit{c1 + expit(c2) + sin(c3)}   (U dropped)
//   M ~ Bern(expit{3A - 1 + C2 + U})
ObservationTable gen_fi_fd_confounded(const ScenarioConfig& cfg,
                                      ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, true, false);
  VectorXd y(n), a(n), z(n), m(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    z[i] = g.bernoulli(0.5);
    const double pi = expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2)));
    double a1, a0;
    a[i] = draw_treatment(g, pi, 1.0 - pi, z[i], true, i, tr, a1, a0);
    m[i] = g.bernoulli(expit(3.0 * a[i] - 1.0 + c(i, 1) + u));
    y[i] = g.normal(cfg.beta * m[i] + 3.0 * u + sq2(c(i, 0)) +
                        std::sin(c(i, 3)),
                    1.0);
  }
  return make_table(y, a, z, m, c, kC4);
}

// As FI-a but the instrument leaks into the outcome:
//   Y ~ N(beta*M + 3U + 2*sqrt|C1| + sin C4 + 2Z, 1)
ObservationTable gen_fi_iv_exclusion(const ScenarioConfig& cfg,
                                     ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, true, false);
  VectorXd y(n), a(n), z(n), m(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    z[i] = g.bernoulli(0.5);
    const double pi = expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2)) + u);
    double a1, a0;
    a[i] = draw_treatment(g, pi, 1.0 - pi, z[i], true, i, tr, a1, a0);
    m[i] = g.bernoulli(expit(5.0 * a[i] - 1.0 + c(i, 1)));
    y[i] = g.normal(cfg.beta * m[i] + 3.0 * u + sq2(c(i, 0)) +
                        std::sin(c(i, 3)) + 2.0 * z[i],
                    1.0);
  }
  return make_table(y, a, z, m, c, kC4);
}

// Monotonicity broken; mediator law differs between compliers and the rest:
//   pi as FI-a (with U);  A(1) ~ Bern(pi), A(0) ~ Bern(1 - pi), no conversion
//   M ~ 1{A(0) < A(1)} Bern(expit{m1*A - 1 + C2})
//     + 1{A(0) >= A(1)} Bern(expit{5A - 1 + C2})
//   Y ~ N(beta*M + yu*U + 2*sqrt|C1| + sin C4, 1)
ObservationTable gen_fi_mono(const ScenarioConfig& cfg, ScenarioTrace* tr,
                             double m1, double yu) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, true, false);
  VectorXd y(n), a(n), z(n), m(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    z[i] = g.bernoulli(0.5);
    const double pi = expit(c(i, 0) + expit(c(i, 1)) + std::sin(c(i, 2)) + u);
    double a1, a0;
    a[i] = draw_treatment(g, pi, 1.0 - pi, z[i], false, i, tr, a1, a0);
    const double logit = a0 < a1 ? m1 * a[i] - 1.0 + c(i, 1)
                                 : 5.0 * a[i] - 1.0 + c(i, 1);
    m[i] = g.bernoulli(expit(logit));
    y[i] = g.normal(cfg.beta * m[i] + yu * u + sq2(c(i, 0)) +
                        std::sin(c(i, 3)),
                    1.0);
  }
  return make_table(y, a, z, m, c, kC4);
}

ObservationTable gen_fi_mono_null(const ScenarioConfig& cfg,
                                  ScenarioTrace* tr) {
  return gen_fi_mono(cfg, tr, 2.0, 2.0);
}
ObservationTable gen_fi_mono_alt(const ScenarioConfig& cfg,
                                 ScenarioTrace* tr) {
  return gen_fi_mono(cfg, tr, 2.38, 1.0);
}

// =====================================================================
// Three adjustment sets for the same treatment-outcome pair.
//   U ~ Unif(-2,2); C1..C4 ~ Unif(-2,2)
//   A ~ Bern(expit{C1 + C2});  Y ~ N(beta*A + 4*C2 + C3 + U, 1)
// Fitted with adjustment sets {c1,c2,c3,c4}, {c1,c3}, {c1,c4}; the last
// two omit the confounder C2.
// =====================================================================

ObservationTable gen_mbd(const ScenarioConfig& cfg, ScenarioTrace* tr) {
  SplitMix64 g(cfg.seed);
  const Index n = cfg.n;
  trace_reserve(tr, n, false, false);
  VectorXd y(n), a(n);
  MatrixXd c(n, 4);
  for (Index i = 0; i < n; ++i) {
    const double u = g.uniform(-2, 2);
    if (tr) tr->u[i] = u;
    for (int j = 0; j < 4; ++j) c(i, j) = g.uniform(-2, 2);
    a[i] = g.bernoulli(expit(c(i, 0) + c(i, 1)));
    y[i] = g.normal(cfg.beta * a[i] + 4.0 * c(i, 1) + c(i, 2) + u, 1.0);
  }
  return make_table(y, a, std::nullopt, std::nullopt, c, kC4);
}

// =====================================================================
// Registry
// =====================================================================

using GenFn = ObservationTable (*)(const ScenarioConfig&, ScenarioTrace*);

struct Entry {
  ScenarioInfo info;
  GenFn fn = nullptr;
};

std::vector<Entry> build_registry() {
  const std::vector<std::pair<ModelKind, std::vector<std::string>>> bfi3 = {
      {ModelKind::kBackdoor, kC4},
      {ModelKind::kFrontDoor, kC4},
      {ModelKind::kInstrumental, {}}};
  const std::vector<std::pair<ModelKind, std::vector<std::string>>> bfi3_c5 = {
      {ModelKind::kBackdoor, kC5},
      {ModelKind::kFrontDoor, kC4},
      {ModelKind::kInstrumental, {}}};
  const std::vector<std::pair<ModelKind, std::vector<std::string>>> bfi3_z = {
      {ModelKind::kBackdoor, kC4Z},
      {ModelKind::kFrontDoor, kC4},
      {ModelKind::kInstrumental, {}}};
  const std::vector<std::pair<ModelKind, std::vector<std::string>>> bf2 = {
      {ModelKind::kBackdoor, kC4}, {ModelKind::kFrontDoor, kC4}};
  const std::vector<std::pair<ModelKind, std::vector<std::string>>> bi2 = {
      {ModelKind::kBackdoor, kC4}, {ModelKind::kInstrumental, {}}};
  const std::vector<std::pair<ModelKind, std::vector<std::string>>> bi2_c5 = {
      {ModelKind::kBackdoor, kC5}, {ModelKind::kInstrumental, {}}};
  const std::vector<std::pair<ModelKind, std::vector<std::string>>> bi2_z = {
      {ModelKind::kBackdoor, kC4Z}, {ModelKind::kInstrumental, {}}};
  const std::vector<std::pair<ModelKind, std::vector<std::string>>> fi2 = {
      {ModelKind::kFrontDoor, kC4}, {ModelKind::kInstrumental, {}}};
  const std::vector<std::pair<ModelKind, std::vector<std::string>>> mbd3 = {
      {ModelKind::kBackdoor, kC4},
      {ModelKind::kBackdoor, {"c1", "c3"}},
      {ModelKind::kBackdoor, {"c1", "c4"}}};

  std::vector<Entry> reg;
  auto add = [&reg](std::string key, std::string family, std::string desc,
                    std::vector<std::pair<ModelKind, std::vector<std::string>>>
                        plan,
                    GenFn fn) {
    Entry e;
    e.info.key = std::move(key);
    e.info.family = std::move(family);
    e.info.description = std::move(desc);
    e.info.model_plan = std::move(plan);
    e.fn = fn;
    reg.push_back(std::move(e));
  };

  // --- adjusted + mediator + instrumented ---
  add("BFI-a", "BFI", "all three models correct", bfi3, gen_bfi_a);
  add("BFI-b-nonzero", "BFI",
      "latent confounder into the treatment; adjusted-model functional "
      "nonzero",
      bfi3, gen_bfi_b_nonzero);
  add("BFI-b-zero-null", "BFI",
      "latent confounder tuned so the adjusted-model functional is zero "
      "under the null",
      bfi3, gen_bfi_b_zero_null);
  add("BFI-b-zero-alt", "BFI",
      "latent confounder tuned so the adjusted-model functional is zero "
      "under the alternative",
      bfi3, gen_bfi_b_zero_alt);
  add("BFI-iv-exclusion", "BFI",
      "instrument leaks into the outcome; instrumented-model functional "
      "nonzero",
      bfi3, gen_bfi_iv_exclusion);
  add("BFI-monotonicity-null", "BFI",
      "defiers present; instrumented model wrong, its functional zero under "
      "the null",
      bfi3, gen_bfi_mono_null);
  add("BFI-monotonicity-zero-alt", "BFI",
      "defiers present; instrumented-model functional tuned to zero under "
      "the alternative",
      bfi3, gen_bfi_mono_zero_alt);
  add("BFI-monotonicity-nonzero-alt", "BFI",
      "defiers present; instrumented-model functional nonzero under the "
      "alternative",
      bfi3, gen_bfi_mono_nonzero_alt);
  add("BFI-fdonly-nonzero", "BFI",
      "only the mediator model correct; both wrong-model functionals "
      "nonzero",
      bfi3, gen_bfi_fdonly_nonzero);
  add("BFI-fdonly-mono-null", "BFI",
      "only the mediator model correct; confounded treatment and defiers, "
      "functionals zero under the null",
      bfi3, gen_bfi_fdonly_mono_null);
  add("BFI-fdonly-mono-zero-alt", "BFI",
      "only the mediator model correct; wrong-model functionals tuned to "
      "zero under the alternative",
      bfi3, gen_bfi_fdonly_mono_zero_alt);
  add("BFI-fdonly-exclusion-alt", "BFI",
      "only the mediator model correct; instrument leaks into the outcome, "
      "wrong-model functionals nonzero",
      bfi3, gen_bfi_fdonly_exclusion_alt);
  add("BFI-ivonly-collider-null", "BFI",
      "only the instrumented model correct; collider adjustment and "
      "confounded mediator, wrong-model functionals nonzero",
      bfi3_c5, gen_bfi_ivonly_collider_null);
  add("BFI-ivonly-confounded", "BFI",
      "only the instrumented model correct; treatment and mediator share "
      "the latent confounder",
      bfi3, gen_bfi_ivonly_confounded);
  add("BFI-ivonly-collider-zero-alt", "BFI",
      "only the instrumented model correct; collider adjustment tuned to "
      "zero wrong-model functionals under the alternative",
      bfi3_c5, gen_bfi_ivonly_collider_zero_alt);
  add("BFI-bdonly-nonzero-null", "BFI",
      "only the adjusted model correct (instrument joins the adjustment "
      "set as zc); wrong-model functionals nonzero",
      bfi3_z, gen_bfi_bdonly_nonzero_null);
  add("BFI-bdonly-mono", "BFI",
      "only the adjusted model correct; confounded mediator and defiers",
      bfi3, gen_bfi_bdonly_mono);
  add("BFI-bdonly-mono-zero-alt", "BFI",
      "only the adjusted model correct; direct treatment effect so the "
      "mediator functional is zero under the alternative",
      bfi3, gen_bfi_bdonly_mono_zero_alt);

  // --- adjusted + mediator ---
  add("BF-a", "BF", "both models correct", bf2, gen_bf_a);
  add("BF-b-nonzero", "BF",
      "latent confounder into the treatment; adjusted-model functional "
      "nonzero",
      bf2, gen_bf_b_nonzero);
  add("BF-b-zero-null", "BF",
      "weak latent confounding; adjusted-model functional near zero under "
      "the null",
      bf2, gen_bf_b_zero_null);
  add("BF-b-zero-alt", "BF",
      "confounding tuned so the adjusted-model functional is zero under "
      "the alternative",
      bf2, gen_bf_b_zero_alt);
  add("BF-fd-direct", "BF",
      "direct treatment effect; mediator-model functional exactly zero",
      bf2, gen_bf_fd_direct);
  add("BF-fd-confounded", "BF",
      "latent confounder reaches the mediator; mediator-model functional "
      "nonzero",
      bf2, gen_bf_fd_confounded);

  // --- adjusted + instrumented ---
  add("BI-a", "BI", "both models correct", bi2, gen_bi_a);
  add("BI-b-confounded-null", "BI",
      "latent confounder into the treatment (source design labels the "
      "wrong-model functional zero)",
      bi2, gen_bi_b_confounded_null);
  add("BI-collider-nonzero-null", "BI",
      "collider in the adjustment set; wrong-model functional nonzero "
      "under the null",
      bi2_c5, gen_bi_collider_nonzero_null);
  add("BI-collider-nonzero-alt", "BI",
      "collider in the adjustment set; wrong-model functional nonzero "
      "under the alternative",
      bi2_c5, gen_bi_collider_nonzero_alt);
  add("BI-collider-zero-alt", "BI",
      "collider tuned so the wrong-model functional is zero under the "
      "alternative",
      bi2_c5, gen_bi_collider_zero_alt);
  add("BI-iv-exclusion-null", "BI",
      "instrument leaks into the outcome (and joins the adjustment set); "
      "wrong-model functional nonzero",
      bi2_z, gen_bi_iv_exclusion_null);
  add("BI-monotonicity-null", "BI",
      "defiers present; outcome coefficients fixed at (0, 0), configured "
      "beta unused",
      bi2, gen_bi_mono_null);
  add("BI-monotonicity-zero-alt", "BI",
      "defiers present; outcome coefficients fixed at (5.75, 4.25), "
      "configured beta unused",
      bi2, gen_bi_mono_zero_alt);
  add("BI-monotonicity-nonzero-alt", "BI",
      "defiers present; outcome coefficients fixed at (10, -8), configured "
      "beta unused",
      bi2, gen_bi_mono_nonzero_alt);

  // --- mediator + instrumented ---
  add("FI-a", "FI", "both models correct", fi2, gen_fi_a);
  add("FI-fd-direct", "FI",
      "direct treatment effect; mediator-model functional exactly zero",
      fi2, gen_fi_fd_direct);
  add("FI-fd-confounded", "FI",
      "latent confounder reaches the mediator; mediator-model functional "
      "nonzero",
      fi2, gen_fi_fd_confounded);
  add("FI-iv-exclusion", "FI",
      "instrument leaks into the outcome; instrumented-model functional "
      "nonzero",
      fi2, gen_fi_iv_exclusion);
  add("FI-monotonicity-null", "FI",
      "defiers present; instrumented-model functional zero under the null",
      fi2, gen_fi_mono_null);
  add("FI-monotonicity-alt", "FI",
      "defiers present; instrumented-model functional tuned to zero under "
      "the alternative",
      fi2, gen_fi_mono_alt);

  // --- multiple adjustment sets ---
  add("MBD", "MBD",
      "three adjustment sets for one treatment-outcome pair; only the "
      "first blocks the confounder",
      mbd3, gen_mbd);

  // --- demo ---
  {
    Entry e;
    e.info.key = "FAITH";
    e.info.family = "FAITH";
    e.info.description =
        "exact-cancellation linear system with a continuous treatment; "
        "demo only (see faith_demo)";
    e.info.demo_only = true;
    reg.push_back(std::move(e));
  }
  return reg;
}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> reg = build_registry();
  return reg;
}

const Entry& find_entry(const std::string& key) {
  for (const auto& e : registry())
    if (e.info.key == key) return e;
  throw UnknownScenarioError("unknown scenario '" + key +
                             "'; run the listing command for options");
}

}  // namespace

std::vector<ModelSpec> ScenarioInfo::default_models(
    const BasisSpec& basis) const {
  std::vector<ModelSpec> specs;
  for (const auto& [kind, adj] : model_plan) {
    ModelSpec spec;
    spec.kind = kind;
    spec.adjustment = adj;
    spec.basis = basis;
    specs.push_back(std::move(spec));
  }
  return specs;
}

const std::vector<ScenarioInfo>& scenarios() {
  static const std::vector<ScenarioInfo> infos = [] {
    std::vector<ScenarioInfo> out;
    for (const auto& e : registry()) out.push_back(e.info);
    return out;
  }();
  return infos;
}

const ScenarioInfo& find_scenario(const std::string& key) {
  return find_entry(key).info;
}

namespace {
ObservationTable dispatch(const ScenarioConfig& cfg, ScenarioTrace* tr) {
  const Entry& e = find_entry(cfg.scenario);
  if (e.info.demo_only)
    throw UnknownScenarioError("scenario '" + cfg.scenario +
                               "' is demo-only; use faith_demo");
  if (cfg.n < 2)
    throw DimensionMismatchError("scenario n must be at least 2");
  return e.fn(cfg, tr);
}
}  // namespace

ObservationTable generate(const ScenarioConfig& cfg) {
  return dispatch(cfg, nullptr);
}

ObservationTable generate_traced(const ScenarioConfig& cfg,
                                 ScenarioTrace& tr) {
  return dispatch(cfg, &tr);
}

FaithDemoResult faith_demo(Eigen::Index n, std::uint64_t seed) {
  if (n < 3) throw DimensionMismatchError("faith demo needs n >= 3");
  SplitMix64 g(seed);
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = g.normal();
    const double c = g.normal();
    const double a = 3.0 * c + u;  // treatment noise carried by U alone
    y[i] = 2.0 * a - 2.0 * u + 4.0 * c + g.normal();
    design(i, 0) = 1.0;
    design(i, 1) = a;
    design(i, 2) = c;
  }
  const auto fit = fit_regression(Family::kGaussian, design, y, 0.0,
                                  {"const", "a", "c"});
  FaithDemoResult res;
  res.n = n;
  res.psi1_hat = fit.coef[1];
  return res;
}

}  // namespace evfact
