#ifndef EVFACT_SCENARIOS_HPP
#define EVFACT_SCENARIOS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "evfact/table.hpp"

namespace evfact {

// One draw request: which registered design, how many rows, the outcome
// coefficient beta, and the stream seed.
struct ScenarioConfig {
  std::string scenario;
  Eigen::Index n = 0;
  double beta = 0.0;
  std::uint64_t seed = 0;
};

// Latent bookkeeping exposed for tests: confounder draws, potential
// treatments where the design has them, and defier counts.
struct ScenarioTrace {
  Eigen::VectorXd u;
  Eigen::VectorXd v;                // second latent; empty unless used
  Eigen::VectorXd a1, a0;           // potential treatments (post conversion)
  bool has_potentials = false;
  long defiers_converted = 0;       // pairs flipped to compliers
  long defiers_present = 0;         // pairs left with a0 > a1
};

struct ScenarioInfo {
  std::string key;          // e.g. "BFI-a"
  std::string family;       // "BFI", "BF", "BI", "FI", "MBD", "FAITH"
  std::string description;  // which models are right and what the twist is
  bool demo_only = false;

  // Models a sweep fits by default: estimator kind plus adjustment names.
  std::vector<std::pair<ModelKind, std::vector<std::string>>> model_plan;

  std::vector<ModelSpec> default_models(const BasisSpec& basis) const;
};

// All registered designs, in listing order.
const std::vector<ScenarioInfo>& scenarios();

// Lookup by key; throws UnknownScenarioError.
const ScenarioInfo& find_scenario(const std::string& key);

// Draws a dataset. Deterministic in (scenario, n, beta, seed); the same
// config always yields the same table. Demo-only designs are rejected.
ObservationTable generate(const ScenarioConfig& cfg);

// Same draw, but also fills the latent trace.
ObservationTable generate_traced(const ScenarioConfig& cfg, ScenarioTrace& tr);

// Exact-cancellation demonstration on a linear system with a continuous
// treatment (so it cannot flow through ObservationTable):
//   U, C ~ N(0,1);  A = 3C + U;  Y = 2A - 2U + 4C + N(0,1).
// The covariate-adjusted coefficient of A converges to 0 although the
// true effect of A on Y is 2.
struct FaithDemoResult {
  Eigen::Index n = 0;
  double psi1_hat = 0.0;   // fitted coefficient of A in Y ~ 1 + A + C
  double true_effect = 2.0;
};

FaithDemoResult faith_demo(Eigen::Index n, std::uint64_t seed);

}  // namespace evfact

#endif
