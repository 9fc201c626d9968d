#ifndef EVFACT_SWEEP_HPP
#define EVFACT_SWEEP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "evfact/combine.hpp"
#include "evfact/scenarios.hpp"

namespace evfact {

// Monte Carlo sweep over a grid of sample sizes and effect strengths for one
// registered scenario. Every replicate owns an independent stream seeded by a
// hash of (master_seed, scenario, n, beta, rep), so cells can be reproduced
// in isolation, reps may run concurrently, and two sweeps over adjacent rep
// ranges tile into one larger sweep without overlap.
struct SweepConfig {
  std::string scenario;
  std::vector<Eigen::Index> n_grid = {100, 250, 500, 750, 1000};
  std::vector<double> beta_values = {0.0};
  int reps = 1000;
  double alpha = 0.05;
  std::uint64_t master_seed = 0;

  // Which estimator kinds to fit; empty keeps the scenario's full plan.
  // Restricting must leave at least two models.
  std::vector<ModelKind> model_set;
  BasisSpec basis = BasisSpec::spline(3);

  int rep_offset = 0;  // index of the first replicate (for split runs)
  int threads = 1;     // worker threads; <= 0 picks the hardware count
};

// One grid point. rejection_rate * reps is an exact integer count; replicates
// whose analysis throws count as non-rejections and land in `failures`;
// mean_t_stat averages over the replicates that produced a statistic
// (degenerate ones contribute their zero).
struct RejectionRow {
  std::string scenario;
  Eigen::Index n = 0;
  double beta = 0.0;
  int reps = 0;
  double rejection_rate = 0.0;
  double mean_t_stat = 0.0;
  double degenerate_fraction = 0.0;
  int failures = 0;
};

// Deterministic replicate seed; the basis of the additivity guarantee.
std::uint64_t rep_seed(std::uint64_t master, const std::string& scenario,
                       Eigen::Index n, double beta, int rep);

// The model specs a sweep fits for this config (scenario plan filtered by
// model_set). Throws if a requested kind is missing from the plan or fewer
// than two models remain.
std::vector<ModelSpec> sweep_models(const SweepConfig& cfg);

// One grid point; bit-identical for a fixed config regardless of threads.
RejectionRow run_cell(const SweepConfig& cfg, Eigen::Index n, double beta);

// Full grid in n-major, beta-minor order.
std::vector<RejectionRow> run_sweep(const SweepConfig& cfg);

// CSV text: header plus one row per grid point, sorted by n then beta.
// Numbers print in shortest round-trip form, so equal sweeps give equal
// bytes.
std::string summary_csv(std::vector<RejectionRow> rows);

// Writes summary_csv to a file. Throws IoError on write failure.
void summarize(const std::vector<RejectionRow>& rows,
               const std::string& path);

}  // namespace evfact

#endif
