#include "evfact/sweep.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <thread>

#include "evfact/errors.hpp"
#include "evfact/rng.hpp"

namespace evfact {
namespace {

// Shortest decimal form that parses back to the same double, so summary
// files are byte-stable across runs and platforms.
std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fmt(Eigen::Index v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }

struct RepOutcome {
  enum class Status { kFailed, kClean } status = Status::kFailed;
  bool rejected = false;
  bool degenerate = false;
  double t_stat = 0.0;
};

}  // namespace

std::uint64_t rep_seed(std::uint64_t master, const std::string& scenario,
                       Eigen::Index n, double beta, int rep) {
  std::uint64_t h = master;
  h = hash_combine(h, fnv1a64(scenario));
  h = hash_combine(h, static_cast<std::uint64_t>(n));
  h = hash_combine(h, std::bit_cast<std::uint64_t>(beta));
  h = hash_combine(h, static_cast<std::uint64_t>(rep));
  return h;
}

std::vector<ModelSpec> sweep_models(const SweepConfig& cfg) {
  const ScenarioInfo& info = find_scenario(cfg.scenario);
  std::vector<ModelSpec> all = info.default_models(cfg.basis);
  if (cfg.model_set.empty()) {
    if (all.size() < 2) throw TooFewModelsError();
    return all;
  }
  for (ModelKind kind : cfg.model_set) {
    const bool known = std::any_of(
        all.begin(), all.end(),
        [kind](const ModelSpec& s) { return s.kind == kind; });
    if (!known)
      throw Error("scenario '" + cfg.scenario + "' has no " +
                  to_string(kind) + " model in its plan");
  }
  std::vector<ModelSpec> kept;
  for (const ModelSpec& s : all)
    if (std::find(cfg.model_set.begin(), cfg.model_set.end(), s.kind) !=
        cfg.model_set.end())
      kept.push_back(s);
  if (kept.size() < 2) throw TooFewModelsError();
  return kept;
}

RejectionRow run_cell(const SweepConfig& cfg, Eigen::Index n, double beta) {
  if (cfg.reps < 1) throw DimensionMismatchError("sweep needs reps >= 1");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    throw DimensionMismatchError("sweep alpha must lie in (0, 1)");
  const std::vector<ModelSpec> specs = sweep_models(cfg);

  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(cfg.reps));
  auto work = [&](int lo, int hi) {
    for (int r = lo; r < hi; ++r) {
      ScenarioConfig sc;
      sc.scenario = cfg.scenario;
      sc.n = n;
      sc.beta = beta;
      sc.seed = rep_seed(cfg.master_seed, cfg.scenario, n, beta,
                         cfg.rep_offset + r);
      RepOutcome& out = outcomes[static_cast<std::size_t>(r)];
      try {
        const AnalysisResult res =
            analyze_all(generate(sc), specs, {cfg.alpha});
        out.status = RepOutcome::Status::kClean;
        out.rejected = res.combined.reject_at.at(cfg.alpha);
        out.degenerate = res.combined.degenerate;
        out.t_stat = res.combined.t_stat;
      } catch (const Error&) {
        out.status = RepOutcome::Status::kFailed;
      }
    }
  };

  int threads = cfg.threads;
  if (threads <= 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, cfg.reps);
  if (threads <= 1) {
    work(0, cfg.reps);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (cfg.reps + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int lo = t * chunk;
      const int hi = std::min(cfg.reps, lo + chunk);
      if (lo < hi) pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  // Sequential reduction in replicate order: tallies and the t average do
  // not depend on how the loop above was partitioned.
  RejectionRow row;
  row.scenario = cfg.scenario;
  row.n = n;
  row.beta = beta;
  row.reps = cfg.reps;
  int rejected = 0, degenerate = 0, clean = 0;
  double t_sum = 0.0;
  for (const RepOutcome& out : outcomes) {
    if (out.status == RepOutcome::Status::kFailed) {
      ++row.failures;
      continue;
    }
    ++clean;
    t_sum += out.t_stat;
    if (out.rejected) ++rejected;
    if (out.degenerate) ++degenerate;
  }
  row.rejection_rate = static_cast<double>(rejected) / cfg.reps;
  row.degenerate_fraction = static_cast<double>(degenerate) / cfg.reps;
  row.mean_t_stat = clean > 0 ? t_sum / clean : 0.0;
  return row;
}

std::vector<RejectionRow> run_sweep(const SweepConfig& cfg) {
  if (cfg.n_grid.empty())
    throw DimensionMismatchError("sweep needs a non-empty n grid");
  if (cfg.beta_values.empty())
    throw DimensionMismatchError("sweep needs at least one beta");
  sweep_models(cfg);  // validate the model set before the long loop
  std::vector<RejectionRow> rows;
  rows.reserve(cfg.n_grid.size() * cfg.beta_values.size());
  for (Eigen::Index n : cfg.n_grid)
    for (double beta : cfg.beta_values) rows.push_back(run_cell(cfg, n, beta));
  return rows;
}

std::string summary_csv(std::vector<RejectionRow> rows) {
  if (rows.empty())
    throw DimensionMismatchError("summary needs at least one row");
  std::stable_sort(rows.begin(), rows.end(),
                   [](const RejectionRow& a, const RejectionRow& b) {
                     if (a.n != b.n) return a.n < b.n;
                     return a.beta < b.beta;
                   });
  std::string out =
      "scenario,n,beta,reps,rejection_rate,mean_t_stat,"
      "degenerate_fraction,failures\n";
  for (const RejectionRow& r : rows) {
    out += r.scenario;
    out += ',';
    out += fmt(r.n);
    out += ',';
    out += fmt(r.beta);
    out += ',';
    out += fmt(r.reps);
    out += ',';
    out += fmt(r.rejection_rate);
    out += ',';
    out += fmt(r.mean_t_stat);
    out += ',';
    out += fmt(r.degenerate_fraction);
    out += ',';
    out += fmt(r.failures);
    out += '\n';
  }
  return out;
}

void summarize(const std::vector<RejectionRow>& rows,
               const std::string& path) {
  const std::string text = summary_csv(rows);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed while writing '" + path + "'");
}

}  // namespace evfact
