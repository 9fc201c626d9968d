// Command-line front end: analyze a CSV with several candidate causal
// models, run Monte Carlo sweeps over the registered scenario designs, or
// list those designs. All randomness is seeded explicitly, so identical
// invocations produce identical bytes.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evfact/combine.hpp"
#include "evfact/errors.hpp"
#include "evfact/scenarios.hpp"
#include "evfact/sweep.hpp"
#include "evfact/table.hpp"

namespace {

// Thrown for bad flag values discovered after CLI11 parsing; maps to the
// usage exit code (2), unlike runtime failures which map to 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt_full(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

// Model mini-syntax:  kind[:adj=c1,c2][:basis=<basis>]
//   kind  backdoor | frontdoor | iv
//   basis linear | poly:<degree> | spline:<knots>, optional +ix suffix
// A basis value may itself contain ':', so once `basis=` is seen the rest
// of the text is re-joined.
evfact::ModelSpec parse_model(const std::string& text,
                              const evfact::BasisSpec& default_basis) {
  const std::vector<std::string> parts = split(text, ':');
  evfact::ModelSpec spec;
  spec.basis = default_basis;
  const std::string& kind = parts[0];
  if (kind == "backdoor")
    spec.kind = evfact::ModelKind::kBackdoor;
  else if (kind == "frontdoor")
    spec.kind = evfact::ModelKind::kFrontDoor;
  else if (kind == "iv")
    spec.kind = evfact::ModelKind::kInstrumental;
  else
    throw UsageError("unknown model kind '" + kind +
                     "' (expected backdoor, frontdoor, or iv)");
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const std::string& part = parts[i];
    if (part.rfind("adj=", 0) == 0) {
      for (const std::string& name : split(part.substr(4), ','))
        if (!name.empty()) spec.adjustment.push_back(name);
    } else if (part.rfind("basis=", 0) == 0) {
      std::string value = part.substr(6);
      for (std::size_t j = i + 1; j < parts.size(); ++j)
        value += ':' + parts[j];
      try {
        spec.basis = evfact::BasisSpec::parse(value);
      } catch (const std::exception& e) {
        throw UsageError("bad basis in model spec '" + text +
                         "': " + e.what());
      }
      break;
    } else {
      throw UsageError("unrecognized model spec part '" + part + "' in '" +
                       text + "'");
    }
  }
  return spec;
}

evfact::ModelKind parse_kind(const std::string& name) {
  if (name == "backdoor") return evfact::ModelKind::kBackdoor;
  if (name == "frontdoor") return evfact::ModelKind::kFrontDoor;
  if (name == "iv") return evfact::ModelKind::kInstrumental;
  throw UsageError("unknown model kind '" + name +
                   "' (expected backdoor, frontdoor, or iv)");
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw UsageError("alpha must lie strictly between 0 and 1");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw evfact::IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw evfact::IoError("failed while writing '" + path + "'");
}

// ------------------------------------------------------ flat config files
//
// --config names a flat key=value file: one key per line, '#' comments and
// blank lines ignored, underscores in keys equivalent to hyphens. A key
// whose flag was also given on the command line is skipped, so flags win.

std::string trim(const std::string& text) {
  const std::size_t b = text.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const std::size_t e = text.find_last_not_of(" \t\r\n");
  return text.substr(b, e - b + 1);
}

struct ConfigKey {
  std::string name;
  CLI::Option* flag;  // precedence guard
  std::function<void(const std::string&)> set;
};

long long config_int(const std::string& value, const std::string& key) {
  long long out = 0;
  const char* last = value.data() + value.size();
  const auto [end, ec] = std::from_chars(value.data(), last, out);
  if (ec != std::errc{} || end != last)
    throw UsageError("bad integer '" + value + "' for config key '" + key +
                     "'");
  return out;
}

std::uint64_t config_u64(const std::string& value, const std::string& key) {
  std::uint64_t out = 0;
  const char* last = value.data() + value.size();
  const auto [end, ec] = std::from_chars(value.data(), last, out);
  if (ec != std::errc{} || end != last)
    throw UsageError("bad integer '" + value + "' for config key '" + key +
                     "'");
  return out;
}

double config_num(const std::string& value, const std::string& key) {
  double out = 0.0;
  const char* last = value.data() + value.size();
  const auto [end, ec] = std::from_chars(value.data(), last, out);
  if (ec != std::errc{} || end != last)
    throw UsageError("bad number '" + value + "' for config key '" + key +
                     "'");
  return out;
}

void apply_config(const std::string& path,
                  const std::vector<ConfigKey>& keys) {
  std::ifstream in(path);
  if (!in) throw evfact::IoError("cannot read config file '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(line_no) +
                       " is not key=value: '" + text + "'");
    std::string key = trim(text.substr(0, eq));
    for (char& ch : key)
      if (ch == '_') ch = '-';
    const std::string value = trim(text.substr(eq + 1));
    const ConfigKey* found = nullptr;
    for (const ConfigKey& candidate : keys)
      if (candidate.name == key) {
        found = &candidate;
        break;
      }
    if (found == nullptr)
      throw UsageError("unknown config key '" + key + "' (line " +
                       std::to_string(line_no) + ")");
    if (found->flag != nullptr && found->flag->count() > 0) continue;
    found->set(value);
  }
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string data_path;
  std::string outcome = "y";
  std::string treatment = "a";
  std::string instrument;  // empty = no instrument column
  std::string mediator;    // empty = no mediator column
  std::vector<std::string> covariates;
  std::vector<std::string> model_texts;
  std::vector<double> alphas = {0.05};
  std::string basis_text = "spline:3";
  double ridge = evfact::kDefaultRidge;
  std::string out_path;
  std::string config_path;
};

int run_analyze(const AnalyzeArgs& args) {
  if (args.model_texts.size() < 2)
    throw UsageError("need at least two --model specs for a combined test");
  if (args.alphas.empty()) throw UsageError("need at least one alpha");
  for (double a : args.alphas) check_alpha(a);

  evfact::BasisSpec default_basis;
  try {
    default_basis = evfact::BasisSpec::parse(args.basis_text);
  } catch (const std::exception& e) {
    throw UsageError(std::string("bad --basis: ") + e.what());
  }
  std::vector<evfact::ModelSpec> specs;
  for (const std::string& text : args.model_texts)
    specs.push_back(parse_model(text, default_basis));

  evfact::ColumnMapping mapping;
  mapping.outcome = args.outcome;
  mapping.treatment = args.treatment;
  if (!args.instrument.empty()) mapping.instrument = args.instrument;
  if (!args.mediator.empty()) mapping.mediator = args.mediator;
  if (!args.covariates.empty()) {
    mapping.covariates = args.covariates;
  } else {
    // Default: the union of the adjustment sets, first mention first.
    for (const auto& spec : specs)
      for (const auto& name : spec.adjustment) {
        if (std::find(mapping.covariates.begin(), mapping.covariates.end(),
                      name) == mapping.covariates.end())
          mapping.covariates.push_back(name);
      }
  }

  const evfact::ObservationTable table =
      evfact::load_csv(args.data_path, mapping);
  const evfact::AnalysisResult res =
      evfact::analyze_all(table, specs, args.alphas, args.ridge);
  const double level = 1.0 - args.alphas.front();

  // Text summary.
  std::printf("n = %lld rows, %zu models\n",
              static_cast<long long>(table.n_rows()), specs.size());
  for (std::size_t k = 0; k < res.outputs.size(); ++k) {
    const auto& out = res.outputs[k];
    const auto& ci = res.intervals[k];
    std::printf("  %-28s estimate %10s  se %9s  %s%% CI [%s, %s]  p %s\n",
                out.label.c_str(), fmt_short(out.psi_hat).c_str(),
                fmt_short(ci.std_error).c_str(),
                fmt_short(100.0 * level).c_str(), fmt_short(ci.lower).c_str(),
                fmt_short(ci.upper).c_str(), fmt_short(ci.p_value).c_str());
  }
  const auto& c = res.combined;
  std::printf("combined product statistic: t = %s, p = %s%s\n",
              fmt_short(c.t_stat).c_str(), fmt_short(c.p_value).c_str(),
              c.degenerate ? "  (degenerate variance; not a valid test)"
                           : "");
  for (double a : args.alphas)
    std::printf("  reject at alpha %s: %s\n", fmt_short(a).c_str(),
                c.reject_at.at(a) ? "yes" : "no");

  if (!args.out_path.empty()) {
    // Two CSV blocks separated by a blank line: per-model rows, then the
    // combined test.
    std::string text = "label,estimate,std_error,ci_lower,ci_upper,p_value\n";
    for (std::size_t k = 0; k < res.outputs.size(); ++k) {
      const auto& out = res.outputs[k];
      const auto& ci = res.intervals[k];
      text += out.label + ',' + fmt_full(out.psi_hat) + ',' +
              fmt_full(ci.std_error) + ',' + fmt_full(ci.lower) + ',' +
              fmt_full(ci.upper) + ',' + fmt_full(ci.p_value) + '\n';
    }
    text += "\nt_stat,p_value,product,variance,degenerate";
    for (double a : args.alphas) text += ",reject_at_" + fmt_full(a);
    text += '\n';
    text += fmt_full(c.t_stat) + ',' + fmt_full(c.p_value) + ',' +
            fmt_full(c.product) + ',' + fmt_full(c.variance) + ',' +
            (c.degenerate ? "1" : "0");
    for (double a : args.alphas)
      text += c.reject_at.at(a) ? ",1" : ",0";
    text += '\n';
    write_text(args.out_path, text);
  }
  return 0;
}

// --------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string scenario;
  std::vector<long long> n_grid = {100, 250, 500, 750, 1000};
  std::vector<double> betas = {0.0};
  int reps = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::vector<std::string> model_names;
  std::string basis_text = "spline:3";
  int rep_offset = 0;
  int threads = 1;
  std::string out_path;
  std::string config_path;
  bool seed_set = false;  // (flag or config); 0 is a legitimate seed
};

int run_simulate(const SimulateArgs& args) {
  if (args.reps < 1) throw UsageError("--reps must be at least 1");
  check_alpha(args.alpha);
  if (args.rep_offset < 0) throw UsageError("--rep-offset must be >= 0");
  evfact::SweepConfig cfg;
  cfg.scenario = args.scenario;
  cfg.n_grid.clear();
  for (long long n : args.n_grid) {
    if (n < 2) throw UsageError("every --n-grid entry must be at least 2");
    cfg.n_grid.push_back(static_cast<Eigen::Index>(n));
  }
  cfg.beta_values = args.betas;
  if (cfg.beta_values.empty()) throw UsageError("--beta needs a value");
  cfg.reps = args.reps;
  cfg.alpha = args.alpha;
  cfg.master_seed = args.seed;
  for (const std::string& name : args.model_names)
    cfg.model_set.push_back(parse_kind(name));
  try {
    cfg.basis = evfact::BasisSpec::parse(args.basis_text);
  } catch (const std::exception& e) {
    throw UsageError(std::string("bad --basis: ") + e.what());
  }
  cfg.rep_offset = args.rep_offset;
  cfg.threads = args.threads;

  evfact::sweep_models(cfg);  // surface plan problems before the long loop
  std::vector<evfact::RejectionRow> rows;
  for (Eigen::Index n : cfg.n_grid) {
    for (double beta : cfg.beta_values) {
      const evfact::RejectionRow row = evfact::run_cell(cfg, n, beta);
      std::printf(
          "%s n=%lld beta=%s reps=%d: reject %s  (mean t %s, degenerate %s, "
          "failures %d)\n",
          row.scenario.c_str(), static_cast<long long>(row.n),
          fmt_short(row.beta).c_str(), row.reps,
          fmt_short(row.rejection_rate).c_str(),
          fmt_short(row.mean_t_stat).c_str(),
          fmt_short(row.degenerate_fraction).c_str(), row.failures);
      std::fflush(stdout);
      rows.push_back(row);
    }
  }
  if (!args.out_path.empty())
    evfact::summarize(rows, args.out_path);
  else
    std::fputs(evfact::summary_csv(rows).c_str(), stdout);
  return 0;
}

int run_scenarios() {
  for (const auto& info : evfact::scenarios()) {
    std::string plan;
    for (const auto& [kind, adj] : info.model_plan) {
      if (!plan.empty()) plan += " + ";
      plan += evfact::to_string(kind);
      if (!adj.empty()) {
        plan += '[';
        for (std::size_t i = 0; i < adj.size(); ++i)
          plan += (i ? "," : "") + adj[i];
        plan += ']';
      }
    }
    if (info.demo_only) plan = "demo only";
    std::printf("%-28s %-5s %s  {%s}\n", info.key.c_str(),
                info.family.c_str(), info.description.c_str(), plan.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Shared-effect testing across several candidate causal models: "
      "per-model estimates plus a combined product statistic that is valid "
      "when any one model is right."};
  app.require_subcommand(1);

  AnalyzeArgs an;
  CLI::App* analyze =
      app.add_subcommand("analyze", "Fit models to a CSV and combine them");
  analyze->add_option("--config", an.config_path,
                      "flat key=value file for any option below; "
                      "command-line flags take precedence");
  analyze->add_option("data", an.data_path, "CSV file with a header row")
      ->required();
  analyze->add_option("--outcome", an.outcome, "outcome column (default y)");
  analyze->add_option("--treatment", an.treatment,
                      "binary treatment column (default a)");
  analyze->add_option("--instrument", an.instrument,
                      "binary instrument column");
  analyze->add_option("--mediator", an.mediator, "binary mediator column");
  analyze->add_option("--covariates", an.covariates,
                      "covariate columns (default: union of adj= sets)")
      ->delimiter(',');
  analyze->add_option("--model", an.model_texts,
                      "model spec kind[:adj=c1,c2][:basis=<basis>]; kind is "
                      "backdoor, frontdoor, or iv; repeat for each model "
                      "(at least two)");
  analyze->add_option("--alpha", an.alphas, "test levels (default 0.05)")
      ->delimiter(',');
  analyze->add_option("--basis", an.basis_text,
                      "default basis: linear, poly:<degree>, or "
                      "spline:<knots>, with optional +ix interaction suffix");
  analyze->add_option("--ridge", an.ridge, "ridge penalty for all fits");
  analyze->add_option("--out", an.out_path,
                      "write per-model and combined CSV blocks here");

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte Carlo rejection-rate sweep on a registered design");
  simulate->add_option("--config", sim.config_path,
                       "flat key=value file for any option below; "
                       "command-line flags take precedence");
  simulate->add_option("--scenario", sim.scenario,
                       "design key (see the scenarios subcommand); required");
  simulate
      ->add_option("--n-grid", sim.n_grid,
                   "sample sizes (default 100,250,500,750,1000)")
      ->delimiter(',');
  simulate->add_option("--beta", sim.betas, "effect strengths (default 0)")
      ->delimiter(',');
  simulate->add_option("--reps", sim.reps,
                       "replicates per grid point (default 1000)");
  simulate->add_option("--alpha", sim.alpha, "test level (default 0.05)");
  simulate->add_option("--seed", sim.seed,
                       "master seed; required so runs are reproducible");
  simulate
      ->add_option("--models", sim.model_names,
                   "restrict to these kinds (backdoor, frontdoor, iv)")
      ->delimiter(',');
  simulate->add_option("--basis", sim.basis_text,
                       "basis for every nuisance fit (default spline:3)");
  simulate->add_option("--rep-offset", sim.rep_offset,
                       "index of the first replicate (for split runs)");
  simulate->add_option("--threads", sim.threads,
                       "worker threads; results do not depend on this");
  simulate->add_option("--out", sim.out_path,
                       "write the summary CSV here (default: stdout)");

  CLI::App* list =
      app.add_subcommand("scenarios", "List the registered designs");

  auto csv_list = [](const std::string& value) {
    std::vector<std::string> out;
    for (const std::string& piece : split(value, ',')) {
      const std::string item = trim(piece);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  };
  const std::vector<ConfigKey> analyze_keys = {
      {"outcome", analyze->get_option("--outcome"),
       [&](const std::string& v) { an.outcome = v; }},
      {"treatment", analyze->get_option("--treatment"),
       [&](const std::string& v) { an.treatment = v; }},
      {"instrument", analyze->get_option("--instrument"),
       [&](const std::string& v) { an.instrument = v; }},
      {"mediator", analyze->get_option("--mediator"),
       [&](const std::string& v) { an.mediator = v; }},
      {"covariates", analyze->get_option("--covariates"),
       [&](const std::string& v) { an.covariates = csv_list(v); }},
      {"model", analyze->get_option("--model"),
       [&](const std::string& v) { an.model_texts.push_back(v); }},
      {"alpha", analyze->get_option("--alpha"),
       [&](const std::string& v) {
         an.alphas.clear();
         for (const std::string& item : csv_list(v))
           an.alphas.push_back(config_num(item, "alpha"));
       }},
      {"basis", analyze->get_option("--basis"),
       [&](const std::string& v) { an.basis_text = v; }},
      {"ridge", analyze->get_option("--ridge"),
       [&](const std::string& v) { an.ridge = config_num(v, "ridge"); }},
      {"out", analyze->get_option("--out"),
       [&](const std::string& v) { an.out_path = v; }},
  };
  const std::vector<ConfigKey> simulate_keys = {
      {"scenario", simulate->get_option("--scenario"),
       [&](const std::string& v) { sim.scenario = v; }},
      {"n-grid", simulate->get_option("--n-grid"),
       [&](const std::string& v) {
         sim.n_grid.clear();
         for (const std::string& item : csv_list(v))
           sim.n_grid.push_back(config_int(item, "n-grid"));
       }},
      {"beta", simulate->get_option("--beta"),
       [&](const std::string& v) {
         sim.betas.clear();
         for (const std::string& item : csv_list(v))
           sim.betas.push_back(config_num(item, "beta"));
       }},
      {"reps", simulate->get_option("--reps"),
       [&](const std::string& v) {
         sim.reps = static_cast<int>(config_int(v, "reps"));
       }},
      {"alpha", simulate->get_option("--alpha"),
       [&](const std::string& v) { sim.alpha = config_num(v, "alpha"); }},
      {"seed", simulate->get_option("--seed"),
       [&](const std::string& v) {
         sim.seed = config_u64(v, "seed");
         sim.seed_set = true;
       }},
      {"models", simulate->get_option("--models"),
       [&](const std::string& v) { sim.model_names = csv_list(v); }},
      {"basis", simulate->get_option("--basis"),
       [&](const std::string& v) { sim.basis_text = v; }},
      {"rep-offset", simulate->get_option("--rep-offset"),
       [&](const std::string& v) {
         sim.rep_offset = static_cast<int>(config_int(v, "rep-offset"));
       }},
      {"threads", simulate->get_option("--threads"),
       [&](const std::string& v) {
         sim.threads = static_cast<int>(config_int(v, "threads"));
       }},
      {"out", simulate->get_option("--out"),
       [&](const std::string& v) { sim.out_path = v; }},
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (analyze->parsed()) {
      if (!an.config_path.empty()) apply_config(an.config_path, analyze_keys);
      return run_analyze(an);
    }
    if (simulate->parsed()) {
      if (!sim.config_path.empty())
        apply_config(sim.config_path, simulate_keys);
      if (sim.scenario.empty())
        throw UsageError("--scenario is required (flag or config key)");
      if (simulate->get_option("--seed")->count() == 0 && !sim.seed_set)
        throw UsageError("--seed is required (flag or config key)");
      return run_simulate(sim);
    }
    if (list->parsed()) return run_scenarios();
    std::cerr << "usage error: no subcommand given\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const evfact::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
