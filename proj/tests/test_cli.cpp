#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "evfact/scenarios.hpp"
#include "evfact/sweep.hpp"
#include "evfact/table.hpp"

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunResult run_cli(const std::string& args) {
  const std::string out_path = "cli_run_stdout.txt";
  const std::string err_path = "cli_run_stderr.txt";
  const std::string cmd = std::string(EVFACT_CLI_PATH) + " " + args + " > " +
                          out_path + " 2> " + err_path;
  const int raw = std::system(cmd.c_str());
  RunResult res;
  res.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  res.out = slurp(out_path);
  res.err = slurp(err_path);
  return res;
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text) {
    if (c == '\n') ++n;
  }
  return n;
}

// The CSV the analyze tests read from; built once from a registered design.
const std::string kDataPath = "cli_test_data.csv";

void write_dataset() {
  evfact::ScenarioConfig cfg;
  cfg.scenario = "BFI-a";
  cfg.n = 2000;
  cfg.beta = 10.0;
  cfg.seed = 31337;
  evfact::write_csv(evfact::generate(cfg), kDataPath);
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("simulate --scenario BFI-a").exit_code == 2);  // no --seed
  CHECK(run_cli("simulate --scenario BFI-a --seed 1 --reps 0").exit_code == 2);
  CHECK(run_cli("simulate --scenario BFI-a --seed 1 --n-grid 1").exit_code ==
        2);
  CHECK(run_cli("simulate --scenario BFI-a --seed 1 --alpha 2").exit_code ==
        2);
  CHECK(run_cli("analyze missing.csv --model iv").exit_code == 2);  // 1 model
  CHECK(run_cli("scenarios --bogus-flag").exit_code == 2);

  const RunResult bad = run_cli("simulate --scenario BFI-a --seed 1 --reps 0");
  CHECK(bad.err.find("usage error") != std::string::npos);
}

TEST_CASE("runtime and data errors exit with code 1") {
  CHECK(run_cli("simulate --scenario no-such-design --seed 1").exit_code == 1);
  CHECK(run_cli("analyze no_such_file.csv --model iv --model "
                "backdoor:adj=c1")
            .exit_code == 1);

  // Valid syntax, but the column does not exist in the file.
  write_dataset();
  const RunResult res = run_cli(
      "analyze " + kDataPath +
      " --instrument z --model iv --model backdoor:adj=zzz");
  CHECK(res.exit_code == 1);
  CHECK(res.err.find("error") != std::string::npos);
}

TEST_CASE("help exits cleanly") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("analyze --help").exit_code == 0);
  CHECK(run_cli("simulate --help").exit_code == 0);
}

TEST_CASE("scenario listing covers the registry") {
  const RunResult res = run_cli("scenarios");
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("BFI-a") != std::string::npos);
  CHECK(res.out.find("MBD") != std::string::npos);
  CHECK(res.out.find("demo only") != std::string::npos);
  CHECK(count_lines(res.out) ==
        static_cast<int>(evfact::scenarios().size()));

  // Listing twice gives identical bytes.
  CHECK(run_cli("scenarios").out == res.out);
}

TEST_CASE("analysis end to end: rejects a strong shared effect") {
  write_dataset();
  const std::string cmd =
      "analyze " + kDataPath +
      " --instrument z --mediator m"
      " --model backdoor:adj=c1,c2,c3,c4 --model frontdoor:adj=c1,c2,c3,c4"
      " --model iv --out cli_analysis.csv";
  const RunResult res = run_cli(cmd);
  REQUIRE(res.exit_code == 0);
  CHECK(res.out.find("backdoor[c1,c2,c3,c4]") != std::string::npos);
  CHECK(res.out.find("iv") != std::string::npos);

  // The written file has a per-model block, a blank line, and the combined
  // block (t_stat first column, then p, product, variance, degeneracy).
  const std::string body = slurp("cli_analysis.csv");
  const auto gap = body.find("\n\n");
  REQUIRE(gap != std::string::npos);
  CHECK(body.find("label,estimate,std_error,ci_lower,ci_upper,p_value") == 0);
  const std::string tail = body.substr(gap + 2);
  CHECK(tail.find("t_stat,p_value,") == 0);
  std::istringstream tail_in(tail);
  std::string header, values;
  std::getline(tail_in, header);
  std::getline(tail_in, values);
  const auto first_comma = values.find(',');
  const auto second_comma = values.find(',', first_comma + 1);
  const double p = std::stod(
      values.substr(first_comma + 1, second_comma - first_comma - 1));
  CHECK(p < 0.05);  // beta = 10 with every model valid

  // Byte-identical on a rerun: stdout and the output file.
  const RunResult again = run_cli(cmd);
  CHECK(again.exit_code == 0);
  CHECK(again.out == res.out);
  CHECK(slurp("cli_analysis.csv") == body);
  std::remove("cli_analysis.csv");
}

TEST_CASE("model syntax is validated before any data is read") {
  CHECK(run_cli("analyze x.csv --model iv --model sideways").exit_code == 2);
  CHECK(run_cli("analyze x.csv --model iv --model backdoor:bogus=1")
            .exit_code == 2);
  CHECK(run_cli("analyze x.csv --model iv --model backdoor:basis=nope")
            .exit_code == 2);
  CHECK(run_cli("analyze x.csv --model iv --model backdoor --alpha 0")
            .exit_code == 2);
}

TEST_CASE("simulation matches the library and reproduces byte for byte") {
  const std::string flags =
      "simulate --scenario BFI-a --n-grid 120 --beta 0 --reps 3 --seed 7 "
      "--basis linear";
  const RunResult to_file = run_cli(flags + " --out cli_sweep.csv");
  REQUIRE(to_file.exit_code == 0);
  const std::string file_body = slurp("cli_sweep.csv");

  evfact::SweepConfig cfg;
  cfg.scenario = "BFI-a";
  cfg.n_grid = {120};
  cfg.beta_values = {0.0};
  cfg.reps = 3;
  cfg.master_seed = 7;
  cfg.basis = evfact::BasisSpec::linear();
  CHECK(file_body == evfact::summary_csv(evfact::run_sweep(cfg)));

  // Without --out the summary lands on stdout after the progress lines.
  const RunResult to_stdout = run_cli(flags);
  CHECK(to_stdout.exit_code == 0);
  CHECK(to_stdout.out.find(file_body.substr(0, file_body.find('\n'))) !=
        std::string::npos);

  CHECK(run_cli(flags + " --out cli_sweep.csv").exit_code == 0);
  CHECK(slurp("cli_sweep.csv") == file_body);
  std::remove("cli_sweep.csv");
}

TEST_CASE("options can come from a flat config file") {
  std::ofstream conf("cli_sim.conf", std::ios::binary);
  conf << "# sweep settings\n"
          "scenario=BFI-a\n"
          "n_grid=130\n"  // underscore form of --n-grid
          "beta=0\n"
          "reps=2\n"
          "seed=11\n"
          "basis=linear\n";
  conf.close();
  const RunResult from_conf = run_cli("simulate --config cli_sim.conf");
  REQUIRE(from_conf.exit_code == 0);
  const RunResult from_flags = run_cli(
      "simulate --scenario BFI-a --n-grid 130 --beta 0 --reps 2 --seed 11 "
      "--basis linear");
  CHECK(from_conf.out == from_flags.out);

  // A flag given alongside --config beats the file's value for that key.
  const RunResult overridden =
      run_cli("simulate --config cli_sim.conf --seed 12");
  REQUIRE(overridden.exit_code == 0);
  const RunResult direct = run_cli(
      "simulate --scenario BFI-a --n-grid 130 --beta 0 --reps 2 --seed 12 "
      "--basis linear");
  CHECK(overridden.out == direct.out);
  CHECK(overridden.out != from_conf.out);

  // Unknown keys are usage errors; an unreadable file is a runtime error.
  std::ofstream bad("cli_bad.conf", std::ios::binary);
  bad << "scenario=BFI-a\nwibble=3\n";
  bad.close();
  CHECK(run_cli("simulate --config cli_bad.conf --seed 1").exit_code == 2);
  CHECK(run_cli("simulate --config cli_gone.conf --seed 1").exit_code == 1);
  std::remove("cli_sim.conf");
  std::remove("cli_bad.conf");
}

TEST_CASE("analyze column mapping can come from a config file") {
  write_dataset();
  // Rename every column so the default mapping cannot accidentally work.
  std::string csv = slurp(kDataPath);
  const std::size_t nl = csv.find('\n');
  REQUIRE(nl != std::string::npos);
  std::string header;
  {
    const std::vector<std::pair<std::string, std::string>> names = {
        {"y", "resp"}, {"a", "treat"}, {"z", "inst"}, {"m", "med"},
        {"c1", "x1"},  {"c2", "x2"},   {"c3", "x3"},  {"c4", "x4"}};
    std::string cell;
    auto flush = [&] {
      std::string mapped = cell;
      for (const auto& [from, to] : names)
        if (cell == from) mapped = to;
      if (!header.empty()) header += ',';
      header += mapped;
      cell.clear();
    };
    for (char ch : csv.substr(0, nl)) {
      if (ch == ',')
        flush();
      else
        cell += ch;
    }
    flush();
  }
  const std::string renamed_path = "cli_test_renamed.csv";
  {
    std::ofstream out(renamed_path, std::ios::binary);
    out << header << csv.substr(nl);
  }

  std::ofstream conf("cli_map.conf", std::ios::binary);
  conf << "outcome=resp\n"
          "treatment=treat\n"
          "instrument=inst\n"
          "mediator=med\n"
          "covariates=x1,x2,x3,x4\n"
          "model=backdoor:adj=x1,x2,x3,x4\n"
          "model=iv\n";
  conf.close();
  const RunResult via_conf =
      run_cli("analyze " + renamed_path + " --config cli_map.conf");
  REQUIRE(via_conf.exit_code == 0);

  // Same rows under the original names: the combined block must agree.
  const RunResult via_flags =
      run_cli("analyze " + kDataPath +
              " --instrument z --model backdoor:adj=c1,c2,c3,c4 --model iv");
  REQUIRE(via_flags.exit_code == 0);
  const std::size_t a = via_conf.out.find("combined");
  const std::size_t b = via_flags.out.find("combined");
  REQUIRE(a != std::string::npos);
  REQUIRE(b != std::string::npos);
  CHECK(via_conf.out.substr(a) == via_flags.out.substr(b));

  // A wrong value in the file is harmless when the flag overrides it.
  std::ofstream conf2("cli_map2.conf", std::ios::binary);
  conf2 << "outcome=WRONG\n"
           "treatment=treat\n"
           "instrument=inst\n"
           "mediator=med\n"
           "covariates=x1,x2,x3,x4\n"
           "model=backdoor:adj=x1,x2,x3,x4\n"
           "model=iv\n";
  conf2.close();
  const RunResult fixed = run_cli("analyze " + renamed_path +
                                  " --config cli_map2.conf --outcome resp");
  CHECK(fixed.exit_code == 0);
  CHECK(run_cli("analyze " + renamed_path + " --config cli_map2.conf")
            .exit_code == 1);  // unmapped outcome column

  std::remove("cli_map.conf");
  std::remove("cli_map2.conf");
  std::remove(renamed_path.c_str());
}
