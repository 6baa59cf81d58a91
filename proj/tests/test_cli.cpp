#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "archsearch/cli.hpp"
#include "archsearch/report.hpp"
#include "test_support.hpp"

using namespace archsearch;

namespace {

cli::ParseResult parse(std::vector<std::string> args) {
  args.insert(args.begin(), "archsearch");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::parse_args(static_cast<int>(argv.size()), argv.data());
}

int run(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "archsearch");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

std::filesystem::path toy_csv(const std::string& name) {
  const auto dir = archsearch::test::scratch_dir("cli_" + name);
  const auto path = dir / "toy.csv";
  archsearch::test::write_csv(path, archsearch::test::gaussian_blobs(120, 4, 2, 5, 0.1));
  return path;
}

}  // namespace

TEST_CASE("parse_args defaults") {
  const auto r = parse({"run", "data.csv", "--seed", "42"});
  REQUIRE(r.config);
  const SearchConfig& s = r.config->search;
  CHECK(s.max_depth == 5);
  CHECK(s.iterations == 10);
  CHECK(s.population == 20);
  CHECK(s.change_probability == 0.5);
  CHECK(s.k_percent == 3.0);
  CHECK(s.master_seed == 42);
  CHECK(s.train.input_dropout == 0.2);
  CHECK(r.config->fractions.validation == 0.2);
  CHECK(r.config->out_dir == "archsearch_out");
  CHECK(r.config->dataset == "data.csv");
  CHECK_FALSE(r.config->header);
}

TEST_CASE("parse_args overrides and usage errors") {
  const auto r = parse({"run", "d.csv", "--hmax", "2", "--iter", "3", "--pmax", "6", "--prob", "0.3", "--k-percent",
                        "5", "--epochs", "7", "--lr", "0.05", "--momentum", "0.5", "--split", "0.5,0.25,0.25",
                        "--header", "--threads", "3", "--out", "x", "--init", "scaled"});
  REQUIRE(r.config);
  CHECK(r.config->search.max_depth == 2);
  CHECK(r.config->search.population == 6);
  CHECK(r.config->search.train.epochs == 7);
  CHECK(r.config->search.train.init == InitScheme::ScaledUniform);
  CHECK(r.config->fractions.train == 0.5);
  CHECK(r.config->header);
  CHECK(r.config->search.threads == 3);

  CHECK(parse({"run", "d.csv", "--pmax", "7"}).exit_code == cli::kUsage);
  CHECK_FALSE(parse({"run", "d.csv", "--pmax", "7"}).config);
  CHECK(parse({"run", "d.csv", "--bogus"}).exit_code == cli::kUsage);
  CHECK(parse({"run"}).exit_code == cli::kUsage);
  CHECK(parse({}).exit_code == cli::kUsage);
  CHECK(parse({"run", "d.csv", "--split", "0.5,0.5"}).exit_code == cli::kUsage);
  CHECK(parse({"run", "d.csv", "--prob", "2"}).exit_code == cli::kUsage);
  CHECK(parse({"run", "d.csv", "--threads", "0"}).exit_code == cli::kUsage);

  const auto help = parse({"--help"});
  CHECK(help.exit_code == cli::kSuccess);
  CHECK(help.message.find("run") != std::string::npos);
}

TEST_CASE("config file values sit between defaults and flags") {
  const auto dir = archsearch::test::scratch_dir("cli_config");
  const auto ini = dir / "search.ini";
  std::ofstream(ini) << "[run]\niter=4\npmax=8\n";
  const auto r = parse({"--config", ini.string(), "run", "d.csv", "--pmax", "12"});
  REQUIRE(r.config);
  CHECK(r.config->search.iterations == 4);
  CHECK(r.config->search.population == 12);
}

TEST_CASE("execute exit codes") {
  std::string out, err;
  CHECK(run({"run", "/nonexistent/missing.csv", "--seed", "1"}, &out, &err) == cli::kIo);
  CHECK(err.find("I/O") != std::string::npos);

  const auto dir = archsearch::test::scratch_dir("cli_bad");
  std::ofstream(dir / "bad.csv") << "1,2,0\n1,0\n";
  CHECK(run({"run", (dir / "bad.csv").string()}, &out, &err) == cli::kData);

  std::ofstream(dir / "one.csv") << "1,2,0\n3,4,0\n";
  CHECK(run({"run", (dir / "one.csv").string()}, &out, &err) == cli::kData);
}

TEST_CASE("end-to-end run writes report and depth table") {
  const auto csv = toy_csv("e2e");
  const auto out_dir = csv.parent_path() / "out";
  std::string out, err;
  const int code = run({"run", csv.string(), "--seed", "3", "--hmax", "2", "--iter", "2", "--pmax", "4", "--epochs",
                        "100", "--out", out_dir.string()},
                       &out, &err);
  INFO(err);
  REQUIRE(code == cli::kSuccess);
  CHECK(out.find("seed: 3") != std::string::npos);

  const std::string table = archsearch::test::read_file(out_dir / "depth_errors.csv");
  std::istringstream lines(table);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "depth,best_hidden_neurons,training_error,testing_error");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 2);

  const auto report = nlohmann::json::parse(archsearch::test::read_file(out_dir / "report.json"));
  CHECK(report["evaluations"] == 2 * (1 + 2 * 4));
  CHECK(report["master_seed"] == 3);
  CHECK(report.contains("timing"));
  const auto widths = report["global_best"]["widths"].get<ArchKey>();
  CHECK(out.find("hidden neurons [" + format_widths(widths) + "]") != std::string::npos);
  CHECK(out.find("test error 0.0000%") != std::string::npos);
}

TEST_CASE("the installed binary reports usage errors by exit status") {
  const std::string cmd = std::string(ARCHSEARCH_CLI) + " run data.csv --pmax 7 >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == cli::kUsage);
}
