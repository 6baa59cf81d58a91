#include "archsearch/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "archsearch/error.hpp"
#include "archsearch/report.hpp"

namespace archsearch::cli {

namespace {

SplitFractions parse_fractions(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--split", "'" + text + "' is not three comma-separated numbers");
    }
  }
  if (parts.size() != 3) throw CLI::ValidationError("--split", "expected three fractions, got '" + text + "'");
  return {parts[0], parts[1], parts[2]};
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return kIo;
    case ErrorKind::Parse:
    case ErrorKind::InvalidDataset:
    case ErrorKind::InvalidSplit:
    case ErrorKind::InvalidLabel:
    case ErrorKind::InvalidInput: return kData;
    case ErrorKind::InvalidConfig: return kUsage;
    default: return kInternal;
  }
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
  f << contents;
  if (!f) fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

ParseResult parse_args(int argc, const char* const* argv) {
  CLI::App app{"Tabu search over feedforward network architectures", "archsearch"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI/TOML file with option defaults");

  RunConfig cfg;
  SearchConfig& s = cfg.search;
  TrainConfig& t = s.train;
  std::string split_text = "0.6,0.2,0.2";
  std::string init_text = "uniform";
  std::uint64_t seed = 1;

  CLI::App* run_cmd = app.add_subcommand("run", "Search architectures for a CSV dataset");
  run_cmd->add_option("data", cfg.dataset, "CSV file, last column is the class label")->required();
  run_cmd->add_option("--seed", seed, "Master seed for splitting, moves and training")->capture_default_str();
  run_cmd->add_option("--hmax", s.max_depth, "Largest number of hidden layers")->capture_default_str();
  run_cmd->add_option("--iter", s.iterations, "Tabu iterations per depth")->capture_default_str();
  run_cmd->add_option("--pmax", s.population, "Candidates per iteration (even)")->capture_default_str();
  run_cmd->add_option("--prob", s.change_probability, "Per-layer no-change threshold p")->capture_default_str();
  run_cmd->add_option("--k-percent", s.k_percent, "Width change per move, percent")->capture_default_str();
  run_cmd->add_option("--tabu-retries", s.tabu_retries, "Redraws for a tabu candidate")->capture_default_str();
  run_cmd->add_option("--epochs", t.epochs, "Training epochs per candidate")->capture_default_str();
  run_cmd->add_option("--lr", t.learning_rate, "Learning rate")->capture_default_str();
  run_cmd->add_option("--momentum", t.momentum, "Momentum")->capture_default_str();
  run_cmd->add_option("--batch-size", t.batch_size, "Mini-batch size")->capture_default_str();
  run_cmd->add_option("--input-dropout", t.input_dropout, "Input dropout rate")->capture_default_str();
  run_cmd->add_option("--hidden-dropout", t.hidden_dropout, "Hidden dropout rate")->capture_default_str();
  run_cmd->add_option("--init", init_text, "Weight init: uniform, scaled or zero")
      ->check(CLI::IsMember({"uniform", "scaled", "zero"}))
      ->capture_default_str();
  run_cmd->add_option("--split", split_text, "Train,validation,test fractions")->capture_default_str();
  run_cmd->add_flag("--header", cfg.header, "Skip the first CSV line");
  run_cmd->add_option("--threads", s.threads, "Parallel candidate evaluations")->capture_default_str();
  run_cmd->add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();

  ParseResult result;
  try {
    app.parse(argc, argv);
    cfg.fractions = parse_fractions(split_text);
    s.master_seed = seed;
    t.init = init_text == "scaled" ? InitScheme::ScaledUniform
             : init_text == "zero" ? InitScheme::Zero
                                   : InitScheme::Uniform;
    s.validate();
  } catch (const CLI::CallForHelp&) {
    result.message = app.help();
    return result;
  } catch (const CLI::CallForAllHelp&) {
    result.message = app.help("", CLI::AppFormatMode::All);
    return result;
  } catch (const CLI::ParseError& e) {
    result.exit_code = kUsage;
    result.message = std::string("usage error: ") + e.what() + "\n" + app.help();
    return result;
  } catch (const Error& e) {
    result.exit_code = kUsage;
    result.message = std::string("usage error: ") + e.what();
    return result;
  }
  result.config = std::move(cfg);
  return result;
}

int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const auto started = std::chrono::system_clock::now();
    const auto t0 = std::chrono::steady_clock::now();
    cfg.search.validate();
    out << "seed: " << cfg.search.master_seed << "\n";

    const RawDataset raw = load_csv(cfg.dataset, cfg.header);
    const SplitDataset data = prepare_dataset(raw, cfg.fractions, cfg.search.master_seed);
    out << "dataset: " << raw.size() << " samples, " << raw.feature_count() << " features, " << raw.class_count()
        << " classes (train " << data.train.size() << ", validation " << data.validation.size() << ", test "
        << data.test.size() << ")\n";

    const SearchReport report = run_search(data, cfg.search);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) fail(ErrorKind::Io, "cannot create '" + cfg.out_dir.string() + "': " + ec.message());

    if (cfg.write_report) {
      nlohmann::json doc = report_to_json(report);
      nlohmann::json labels = nlohmann::json::array();
      for (std::int64_t l : raw.label_map) labels.push_back(l);
      doc["dataset"] = {{"path", cfg.dataset.string()},
                        {"samples", raw.size()},
                        {"features", raw.feature_count()},
                        {"label_map", labels},
                        {"split", {cfg.fractions.train, cfg.fractions.validation, cfg.fractions.test}},
                        {"train_size", data.train.size()},
                        {"validation_size", data.validation.size()},
                        {"test_size", data.test.size()}};
      doc["timing"] = {{"started_utc", utc_timestamp(started)},
                       {"duration_seconds", seconds},
                       {"threads", cfg.search.threads}};
      write_file(cfg.out_dir / "report.json", doc.dump(2) + "\n");
    }
    if (cfg.write_depth_csv) write_file(cfg.out_dir / "depth_errors.csv", depth_errors_csv(report));

    out << depth_errors_csv(report);
    out << summary_line(report) << "\n";
    return kSuccess;
  } catch (const Error& e) {
    err << "archsearch: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "archsearch: internal error: " << e.what() << "\n";
    return kInternal;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  ParseResult parsed = parse_args(argc, argv);
  if (!parsed.config) {
    (parsed.exit_code == kSuccess ? out : err) << parsed.message << (parsed.message.ends_with('\n') ? "" : "\n");
    return parsed.exit_code;
  }
  return execute(*parsed.config, out, err);
}

}  // namespace archsearch::cli
