#include "archsearch/report.hpp"

#include <cstdio>

#include "archsearch/evaluation.hpp"

namespace archsearch {

namespace {

using nlohmann::json;

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

const char* init_name(InitScheme s) {
  switch (s) {
    case InitScheme::Uniform: return "uniform";
    case InitScheme::ScaledUniform: return "scaled-uniform";
    case InitScheme::Zero: return "zero";
  }
  return "uniform";
}

json evaluation_json(const Evaluation& e) {
  return {{"fitness", e.fitness}, {"training_error", e.training_error}, {"test_error", e.test_error},
          {"diverged", e.diverged}};
}

json solution_json(const Solution& s, std::size_t input, std::size_t output) {
  json bounds = json::array();
  for (const LayerBounds& b : s.bounds) bounds.push_back({b.low, b.high});
  json out{{"depth", s.depth()},
           {"widths", s.widths},
           {"bounds", bounds},
           {"weights", count_weights(input, s.widths, output)},
           {"train_seed", s.train_seed}};
  if (s.evaluation) out["evaluation"] = evaluation_json(*s.evaluation);
  return out;
}

json candidate_json(const CandidateRecord& c, std::size_t input, std::size_t output) {
  return {{"index", c.index},
          {"direction", to_string(c.direction)},
          {"widths", c.widths},
          {"deltas", c.deltas},
          {"redraws", c.redraws},
          {"rejected", c.rejected},
          {"monotone", c.monotone},
          {"weights", count_weights(input, c.widths, output)},
          {"train_seed", c.train_seed},
          {"evaluation", evaluation_json(c.evaluation)}};
}

}  // namespace

json config_to_json(const SearchConfig& cfg) {
  const TrainConfig& t = cfg.train;
  return {{"max_depth", cfg.max_depth},
          {"iterations", cfg.iterations},
          {"population", cfg.population},
          {"change_probability", cfg.change_probability},
          {"k_percent", cfg.k_percent},
          {"tabu_retries", cfg.tabu_retries},
          {"master_seed", cfg.master_seed},
          {"train",
           {{"learning_rate", t.learning_rate},
            {"momentum", t.momentum},
            {"epochs", t.epochs},
            {"batch_size", t.batch_size},
            {"input_dropout", t.input_dropout},
            {"hidden_dropout", t.hidden_dropout},
            {"weight_init_low", t.weight_init_low},
            {"weight_init_high", t.weight_init_high},
            {"init", init_name(t.init)}}}};
}

json report_to_json(const SearchReport& report) {
  const std::size_t in = report.input_size;
  const std::size_t out = report.output_size;

  json depths = json::array();
  json table = json::array();
  for (const DepthRecord& d : report.depths) {
    json iterations = json::array();
    for (const IterationRecord& it : d.iterations) {
      json candidates = json::array();
      for (const CandidateRecord& c : it.candidates) candidates.push_back(candidate_json(c, in, out));
      iterations.push_back({{"iteration", it.iteration},
                            {"current", it.current},
                            {"candidates", candidates},
                            {"selected", it.selected},
                            {"improved", it.improved},
                            {"best_fitness", it.best_fitness},
                            {"tabu_size", it.tabu_size}});
    }
    depths.push_back({{"depth", d.depth},
                      {"initial", solution_json(d.initial, in, out)},
                      {"iterations", iterations},
                      {"best", solution_json(d.best, in, out)},
                      {"tabu_list", d.tabu_list}});
    const Evaluation& e = *d.best.evaluation;
    table.push_back({{"depth", d.depth},
                     {"hidden_neurons", d.best.widths},
                     {"training_error", e.training_error},
                     {"validation_error", e.fitness},
                     {"testing_error", e.test_error}});
  }

  return {{"config", config_to_json(report.config)},
          {"master_seed", report.config.master_seed},
          {"input_size", in},
          {"output_size", out},
          {"evaluations", report.evaluation_count()},
          {"depths", depths},
          {"depth_table", table},
          {"global_best", solution_json(report.global_best(), in, out)}};
}

std::string format_widths(const ArchKey& widths) {
  std::string s;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(widths[i]);
  }
  return s;
}

std::string depth_errors_csv(const SearchReport& report) {
  std::string csv = "depth,best_hidden_neurons,training_error,testing_error\n";
  for (const DepthRecord& d : report.depths) {
    const Evaluation& e = *d.best.evaluation;
    csv += std::to_string(d.depth) + ",\"" + format_widths(d.best.widths) + "\"," + fixed(e.training_error) + "," +
           fixed(e.test_error) + "\n";
  }
  return csv;
}

std::string summary_line(const SearchReport& report) {
  const Solution& best = report.global_best();
  const Evaluation& e = *best.evaluation;
  return "best architecture: depth " + std::to_string(best.depth()) + ", hidden neurons [" +
         format_widths(best.widths) + "], weights " +
         std::to_string(count_weights(report.input_size, best.widths, report.output_size)) +
         ", validation error " + fixed(e.fitness) + "%, test error " + fixed(e.test_error) + "%";
}

}  // namespace archsearch
