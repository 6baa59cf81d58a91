#include "archsearch/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "archsearch/error.hpp"
#include "archsearch/evaluation.hpp"

namespace archsearch {

namespace {

// Runs task(i) for i in [0, n) on up to `threads` workers. Exceptions are
// rethrown for the lowest failing index.
template <typename Task>
void parallel_for(std::size_t n, int threads, Task&& task) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  std::vector<std::exception_ptr> errors(n);
  auto run_one = [&](std::size_t i) {
    try {
      task(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) run_one(i);
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

bool strictly_decreasing(const ArchKey& widths) {
  for (std::size_t i = 1; i < widths.size(); ++i) {
    if (widths[i] >= widths[i - 1]) return false;
  }
  return true;
}

}  // namespace

double Solution::fitness() const {
  if (!evaluation) fail(ErrorKind::Precondition, "solution has not been evaluated");
  return evaluation->fitness;
}

bool Solution::within_bounds() const {
  if (widths.size() != bounds.size() || widths.empty()) return false;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (bounds[i].low > bounds[i].high || !bounds[i].contains(widths[i])) return false;
  }
  return true;
}

bool TabuList::contains(const ArchKey& key) const {
  return std::find(entries_.begin(), entries_.end(), key) != entries_.end();
}

bool TabuList::push(const ArchKey& key) {
  if (contains(key)) return false;
  entries_.push_back(key);
  return true;
}

void SearchConfig::validate() const {
  if (max_depth < 1) fail(ErrorKind::InvalidConfig, "max depth must be at least 1");
  if (iterations < 0) fail(ErrorKind::InvalidConfig, "iteration count must be non-negative");
  if (population < 2 || population % 2 != 0)
    fail(ErrorKind::InvalidConfig, "population size must be a positive even number, got " + std::to_string(population));
  if (!(change_probability >= 0.0 && change_probability <= 1.0))
    fail(ErrorKind::InvalidConfig, "change probability must lie in [0, 1]");
  if (!(k_percent > 0.0 && k_percent < 100.0)) fail(ErrorKind::InvalidConfig, "K must lie in (0, 100)");
  if (tabu_retries < 0) fail(ErrorKind::InvalidConfig, "tabu retries must be non-negative");
  if (threads < 1) fail(ErrorKind::InvalidConfig, "thread count must be at least 1");
  train.validate();
}

const char* to_string(Direction d) noexcept { return d == Direction::Increase ? "increase" : "decrease"; }

LayerBounds layer_bounds(std::size_t fan_in, std::size_t output) {
  if (fan_in < 1 || output < 1) fail(ErrorKind::Precondition, "layer bounds need positive fan-in and output");
  const std::size_t total = fan_in + output;
  LayerBounds b{(total + 1) / 2, total * 2 / 3};
  if (b.high < b.low) b.high = b.low;
  return b;
}

Solution initial_solution(std::size_t depth, std::size_t input, std::size_t output, Rng& rng) {
  if (depth < 1) fail(ErrorKind::Precondition, "depth must be at least 1");
  Solution s;
  std::size_t previous = input;
  for (std::size_t i = 0; i < depth; ++i) {
    const LayerBounds b = layer_bounds(previous, output);
    const auto width = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(b.low), static_cast<std::int64_t>(b.high)));
    s.bounds.push_back(b);
    s.widths.push_back(width);
    previous = width;
  }
  return s;
}

std::size_t step_size(std::size_t width, double k_percent) {
  const double raw = k_percent * static_cast<double>(width) / 100.0;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(raw + 0.5)));
}

std::size_t perturb_layer(std::size_t width, LayerBounds bounds, Direction direction, double k_percent, double omega,
                          double p) {
  if (!bounds.contains(width)) fail(ErrorKind::Precondition, "width outside its layer bounds");
  if (omega < p) return width;
  const std::size_t step = step_size(width, k_percent);
  if (direction == Direction::Increase) {
    if (width >= bounds.high) return width;
    return std::min(width + step, bounds.high);
  }
  if (width <= bounds.low) return width;
  return width - std::min(step, width - bounds.low);
}

std::uint64_t search_seed(std::uint64_t master, std::size_t depth, std::size_t iteration, std::size_t candidate,
                          SeedPurpose purpose) {
  return derive_seed(master, {depth, iteration, candidate, static_cast<std::uint64_t>(purpose)});
}

Evaluation evaluate_architecture(std::span<const std::size_t> widths, const SplitDataset& data,
                                 const TrainConfig& cfg, std::uint64_t seed) {
  std::vector<std::size_t> layers;
  layers.reserve(widths.size() + 2);
  layers.push_back(data.input_size());
  layers.insert(layers.end(), widths.begin(), widths.end());
  layers.push_back(static_cast<std::size_t>(data.class_count()));

  const TrainResult trained = train(layers, data.train, cfg, seed);
  Evaluation e;
  e.diverged = trained.diverged;
  if (trained.diverged) return e;
  e.training_error = trained.training_error;
  e.fitness = classification_error(trained.network, data.validation);
  e.test_error = classification_error(trained.network, data.test);
  return e;
}

Evaluation evaluate_solution(const Solution& s, const SplitDataset& data, const TrainConfig& cfg) {
  if (!s.within_bounds()) fail(ErrorKind::Precondition, "architecture violates its layer bounds");
  return evaluate_architecture(s.widths, data, cfg, s.train_seed);
}

FitnessFn training_fitness(const SplitDataset& data, const TrainConfig& cfg) {
  return [&data, cfg](std::span<const std::size_t> widths, std::uint64_t seed) {
    return evaluate_architecture(widths, data, cfg, seed);
  };
}

NeighborhoodResult generate_neighbors(const Solution& current, const SearchConfig& cfg, const TabuList& tabu,
                                      const FitnessFn& fitness, std::size_t depth, std::size_t iteration) {
  if (!current.evaluation) fail(ErrorKind::Precondition, "neighbor generation needs an evaluated solution");
  if (cfg.population < 2 || cfg.population % 2 != 0)
    fail(ErrorKind::InvalidConfig, "population size must be a positive even number");

  const auto population = static_cast<std::size_t>(cfg.population);
  const std::size_t layers = current.depth();
  NeighborhoodResult result;
  result.candidates.resize(population);

  for (std::size_t i = 0; i < population; ++i) {
    CandidateRecord& c = result.candidates[i];
    c.index = i;
    c.direction = i < population / 2 ? Direction::Increase : Direction::Decrease;
    const std::int64_t sign = c.direction == Direction::Increase ? 1 : -1;
    Rng rng(search_seed(cfg.master_seed, depth, iteration, i, SeedPurpose::Moves));

    for (int attempt = 0;; ++attempt) {
      c.widths.assign(layers, 0);
      c.deltas.assign(layers, 0);
      for (std::size_t j = 0; j < layers; ++j) {
        const double omega = rng.uniform01();
        const std::size_t w = current.widths[j];
        c.widths[j] = perturb_layer(w, current.bounds[j], c.direction, cfg.k_percent, omega, cfg.change_probability);
        if (omega >= cfg.change_probability) c.deltas[j] = sign * static_cast<std::int64_t>(step_size(w, cfg.k_percent));
      }
      c.rejected = c.widths == current.widths || tabu.contains(c.widths);
      if (!c.rejected || attempt >= cfg.tabu_retries) break;
      ++c.redraws;
    }
    c.monotone = strictly_decreasing(c.widths);
    c.train_seed = search_seed(cfg.master_seed, depth, iteration, i, SeedPurpose::Training);
  }

  parallel_for(population, cfg.threads, [&](std::size_t i) {
    CandidateRecord& c = result.candidates[i];
    c.evaluation = fitness(c.widths, c.train_seed);
  });

  const bool any_accepted =
      std::any_of(result.candidates.begin(), result.candidates.end(), [](const auto& c) { return !c.rejected; });
  std::optional<std::size_t> best;
  for (const CandidateRecord& c : result.candidates) {
    if (any_accepted && c.rejected) continue;
    if (!best || c.evaluation.fitness < result.candidates[*best].evaluation.fitness) best = c.index;
  }

  const CandidateRecord& chosen = result.candidates[*best];
  result.best_index = *best;
  result.best.widths = chosen.widths;
  result.best.bounds = current.bounds;
  result.best.evaluation = chosen.evaluation;
  result.best.train_seed = chosen.train_seed;
  return result;
}

DepthRecord run_depth_search(std::size_t depth, std::size_t input, std::size_t output, const SearchConfig& cfg,
                             const FitnessFn& fitness) {
  cfg.validate();
  if (depth < 1 || depth > static_cast<std::size_t>(cfg.max_depth))
    fail(ErrorKind::Precondition, "depth " + std::to_string(depth) + " outside [1, max depth]");

  DepthRecord record;
  record.depth = depth;

  Rng init_rng(search_seed(cfg.master_seed, depth, 0, 0, SeedPurpose::InitialWidths));
  Solution current = initial_solution(depth, input, output, init_rng);
  current.train_seed = search_seed(cfg.master_seed, depth, 0, 0, SeedPurpose::Training);
  current.evaluation = fitness(current.widths, current.train_seed);
  record.initial = current;
  Solution best = current;

  TabuList tabu;
  for (std::size_t x = 1; x <= static_cast<std::size_t>(cfg.iterations); ++x) {
    NeighborhoodResult hood = generate_neighbors(current, cfg, tabu, fitness, depth, x);

    IterationRecord it;
    it.iteration = x;
    it.current = current.widths;
    it.selected = hood.best_index;
    it.improved = hood.best.fitness() < best.fitness();
    if (it.improved)
      best = hood.best;
    else
      tabu.push(hood.best.widths);
    current = std::move(hood.best);
    it.candidates = std::move(hood.candidates);
    it.best_fitness = best.fitness();
    it.tabu_size = tabu.size();
    record.iterations.push_back(std::move(it));
  }

  record.best = std::move(best);
  record.tabu_list = tabu.entries();
  return record;
}

std::size_t SearchReport::evaluation_count() const {
  std::size_t n = 0;
  for (const DepthRecord& d : depths) {
    n += 1;
    for (const IterationRecord& it : d.iterations) n += it.candidates.size();
  }
  return n;
}

SearchReport run_search(std::size_t input, std::size_t output, const SearchConfig& cfg, const FitnessFn& fitness) {
  cfg.validate();
  SearchReport report;
  report.config = cfg;
  report.input_size = input;
  report.output_size = output;
  for (std::size_t depth = 1; depth <= static_cast<std::size_t>(cfg.max_depth); ++depth) {
    report.depths.push_back(run_depth_search(depth, input, output, cfg, fitness));
    if (report.depths.back().best.fitness() < report.global_best().fitness())
      report.global_best_depth_index = report.depths.size() - 1;
  }
  return report;
}

SearchReport run_search(const SplitDataset& data, const SearchConfig& cfg) {
  data.train.validate();
  if (data.validation.empty() || data.test.empty() || data.train.empty())
    fail(ErrorKind::InvalidSplit, "dataset splits must be non-empty");
  return run_search(data.input_size(), static_cast<std::size_t>(data.class_count()), cfg,
                    training_fitness(data, cfg.train));
}

}  // namespace archsearch
