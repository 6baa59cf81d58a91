#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "archsearch/data_pipeline.hpp"
#include "archsearch/mlp.hpp"
#include "archsearch/rng.hpp"

namespace archsearch {

/// Hidden-layer widths; the depth is the vector length. Used as the tabu key.
using ArchKey = std::vector<std::size_t>;

struct LayerBounds {
  std::size_t low = 1;
  std::size_t high = 1;

  bool contains(std::size_t w) const noexcept { return low <= w && w <= high; }
  friend bool operator==(const LayerBounds&, const LayerBounds&) = default;
};

/// Outcome of training one architecture.
struct Evaluation {
  double fitness = 100.0;         // validation error, percent
  double training_error = 100.0;  // percent
  double test_error = 100.0;      // percent
  bool diverged = false;
};

struct Solution {
  ArchKey widths;
  std::vector<LayerBounds> bounds;
  std::optional<Evaluation> evaluation;
  std::uint64_t train_seed = 0;

  std::size_t depth() const noexcept { return widths.size(); }
  double fitness() const;  // throws Precondition when unevaluated
  bool within_bounds() const;
};

class TabuList {
 public:
  bool contains(const ArchKey& key) const;
  /// Appends unless already present; returns whether it was appended.
  bool push(const ArchKey& key);
  void clear() noexcept { entries_.clear(); }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<ArchKey>& entries() const noexcept { return entries_; }

 private:
  std::vector<ArchKey> entries_;
};

struct SearchConfig {
  int max_depth = 5;             // H_max
  int iterations = 10;           // Iter
  int population = 20;           // P_max, even
  double change_probability = 0.5;  // p
  double k_percent = 3.0;        // K
  int tabu_retries = 10;
  TrainConfig train;
  std::uint64_t master_seed = 0;
  int threads = 1;

  /// Throws InvalidConfig.
  void validate() const;
};

enum class Direction { Increase, Decrease };

const char* to_string(Direction d) noexcept;

/// Chained neuron range for a layer fed by `fan_in` units:
/// [ceil((fan_in + O) / 2), floor((fan_in + O) * 2 / 3)], widened to a single
/// point when the upper end falls below the lower.
LayerBounds layer_bounds(std::size_t fan_in, std::size_t output);

/// Draws widths layer by layer, each from the range chained off the previous
/// width. The bounds are stored and stay fixed for every descendant.
Solution initial_solution(std::size_t depth, std::size_t input, std::size_t output, Rng& rng);

/// max(1, round-half-up(K / 100 * width)).
std::size_t step_size(std::size_t width, double k_percent);

/// One layer move: unchanged when omega < p, otherwise width +/- step_size
/// clamped to the bounds (a layer already at the bound in the move direction
/// stays put).
std::size_t perturb_layer(std::size_t width, LayerBounds bounds, Direction direction, double k_percent,
                          double omega, double p);

/// Scores an architecture given its train seed. Must be safe to call from
/// several threads at once.
using FitnessFn = std::function<Evaluation(std::span<const std::size_t> widths, std::uint64_t seed)>;

/// Trains a fresh network [I, widths..., O] on data.train and scores it on
/// data.validation (fitness) and data.test.
Evaluation evaluate_architecture(std::span<const std::size_t> widths, const SplitDataset& data,
                                 const TrainConfig& cfg, std::uint64_t seed);

/// Checks bounds, then evaluate_architecture with the solution's train_seed.
Evaluation evaluate_solution(const Solution& s, const SplitDataset& data, const TrainConfig& cfg);

FitnessFn training_fitness(const SplitDataset& data, const TrainConfig& cfg);

/// Seeds are derived from (master_seed, depth, iteration, candidate, purpose).
/// The initial solution of a depth uses iteration 0, candidate 0.
enum class SeedPurpose : std::uint64_t { InitialWidths = 1, Moves = 2, Training = 3 };
std::uint64_t search_seed(std::uint64_t master, std::size_t depth, std::size_t iteration, std::size_t candidate,
                          SeedPurpose purpose);

struct CandidateRecord {
  std::size_t index = 0;
  Direction direction = Direction::Increase;
  ArchKey widths;
  std::vector<std::int64_t> deltas;  // signed per-layer change before clamping
  int redraws = 0;
  bool rejected = false;  // still tabu (or equal to the parent) after all redraws
  bool monotone = true;   // strictly decreasing widths
  std::uint64_t train_seed = 0;
  Evaluation evaluation;
};

struct NeighborhoodResult {
  Solution best;
  std::size_t best_index = 0;
  std::vector<CandidateRecord> candidates;
};

/// Builds population P_max around `current`: the first half moves layers up,
/// the second half down, each layer with its own omega. Candidates that hit
/// the tabu list or repeat `current` are redrawn up to tabu_retries times.
/// All candidates are scored; the best non-rejected one wins (lowest index on
/// ties), falling back to the best overall when every candidate is rejected.
NeighborhoodResult generate_neighbors(const Solution& current, const SearchConfig& cfg, const TabuList& tabu,
                                      const FitnessFn& fitness, std::size_t depth, std::size_t iteration);

struct IterationRecord {
  std::size_t iteration = 0;
  ArchKey current;
  std::vector<CandidateRecord> candidates;
  std::size_t selected = 0;
  bool improved = false;
  double best_fitness = 100.0;  // s_best after this iteration
  std::size_t tabu_size = 0;
};

struct DepthRecord {
  std::size_t depth = 0;
  Solution initial;
  std::vector<IterationRecord> iterations;
  Solution best;
  std::vector<ArchKey> tabu_list;
};

struct SearchReport {
  SearchConfig config;
  std::size_t input_size = 0;
  std::size_t output_size = 0;
  std::vector<DepthRecord> depths;
  std::size_t global_best_depth_index = 0;

  const Solution& global_best() const { return depths.at(global_best_depth_index).best; }
  std::size_t evaluation_count() const;
};

DepthRecord run_depth_search(std::size_t depth, std::size_t input, std::size_t output, const SearchConfig& cfg,
                             const FitnessFn& fitness);

SearchReport run_search(std::size_t input, std::size_t output, const SearchConfig& cfg, const FitnessFn& fitness);

/// run_search driven by network training on `data`.
SearchReport run_search(const SplitDataset& data, const SearchConfig& cfg);

}  // namespace archsearch
