#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "archsearch/labeled_set.hpp"

namespace archsearch {

/// Parsed CSV: features plus original labels. label_map[c] is the file label
/// assigned to zero-based class c, in order of first appearance.
struct RawDataset {
  Matrix rows;
  std::vector<std::int64_t> labels;
  std::vector<std::int64_t> label_map;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t feature_count() const noexcept { return static_cast<std::size_t>(rows.cols()); }
  int class_count() const noexcept { return static_cast<int>(label_map.size()); }
  int class_of(std::int64_t label) const;

  /// All rows with zero-based classes.
  LabeledSet to_labeled() const;
};

/// Comma-separated numeric rows, last column the integer label. Blank lines
/// are ignored; `skip_header` drops the first line.
RawDataset load_csv(const std::filesystem::path& path, bool skip_header = false);

struct SplitFractions {
  double train = 0.6;
  double validation = 0.2;
  double test = 0.2;
};

struct SplitDataset {
  LabeledSet train;
  LabeledSet validation;
  LabeledSet test;
  SplitFractions fractions;
  std::uint64_t seed = 0;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> validation_rows;
  std::vector<std::size_t> test_rows;

  std::size_t input_size() const noexcept { return train.feature_count(); }
  int class_count() const noexcept { return train.class_count; }
};

/// Seeded shuffle, then contiguous blocks: validation and test get
/// round(n * fraction) rows, train the remainder.
SplitDataset split(const RawDataset& raw, SplitFractions fractions, std::uint64_t seed);

struct NormParams {
  Vector min;
  Vector max;
};

NormParams min_max_fit(const LabeledSet& train);
/// (x - min) / (max - min); constant features map to 0.
LabeledSet min_max_apply(const NormParams& params, const LabeledSet& set);

/// split, then normalize every part with statistics from the training part.
SplitDataset prepare_dataset(const RawDataset& raw, SplitFractions fractions, std::uint64_t seed);

}  // namespace archsearch
