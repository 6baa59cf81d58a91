#include "archsearch/data_pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>
#include <string_view>

#include "archsearch/error.hpp"
#include "archsearch/rng.hpp"

namespace archsearch {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  fail(ErrorKind::Parse, "line " + std::to_string(line) + ": " + what);
}

double parse_cell(std::string_view cell, std::size_t line) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
    parse_fail(line, "non-numeric cell '" + std::string(cell) + "'");
  if (!std::isfinite(value)) parse_fail(line, "non-finite value '" + std::string(cell) + "'");
  return value;
}

}  // namespace

int RawDataset::class_of(std::int64_t label) const {
  const auto it = std::find(label_map.begin(), label_map.end(), label);
  if (it == label_map.end()) fail(ErrorKind::InvalidLabel, "unknown label " + std::to_string(label));
  return static_cast<int>(it - label_map.begin());
}

LabeledSet RawDataset::to_labeled() const {
  LabeledSet set;
  set.features = rows;
  set.class_count = class_count();
  set.labels.reserve(labels.size());
  for (std::int64_t l : labels) set.labels.push_back(class_of(l));
  return set;
}

RawDataset load_csv(const std::filesystem::path& path, bool skip_header) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "'");

  std::vector<double> values;
  RawDataset raw;
  std::size_t width = 0;
  std::size_t line_no = 0;
  std::string line;
  std::vector<double> cells;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_header && line_no == 1) continue;
    const std::string_view text = trim(line);
    if (text.empty()) continue;

    cells.clear();
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = text.find(',', pos);
      cells.push_back(parse_cell(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos), line_no));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (cells.size() < 2) parse_fail(line_no, "row needs at least one feature and a label");
    if (width == 0) {
      width = cells.size();
    } else if (cells.size() != width) {
      parse_fail(line_no, "row has " + std::to_string(cells.size()) + " columns, expected " + std::to_string(width));
    }

    const double label = cells.back();
    if (label != std::trunc(label) || std::fabs(label) > 9.0e15) parse_fail(line_no, "label is not an integer");
    const auto label_int = static_cast<std::int64_t>(label);
    if (std::find(raw.label_map.begin(), raw.label_map.end(), label_int) == raw.label_map.end())
      raw.label_map.push_back(label_int);
    raw.labels.push_back(label_int);
    values.insert(values.end(), cells.begin(), cells.end() - 1);
  }
  if (in.bad()) fail(ErrorKind::Io, "read failure on '" + path.string() + "'");

  if (raw.labels.empty()) fail(ErrorKind::InvalidDataset, "'" + path.string() + "' contains no samples");
  if (raw.label_map.size() < 2) fail(ErrorKind::InvalidDataset, "dataset has a single class");

  const auto n = static_cast<Eigen::Index>(raw.labels.size());
  const auto f = static_cast<Eigen::Index>(width - 1);
  raw.rows = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(values.data(), n, f);
  return raw;
}

SplitDataset split(const RawDataset& raw, SplitFractions fractions, std::uint64_t seed) {
  const double sum = fractions.train + fractions.validation + fractions.test;
  if (!(fractions.train > 0.0 && fractions.validation > 0.0 && fractions.test > 0.0))
    fail(ErrorKind::InvalidSplit, "split fractions must all be positive");
  if (std::fabs(sum - 1.0) > 1e-9) fail(ErrorKind::InvalidSplit, "split fractions must sum to 1");

  const std::size_t n = raw.size();
  const auto n_val = static_cast<std::size_t>(std::llround(static_cast<double>(n) * fractions.validation));
  const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * fractions.test));
  if (n_val == 0 || n_test == 0 || n_val + n_test >= n)
    fail(ErrorKind::InvalidSplit, "a split is empty for " + std::to_string(n) + " samples");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order.begin(), order.end());

  SplitDataset out;
  out.fractions = fractions;
  out.seed = seed;
  const std::size_t n_train = n - n_val - n_test;
  out.train_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.validation_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                             order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  out.test_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());

  const LabeledSet all = raw.to_labeled();
  out.train = all.subset(out.train_rows);
  out.validation = all.subset(out.validation_rows);
  out.test = all.subset(out.test_rows);
  return out;
}

NormParams min_max_fit(const LabeledSet& train) {
  if (train.empty()) fail(ErrorKind::InvalidInput, "cannot fit normalization on an empty set");
  return {train.features.colwise().minCoeff().transpose(), train.features.colwise().maxCoeff().transpose()};
}

LabeledSet min_max_apply(const NormParams& params, const LabeledSet& set) {
  if (static_cast<std::size_t>(params.min.size()) != set.feature_count())
    fail(ErrorKind::Shape, "normalization parameters do not match feature count");
  LabeledSet out = set;
  for (Eigen::Index j = 0; j < out.features.cols(); ++j) {
    const double lo = params.min(j);
    const double range = params.max(j) - lo;
    if (range > 0.0)
      out.features.col(j) = (out.features.col(j).array() - lo) / range;
    else
      out.features.col(j).setZero();
  }
  return out;
}

SplitDataset prepare_dataset(const RawDataset& raw, SplitFractions fractions, std::uint64_t seed) {
  SplitDataset data = split(raw, fractions, seed);
  const NormParams params = min_max_fit(data.train);
  data.train = min_max_apply(params, data.train);
  data.validation = min_max_apply(params, data.validation);
  data.test = min_max_apply(params, data.test);
  return data;
}

}  // namespace archsearch
