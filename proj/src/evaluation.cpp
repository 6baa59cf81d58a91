#include "archsearch/evaluation.hpp"

#include <string>

#include "archsearch/error.hpp"

namespace archsearch {

int sample_error(int predicted, int actual, int class_count) {
  auto in_range = [class_count](int c) { return c >= 0 && c < class_count; };
  if (!in_range(predicted) || !in_range(actual))
    fail(ErrorKind::InvalidLabel, "class index outside [0, " + std::to_string(class_count) + ")");
  return predicted != actual ? 1 : 0;
}

double classification_error(const Network& net, const LabeledSet& set) {
  if (set.empty()) fail(ErrorKind::InvalidInput, "cannot compute error on an empty set");
  if (set.feature_count() != net.input_size())
    fail(ErrorKind::Shape, "set has " + std::to_string(set.feature_count()) + " features, network expects " +
                               std::to_string(net.input_size()));
  const int classes = static_cast<int>(net.output_size());
  std::vector<double> row(set.feature_count());
  std::size_t wrong = 0;
  for (std::size_t d = 0; d < set.size(); ++d) {
    for (std::size_t j = 0; j < row.size(); ++j)
      row[j] = set.features(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(j));
    wrong += static_cast<std::size_t>(sample_error(predict_class(net, row), set.labels[d], classes));
  }
  return 100.0 * static_cast<double>(wrong) / static_cast<double>(set.size());
}

std::uint64_t count_weights(std::size_t input, std::span<const std::size_t> hidden, std::size_t output) {
  if (hidden.empty()) fail(ErrorKind::InvalidArchitecture, "architecture has no hidden layer");
  if (input == 0 || output == 0) fail(ErrorKind::InvalidArchitecture, "layer width must be at least 1");
  std::uint64_t total = 0;
  std::uint64_t fan_in = input;
  auto add = [&](std::uint64_t fan_out) {
    if (fan_out == 0) fail(ErrorKind::InvalidArchitecture, "layer width must be at least 1");
    total += fan_in * fan_out + fan_out;
    fan_in = fan_out;
  };
  for (std::size_t h : hidden) add(h);
  add(output);
  return total;
}

}  // namespace archsearch
