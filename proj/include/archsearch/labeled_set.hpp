#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace archsearch {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Feature rows (one sample per row) with zero-based class labels.
struct LabeledSet {
  Matrix features;
  std::vector<int> labels;
  int class_count = 0;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t feature_count() const noexcept { return static_cast<std::size_t>(features.cols()); }
  bool empty() const noexcept { return labels.empty(); }

  /// Throws InvalidDataset / InvalidLabel when rows and labels disagree,
  /// class_count < 2, or a label falls outside [0, class_count).
  void validate() const;

  /// Rows picked by index, in the order given.
  LabeledSet subset(const std::vector<std::size_t>& rows) const;
};

}  // namespace archsearch
