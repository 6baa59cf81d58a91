#include "archsearch/labeled_set.hpp"

#include <string>

#include "archsearch/error.hpp"

namespace archsearch {

void LabeledSet::validate() const {
  if (static_cast<std::size_t>(features.rows()) != labels.size())
    fail(ErrorKind::InvalidDataset, "feature rows and labels differ in count");
  if (class_count < 2) fail(ErrorKind::InvalidDataset, "need at least two classes");
  for (int label : labels) {
    if (label < 0 || label >= class_count)
      fail(ErrorKind::InvalidLabel, "label " + std::to_string(label) + " outside [0, " + std::to_string(class_count) + ")");
  }
}

LabeledSet LabeledSet::subset(const std::vector<std::size_t>& rows) const {
  LabeledSet out;
  out.class_count = class_count;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
    out.labels.push_back(labels[rows[i]]);
  }
  return out;
}

}  // namespace archsearch
