#pragma once

#include <cstdint>
#include <span>

#include "archsearch/labeled_set.hpp"
#include "archsearch/mlp.hpp"

namespace archsearch {

/// 1 if predicted != actual, else 0. Both must lie in [0, class_count).
int sample_error(int predicted, int actual, int class_count);

/// Winner-takes-all misclassification rate in percent:
/// 100 / |set| * sum of sample_error over the set. Throws InvalidInput on an
/// empty set and Shape on a feature-width mismatch.
double classification_error(const Network& net, const LabeledSet& set);

/// Trainable parameter count of input -> hidden... -> output with one bias
/// per non-input neuron. Throws InvalidArchitecture on an empty hidden list
/// or a zero width.
std::uint64_t count_weights(std::size_t input, std::span<const std::size_t> hidden, std::size_t output);

}  // namespace archsearch
