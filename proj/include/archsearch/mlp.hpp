#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "archsearch/labeled_set.hpp"
#include "archsearch/rng.hpp"

namespace archsearch {

enum class InitScheme {
  Uniform,        // U[low, high]
  ScaledUniform,  // U[low, high] / sqrt(fan_in)
  Zero,           // all weights zero; yields a constant classifier
};

struct TrainConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  int epochs = 50;
  int batch_size = 32;
  double input_dropout = 0.2;
  double hidden_dropout = 0.0;
  double weight_init_low = -1.0;
  double weight_init_high = 1.0;
  InitScheme init = InitScheme::Uniform;

  /// Throws InvalidConfig on out-of-range values.
  void validate() const;
};

/// Dense feedforward net. weights[t] maps layer t to layer t+1 and has shape
/// (layer_sizes[t] x layer_sizes[t+1]); hidden units are rectifiers and the
/// output layer is a softmax.
struct Network {
  std::vector<std::size_t> layer_sizes;
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  std::size_t input_size() const { return layer_sizes.front(); }
  std::size_t output_size() const { return layer_sizes.back(); }
  std::size_t transitions() const { return weights.size(); }

  /// Throws Shape if any parameter disagrees with layer_sizes.
  void check_shapes() const;
  bool all_finite() const;
};

/// Parameter-shaped state. Gradients and Velocity share the layout but are
/// kept as distinct types.
template <typename Tag>
struct ParamBuffer {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  static ParamBuffer zeros_like(const Network& net) {
    ParamBuffer out;
    for (std::size_t t = 0; t < net.transitions(); ++t) {
      out.weights.push_back(Matrix::Zero(net.weights[t].rows(), net.weights[t].cols()));
      out.biases.push_back(Vector::Zero(net.biases[t].size()));
    }
    return out;
  }

  bool congruent_with(const Network& net) const {
    if (weights.size() != net.transitions() || biases.size() != net.transitions()) return false;
    for (std::size_t t = 0; t < weights.size(); ++t) {
      if (weights[t].rows() != net.weights[t].rows() || weights[t].cols() != net.weights[t].cols() ||
          biases[t].size() != net.biases[t].size())
        return false;
    }
    return true;
  }
};

struct GradientTag {};
struct VelocityTag {};
using Gradients = ParamBuffer<GradientTag>;
using Velocity = ParamBuffer<VelocityTag>;

enum class Mode { Train, Inference };

struct DropoutRates {
  double input = 0.0;
  double hidden = 0.0;
};

/// Inverted-dropout masks for a batch. layers[t] multiplies the input of
/// transition t (t = 0 is the network input, t >= 1 a hidden layer) and holds
/// 0 or 1/(1 - rate). An empty matrix means no masking for that layer.
struct DropoutMasks {
  std::vector<Matrix> layers;

  static DropoutMasks draw(const Network& net, std::size_t batch, DropoutRates rates, Rng& rng);
};

/// Per-layer values kept for backpropagation; one sample per row.
struct ForwardCache {
  std::vector<Matrix> inputs;           // inputs[t]: (masked) input of transition t
  std::vector<Matrix> pre_activations;  // pre_activations[t]: z of transition t
  Matrix output;                        // softmax rows
};

Network init_network(std::span<const std::size_t> layer_sizes, const TrainConfig& cfg,
                     std::uint64_t seed);

/// Batched forward pass. `masks` may be null (inference).
ForwardCache forward_batch(const Network& net, const Matrix& inputs, const DropoutMasks* masks);

struct ForwardResult {
  Vector output;
  std::vector<Vector> activations;  // post-rectifier (and mask) values of every layer
};

/// Single-sample forward pass. Train mode draws masks from `rng`.
ForwardResult forward(const Network& net, std::span<const double> input, Mode mode,
                      DropoutRates rates = {}, Rng* rng = nullptr);

/// Mean softmax cross-entropy over the batch.
double batch_loss(const Network& net, const Matrix& inputs, std::span<const int> labels,
                  const DropoutMasks* masks);

/// Mean gradient of batch_loss with the given masks held fixed.
Gradients backprop_gradients(const Network& net, const Matrix& inputs,
                             std::span<const int> labels, const DropoutMasks* masks);

/// v' = momentum * v - lr * g;  w' = w + v'.
void gdm_step(Network& net, const Gradients& grads, Velocity& vel, double lr, double momentum);

/// Index of the largest entry; ties go to the lowest index.
int argmax(std::span<const double> values);

int predict_class(const Network& net, std::span<const double> sample);

struct TrainResult {
  Network network;
  double training_error = 0.0;  // percent, on the training set
  bool diverged = false;        // loss or parameters became non-finite
};

TrainResult train(std::span<const std::size_t> layer_sizes, const LabeledSet& train_set,
                  const TrainConfig& cfg, std::uint64_t seed);

}  // namespace archsearch
