#include "archsearch/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "archsearch/error.hpp"
#include "archsearch/evaluation.hpp"

namespace archsearch {

namespace {

void check_rate(double rate, const char* name) {
  if (!(rate >= 0.0 && rate < 1.0))
    fail(ErrorKind::InvalidConfig, std::string(name) + " must lie in [0, 1), got " + std::to_string(rate));
}

void check_batch(const Network& net, const Matrix& inputs, std::span<const int> labels) {
  if (inputs.rows() == 0) fail(ErrorKind::InvalidInput, "empty batch");
  if (static_cast<std::size_t>(inputs.cols()) != net.input_size())
    fail(ErrorKind::Shape, "batch has " + std::to_string(inputs.cols()) + " features, network expects " +
                               std::to_string(net.input_size()));
  if (labels.size() != static_cast<std::size_t>(inputs.rows()))
    fail(ErrorKind::Shape, "batch has " + std::to_string(inputs.rows()) + " rows but " +
                               std::to_string(labels.size()) + " labels");
  const int classes = static_cast<int>(net.output_size());
  for (int label : labels) {
    if (label < 0 || label >= classes)
      fail(ErrorKind::InvalidLabel, "label " + std::to_string(label) + " outside [0, " + std::to_string(classes) + ")");
  }
}

// Row-wise log-softmax of the final pre-activations.
Matrix log_softmax_rows(const Matrix& z) {
  Matrix out(z.rows(), z.cols());
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const double m = z.row(r).maxCoeff();
    const double lse = m + std::log((z.row(r).array() - m).exp().sum());
    out.row(r) = z.row(r).array() - lse;
  }
  return out;
}

Matrix mask_for(std::size_t batch, std::size_t width, double rate, Rng& rng) {
  if (rate <= 0.0) return {};
  const double keep_scale = 1.0 / (1.0 - rate);
  Matrix mask(batch, width);
  // Filled row by row so the stream does not depend on Eigen's storage order.
  for (std::size_t r = 0; r < batch; ++r)
    for (std::size_t c = 0; c < width; ++c) mask(r, c) = rng.uniform01() < rate ? 0.0 : keep_scale;
  return mask;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    fail(ErrorKind::InvalidConfig, "learning rate must be positive");
  check_rate(momentum, "momentum");
  check_rate(input_dropout, "input dropout");
  check_rate(hidden_dropout, "hidden dropout");
  if (epochs < 0) fail(ErrorKind::InvalidConfig, "epochs must be non-negative");
  if (batch_size < 1) fail(ErrorKind::InvalidConfig, "batch size must be positive");
  if (!(weight_init_low < weight_init_high))
    fail(ErrorKind::InvalidConfig, "weight init range must satisfy low < high");
}

void Network::check_shapes() const {
  if (layer_sizes.size() < 2) fail(ErrorKind::InvalidArchitecture, "network needs at least two layers");
  const std::size_t n = layer_sizes.size() - 1;
  if (weights.size() != n || biases.size() != n)
    fail(ErrorKind::Shape, "parameter count does not match layer count");
  for (std::size_t t = 0; t < n; ++t) {
    if (static_cast<std::size_t>(weights[t].rows()) != layer_sizes[t] ||
        static_cast<std::size_t>(weights[t].cols()) != layer_sizes[t + 1] ||
        static_cast<std::size_t>(biases[t].size()) != layer_sizes[t + 1])
      fail(ErrorKind::Shape, "parameter shape mismatch at transition " + std::to_string(t));
  }
}

bool Network::all_finite() const {
  for (std::size_t t = 0; t < weights.size(); ++t) {
    if (!weights[t].allFinite() || !biases[t].allFinite()) return false;
  }
  return true;
}

DropoutMasks DropoutMasks::draw(const Network& net, std::size_t batch, DropoutRates rates, Rng& rng) {
  DropoutMasks masks;
  masks.layers.reserve(net.transitions());
  for (std::size_t t = 0; t < net.transitions(); ++t)
    masks.layers.push_back(mask_for(batch, net.layer_sizes[t], t == 0 ? rates.input : rates.hidden, rng));
  return masks;
}

Network init_network(std::span<const std::size_t> layer_sizes, const TrainConfig& cfg, std::uint64_t seed) {
  if (layer_sizes.size() < 2)
    fail(ErrorKind::InvalidArchitecture, "layer spec needs an input and an output layer");
  for (std::size_t w : layer_sizes) {
    if (w == 0) fail(ErrorKind::InvalidArchitecture, "layer width must be at least 1");
  }
  if (!(cfg.weight_init_low < cfg.weight_init_high))
    fail(ErrorKind::InvalidConfig, "weight init range must satisfy low < high");

  Network net;
  net.layer_sizes.assign(layer_sizes.begin(), layer_sizes.end());
  Rng rng(seed);
  for (std::size_t t = 0; t + 1 < layer_sizes.size(); ++t) {
    const auto fan_in = static_cast<Eigen::Index>(layer_sizes[t]);
    const auto fan_out = static_cast<Eigen::Index>(layer_sizes[t + 1]);
    Matrix w = Matrix::Zero(fan_in, fan_out);
    if (cfg.init != InitScheme::Zero) {
      const double scale = cfg.init == InitScheme::ScaledUniform ? 1.0 / std::sqrt(static_cast<double>(fan_in)) : 1.0;
      for (Eigen::Index i = 0; i < fan_in; ++i)
        for (Eigen::Index j = 0; j < fan_out; ++j)
          w(i, j) = scale * rng.uniform(cfg.weight_init_low, cfg.weight_init_high);
    }
    net.weights.push_back(std::move(w));
    net.biases.push_back(Vector::Zero(fan_out));
  }
  return net;
}

ForwardCache forward_batch(const Network& net, const Matrix& inputs, const DropoutMasks* masks) {
  if (static_cast<std::size_t>(inputs.cols()) != net.input_size())
    fail(ErrorKind::Shape, "input has " + std::to_string(inputs.cols()) + " features, network expects " +
                               std::to_string(net.input_size()));
  if (!inputs.allFinite()) fail(ErrorKind::InvalidInput, "non-finite input value");
  if (masks && !masks->layers.empty() && masks->layers.size() != net.transitions())
    fail(ErrorKind::Shape, "dropout mask count does not match network depth");

  const std::size_t n = net.transitions();
  ForwardCache cache;
  cache.inputs.reserve(n);
  cache.pre_activations.reserve(n);

  Matrix current = inputs;
  for (std::size_t t = 0; t < n; ++t) {
    if (masks && !masks->layers.empty() && masks->layers[t].size() != 0) {
      const Matrix& m = masks->layers[t];
      if (m.rows() != current.rows() || m.cols() != current.cols())
        fail(ErrorKind::Shape, "dropout mask shape mismatch at layer " + std::to_string(t));
      current = current.cwiseProduct(m);
    }
    Matrix z = current * net.weights[t];
    z.rowwise() += net.biases[t].transpose();
    cache.inputs.push_back(std::move(current));
    if (t + 1 < n) current = z.cwiseMax(0.0);
    cache.pre_activations.push_back(std::move(z));
  }

  cache.output = log_softmax_rows(cache.pre_activations.back()).array().exp();
  return cache;
}

ForwardResult forward(const Network& net, std::span<const double> input, Mode mode, DropoutRates rates, Rng* rng) {
  if (input.size() != net.input_size())
    fail(ErrorKind::Shape, "input has " + std::to_string(input.size()) + " values, network expects " +
                               std::to_string(net.input_size()));
  const Matrix row = Eigen::Map<const Eigen::RowVectorXd>(input.data(), static_cast<Eigen::Index>(input.size()));

  DropoutMasks masks;
  if (mode == Mode::Train && (rates.input > 0.0 || rates.hidden > 0.0)) {
    if (rng == nullptr) fail(ErrorKind::Precondition, "train-mode forward with dropout needs a generator");
    check_rate(rates.input, "input dropout");
    check_rate(rates.hidden, "hidden dropout");
    masks = DropoutMasks::draw(net, 1, rates, *rng);
  }
  ForwardCache cache = forward_batch(net, row, masks.layers.empty() ? nullptr : &masks);

  ForwardResult result;
  result.output = cache.output.row(0).transpose();
  for (const Matrix& a : cache.inputs) result.activations.push_back(a.row(0).transpose());
  result.activations.push_back(result.output);
  return result;
}

double batch_loss(const Network& net, const Matrix& inputs, std::span<const int> labels, const DropoutMasks* masks) {
  check_batch(net, inputs, labels);
  const ForwardCache cache = forward_batch(net, inputs, masks);
  const Matrix logp = log_softmax_rows(cache.pre_activations.back());
  double total = 0.0;
  for (Eigen::Index r = 0; r < logp.rows(); ++r) total -= logp(r, labels[static_cast<std::size_t>(r)]);
  return total / static_cast<double>(logp.rows());
}

namespace {

Gradients backprop_from_cache(const Network& net, const ForwardCache& cache, std::span<const int> labels,
                              const DropoutMasks* masks) {
  const std::size_t n = net.transitions();
  const auto batch = static_cast<double>(cache.output.rows());

  Gradients grads;
  grads.weights.resize(n);
  grads.biases.resize(n);

  // d(mean CE)/dz for softmax output: (p - onehot) / batch.
  Matrix delta = cache.output;
  for (Eigen::Index r = 0; r < delta.rows(); ++r) delta(r, labels[static_cast<std::size_t>(r)]) -= 1.0;
  delta /= batch;

  for (std::size_t t = n; t-- > 0;) {
    grads.weights[t] = cache.inputs[t].transpose() * delta;
    grads.biases[t] = delta.colwise().sum().transpose();
    if (t == 0) break;
    Matrix upstream = delta * net.weights[t].transpose();
    if (masks && !masks->layers.empty() && masks->layers[t].size() != 0)
      upstream = upstream.cwiseProduct(masks->layers[t]);
    const Matrix& z = cache.pre_activations[t - 1];
    delta = (z.array() > 0.0).select(upstream, 0.0);
  }
  return grads;
}

}  // namespace

Gradients backprop_gradients(const Network& net, const Matrix& inputs, std::span<const int> labels,
                             const DropoutMasks* masks) {
  check_batch(net, inputs, labels);
  const ForwardCache cache = forward_batch(net, inputs, masks);
  return backprop_from_cache(net, cache, labels, masks);
}

void gdm_step(Network& net, const Gradients& grads, Velocity& vel, double lr, double momentum) {
  if (!grads.congruent_with(net)) fail(ErrorKind::Shape, "gradients are not shape-congruent with the network");
  if (!vel.congruent_with(net)) fail(ErrorKind::Shape, "velocity is not shape-congruent with the network");
  for (std::size_t t = 0; t < net.transitions(); ++t) {
    vel.weights[t] = momentum * vel.weights[t] - lr * grads.weights[t];
    net.weights[t] += vel.weights[t];
    vel.biases[t] = momentum * vel.biases[t] - lr * grads.biases[t];
    net.biases[t] += vel.biases[t];
  }
}

int argmax(std::span<const double> values) {
  if (values.empty()) fail(ErrorKind::InvalidInput, "argmax of an empty vector");
  int best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

int predict_class(const Network& net, std::span<const double> sample) {
  const ForwardResult r = forward(net, sample, Mode::Inference);
  return argmax(std::span<const double>(r.output.data(), static_cast<std::size_t>(r.output.size())));
}

TrainResult train(std::span<const std::size_t> layer_sizes, const LabeledSet& train_set, const TrainConfig& cfg,
                  std::uint64_t seed) {
  cfg.validate();
  if (train_set.empty()) fail(ErrorKind::InvalidInput, "training set is empty");
  if (layer_sizes.size() < 2) fail(ErrorKind::InvalidArchitecture, "layer spec needs an input and an output layer");
  if (train_set.feature_count() != layer_sizes.front())
    fail(ErrorKind::Shape, "training set has " + std::to_string(train_set.feature_count()) +
                               " features, input layer has " + std::to_string(layer_sizes.front()));
  if (static_cast<std::size_t>(train_set.class_count) != layer_sizes.back())
    fail(ErrorKind::Shape, "training set has " + std::to_string(train_set.class_count) +
                               " classes, output layer has " + std::to_string(layer_sizes.back()));

  TrainResult result;
  result.network = init_network(layer_sizes, cfg, seed);
  Network& net = result.network;
  Velocity vel = Velocity::zeros_like(net);
  Rng rng(mix64(seed ^ 0x5452414E53ULL));

  const std::size_t n = train_set.size();
  const auto batch_size = static_cast<std::size_t>(cfg.batch_size);
  const DropoutRates rates{cfg.input_dropout, cfg.hidden_dropout};
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  Matrix batch_x;
  std::vector<int> batch_y;
  for (int epoch = 0; epoch < cfg.epochs && !result.diverged; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t len = std::min(batch_size, n - start);
      batch_x.resize(static_cast<Eigen::Index>(len), train_set.features.cols());
      batch_y.resize(len);
      for (std::size_t i = 0; i < len; ++i) {
        const std::size_t row = order[start + i];
        batch_x.row(static_cast<Eigen::Index>(i)) = train_set.features.row(static_cast<Eigen::Index>(row));
        batch_y[i] = train_set.labels[row];
      }
      const DropoutMasks masks = DropoutMasks::draw(net, len, rates, rng);
      const ForwardCache cache = forward_batch(net, batch_x, &masks);
      if (!cache.output.allFinite()) {
        result.diverged = true;
        break;
      }
      const Gradients grads = backprop_from_cache(net, cache, batch_y, &masks);
      gdm_step(net, grads, vel, cfg.learning_rate, cfg.momentum);
      if (!net.all_finite()) {
        result.diverged = true;
        break;
      }
    }
  }

  result.training_error = result.diverged ? 100.0 : classification_error(net, train_set);
  return result;
}

}  // namespace archsearch
