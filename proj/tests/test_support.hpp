#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "archsearch/data_pipeline.hpp"
#include "archsearch/labeled_set.hpp"
#include "archsearch/mlp.hpp"

namespace archsearch::test {

// Oracles below use plain loops over the parameters and never call into the
// library's forward/backward code.

inline std::vector<double> naive_logits(const Network& net, const std::vector<double>& x,
                                        const std::vector<std::vector<double>>* masks = nullptr) {
  std::vector<double> a = x;
  const std::size_t n = net.weights.size();
  for (std::size_t t = 0; t < n; ++t) {
    if (masks && !(*masks)[t].empty())
      for (std::size_t i = 0; i < a.size(); ++i) a[i] *= (*masks)[t][i];
    const Matrix& w = net.weights[t];
    std::vector<double> z(static_cast<std::size_t>(w.cols()));
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      double s = net.biases[t](j);
      for (Eigen::Index i = 0; i < w.rows(); ++i) s += a[static_cast<std::size_t>(i)] * w(i, j);
      z[static_cast<std::size_t>(j)] = s;
    }
    if (t + 1 < n)
      for (double& v : z) v = v > 0.0 ? v : 0.0;
    a = std::move(z);
  }
  return a;
}

inline std::vector<double> naive_softmax(std::vector<double> z) {
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) sum += (v = std::exp(v - m));
  for (double& v : z) v /= sum;
  return z;
}

/// Mean cross-entropy over rows of `x`; masks[r][t] is the mask vector for
/// sample r at transition t (empty = none).
inline double naive_loss(const Network& net, const Matrix& x, const std::vector<int>& labels,
                         const std::vector<std::vector<std::vector<double>>>* masks = nullptr) {
  double total = 0.0;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(x.cols()));
    for (Eigen::Index c = 0; c < x.cols(); ++c) row[static_cast<std::size_t>(c)] = x(r, c);
    const auto z = naive_logits(net, row, masks ? &(*masks)[static_cast<std::size_t>(r)] : nullptr);
    const double m = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - m);
    total -= z[static_cast<std::size_t>(labels[static_cast<std::size_t>(r)])] - m - std::log(sum);
  }
  return total / static_cast<double>(x.rows());
}

/// Per-sample mask vectors from batch masks, in the layout naive_loss takes.
inline std::vector<std::vector<std::vector<double>>> per_sample_masks(const DropoutMasks& masks, Eigen::Index rows) {
  std::vector<std::vector<std::vector<double>>> out(static_cast<std::size_t>(rows));
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (const Matrix& m : masks.layers) {
      std::vector<double> v;
      if (m.size() != 0)
        for (Eigen::Index c = 0; c < m.cols(); ++c) v.push_back(m(r, c));
      out[static_cast<std::size_t>(r)].push_back(std::move(v));
    }
  }
  return out;
}

/// |a - n| / max(|a|, |n|, floor); the floor keeps exact zeros (dead units)
/// from turning finite-difference noise into a huge ratio.
inline double relative_error(double analytic, double numeric, double floor = 1e-7) {
  return std::fabs(analytic - numeric) / std::max({std::fabs(analytic), std::fabs(numeric), floor});
}

struct GradientCheck {
  double max_rel_error = 0.0;
  std::size_t parameters = 0;
};

/// Compares `grads` with central differences of naive_loss for every weight
/// and bias, masks held fixed.
inline GradientCheck check_gradients(const Network& net, const Gradients& grads, const Matrix& x,
                                     const std::vector<int>& labels, const DropoutMasks* masks, double h = 1e-5) {
  std::vector<std::vector<std::vector<double>>> sample_masks;
  if (masks) sample_masks = per_sample_masks(*masks, x.rows());
  const auto* mp = masks ? &sample_masks : nullptr;
  GradientCheck result;
  Network probe = net;
  auto central = [&](double& param) {
    const double saved = param;
    param = saved + h;
    const double up = naive_loss(probe, x, labels, mp);
    param = saved - h;
    const double down = naive_loss(probe, x, labels, mp);
    param = saved;
    return (up - down) / (2.0 * h);
  };
  for (std::size_t t = 0; t < net.weights.size(); ++t) {
    for (Eigen::Index i = 0; i < net.weights[t].rows(); ++i)
      for (Eigen::Index j = 0; j < net.weights[t].cols(); ++j) {
        const double numeric = central(probe.weights[t](i, j));
        result.max_rel_error = std::max(result.max_rel_error, relative_error(grads.weights[t](i, j), numeric));
        ++result.parameters;
      }
    for (Eigen::Index j = 0; j < net.biases[t].size(); ++j) {
      const double numeric = central(probe.biases[t](j));
      result.max_rel_error = std::max(result.max_rel_error, relative_error(grads.biases[t](j), numeric));
      ++result.parameters;
    }
  }
  return result;
}

/// Misclassification count by per-sample argmax (first maximum wins).
inline std::size_t naive_error_count(const Network& net, const LabeledSet& set) {
  std::size_t wrong = 0;
  for (std::size_t d = 0; d < set.size(); ++d) {
    std::vector<double> row(set.feature_count());
    for (std::size_t j = 0; j < row.size(); ++j)
      row[j] = set.features(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(j));
    const auto z = naive_logits(net, row);
    std::size_t best = 0;
    for (std::size_t p = 1; p < z.size(); ++p)
      if (z[p] > z[best]) best = p;
    if (static_cast<int>(best) != set.labels[d]) ++wrong;
  }
  return wrong;
}

inline Network random_network(const std::vector<std::size_t>& sizes, std::uint64_t seed, double bias_scale = 0.5) {
  TrainConfig cfg;
  Network net = init_network(sizes, cfg, seed);
  std::mt19937_64 gen(seed ^ 0xB1A5);
  std::uniform_real_distribution<double> u(-bias_scale, bias_scale);
  for (auto& b : net.biases)
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = u(gen);
  return net;
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double lo = -1.0,
                            double hi = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = u(gen);
  return m;
}

inline std::vector<int> random_labels(std::size_t n, int classes, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> u(0, classes - 1);
  std::vector<int> out(n);
  for (int& l : out) l = u(gen);
  return out;
}

/// Two Gaussian clusters (unit variance per feature) whose means are
/// `separation` standard deviations apart in Euclidean distance.
inline RawDataset two_gaussians(std::size_t n, std::size_t features, double separation, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double offset = separation / 2.0 / std::sqrt(static_cast<double>(features));
  RawDataset raw;
  raw.rows.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(features));
  for (std::size_t i = 0; i < n; ++i) {
    const int cls = static_cast<int>(i % 2);
    const double centre = cls == 0 ? -offset : offset;
    for (std::size_t j = 0; j < features; ++j)
      raw.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = centre + noise(gen);
    raw.labels.push_back(cls);
  }
  raw.label_map = {0, 1};
  return raw;
}

/// `classes` Gaussian blobs in `features` dimensions with well separated
/// random centres.
inline RawDataset gaussian_blobs(std::size_t n, std::size_t features, int classes, std::uint64_t seed,
                                 double spread = 0.5) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0.0, spread);
  std::uniform_real_distribution<double> centre(-3.0, 3.0);
  std::vector<std::vector<double>> centres(static_cast<std::size_t>(classes), std::vector<double>(features));
  for (auto& c : centres)
    for (double& v : c) v = centre(gen);
  RawDataset raw;
  raw.rows.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(features));
  for (std::size_t i = 0; i < n; ++i) {
    const int cls = static_cast<int>(i % static_cast<std::size_t>(classes));
    for (std::size_t j = 0; j < features; ++j)
      raw.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          centres[static_cast<std::size_t>(cls)][j] + noise(gen);
    raw.labels.push_back(cls);
  }
  for (int c = 0; c < classes; ++c) raw.label_map.push_back(c);
  return raw;
}

/// Two tight, far-apart clusters in 2-D: (0.2, 0.2) and (0.8, 0.8) +/- 0.05.
inline LabeledSet separable_toy(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  LabeledSet set;
  set.class_count = 2;
  set.features.resize(static_cast<Eigen::Index>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    const int cls = static_cast<int>(i % 2);
    const double c = cls == 0 ? 0.2 : 0.8;
    set.features(static_cast<Eigen::Index>(i), 0) = c + jitter(gen);
    set.features(static_cast<Eigen::Index>(i), 1) = c + jitter(gen);
    set.labels.push_back(cls);
  }
  return set;
}

inline void write_csv(const std::filesystem::path& path, const RawDataset& raw) {
  std::ofstream f(path);
  f.precision(17);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    for (Eigen::Index j = 0; j < raw.rows.cols(); ++j) f << raw.rows(static_cast<Eigen::Index>(i), j) << ',';
    f << raw.labels[i] << '\n';
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("archsearch_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace archsearch::test
