#pragma once

// PCA and multinomial logistic regression, plus the MNIST feature pipeline.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gscat/graph.hpp"
#include "gscat/scattering.hpp"

namespace gscat {

struct PcaModel {
  Vector mean;        // d
  Matrix components;  // k x d, orthonormal rows
  Vector explained;   // k, descending variances

  int input_dim() const noexcept { return static_cast<int>(mean.size()); }
  int k() const noexcept { return static_cast<int>(components.rows()); }
};

/// Fits the top-k principal directions of the rows of X (s x d). Uses the
/// s x s Gram matrix when s < d. Throws KTooLarge unless 1 <= k <= min(s, d).
PcaModel pca_fit(const Matrix& X, int k);
Matrix pca_transform(const PcaModel& model, const Matrix& X);

struct SoftmaxConfig {
  double learning_rate = 0.1;
  int epochs = 200;
  double l2 = 1e-4;
  bool standardize = true;
  /// When set, every label in [0, num_classes) must occur (EmptyClass otherwise).
  std::optional<int> num_classes;
};

struct SoftmaxModel {
  std::vector<int> classes;   // label of each weight row, ascending
  Matrix weights;             // classes x (k + 1), bias in the last column
  Vector feature_mean;        // k
  Vector feature_scale;       // k, divides the centered features
  SoftmaxConfig config;
  std::vector<double> loss_history;  // loss before each epoch and after the last
};

/// L2-regularized mean cross-entropy and its gradient. `design` carries the
/// bias column; `targets` holds class positions. The bias is not penalized.
double softmax_loss(const Matrix& weights, const Matrix& design, const std::vector<int>& targets, double l2,
                    Matrix* gradient = nullptr);

/// Full-batch gradient descent from a small seeded initialization. Throws
/// StepTooLarge if an epoch increases the loss, EmptyClass, InvalidLabel.
SoftmaxModel softmax_train(const Matrix& X, const std::vector<int>& labels, const SoftmaxConfig& config,
                           std::uint64_t seed);
std::vector<int> softmax_predict(const SoftmaxModel& model, const Matrix& X);
double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

std::string to_json(const PcaModel& model);
std::string to_json(const SoftmaxModel& model);
PcaModel pca_from_json(std::string_view text);
SoftmaxModel softmax_from_json(std::string_view text);

struct MnistPipelineConfig {
  std::filesystem::path train_images, train_labels, test_images, test_labels;
  int train_n = 2000;
  int test_n = 500;
  int pca_k = 256;
  ScatteringConfig scattering;
  SoftmaxConfig softmax;
  /// Candidate L2 strengths chosen on a holdout split of the training set.
  std::vector<double> l2_grid{1e-4, 1e-3, 1e-2};
  double holdout_fraction = 0.1;
  std::uint64_t seed = 42;
};

struct MnistPipelineResult {
  int train_n = 0;
  int test_n = 0;
  int n = 0;
  int paths_per_channel = 0;
  int feature_dim = 0;
  int pca_k = 0;
  double chosen_l2 = 0.0;
  std::vector<double> holdout_accuracy;  // per l2_grid entry
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double seconds = 0.0;
};

/// Grid graph, scattering features per image, PCA, softmax.
MnistPipelineResult run_mnist_pipeline(const MnistPipelineConfig& config);

}  // namespace gscat
