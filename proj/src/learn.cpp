#include "gscat/learn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include <json.hpp>

#include "gscat/datasets.hpp"
#include "gscat/error.hpp"
#include "gscat/random.hpp"
#include "gscat/spectral.hpp"

namespace gscat {

namespace {

using nlohmann::json;

constexpr double kStandardizeEps = 1e-8;

// Modified Gram-Schmidt over rows, run twice. Rows that vanish are replaced
// by the first standard basis vector that is still independent.
void orthonormalize_rows(Matrix& rows) {
  const Eigen::Index k = rows.rows(), d = rows.cols();
  Eigen::Index next_basis = 0;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < i; ++j) rows.row(i) -= rows.row(i).dot(rows.row(j)) * rows.row(j);
    }
    double norm = rows.row(i).norm();
    while (norm < 1e-6 && next_basis < d) {
      rows.row(i).setZero();
      rows(i, next_basis++) = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index j = 0; j < i; ++j) rows.row(i) -= rows.row(i).dot(rows.row(j)) * rows.row(j);
      }
      norm = rows.row(i).norm();
    }
    rows.row(i) /= norm;
  }
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Matrix matrix_from_json(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.at(0).size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols) throw Error(ErrorCode::RaggedRows, "ragged matrix in JSON");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

Vector vector_from_json(const json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j.at(static_cast<std::size_t>(i)).get<double>();
  return v;
}

template <class F>
auto parse_json(std::string_view text, F&& body) {
  try {
    return body(json::parse(text));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedLine, std::string("model JSON: ") + e.what());
  }
}

Matrix standardized_design(const SoftmaxModel& model, const Matrix& X) {
  if (X.cols() != model.feature_mean.size()) {
    throw Error(ErrorCode::ShapeMismatch, "feature count differs from the trained model");
  }
  Matrix design(X.rows(), X.cols() + 1);
  design.leftCols(X.cols()) =
      (X.rowwise() - model.feature_mean.transpose()).array().rowwise() / model.feature_scale.transpose().array();
  design.col(X.cols()).setOnes();
  return design;
}

Matrix scattering_features(const SpectralDecomposition& dec, const FilterBank& bank, const ScatteringConfig& cfg,
                           const Matrix& images) {
  constexpr Eigen::Index kChunk = 256;
  const int paths = static_cast<int>(enumerate_paths(bank.scales, cfg.depth).size());
  Matrix X(images.rows(), static_cast<Eigen::Index>(paths) * dec.n());
  for (Eigen::Index first = 0; first < images.rows(); first += kChunk) {
    const Eigen::Index count = std::min(kChunk, images.rows() - first);
    const FeatureMatrix fm = scatter_batch(dec, bank, images.middleRows(first, count).transpose(), cfg);
    for (Eigen::Index i = 0; i < count; ++i) X.row(first + i) = fm.channel_features(static_cast<int>(i)).transpose();
  }
  return X;
}

Matrix take_rows(const Matrix& X, const std::vector<int>& idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), X.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(idx[i]);
  return out;
}

std::vector<int> take(const std::vector<int>& v, const std::vector<int>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(v[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace

PcaModel pca_fit(const Matrix& X, int k) {
  const Eigen::Index s = X.rows(), d = X.cols();
  if (k < 1 || k > std::min(s, d)) {
    throw Error(ErrorCode::KTooLarge, "k = " + std::to_string(k) + " but data is " + std::to_string(s) + " x " +
                                          std::to_string(d));
  }
  PcaModel model;
  model.mean = X.colwise().mean().transpose();
  const Matrix centered = X.rowwise() - model.mean.transpose();

  Vector values;
  Matrix directions(k, d);  // rows, unnormalized for the Gram route
  if (s < d) {
    Matrix gram = Matrix::Zero(s, s);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(centered);
    auto eig = symmetric_eigen(Matrix(gram.selfadjointView<Eigen::Lower>()));
    values = eig.values.tail(k).reverse();
    const Matrix top = eig.vectors.rightCols(k).rowwise().reverse();
    directions = (centered.transpose() * top).transpose();
    const double floor = 1e-12 * std::max(eig.values(s - 1), std::numeric_limits<double>::min());
    for (int r = 0; r < k; ++r) {
      if (values(r) > floor) directions.row(r) /= std::sqrt(values(r));
      else directions.row(r).setZero();
    }
  } else {
    Matrix cov = Matrix::Zero(d, d);
    cov.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose());
    auto eig = symmetric_eigen(Matrix(cov.selfadjointView<Eigen::Lower>()));
    values = eig.values.tail(k).reverse();
    directions = eig.vectors.rightCols(k).rowwise().reverse().transpose();
  }
  orthonormalize_rows(directions);
  Matrix cols = directions.transpose();
  apply_sign_convention(cols);
  model.components = cols.transpose();
  model.explained = values.cwiseMax(0.0) / (s > 1 ? static_cast<double>(s - 1) : 1.0);
  if (s == 1) model.explained.setZero();
  return model;
}

Matrix pca_transform(const PcaModel& model, const Matrix& X) {
  if (X.cols() != model.input_dim()) throw Error(ErrorCode::ShapeMismatch, "PCA input dimension mismatch");
  return (X.rowwise() - model.mean.transpose()) * model.components.transpose();
}

double softmax_loss(const Matrix& weights, const Matrix& design, const std::vector<int>& targets, double l2,
                    Matrix* gradient) {
  const Eigen::Index s = design.rows();
  const Eigen::Index k = design.cols() - 1;
  Matrix prob = design * weights.transpose();  // s x C
  double loss = 0.0;
  for (Eigen::Index i = 0; i < s; ++i) {
    const double peak = prob.row(i).maxCoeff();
    prob.row(i) = (prob.row(i).array() - peak).exp().matrix();
    const double z = prob.row(i).sum();
    const int t = targets[static_cast<std::size_t>(i)];
    loss -= std::log(prob(i, t) / z);
    prob.row(i) /= z;
  }
  loss /= static_cast<double>(s);
  loss += 0.5 * l2 * weights.leftCols(k).squaredNorm();
  if (gradient) {
    for (Eigen::Index i = 0; i < s; ++i) prob(i, targets[static_cast<std::size_t>(i)]) -= 1.0;
    *gradient = prob.transpose() * design / static_cast<double>(s);
    gradient->leftCols(k) += l2 * weights.leftCols(k);
  }
  return loss;
}

SoftmaxModel softmax_train(const Matrix& X, const std::vector<int>& labels, const SoftmaxConfig& config,
                           std::uint64_t seed) {
  if (static_cast<std::size_t>(X.rows()) != labels.size() || labels.empty()) {
    throw Error(ErrorCode::ShapeMismatch, "need one label per sample");
  }
  if (!(config.learning_rate > 0.0) || config.epochs < 0 || config.l2 < 0.0) {
    throw Error(ErrorCode::InvalidScaleParameter, "invalid softmax training config");
  }
  SoftmaxModel model;
  model.config = config;
  for (int y : labels)
    if (y < 0) throw Error(ErrorCode::InvalidLabel, "negative label " + std::to_string(y));
  if (config.num_classes) {
    std::vector<int> seen(static_cast<std::size_t>(*config.num_classes), 0);
    for (int y : labels) {
      if (y >= *config.num_classes) throw Error(ErrorCode::InvalidLabel, "label " + std::to_string(y) + " out of range");
      seen[static_cast<std::size_t>(y)] = 1;
    }
    for (int c = 0; c < *config.num_classes; ++c) {
      if (!seen[static_cast<std::size_t>(c)]) throw Error(ErrorCode::EmptyClass, "class " + std::to_string(c) + " has no samples");
      model.classes.push_back(c);
    }
  } else {
    model.classes = labels;
    std::sort(model.classes.begin(), model.classes.end());
    model.classes.erase(std::unique(model.classes.begin(), model.classes.end()), model.classes.end());
  }
  std::vector<int> targets;
  targets.reserve(labels.size());
  for (int y : labels) {
    targets.push_back(static_cast<int>(std::lower_bound(model.classes.begin(), model.classes.end(), y) -
                                       model.classes.begin()));
  }

  const Eigen::Index k = X.cols();
  model.feature_mean = Vector::Zero(k);
  model.feature_scale = Vector::Ones(k);
  if (config.standardize) {
    model.feature_mean = X.colwise().mean().transpose();
    const Vector var = (X.rowwise() - model.feature_mean.transpose()).colwise().squaredNorm().transpose() /
                       static_cast<double>(X.rows());
    model.feature_scale = (var.array().sqrt() + kStandardizeEps).matrix();
  }
  const Matrix design = standardized_design(model, X);

  const auto C = static_cast<Eigen::Index>(model.classes.size());
  Rng rng = make_rng(seed);
  model.weights.resize(C, k + 1);
  for (Eigen::Index i = 0; i < C; ++i)
    for (Eigen::Index j = 0; j <= k; ++j) model.weights(i, j) = 0.01 * normal(rng);

  Matrix grad;
  double loss = softmax_loss(model.weights, design, targets, config.l2, &grad);
  model.loss_history.push_back(loss);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    model.weights -= config.learning_rate * grad;
    const double next = softmax_loss(model.weights, design, targets, config.l2, &grad);
    if (!std::isfinite(next) || next > loss + 1e-12 * std::max(1.0, std::abs(loss))) {
      throw Error(ErrorCode::StepTooLarge, "loss rose from " + std::to_string(loss) + " to " +
                                               std::to_string(next) + " at epoch " + std::to_string(epoch + 1));
    }
    loss = next;
    model.loss_history.push_back(loss);
  }
  return model;
}

std::vector<int> softmax_predict(const SoftmaxModel& model, const Matrix& X) {
  const Matrix logits = standardized_design(model, X) * model.weights.transpose();
  std::vector<int> out(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index best = 0;
    logits.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = model.classes[static_cast<std::size_t>(best)];
  }
  return out;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) throw Error(ErrorCode::LengthMismatch, "prediction count mismatch");
  if (truth.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

std::string to_json(const PcaModel& model) {
  json j;
  j["mean"] = vector_to_json(model.mean);
  j["components"] = matrix_to_json(model.components);
  j["explained"] = vector_to_json(model.explained);
  return j.dump();
}

std::string to_json(const SoftmaxModel& model) {
  json j;
  j["classes"] = model.classes;
  j["weights"] = matrix_to_json(model.weights);
  j["feature_mean"] = vector_to_json(model.feature_mean);
  j["feature_scale"] = vector_to_json(model.feature_scale);
  j["training_config"] = {{"learning_rate", model.config.learning_rate},
                          {"epochs", model.config.epochs},
                          {"l2", model.config.l2},
                          {"standardize", model.config.standardize}};
  j["loss_history"] = model.loss_history;
  return j.dump();
}

PcaModel pca_from_json(std::string_view text) {
  return parse_json(text, [](const json& j) {
    PcaModel m;
    m.mean = vector_from_json(j.at("mean"));
    m.components = matrix_from_json(j.at("components"));
    m.explained = vector_from_json(j.at("explained"));
    return m;
  });
}

SoftmaxModel softmax_from_json(std::string_view text) {
  return parse_json(text, [](const json& j) {
    SoftmaxModel m;
    m.classes = j.at("classes").get<std::vector<int>>();
    m.weights = matrix_from_json(j.at("weights"));
    m.feature_mean = vector_from_json(j.at("feature_mean"));
    m.feature_scale = vector_from_json(j.at("feature_scale"));
    const auto& cfg = j.at("training_config");
    m.config.learning_rate = cfg.at("learning_rate").get<double>();
    m.config.epochs = cfg.at("epochs").get<int>();
    m.config.l2 = cfg.at("l2").get<double>();
    m.config.standardize = cfg.at("standardize").get<bool>();
    m.loss_history = j.at("loss_history").get<std::vector<double>>();
    return m;
  });
}

MnistPipelineResult run_mnist_pipeline(const MnistPipelineConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const LabeledImages train = read_idx_images(config.train_images, config.train_labels, config.train_n);
  const LabeledImages test = read_idx_images(config.test_images, config.test_labels, config.test_n);
  if (train.count() < config.train_n || test.count() < config.test_n) {
    throw Error(ErrorCode::CountMismatch, "not enough images for the requested train/test sizes");
  }
  if (train.rows != test.rows || train.cols != test.cols) {
    throw Error(ErrorCode::ShapeMismatch, "train and test images differ in size");
  }

  const SimpleGraph grid = build_grid_graph({train.rows, train.cols});
  const SpectralDecomposition dec = decompose(grid);
  const FilterBank bank = build_filter_bank(dec, config.scattering);

  MnistPipelineResult result;
  result.train_n = train.count();
  result.test_n = test.count();
  result.n = dec.n();
  result.paths_per_channel = static_cast<int>(enumerate_paths(bank.scales, config.scattering.depth).size());
  result.feature_dim = result.paths_per_channel * dec.n();

  const Matrix x_train = scattering_features(dec, bank, config.scattering, train.images);
  const Matrix x_test = scattering_features(dec, bank, config.scattering, test.images);

  // Holdout split of the training set picks the L2 strength.
  std::vector<int> order(static_cast<std::size_t>(train.count()));
  std::iota(order.begin(), order.end(), 0);
  Rng rng = derive_rng(config.seed, {0x401d});
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
  const auto held = static_cast<std::size_t>(std::lround(config.holdout_fraction * static_cast<double>(order.size())));
  result.chosen_l2 = config.softmax.l2;
  if (held > 0 && held < order.size() && !config.l2_grid.empty()) {
    const std::vector<int> fit_idx(order.begin(), order.end() - static_cast<std::ptrdiff_t>(held));
    const std::vector<int> hold_idx(order.end() - static_cast<std::ptrdiff_t>(held), order.end());
    const Matrix x_fit = take_rows(x_train, fit_idx);
    const int k_fit = std::min<int>(config.pca_k, static_cast<int>(std::min(x_fit.rows(), x_fit.cols())));
    const PcaModel pca = pca_fit(x_fit, k_fit);
    const Matrix z_fit = pca_transform(pca, x_fit);
    const Matrix z_hold = pca_transform(pca, take_rows(x_train, hold_idx));
    double best = -1.0;
    for (double l2 : config.l2_grid) {
      SoftmaxConfig sc = config.softmax;
      sc.l2 = l2;
      const SoftmaxModel m = softmax_train(z_fit, take(train.labels, fit_idx), sc, config.seed);
      const double acc = accuracy(softmax_predict(m, z_hold), take(train.labels, hold_idx));
      result.holdout_accuracy.push_back(acc);
      if (acc > best) {
        best = acc;
        result.chosen_l2 = l2;
      }
    }
  }

  const PcaModel pca = pca_fit(x_train, config.pca_k);
  result.pca_k = pca.k();
  const Matrix z_train = pca_transform(pca, x_train);
  SoftmaxConfig sc = config.softmax;
  sc.l2 = result.chosen_l2;
  const SoftmaxModel model = softmax_train(z_train, train.labels, sc, config.seed);
  result.train_accuracy = accuracy(softmax_predict(model, z_train), train.labels);
  result.test_accuracy = accuracy(softmax_predict(model, pca_transform(pca, x_test)), test.labels);
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace gscat
