#pragma once

// Graph generators and file readers: stochastic block models, pixel grids,
// MNIST IDX files, and CSV signals/features.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "gscat/graph.hpp"
#include "gscat/random.hpp"
#include "gscat/scattering.hpp"

namespace gscat {

struct SbmParams {
  int n_per_class = 10;
  int num_classes = 2;
  double p_in = 1.0;
  double p_out = 0.0;
  std::uint64_t seed = 42;

  int vertex_count() const noexcept { return n_per_class * num_classes; }
  /// Throws InvalidProbability unless 0 <= p_out <= p_in <= 1 (and sizes are positive).
  void validate() const;
};

inline constexpr int kSbmMaxAttempts = 100;

/// Unit-weight SBM; vertex v belongs to class v / n_per_class. Redraws the
/// whole graph until it is connected (at most kSbmMaxAttempts draws).
SimpleGraph sample_sbm(const SbmParams& params);
SimpleGraph sample_sbm(const SbmParams& params, Rng& rng);

struct GridSpec {
  int height = 28;
  int width = 28;
  double neighbor_radius = 1.4142135623730951;
};

/// Pixel grid with vertex index row * width + col; pixels within
/// neighbor_radius are joined with weight exp(-dist^2).
SimpleGraph build_grid_graph(const GridSpec& spec);

struct LabeledImages {
  int rows = 0;
  int cols = 0;
  Matrix images;            // count x (rows * cols), row-major pixels in [0, 1]
  std::vector<int> labels;  // 0 .. 9

  int count() const noexcept { return static_cast<int>(labels.size()); }
};

/// Reads a big-endian IDX image file (magic 0x803) and its label file (magic
/// 0x801). `limit` keeps only the first images.
LabeledImages read_idx_images(const std::filesystem::path& images, const std::filesystem::path& labels,
                              std::optional<int> limit = std::nullopt);

/// Headerless numeric CSV, one row per vertex, one column per channel.
Matrix read_signal_csv(std::istream& in);
Matrix read_signal_csv(const std::filesystem::path& path);
void write_signal_csv(const Matrix& F, std::ostream& out);
void write_signal_csv(const Matrix& F, const std::filesystem::path& path);

/// Header `channel,path,vertex_0,...`; the path column is quoted because it
/// contains commas, e.g. "[-2,-1]". 17 significant digits.
void write_feature_csv(const FeatureMatrix& features, std::ostream& out);
void write_feature_csv(const FeatureMatrix& features, const std::filesystem::path& path);

/// Formats a double with 17 significant digits.
std::string format_double(double x);

}  // namespace gscat
