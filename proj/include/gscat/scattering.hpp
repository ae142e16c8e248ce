#pragma once

// Windowed graph scattering: cascades of wavelet filtering and a pointwise
// nonlinearity, each node read out through the low-pass window.

#include <string>
#include <string_view>
#include <vector>

#include "gscat/filters.hpp"

namespace gscat {

/// Ordered list of wavelet scales; empty is the root path.
struct Path {
  std::vector<int> scales;

  std::size_t length() const noexcept { return scales.size(); }
  Path append(int j) const;
  /// "[]" or "[-2,-1]"
  std::string to_string() const;
  static Path parse(std::string_view text);

  friend bool operator==(const Path&, const Path&) = default;
};

enum class Nonlinearity { Modulus, SpectralModulus };

std::string_view to_string(Nonlinearity nl) noexcept;
Nonlinearity parse_nonlinearity(std::string_view name);

struct ScatteringConfig {
  int J = 3;
  int depth = 3;  // M: output paths have length 0 .. M-1
  FilterFamily family = FilterFamily::shannon();
  bool normalize = true;
  Nonlinearity nonlinearity = Nonlinearity::Modulus;

  /// Throws InvalidScaleParameter unless J >= 1 and depth >= 1.
  void validate() const;
};

FilterBank build_filter_bank(const SpectralDecomposition& dec, const ScatteringConfig& cfg);

/// All paths with length < depth over `scales`, layer by layer, each layer in
/// lexicographic order of scale positions.
std::vector<Path> enumerate_paths(const std::vector<int>& scales, int depth);

struct ScatteringOutput {
  std::vector<Path> paths;                         // breadth-first
  Matrix coefficients;                             // column k = S[paths[k]] f
  double frontier_energy = 0.0;                    // sum over |p| = M of ||U[p] f||^2
  std::vector<double> per_layer_output_energy;     // m = 0 .. M-1
  std::vector<double> per_layer_propagated_energy; // m = 0 .. M

  /// Throws UnknownScale if the path is not among the outputs.
  Vector coefficient(const Path& p) const;
  double total_output_energy() const;
};

/// Features for a batch of channels. Row (c * paths.size() + k) holds
/// S[paths[k]] f_c; columns are vertices. Rows of one channel are contiguous.
struct FeatureMatrix {
  using Data = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  int channels = 0;
  int n = 0;
  std::vector<Path> paths;
  Data data;
  Vector frontier_energy;  // per channel
  Matrix output_energy;     // channels x M
  Matrix propagated_energy; // channels x (M + 1)

  int path_count() const noexcept { return static_cast<int>(paths.size()); }
  auto row(int channel, int path_index) const { return data.row(channel * path_count() + path_index); }
  /// All features of one channel flattened path-major.
  Vector channel_features(int channel) const;
};

Vector modulus(const Vector& f);
/// sigma(f) = sum_l |u_l . f| u_l
Vector spectral_modulus(const SpectralDecomposition& dec, const Vector& f);
Vector apply_nonlinearity(const SpectralDecomposition& dec, Nonlinearity nl, const Vector& f);

/// U[p] f. Throws UnknownScale for scales missing from the bank.
Vector propagate(const SpectralDecomposition& dec, const FilterBank& bank, const Path& p, const Vector& f,
                 Nonlinearity nl = Nonlinearity::Modulus);

ScatteringOutput scatter(const SpectralDecomposition& dec, const FilterBank& bank, const Vector& f,
                         const ScatteringConfig& cfg);

/// Channelwise transform of the columns of F (n x D). Channels are processed
/// in fixed blocks, so results do not depend on the thread count.
FeatureMatrix scatter_batch(const SpectralDecomposition& dec, const FilterBank& bank, const Matrix& F,
                            const ScatteringConfig& cfg);

/// T_c f = sqrt(n) sum_l u_l(c) (u_l . f) u_l. Throws RepeatedEigenvalues when
/// the spectrum has a repeated eigenvalue.
Vector localize(const SpectralDecomposition& dec, const Vector& f, int c);

}  // namespace gscat
