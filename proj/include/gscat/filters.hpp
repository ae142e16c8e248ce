#pragma once

// Spectral wavelet filter banks satisfying the Littlewood-Paley identity
//   phi_hat(2^J w)^2 + sum_{j > -J} psi_hat(2^-j w)^2 = 1.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gscat/spectral.hpp"

namespace gscat {

enum class FilterKind { Shannon, Meyer };

std::string_view to_string(FilterKind kind) noexcept;
FilterKind parse_filter_kind(std::string_view name);

struct FilterFamily {
  FilterKind kind = FilterKind::Shannon;
  /// Decay constant: phi_hat(w) <= c_phi / |w|.
  double c_phi = 2.0;
  /// Lipschitz constant shared by phi_hat and psi_hat; absent for Shannon.
  std::optional<double> lipschitz;

  static FilterFamily shannon();
  static FilterFamily meyer();
  static FilterFamily of(FilterKind kind);

  /// Mother scaling function phi_hat(w), w >= 0.
  double lowpass_hat(double w) const;
  /// Mother wavelet psi_hat(w), w >= 0.
  double wavelet_hat(double w) const;
};

/// Half-open index range [begin, end) of eigenvalues where a filter is nonzero.
struct SpectralSupport {
  int begin = 0;
  int end = 0;
  int size() const noexcept { return end - begin; }
};

struct FilterBank {
  int J = 1;
  FilterFamily family;
  std::vector<int> scales;             // ascending, every j > -J with a band inside the spectrum
  Vector lowpass;                      // phi_hat(2^J lambda'_l)
  Matrix wavelets;                     // row s: psi_hat(2^-scales[s] lambda'_l)
  std::optional<double> normalization; // lambda' = normalization * lambda when present
  Vector evaluated_at;                 // lambda'_l
  SpectralSupport lowpass_support;
  std::vector<SpectralSupport> wavelet_supports;

  int n() const noexcept { return static_cast<int>(lowpass.size()); }
  int scale_count() const noexcept { return static_cast<int>(scales.size()); }
  /// Position of scale j in `scales`; throws UnknownScale.
  int scale_index(int j) const;
  Vector wavelet(int scale_position) const { return wavelets.row(scale_position).transpose(); }
};

/// Evaluates the filter family on the spectrum. With `normalize` the
/// eigenvalues are rescaled to lambda' = 2 lambda / lambda_max first, which
/// yields exactly the scales -J+1, ..., 0.
FilterBank build_filter_bank(const SpectralDecomposition& dec, int J, const FilterFamily& family,
                             bool normalize = true);

/// max_l |lowpass_l^2 + sum_j wavelet_{j,l}^2 - 1|
double littlewood_paley_deviation(const FilterBank& bank);

/// sum_l filter_values(l) u_l (u_l . f)
Vector apply_filter(const SpectralDecomposition& dec, const Vector& filter_values, const Vector& f);

/// Batched filtering from precomputed spectral coefficients: returns
/// U[:, S] diag(values[S]) coeffs[S, :] over the support S.
Matrix apply_filter_from_coefficients(const SpectralDecomposition& dec, const Vector& filter_values,
                                      const SpectralSupport& support, const Matrix& coeffs);

}  // namespace gscat
