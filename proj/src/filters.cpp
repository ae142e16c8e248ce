#include "gscat/filters.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gscat/error.hpp"

namespace gscat {

namespace {

SpectralSupport support_of(const Vector& values) {
  int first = -1, last = -1;
  for (int l = 0; l < values.size(); ++l) {
    if (values(l) != 0.0) {
      if (first < 0) first = l;
      last = l;
    }
  }
  if (first < 0) return {0, 0};
  return {first, last + 1};
}

// Largest j with 2^j < top, i.e. the last dyadic band (2^j, ...] that still
// meets [0, top].
int last_scale_below(double top) {
  int j = 0;
  while (std::ldexp(1.0, j) < top) ++j;
  while (std::ldexp(1.0, j) >= top) --j;
  return j;
}

}  // namespace

std::string_view to_string(FilterKind kind) noexcept {
  return kind == FilterKind::Shannon ? "shannon" : "meyer";
}

FilterKind parse_filter_kind(std::string_view name) {
  if (name == "shannon") return FilterKind::Shannon;
  if (name == "meyer") return FilterKind::Meyer;
  throw Error(ErrorCode::InvalidScaleParameter, "unknown wavelet family '" + std::string(name) + "'");
}

FilterFamily FilterFamily::shannon() { return {FilterKind::Shannon, 2.0, std::nullopt}; }

// psi_hat = sin((pi/2) log2 w) on (1, 2] has slope at most pi / (2 ln 2); the
// cosine pieces are flatter.
FilterFamily FilterFamily::meyer() {
  return {FilterKind::Meyer, 4.0, std::numbers::pi / (2.0 * std::numbers::ln2)};
}

FilterFamily FilterFamily::of(FilterKind kind) { return kind == FilterKind::Shannon ? shannon() : meyer(); }

double FilterFamily::lowpass_hat(double w) const {
  if (w < 0.0) w = -w;
  if (w <= 2.0) return 1.0;
  if (kind == FilterKind::Meyer && w < 4.0) return std::cos(0.5 * std::numbers::pi * (std::log2(w) - 1.0));
  return 0.0;
}

double FilterFamily::wavelet_hat(double w) const {
  if (w < 0.0) w = -w;
  if (w <= 1.0) return 0.0;
  if (w <= 2.0) return kind == FilterKind::Shannon ? 1.0 : std::sin(0.5 * std::numbers::pi * std::log2(w));
  if (kind == FilterKind::Meyer && w < 4.0) return std::cos(0.5 * std::numbers::pi * (std::log2(w) - 1.0));
  return 0.0;
}

int FilterBank::scale_index(int j) const {
  for (std::size_t s = 0; s < scales.size(); ++s)
    if (scales[s] == j) return static_cast<int>(s);
  throw Error(ErrorCode::UnknownScale, "scale " + std::to_string(j) + " is not in the filter bank");
}

FilterBank build_filter_bank(const SpectralDecomposition& dec, int J, const FilterFamily& family,
                             bool normalize) {
  if (J < 1) throw Error(ErrorCode::InvalidScaleParameter, "J must be >= 1, got " + std::to_string(J));
  const double lmax = dec.lambda_max();
  if (!(lmax > 0.0)) throw Error(ErrorCode::DegenerateSpectrum, "lambda_max <= 0");

  FilterBank bank;
  bank.J = J;
  bank.family = family;
  const int n = dec.n();
  bank.evaluated_at = dec.eigenvalues();
  if (normalize) {
    const double s = 2.0 / lmax;
    bank.normalization = s;
    bank.evaluated_at *= s;
    bank.evaluated_at(n - 1) = 2.0;
  }
  const double top = bank.evaluated_at(n - 1);

  for (int j = -J + 1; j <= last_scale_below(top); ++j) bank.scales.push_back(j);

  bank.lowpass.resize(n);
  for (int l = 0; l < n; ++l) bank.lowpass(l) = family.lowpass_hat(std::ldexp(bank.evaluated_at(l), J));
  bank.wavelets.resize(static_cast<Eigen::Index>(bank.scales.size()), n);
  for (std::size_t s = 0; s < bank.scales.size(); ++s) {
    for (int l = 0; l < n; ++l) {
      bank.wavelets(static_cast<Eigen::Index>(s), l) =
          family.wavelet_hat(std::ldexp(bank.evaluated_at(l), -bank.scales[s]));
    }
  }
  bank.lowpass_support = support_of(bank.lowpass);
  for (std::size_t s = 0; s < bank.scales.size(); ++s) {
    bank.wavelet_supports.push_back(support_of(bank.wavelet(static_cast<int>(s))));
  }
  return bank;
}

double littlewood_paley_deviation(const FilterBank& bank) {
  double worst = 0.0;
  for (int l = 0; l < bank.n(); ++l) {
    double total = bank.lowpass(l) * bank.lowpass(l);
    for (Eigen::Index s = 0; s < bank.wavelets.rows(); ++s) total += bank.wavelets(s, l) * bank.wavelets(s, l);
    worst = std::max(worst, std::abs(total - 1.0));
  }
  return worst;
}

Vector apply_filter(const SpectralDecomposition& dec, const Vector& filter_values, const Vector& f) {
  if (filter_values.size() != dec.n() || f.size() != dec.n()) {
    throw Error(ErrorCode::LengthMismatch, "apply_filter: filter or signal length != n");
  }
  const Vector coeffs = dec.eigenvectors().transpose() * f;
  return dec.eigenvectors() * filter_values.cwiseProduct(coeffs);
}

Matrix apply_filter_from_coefficients(const SpectralDecomposition& dec, const Vector& filter_values,
                                      const SpectralSupport& support, const Matrix& coeffs) {
  if (filter_values.size() != dec.n() || coeffs.rows() != dec.n()) {
    throw Error(ErrorCode::LengthMismatch, "apply_filter_from_coefficients: size != n");
  }
  if (support.size() == 0) return Matrix::Zero(dec.n(), coeffs.cols());
  const auto lo = support.begin;
  const auto len = support.size();
  return dec.eigenvectors().middleCols(lo, len) *
         (filter_values.segment(lo, len).asDiagonal() * coeffs.middleRows(lo, len));
}

}  // namespace gscat
