#include "gscat/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gscat/error.hpp"
#include "gscat/random.hpp"

namespace gscat {

namespace {

constexpr double kCertificateTol = 1e-8;
constexpr double kSignTieTol = 1e-9;

void require_length(const SpectralDecomposition& dec, Eigen::Index len, const char* what) {
  if (len != dec.n()) {
    throw Error(ErrorCode::LengthMismatch, std::string(what) + ": length " + std::to_string(len) +
                                               " != " + std::to_string(dec.n()));
  }
}

}  // namespace

void apply_sign_convention(Matrix& vectors) {
  for (Eigen::Index l = 0; l < vectors.cols(); ++l) {
    auto col = vectors.col(l);
    const double peak = col.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < col.size(); ++k) {
      if (std::abs(col(k)) >= peak * (1.0 - kSignTieTol)) {
        if (col(k) < 0) col = -col;
        break;
      }
    }
  }
}

SpectralDecomposition::SpectralDecomposition(Vector eigenvalues, Matrix eigenvectors, double residual)
    : eigenvalues_(std::move(eigenvalues)), eigenvectors_(std::move(eigenvectors)), residual_(residual) {
  if (eigenvectors_.rows() != eigenvalues_.size() || eigenvectors_.cols() != eigenvalues_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "eigenvector matrix must be n x n");
  }
}

double SpectralDecomposition::clamp_threshold() const noexcept {
  return kCertificateTol * std::max(1.0, lambda_max());
}

SpectralDecomposition decompose(const SimpleGraph& g) {
  const Matrix& lap = g.laplacian();
  auto eig = symmetric_eigen(lap);
  const Eigen::Index n = eig.values.size();
  const double lmax = eig.values(n - 1);
  const double threshold = kCertificateTol * std::max(1.0, lmax);

  if (std::abs(eig.values(0)) > threshold) {
    throw Error(ErrorCode::KernelDimensionNotOne,
                "smallest Laplacian eigenvalue " + std::to_string(eig.values(0)) + " is not zero");
  }
  if (eig.values(1) <= threshold) {
    throw Error(ErrorCode::KernelDimensionNotOne,
                "second eigenvalue " + std::to_string(eig.values(1)) + " is below the clamp threshold");
  }
  eig.values(0) = 0.0;
  apply_sign_convention(eig.vectors);

  const Matrix residual_cols = lap * eig.vectors - eig.vectors * eig.values.asDiagonal();
  const double residual = residual_cols.colwise().norm().maxCoeff();
  const double orth = (eig.vectors.transpose() * eig.vectors - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (residual > threshold || orth > kCertificateTol) {
    throw Error(ErrorCode::NoConvergence, "eigendecomposition certificate failed: residual " +
                                              std::to_string(residual) + ", orthogonality " +
                                              std::to_string(orth));
  }
  return SpectralDecomposition(std::move(eig.values), std::move(eig.vectors), residual);
}

SpectralCoefficients gft(const SpectralDecomposition& dec, const Vector& f) {
  require_length(dec, f.size(), "gft");
  return {dec.eigenvectors().transpose() * f};
}

Vector igft(const SpectralDecomposition& dec, const SpectralCoefficients& fhat) {
  require_length(dec, fhat.values.size(), "igft");
  return dec.eigenvectors() * fhat.values;
}

Vector convolve(const SpectralDecomposition& dec, const Vector& f1, const Vector& f2) {
  require_length(dec, f1.size(), "convolve");
  require_length(dec, f2.size(), "convolve");
  const Vector h1 = dec.eigenvectors().transpose() * f1;
  const Vector h2 = dec.eigenvectors().transpose() * f2;
  return dec.eigenvectors() * h1.cwiseProduct(h2);
}

double spectral_gap(const SpectralDecomposition& dec) {
  const auto& ev = dec.eigenvalues();
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index l = 1; l < ev.size(); ++l) gap = std::min(gap, ev(l) - ev(l - 1));
  if (gap <= dec.clamp_threshold()) return 0.0;
  return gap;
}

EigenpairDeviation eigenpair_deviation(const SpectralDecomposition& a, const SpectralDecomposition& b) {
  if (a.n() != b.n()) throw Error(ErrorCode::LengthMismatch, "decompositions have different sizes");
  EigenpairDeviation out;
  for (int l = 0; l < a.n(); ++l) {
    out.max_eigenvalue_gap = std::max(out.max_eigenvalue_gap, std::abs(a.eigenvalue(l) - b.eigenvalue(l)));
    const Vector ua = a.eigenvector(l), ub = b.eigenvector(l);
    out.max_sine_angle = std::max(out.max_sine_angle, (ub - ua.dot(ub) * ua).norm());
  }
  return out;
}

double operator_norm(const Matrix& a, double tol, int max_iterations, std::uint64_t seed) {
  if (a.size() == 0) return 0.0;
  Rng rng = make_rng(seed);
  Vector x(a.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = uniform(rng, 0.5, 1.5) * (i % 2 == 0 ? 1.0 : -1.0);
  x.normalize();
  double estimate = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    const Vector y = a.transpose() * (a * x);
    const double rayleigh = x.dot(y);  // ||A x||^2 for unit x
    const double norm_y = y.norm();
    if (norm_y == 0.0) return 0.0;
    x = y / norm_y;
    if (std::abs(rayleigh - estimate) <= tol * std::max(rayleigh, std::numeric_limits<double>::min())) {
      estimate = rayleigh;
      break;
    }
    estimate = rayleigh;
  }
  // Final Rayleigh quotient from the converged direction.
  return std::max(std::sqrt(estimate), (a * x).norm());
}

}  // namespace gscat
