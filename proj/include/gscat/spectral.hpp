#pragma once

// Laplacian eigendecomposition and the graph Fourier machinery built on it.

#include <cstdint>

#include "gscat/graph.hpp"

namespace gscat {

struct SymmetricEigenResult {
  Vector values;   // ascending
  Matrix vectors;  // column l pairs with values(l)
};

/// Dense symmetric eigensolver: Householder tridiagonalization followed by
/// implicitly shifted QL. Throws NoConvergence when one eigenvalue needs more
/// than `max_iterations` QL sweeps.
SymmetricEigenResult symmetric_eigen(const Matrix& a, int max_iterations = 60);

/// Flips each column so its largest-magnitude entry is positive. Entries within
/// a relative 1e-9 of the maximum count as ties; the lowest index wins.
void apply_sign_convention(Matrix& vectors);

class SpectralDecomposition {
 public:
  SpectralDecomposition(Vector eigenvalues, Matrix eigenvectors, double residual);

  int n() const noexcept { return static_cast<int>(eigenvalues_.size()); }
  const Vector& eigenvalues() const noexcept { return eigenvalues_; }
  const Matrix& eigenvectors() const noexcept { return eigenvectors_; }
  double eigenvalue(int l) const { return eigenvalues_(l); }
  auto eigenvector(int l) const { return eigenvectors_.col(l); }
  /// max_l ||L u_l - lambda_l u_l||_2 measured at construction.
  double residual() const noexcept { return residual_; }
  double lambda_max() const noexcept { return eigenvalues_(eigenvalues_.size() - 1); }
  /// Threshold for treating eigenvalues as zero or as equal: 1e-8 * max(1, lambda_max).
  double clamp_threshold() const noexcept;

 private:
  Vector eigenvalues_;
  Matrix eigenvectors_;
  double residual_;
};

/// Full eigendecomposition of g's Laplacian with residual and orthonormality
/// certificates, lambda_0 clamped to 0, and the sign convention applied.
SpectralDecomposition decompose(const SimpleGraph& g);

struct SpectralCoefficients {
  Vector values;
};

SpectralCoefficients gft(const SpectralDecomposition& dec, const Vector& f);
Vector igft(const SpectralDecomposition& dec, const SpectralCoefficients& fhat);

/// f1 * f2 = sum_l u_l (u_l . f1)(u_l . f2)
Vector convolve(const SpectralDecomposition& dec, const Vector& f1, const Vector& f2);

/// Smallest distance between distinct eigenvalues; 0 if any eigenvalue repeats
/// within the decomposition's clamp threshold.
double spectral_gap(const SpectralDecomposition& dec);

struct EigenpairDeviation {
  double max_eigenvalue_gap = 0.0;
  double max_sine_angle = 0.0;
};

/// Compares eigenpairs index by index; sin(angle) = sqrt(max(0, 1 - (u.v)^2)).
EigenpairDeviation eigenpair_deviation(const SpectralDecomposition& a, const SpectralDecomposition& b);

/// ||A||_2 by power iteration on A^T A, stopping when the Rayleigh quotient
/// changes by less than `tol` (relative).
double operator_norm(const Matrix& a, double tol = 1e-12, int max_iterations = 100000,
                     std::uint64_t seed = 0x5eed);

}  // namespace gscat
