#pragma once

// Simple weighted graphs: symmetric nonnegative weights, zero diagonal,
// connected over strictly positive entries. Dense storage throughout.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace gscat {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kDefaultSymmetryTol = 1e-10;

class SimpleGraph {
 public:
  int n() const noexcept { return static_cast<int>(weights_.rows()); }
  const Matrix& weights() const noexcept { return weights_; }
  const Vector& degrees() const noexcept { return degrees_; }
  const Matrix& laplacian() const noexcept { return laplacian_; }

  /// Number of unordered pairs with strictly positive weight.
  std::size_t edge_count() const;

  friend SimpleGraph validate(const Matrix& raw_weights, double symmetry_tol);

 private:
  explicit SimpleGraph(Matrix weights);

  Matrix weights_;
  Vector degrees_;
  Matrix laplacian_;
};

/// Checks the simple-graph invariants and builds D and L = D - W.
/// Asymmetry up to `symmetry_tol` (absolute) is averaged away; anything larger
/// is rejected.
SimpleGraph validate(const Matrix& raw_weights, double symmetry_tol = kDefaultSymmetryTol);

/// True when the graph over strictly positive entries of `weights` is connected.
bool is_connected(const Matrix& weights);

/// A vertex relabeling. Acting on signals, (P f)[i] = f[mapping[i]], i.e. the
/// matrix P has P(i, mapping[i]) = 1.
class Permutation {
 public:
  explicit Permutation(std::vector<int> mapping);

  static Permutation identity(int n);
  template <class Rng>
  static Permutation random(int n, Rng& rng);

  int size() const noexcept { return static_cast<int>(mapping_.size()); }
  std::span<const int> mapping() const noexcept { return mapping_; }
  int operator[](int i) const { return mapping_[static_cast<std::size_t>(i)]; }

  Permutation inverse() const;
  /// Applying the result to a signal equals applying *this, then `next`.
  Permutation then(const Permutation& next) const;
  bool is_identity() const;
  Matrix matrix() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> mapping_;
};

/// Returns the graph with weights P W P^T.
SimpleGraph apply_permutation(const SimpleGraph& g, const Permutation& p);
/// Returns P f.
Vector permute_signal(const Vector& f, const Permutation& p);
/// Applies P to every column of F.
Matrix permute_rows(const Matrix& F, const Permutation& p);

struct WeightPerturbation {
  Matrix delta;  // symmetric, zero diagonal
  double c_sharp = 0.0;

  /// L - L~ where L~ is the Laplacian of W + delta.
  Matrix laplacian_difference() const;
};

/// Samples delta(n,m) uniformly in [-c_sharp/n^2, c_sharp/n^2] for every pair
/// n < m, clipping so that W + delta stays nonnegative.
std::pair<SimpleGraph, WeightPerturbation> perturb_weights(const SimpleGraph& g, double c_sharp,
                                                           std::uint64_t rng_seed);

/// Applies an explicit perturbation (delta must be symmetric with zero diagonal).
SimpleGraph apply_perturbation(const SimpleGraph& g, const WeightPerturbation& perturbation);

/// Removes the edge {u, v} if present, otherwise adds it with weight 1.
SimpleGraph flip_edge(const SimpleGraph& g, int u, int v);

// Edge-list text format: `u<TAB>v[<TAB>weight]`, 0-indexed ids, `#` comments,
// weight defaults to 1.0, duplicate pairs rejected. Vertex count is max id + 1.
SimpleGraph read_edge_list(std::istream& in);
SimpleGraph read_edge_list(const std::filesystem::path& path);
void write_edge_list(const SimpleGraph& g, std::ostream& out);
void write_edge_list(const SimpleGraph& g, const std::filesystem::path& path);

template <class Rng>
Permutation Permutation::random(int n, Rng& rng) {
  std::vector<int> mapping(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) mapping[static_cast<std::size_t>(i)] = i;
  // Fisher-Yates with explicit modulo draws so results do not depend on the
  // standard library's shuffle implementation.
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(mapping[static_cast<std::size_t>(i)], mapping[static_cast<std::size_t>(j)]);
  }
  return Permutation(std::move(mapping));
}

}  // namespace gscat
