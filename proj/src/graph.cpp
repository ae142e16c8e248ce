#include "gscat/graph.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>

#include "gscat/error.hpp"
#include "gscat/random.hpp"

namespace gscat {

namespace {

void require_connected_or(const Matrix& w, ErrorCode code, const char* what) {
  if (!is_connected(w)) throw Error(code, what);
}

}  // namespace

SimpleGraph::SimpleGraph(Matrix weights) : weights_(std::move(weights)) {
  const auto n = weights_.rows();
  degrees_ = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double d = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) d += weights_(i, j);
    degrees_(i) = d;
  }
  laplacian_ = -weights_;
  laplacian_.diagonal() = degrees_;
}

std::size_t SimpleGraph::edge_count() const {
  std::size_t count = 0;
  for (int i = 0; i < n(); ++i)
    for (int j = i + 1; j < n(); ++j)
      if (weights_(i, j) > 0.0) ++count;
  return count;
}

bool is_connected(const Matrix& weights) {
  const auto n = weights.rows();
  if (n == 0) return false;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::queue<Eigen::Index> frontier;
  frontier.push(0);
  seen[0] = 1;
  Eigen::Index reached = 1;
  while (!frontier.empty()) {
    const auto u = frontier.front();
    frontier.pop();
    for (Eigen::Index v = 0; v < n; ++v) {
      if (!seen[static_cast<std::size_t>(v)] && weights(u, v) > 0.0) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == n;
}

SimpleGraph validate(const Matrix& raw, double symmetry_tol) {
  if (raw.rows() != raw.cols()) {
    throw Error(ErrorCode::NotSquare, std::to_string(raw.rows()) + "x" + std::to_string(raw.cols()));
  }
  const auto n = raw.rows();
  if (n < 2) throw Error(ErrorCode::TooFewVertices, "a simple graph needs at least 2 vertices");

  double asym = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) asym = std::max(asym, std::abs(raw(i, j) - raw(j, i)));
  if (!(asym <= symmetry_tol)) {
    throw Error(ErrorCode::AsymmetryExceedsTolerance,
                "max |W - W^T| = " + std::to_string(asym) + " > " + std::to_string(symmetry_tol));
  }

  Matrix w = 0.5 * (raw + raw.transpose());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(w(i, j) >= 0.0) || !std::isfinite(w(i, j))) {
        throw Error(ErrorCode::NegativeWeight, "W(" + std::to_string(i) + "," + std::to_string(j) +
                                                   ") = " + std::to_string(w(i, j)));
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (w(i, i) != 0.0) {
      throw Error(ErrorCode::NonzeroDiagonal, "W(" + std::to_string(i) + "," + std::to_string(i) +
                                                  ") = " + std::to_string(w(i, i)));
    }
  }
  require_connected_or(w, ErrorCode::Disconnected, "positive edges do not reach every vertex");
  return SimpleGraph(std::move(w));
}

// --- permutations -----------------------------------------------------------

Permutation::Permutation(std::vector<int> mapping) : mapping_(std::move(mapping)) {
  std::vector<char> hit(mapping_.size(), 0);
  for (int m : mapping_) {
    if (m < 0 || static_cast<std::size_t>(m) >= mapping_.size() || hit[static_cast<std::size_t>(m)]) {
      throw Error(ErrorCode::InvalidPermutation, "mapping is not a bijection");
    }
    hit[static_cast<std::size_t>(m)] = 1;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> m(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)] = i;
  return Permutation(std::move(m));
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(mapping_.size());
  for (std::size_t i = 0; i < mapping_.size(); ++i) inv[static_cast<std::size_t>(mapping_[i])] = static_cast<int>(i);
  return Permutation(std::move(inv));
}

Permutation Permutation::then(const Permutation& next) const {
  if (next.size() != size()) throw Error(ErrorCode::LengthMismatch, "permutation sizes differ");
  // (Q P f)[i] = (P f)[q(i)] = f[p(q(i))]
  std::vector<int> m(mapping_.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = mapping_[static_cast<std::size_t>(next.mapping_[i])];
  return Permutation(std::move(m));
}

bool Permutation::is_identity() const {
  for (std::size_t i = 0; i < mapping_.size(); ++i)
    if (mapping_[i] != static_cast<int>(i)) return false;
  return true;
}

Matrix Permutation::matrix() const {
  const int n = size();
  Matrix p = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) p(i, mapping_[static_cast<std::size_t>(i)]) = 1.0;
  return p;
}

SimpleGraph apply_permutation(const SimpleGraph& g, const Permutation& p) {
  if (p.size() != g.n()) throw Error(ErrorCode::LengthMismatch, "permutation size != vertex count");
  const int n = g.n();
  Matrix w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w(i, j) = g.weights()(p[i], p[j]);
  return validate(w, 0.0);
}

Vector permute_signal(const Vector& f, const Permutation& p) {
  if (p.size() != f.size()) throw Error(ErrorCode::LengthMismatch, "permutation size != signal length");
  Vector out(f.size());
  for (int i = 0; i < p.size(); ++i) out(i) = f(p[i]);
  return out;
}

Matrix permute_rows(const Matrix& F, const Permutation& p) {
  if (p.size() != F.rows()) throw Error(ErrorCode::LengthMismatch, "permutation size != row count");
  Matrix out(F.rows(), F.cols());
  for (int i = 0; i < p.size(); ++i) out.row(i) = F.row(p[i]);
  return out;
}

// --- perturbations ----------------------------------------------------------

Matrix WeightPerturbation::laplacian_difference() const {
  // L - L~ = (D - W) - (D + diag(rowsum delta) - W - delta) = delta - diag(rowsum delta)
  Matrix e = delta;
  e.diagonal() -= delta.rowwise().sum();
  return e;
}

SimpleGraph apply_perturbation(const SimpleGraph& g, const WeightPerturbation& perturbation) {
  if (perturbation.delta.rows() != g.n() || perturbation.delta.cols() != g.n()) {
    throw Error(ErrorCode::LengthMismatch, "perturbation shape != graph shape");
  }
  Matrix w = g.weights() + perturbation.delta;
  // Clipping noise from the addition itself.
  w = w.cwiseMax(0.0);
  if (!is_connected(w)) {
    throw Error(ErrorCode::DisconnectedAfterPerturbation, "perturbed graph is disconnected");
  }
  return validate(w, 0.0);
}

std::pair<SimpleGraph, WeightPerturbation> perturb_weights(const SimpleGraph& g, double c_sharp,
                                                           std::uint64_t rng_seed) {
  if (!(c_sharp > 0.0) || !std::isfinite(c_sharp)) {
    throw Error(ErrorCode::InvalidBound, "c_sharp must be positive, got " + std::to_string(c_sharp));
  }
  const int n = g.n();
  const double bound = c_sharp / (static_cast<double>(n) * n);
  Rng rng = make_rng(rng_seed);
  WeightPerturbation pert{Matrix::Zero(n, n), c_sharp};
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double d = uniform(rng, -bound, bound);
      const double w = g.weights()(i, j);
      if (w + d < 0.0) d = -w;
      pert.delta(i, j) = d;
      pert.delta(j, i) = d;
    }
  }
  SimpleGraph perturbed = apply_perturbation(g, pert);
  return {std::move(perturbed), std::move(pert)};
}

SimpleGraph flip_edge(const SimpleGraph& g, int u, int v) {
  if (u == v) throw Error(ErrorCode::SelfLoopRequested, "cannot flip a self-loop");
  if (u < 0 || v < 0 || u >= g.n() || v >= g.n()) {
    throw Error(ErrorCode::VertexOutOfRange, "vertex id outside [0, n)");
  }
  Matrix w = g.weights();
  const double next = w(u, v) > 0.0 ? 0.0 : 1.0;
  w(u, v) = next;
  w(v, u) = next;
  require_connected_or(w, ErrorCode::DisconnectedAfterFlip, "removing the edge disconnects the graph");
  return validate(w, 0.0);
}

// --- edge lists -------------------------------------------------------------

namespace {

bool parse_double(std::string_view s, double& out) {
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_int(std::string_view s, long long& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

SimpleGraph read_edge_list(std::istream& in) {
  std::map<std::pair<int, int>, double> edges;
  std::string line;
  int lineno = 0;
  int max_id = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;

    std::vector<std::string> fields;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) fields.push_back(tok);
    if (fields.size() < 2 || fields.size() > 3) {
      throw Error(ErrorCode::MalformedLine, "line " + std::to_string(lineno) + ": expected u v [weight]");
    }
    long long u = 0, v = 0;
    double w = 1.0;
    if (!parse_int(fields[0], u) || !parse_int(fields[1], v) || u < 0 || v < 0 ||
        (fields.size() == 3 && !parse_double(fields[2], w))) {
      throw Error(ErrorCode::MalformedLine, "line " + std::to_string(lineno) + ": bad number");
    }
    if (u > 1'000'000 || v > 1'000'000) {
      throw Error(ErrorCode::MalformedLine, "line " + std::to_string(lineno) + ": vertex id too large");
    }
    const std::pair<int, int> key{static_cast<int>(std::min(u, v)), static_cast<int>(std::max(u, v))};
    if (!edges.emplace(key, w).second) {
      throw Error(ErrorCode::DuplicateEdge, "line " + std::to_string(lineno) + ": pair {" +
                                                std::to_string(key.first) + "," +
                                                std::to_string(key.second) + "} repeated");
    }
    max_id = std::max({max_id, static_cast<int>(u), static_cast<int>(v)});
  }
  const int n = max_id + 1;
  Matrix w = Matrix::Zero(n, n);
  for (const auto& [key, weight] : edges) {
    w(key.first, key.second) = weight;
    w(key.second, key.first) = weight;
  }
  return validate(w, 0.0);
}

SimpleGraph read_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_edge_list(in);
}

void write_edge_list(const SimpleGraph& g, std::ostream& out) {
  char buf[64];
  for (int i = 0; i < g.n(); ++i) {
    for (int j = i + 1; j < g.n(); ++j) {
      const double w = g.weights()(i, j);
      if (w > 0.0) {
        std::snprintf(buf, sizeof buf, "%.17g", w);
        out << i << '\t' << j << '\t' << buf << '\n';
      }
    }
  }
}

void write_edge_list(const SimpleGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_edge_list(g, out);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace gscat
