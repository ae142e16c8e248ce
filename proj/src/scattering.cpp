#include "gscat/scattering.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "gscat/error.hpp"
#include "gscat/parallel.hpp"

namespace gscat {

namespace {

constexpr int kChannelBlock = 128;

// Scattering of one block of channels. Paths are visited depth first so only
// the current chain of propagated signals is alive; outputs land in their
// breadth-first rows.
class BlockScatterer {
 public:
  BlockScatterer(const SpectralDecomposition& dec, const FilterBank& bank, const ScatteringConfig& cfg,
                 FeatureMatrix& out, int first_channel)
      : dec_(dec), bank_(bank), cfg_(cfg), out_(out), first_(first_channel) {
    const int k = bank.scale_count();
    layer_offset_.assign(static_cast<std::size_t>(cfg.depth) + 1, 0);
    long width = 1;
    for (int m = 0; m < cfg.depth; ++m) {
      layer_offset_[static_cast<std::size_t>(m) + 1] = layer_offset_[static_cast<std::size_t>(m)] + width;
      width *= k;
    }
    squared_wavelets_ = bank.wavelets.cwiseAbs2();
  }

  void run(const Matrix& block) {
    Matrix coeffs = dec_.eigenvectors().transpose() * block;
    visit(block, coeffs, 0, 0);
  }

 private:
  void visit(const Matrix& x, const Matrix& xhat, int m, long index_in_layer) {
    const int channels = static_cast<int>(x.cols());
    const long row = layer_offset_[static_cast<std::size_t>(m)] + index_in_layer;
    const Matrix s = apply_filter_from_coefficients(dec_, bank_.lowpass, bank_.lowpass_support, xhat);
    const int paths = out_.path_count();
    for (int c = 0; c < channels; ++c) {
      const int ch = first_ + c;
      out_.data.row(static_cast<Eigen::Index>(ch) * paths + row) = s.col(c).transpose();
      out_.propagated_energy(ch, m) += x.col(c).squaredNorm();
      out_.output_energy(ch, m) += s.col(c).squaredNorm();
    }

    const int k = bank_.scale_count();
    if (m + 1 == cfg_.depth) {
      // Both nonlinearities preserve the l2 norm, so the next layer's energy
      // is sum_j ||psi_j . xhat||^2 without forming the signals.
      for (int c = 0; c < channels; ++c) {
        double e = 0.0;
        for (int sidx = 0; sidx < k; ++sidx) {
          const auto& sup = bank_.wavelet_supports[static_cast<std::size_t>(sidx)];
          if (sup.size() == 0) continue;
          e += squared_wavelets_.row(sidx).segment(sup.begin, sup.size()).dot(
              xhat.col(c).segment(sup.begin, sup.size()).cwiseAbs2().transpose());
        }
        out_.propagated_energy(first_ + c, m + 1) += e;
        out_.frontier_energy(first_ + c) += e;
      }
      return;
    }

    for (int sidx = 0; sidx < k; ++sidx) {
      const auto& sup = bank_.wavelet_supports[static_cast<std::size_t>(sidx)];
      const long child = index_in_layer * k + sidx;
      Matrix y, yhat;
      if (cfg_.nonlinearity == Nonlinearity::Modulus) {
        y = apply_filter_from_coefficients(dec_, bank_.wavelet(sidx), sup, xhat).cwiseAbs();
        yhat = dec_.eigenvectors().transpose() * y;
      } else {
        // sigma(Q_j x) = U |psi_j . xhat|
        yhat = Matrix::Zero(xhat.rows(), xhat.cols());
        if (sup.size() > 0) {
          yhat.middleRows(sup.begin, sup.size()) =
              (bank_.wavelets.row(sidx).segment(sup.begin, sup.size()).transpose().asDiagonal() *
               xhat.middleRows(sup.begin, sup.size()))
                  .cwiseAbs();
        }
        y = dec_.eigenvectors() * yhat;
      }
      visit(y, yhat, m + 1, child);
    }
  }

  const SpectralDecomposition& dec_;
  const FilterBank& bank_;
  const ScatteringConfig& cfg_;
  FeatureMatrix& out_;
  int first_;
  std::vector<long> layer_offset_;
  Matrix squared_wavelets_;
};

void check_bank(const FilterBank& bank, const SpectralDecomposition& dec, const ScatteringConfig& cfg) {
  cfg.validate();
  if (bank.n() != dec.n()) throw Error(ErrorCode::ShapeMismatch, "filter bank and decomposition sizes differ");
  if (bank.J != cfg.J) throw Error(ErrorCode::InvalidScaleParameter, "filter bank J differs from config J");
}

}  // namespace

Path Path::append(int j) const {
  Path out = *this;
  out.scales.push_back(j);
  return out;
}

std::string Path::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(scales[i]);
  }
  s += ']';
  return s;
}

Path Path::parse(std::string_view text) {
  auto bad = [&] { return Error(ErrorCode::MalformedLine, "bad path '" + std::string(text) + "'"); };
  if (text.size() < 2 || text.front() != '[' || text.back() != ']') throw bad();
  text = text.substr(1, text.size() - 2);
  Path p;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto tok = text.substr(0, comma);
    int j = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), j);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) throw bad();
    p.scales.push_back(j);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
    if (text.empty()) throw bad();
  }
  return p;
}

std::string_view to_string(Nonlinearity nl) noexcept {
  return nl == Nonlinearity::Modulus ? "modulus" : "spectral_modulus";
}

Nonlinearity parse_nonlinearity(std::string_view name) {
  if (name == "modulus") return Nonlinearity::Modulus;
  if (name == "spectral_modulus" || name == "spectral-modulus") return Nonlinearity::SpectralModulus;
  throw Error(ErrorCode::InvalidScaleParameter, "unknown nonlinearity '" + std::string(name) + "'");
}

void ScatteringConfig::validate() const {
  if (J < 1) throw Error(ErrorCode::InvalidScaleParameter, "J must be >= 1");
  if (depth < 1) throw Error(ErrorCode::InvalidScaleParameter, "depth must be >= 1");
}

FilterBank build_filter_bank(const SpectralDecomposition& dec, const ScatteringConfig& cfg) {
  cfg.validate();
  return build_filter_bank(dec, cfg.J, cfg.family, cfg.normalize);
}

std::vector<Path> enumerate_paths(const std::vector<int>& scales, int depth) {
  std::vector<Path> out{Path{}};
  std::size_t layer_begin = 0;
  for (int m = 1; m < depth; ++m) {
    const std::size_t layer_end = out.size();
    for (std::size_t i = layer_begin; i < layer_end; ++i)
      for (int j : scales) out.push_back(out[i].append(j));
    layer_begin = layer_end;
  }
  return out;
}

Vector ScatteringOutput::coefficient(const Path& p) const {
  for (std::size_t k = 0; k < paths.size(); ++k)
    if (paths[k] == p) return coefficients.col(static_cast<Eigen::Index>(k));
  throw Error(ErrorCode::UnknownScale, "path " + p.to_string() + " is not in the output");
}

double ScatteringOutput::total_output_energy() const {
  double total = 0.0;
  for (double e : per_layer_output_energy) total += e;
  return total;
}

Vector FeatureMatrix::channel_features(int channel) const {
  const auto block = data.middleRows(static_cast<Eigen::Index>(channel) * path_count(), path_count());
  return Eigen::Map<const Vector>(block.data(), block.size());
}

Vector modulus(const Vector& f) { return f.cwiseAbs(); }

Vector spectral_modulus(const SpectralDecomposition& dec, const Vector& f) {
  if (f.size() != dec.n()) throw Error(ErrorCode::LengthMismatch, "spectral_modulus: length != n");
  return dec.eigenvectors() * (dec.eigenvectors().transpose() * f).cwiseAbs();
}

Vector apply_nonlinearity(const SpectralDecomposition& dec, Nonlinearity nl, const Vector& f) {
  return nl == Nonlinearity::Modulus ? modulus(f) : spectral_modulus(dec, f);
}

Vector propagate(const SpectralDecomposition& dec, const FilterBank& bank, const Path& p, const Vector& f,
                 Nonlinearity nl) {
  if (f.size() != dec.n()) throw Error(ErrorCode::LengthMismatch, "propagate: length != n");
  Vector u = f;
  for (int j : p.scales) {
    const int s = bank.scale_index(j);
    u = apply_nonlinearity(dec, nl, apply_filter(dec, bank.wavelet(s), u));
  }
  return u;
}

FeatureMatrix scatter_batch(const SpectralDecomposition& dec, const FilterBank& bank, const Matrix& F,
                            const ScatteringConfig& cfg) {
  check_bank(bank, dec, cfg);
  if (F.rows() != dec.n()) {
    throw Error(ErrorCode::ShapeMismatch, "signal matrix has " + std::to_string(F.rows()) + " rows, graph has " +
                                              std::to_string(dec.n()) + " vertices");
  }
  FeatureMatrix out;
  out.channels = static_cast<int>(F.cols());
  out.n = dec.n();
  out.paths = enumerate_paths(bank.scales, cfg.depth);
  out.data = FeatureMatrix::Data::Zero(static_cast<Eigen::Index>(out.channels) * out.path_count(), out.n);
  out.frontier_energy = Vector::Zero(out.channels);
  out.output_energy = Matrix::Zero(out.channels, cfg.depth);
  out.propagated_energy = Matrix::Zero(out.channels, cfg.depth + 1);

  const int blocks = (out.channels + kChannelBlock - 1) / kChannelBlock;
  parallel_for(blocks, [&](int b) {
    const int first = b * kChannelBlock;
    const int count = std::min(kChannelBlock, out.channels - first);
    BlockScatterer(dec, bank, cfg, out, first).run(F.middleCols(first, count));
  });
  return out;
}

ScatteringOutput scatter(const SpectralDecomposition& dec, const FilterBank& bank, const Vector& f,
                         const ScatteringConfig& cfg) {
  if (f.size() != dec.n()) {
    throw Error(ErrorCode::LengthMismatch, "signal length " + std::to_string(f.size()) + " != " +
                                               std::to_string(dec.n()));
  }
  const FeatureMatrix fm = scatter_batch(dec, bank, f, cfg);
  ScatteringOutput out;
  out.paths = fm.paths;
  out.coefficients = fm.data.transpose();
  out.frontier_energy = fm.frontier_energy(0);
  for (int m = 0; m < cfg.depth; ++m) out.per_layer_output_energy.push_back(fm.output_energy(0, m));
  for (int m = 0; m <= cfg.depth; ++m) out.per_layer_propagated_energy.push_back(fm.propagated_energy(0, m));
  return out;
}

Vector localize(const SpectralDecomposition& dec, const Vector& f, int c) {
  if (f.size() != dec.n()) throw Error(ErrorCode::LengthMismatch, "localize: length != n");
  if (c < 0 || c >= dec.n()) throw Error(ErrorCode::VertexOutOfRange, "localize: vertex out of range");
  if (spectral_gap(dec) <= 0.0) {
    throw Error(ErrorCode::RepeatedEigenvalues, "localization needs simple eigenvalues");
  }
  const auto& u = dec.eigenvectors();
  const Vector weights = u.row(c).transpose().cwiseProduct(u.transpose() * f);
  return std::sqrt(static_cast<double>(dec.n())) * (u * weights);
}

}  // namespace gscat
