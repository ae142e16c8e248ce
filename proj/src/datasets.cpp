#include "gscat/datasets.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "gscat/error.hpp"

namespace gscat {

namespace {

std::uint32_t read_be32(std::istream& in, const std::filesystem::path& path) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) {
    throw Error(ErrorCode::TruncatedFile, path.string() + ": header ends early");
  }
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
}

std::ifstream open_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return in;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

void SbmParams::validate() const {
  if (n_per_class < 1 || num_classes < 1 || vertex_count() < 2) {
    throw Error(ErrorCode::InvalidProbability, "SBM needs at least two vertices");
  }
  if (!(0.0 <= p_out && p_out <= p_in && p_in <= 1.0)) {
    throw Error(ErrorCode::InvalidProbability, "SBM probabilities must satisfy 0 <= p_out <= p_in <= 1");
  }
}

SimpleGraph sample_sbm(const SbmParams& params) {
  Rng rng = make_rng(params.seed);
  return sample_sbm(params, rng);
}

SimpleGraph sample_sbm(const SbmParams& params, Rng& rng) {
  params.validate();
  const int n = params.vertex_count();
  Matrix w(n, n);
  for (int attempt = 0; attempt < kSbmMaxAttempts; ++attempt) {
    w.setZero();
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double p = (i / params.n_per_class == j / params.n_per_class) ? params.p_in : params.p_out;
        if (bernoulli(rng, p)) w(i, j) = w(j, i) = 1.0;
      }
    }
    if (is_connected(w)) return validate(w, 0.0);
  }
  throw Error(ErrorCode::CannotSampleConnected,
              "no connected SBM sample in " + std::to_string(kSbmMaxAttempts) + " attempts");
}

SimpleGraph build_grid_graph(const GridSpec& spec) {
  if (spec.height < 2 || spec.width < 2) {
    throw Error(ErrorCode::TooFewVertices, "grid needs height and width >= 2");
  }
  const int n = spec.height * spec.width;
  const int reach = static_cast<int>(std::floor(spec.neighbor_radius));
  const double r2 = spec.neighbor_radius * spec.neighbor_radius * (1.0 + 1e-12);
  Matrix w = Matrix::Zero(n, n);
  for (int r = 0; r < spec.height; ++r) {
    for (int c = 0; c < spec.width; ++c) {
      for (int dr = -reach; dr <= reach; ++dr) {
        for (int dc = -reach; dc <= reach; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if ((dr == 0 && dc == 0) || rr < 0 || cc < 0 || rr >= spec.height || cc >= spec.width) continue;
          const double d2 = dr * dr + dc * dc;
          if (d2 > r2) continue;
          w(r * spec.width + c, rr * spec.width + cc) = std::exp(-d2);
        }
      }
    }
  }
  return validate(w, 0.0);
}

LabeledImages read_idx_images(const std::filesystem::path& images, const std::filesystem::path& labels,
                              std::optional<int> limit) {
  auto img = open_binary(images);
  auto lab = open_binary(labels);
  if (const auto magic = read_be32(img, images); magic != 0x00000803) {
    throw Error(ErrorCode::BadMagic, images.string() + ": expected image magic 0x00000803");
  }
  if (const auto magic = read_be32(lab, labels); magic != 0x00000801) {
    throw Error(ErrorCode::BadMagic, labels.string() + ": expected label magic 0x00000801");
  }
  const auto count = read_be32(img, images);
  const auto rows = read_be32(img, images);
  const auto cols = read_be32(img, images);
  const auto label_count = read_be32(lab, labels);
  if (count != label_count) {
    throw Error(ErrorCode::CountMismatch, std::to_string(count) + " images but " + std::to_string(label_count) +
                                              " labels");
  }
  if (rows == 0 || cols == 0 || rows > 65536 || cols > 65536) {
    throw Error(ErrorCode::MalformedLine, images.string() + ": implausible image size");
  }
  std::uint32_t keep = count;
  if (limit && *limit >= 0 && static_cast<std::uint32_t>(*limit) < count) keep = static_cast<std::uint32_t>(*limit);

  LabeledImages out;
  out.rows = static_cast<int>(rows);
  out.cols = static_cast<int>(cols);
  const std::size_t pixels = std::size_t{rows} * cols;
  out.images.resize(keep, static_cast<Eigen::Index>(pixels));
  std::vector<unsigned char> buf(pixels);
  for (std::uint32_t i = 0; i < keep; ++i) {
    if (!img.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(pixels))) {
      throw Error(ErrorCode::TruncatedFile, images.string() + ": image " + std::to_string(i) + " is truncated");
    }
    for (std::size_t k = 0; k < pixels; ++k) out.images(i, static_cast<Eigen::Index>(k)) = buf[k] / 255.0;
  }
  out.labels.resize(keep);
  for (std::uint32_t i = 0; i < keep; ++i) {
    const int b = lab.get();
    if (b == std::char_traits<char>::eof()) {
      throw Error(ErrorCode::TruncatedFile, labels.string() + ": label " + std::to_string(i) + " is missing");
    }
    if (b > 9) throw Error(ErrorCode::InvalidLabel, labels.string() + ": label " + std::to_string(b) + " > 9");
    out.labels[i] = b;
  }
  if (keep == count) {
    // Whole-file reads must see every byte the header promises.
    img.seekg(0, std::ios::end);
    const auto expected = static_cast<std::streamoff>(16 + pixels * count);
    if (img.tellg() < expected) throw Error(ErrorCode::TruncatedFile, images.string() + " is truncated");
  }
  return out;
}

Matrix read_signal_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (true) {
      const auto comma = body.find(',', pos);
      const auto tok = trim(body.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
      double x = 0.0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
      if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(x)) {
        throw Error(ErrorCode::NonNumeric, "line " + std::to_string(lineno) + ": '" + std::string(tok) +
                                               "' is not a number");
      }
      row.push_back(x);
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::RaggedRows, "line " + std::to_string(lineno) + " has " + std::to_string(row.size()) +
                                             " fields, expected " + std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::NonNumeric, "signal CSV is empty");
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return out;
}

Matrix read_signal_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_signal_csv(in);
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_signal_csv(const Matrix& F, std::ostream& out) {
  for (Eigen::Index i = 0; i < F.rows(); ++i) {
    for (Eigen::Index j = 0; j < F.cols(); ++j) {
      if (j) out << ',';
      out << format_double(F(i, j));
    }
    out << '\n';
  }
}

void write_signal_csv(const Matrix& F, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_signal_csv(F, out);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

void write_feature_csv(const FeatureMatrix& features, std::ostream& out) {
  out << "channel,path";
  for (int v = 0; v < features.n; ++v) out << ",vertex_" << v;
  out << '\n';
  for (int c = 0; c < features.channels; ++c) {
    for (int k = 0; k < features.path_count(); ++k) {
      out << c << ",\"" << features.paths[static_cast<std::size_t>(k)].to_string() << '"';
      const auto row = features.row(c, k);
      for (Eigen::Index v = 0; v < row.size(); ++v) out << ',' << format_double(row(v));
      out << '\n';
    }
  }
}

void write_feature_csv(const FeatureMatrix& features, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_feature_csv(features, out);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace gscat
