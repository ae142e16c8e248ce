#include "gscat/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gscat/datasets.hpp"
#include "gscat/error.hpp"
#include "gscat/learn.hpp"
#include "gscat/random.hpp"
#include "gscat/verify.hpp"

namespace gscat::cli {

namespace {

using nlohmann::json;

struct TransformFlags {
  int J = 3;
  int depth = 3;
  std::string wavelet = "shannon";
  bool no_normalize = false;
  std::string nonlinearity = "modulus";

  void attach(CLI::App* app, int default_depth, std::string default_wavelet = "shannon") {
    depth = default_depth;
    wavelet = std::move(default_wavelet);
    app->add_option("--scale-j", J, "coarsest scale parameter J")->capture_default_str();
    app->add_option("--depth", depth, "number of output layers M")->capture_default_str();
    app->add_option("--wavelet", wavelet, "shannon or meyer")
        ->check(CLI::IsMember({"shannon", "meyer"}))
        ->capture_default_str();
    app->add_flag("--no-normalize", no_normalize, "evaluate filters on the raw Laplacian spectrum");
    app->add_option("--nonlinearity", nonlinearity, "modulus or spectral_modulus")
        ->check(CLI::IsMember({"modulus", "spectral_modulus"}))
        ->capture_default_str();
  }

  ScatteringConfig config() const {
    ScatteringConfig cfg;
    cfg.J = J;
    cfg.depth = depth;
    cfg.family = FilterFamily::of(parse_filter_kind(wavelet));
    cfg.normalize = !no_normalize;
    cfg.nonlinearity = parse_nonlinearity(nonlinearity);
    cfg.validate();
    return cfg;
  }
};

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::Io, "cannot write " + path);
  file << text;
  if (!file) throw Error(ErrorCode::Io, "write failed for " + path);
}

json scales_json(const FilterBank& bank) { return json(bank.scales); }

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidScaleParameter:
    case ErrorCode::InvalidProbability:
    case ErrorCode::InvalidBound:
      return kUsage;
    default:
      return kIoError;
  }
}

Vector load_single_signal(const std::string& path, int n, std::uint64_t seed) {
  if (path.empty()) {
    Rng rng = derive_rng(seed, {0x5167});
    Vector f(n);
    for (int i = 0; i < n; ++i) f(i) = normal(rng);
    return f;
  }
  const Matrix F = read_signal_csv(std::filesystem::path(path));
  if (F.rows() != n) {
    throw Error(ErrorCode::LengthMismatch, "signal has " + std::to_string(F.rows()) + " rows, graph has " +
                                               std::to_string(n) + " vertices");
  }
  return F.col(0);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph scattering transform toolkit"};
  app.require_subcommand(1);

  // transform
  auto* transform = app.add_subcommand("transform", "scattering features of CSV signals on an edge-list graph");
  std::string t_graph, t_signal, t_out, t_manifest;
  TransformFlags t_flags;
  transform->add_option("--graph", t_graph, "edge list (u<TAB>v<TAB>w)")->required();
  transform->add_option("--signal", t_signal, "headerless CSV, one row per vertex")->required();
  transform->add_option("--out", t_out, "feature CSV")->required();
  transform->add_option("--manifest", t_manifest, "JSON manifest (default: <out>.json)");
  t_flags.attach(transform, 3);

  // check
  auto* check = app.add_subcommand("check", "theorem checks, JSON report array");
  std::string c_suite, c_graph, c_signal, c_out;
  std::uint64_t c_seed = 42;
  std::optional<double> c_sharp;
  std::vector<int> c_perm;
  TransformFlags c_flags;
  check->add_option("--suite", c_suite, "energy, perm, invariance or stability")
      ->required()
      ->check(CLI::IsMember({"energy", "perm", "invariance", "stability"}));
  check->add_option("--graph", c_graph, "edge list")->required();
  check->add_option("--signal", c_signal, "CSV signal (first column); default seeded Gaussian");
  check->add_option("--seed", c_seed, "random seed")->capture_default_str();
  check->add_option("--permutation", c_perm, "explicit mapping, e.g. 2,0,3,1")->delimiter(',');
  check->add_option("--c-sharp", c_sharp, "perturbation bound (default n*delta/4)");
  check->add_option("--out", c_out, "JSON output path (default stdout)");
  c_flags.attach(check, 3);

  // energy-decay
  auto* decay = app.add_subcommand("energy-decay", "cumulative output energy per layer on MNIST digits");
  std::string d_images, d_labels, d_out;
  int d_count = 100;
  TransformFlags d_flags;
  decay->add_option("--images", d_images, "IDX image file")->required();
  decay->add_option("--labels", d_labels, "IDX label file")->required();
  decay->add_option("--count", d_count, "number of images")->capture_default_str()->check(CLI::PositiveNumber);
  decay->add_option("--out", d_out, "CSV output path (default stdout)");
  d_flags.attach(decay, 4);

  // sbm-stability
  auto* sbm = app.add_subcommand("sbm-stability", "relative scattering error after one SBM edge flip");
  std::vector<int> s_sizes{5, 10, 20, 50, 100, 200};
  int s_trials = 20;
  std::uint64_t s_seed = 42;
  std::string s_signal = "identity", s_out;
  TransformFlags s_flags;
  sbm->add_option("--sizes", s_sizes, "vertices per class")->delimiter(',')->capture_default_str();
  sbm->add_option("--trials", s_trials, "graphs per size")->capture_default_str()->check(CLI::PositiveNumber);
  sbm->add_option("--seed", s_seed, "random seed")->capture_default_str();
  sbm->add_option("--signal", s_signal, "identity, ones or random")
      ->check(CLI::IsMember({"identity", "ones", "random"}))
      ->capture_default_str();
  sbm->add_option("--out", s_out, "CSV output path (default stdout)");
  s_flags.attach(sbm, 3, "meyer");

  // mnist
  auto* mnist = app.add_subcommand("mnist", "scattering + PCA + softmax on MNIST");
  MnistPipelineConfig m_cfg;
  std::string m_out;
  TransformFlags m_flags;
  mnist->add_option("--train-images", m_cfg.train_images)->required();
  mnist->add_option("--train-labels", m_cfg.train_labels)->required();
  mnist->add_option("--test-images", m_cfg.test_images)->required();
  mnist->add_option("--test-labels", m_cfg.test_labels)->required();
  mnist->add_option("--train-n", m_cfg.train_n)->capture_default_str()->check(CLI::PositiveNumber);
  mnist->add_option("--test-n", m_cfg.test_n)->capture_default_str()->check(CLI::PositiveNumber);
  mnist->add_option("--pca", m_cfg.pca_k)->capture_default_str()->check(CLI::PositiveNumber);
  mnist->add_option("--seed", m_cfg.seed)->capture_default_str();
  mnist->add_option("--out", m_out, "JSON output path (default stdout)");
  m_flags.attach(mnist, 3);

  // grid
  auto* grid = app.add_subcommand("grid", "export the pixel grid graph as an edge list");
  int g_height = 28, g_width = 28;
  std::string g_out;
  grid->add_option("--height", g_height)->capture_default_str();
  grid->add_option("--width", g_width)->capture_default_str();
  grid->add_option("--out", g_out, "edge list path (default stdout)");

  std::vector<const char*> argv{"gscat"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*transform) {
      const ScatteringConfig cfg = t_flags.config();
      const SimpleGraph g = read_edge_list(std::filesystem::path(t_graph));
      const Matrix F = read_signal_csv(std::filesystem::path(t_signal));
      const SpectralDecomposition dec = decompose(g);
      const FilterBank bank = build_filter_bank(dec, cfg);
      const FeatureMatrix fm = scatter_batch(dec, bank, F, cfg);
      std::ostringstream csv;
      write_feature_csv(fm, csv);
      emit(t_out, csv.str(), out);

      json manifest;
      manifest["n"] = g.n();
      manifest["channels"] = fm.channels;
      manifest["scales"] = scales_json(bank);
      manifest["paths"] = json::array();
      for (const auto& p : fm.paths) manifest["paths"].push_back(p.to_string());
      manifest["J"] = cfg.J;
      manifest["depth"] = cfg.depth;
      manifest["wavelet"] = to_string(cfg.family.kind);
      manifest["normalize"] = cfg.normalize;
      manifest["nonlinearity"] = to_string(cfg.nonlinearity);
      json layers = json::array();
      for (int m = 0; m < cfg.depth; ++m) layers.push_back(fm.output_energy.col(m).sum());
      manifest["energy"] = {{"signal", F.squaredNorm()},
                            {"output_per_layer", layers},
                            {"output_total", fm.output_energy.sum()},
                            {"frontier", fm.frontier_energy.sum()}};
      emit(t_manifest.empty() ? t_out + ".json" : t_manifest, manifest.dump(2) + "\n", out);
      return kOk;
    }

    if (*check) {
      const ScatteringConfig cfg = c_flags.config();
      const SimpleGraph g = read_edge_list(std::filesystem::path(c_graph));
      const Vector f = load_single_signal(c_signal, g.n(), c_seed);
      std::vector<TheoremReport> reports;
      if (c_suite == "energy") {
        reports = check_energy_theorems(g, f, cfg);
      } else if (c_suite == "perm" || c_suite == "invariance") {
        Rng rng = derive_rng(c_seed, {0x9e6});
        const Permutation p = c_perm.empty() ? Permutation::random(g.n(), rng) : Permutation(c_perm);
        reports.push_back(c_suite == "perm" ? check_permutation_covariance(g, f, p, cfg)
                                            : check_invariance_bound(g, f, p, cfg));
      } else {
        const double delta = spectral_gap(decompose(g));
        reports = check_weight_perturbation(g, c_sharp.value_or(g.n() * delta / 4.0), cfg, c_seed, f);
      }
      for (auto& r : reports) r.context["seed"] = static_cast<long long>(c_seed);
      emit(c_out, to_json(reports) + "\n", out);
      return all_passed(reports) ? kOk : kCheckFailed;
    }

    if (*decay) {
      const ScatteringConfig cfg = d_flags.config();
      const LabeledImages imgs = read_idx_images(d_images, d_labels, d_count);
      const SimpleGraph g = build_grid_graph({imgs.rows, imgs.cols});
      const SpectralDecomposition dec = decompose(g);
      const FilterBank bank = build_filter_bank(dec, cfg);
      const Matrix F = imgs.images.transpose();
      const Matrix frac = cumulative_energy_fractions(scatter_batch(dec, bank, F, cfg), F);
      std::ostringstream csv;
      csv << "image,label";
      for (int m = 0; m < cfg.depth; ++m) csv << ",layer_" << m;
      csv << '\n';
      for (int i = 0; i < imgs.count(); ++i) {
        csv << i << ',' << imgs.labels[static_cast<std::size_t>(i)];
        for (int m = 0; m < cfg.depth; ++m) csv << ',' << format_double(frac(i, m));
        csv << '\n';
      }
      emit(d_out, csv.str(), out);
      return kOk;
    }

    if (*sbm) {
      const ScatteringConfig cfg = s_flags.config();
      const StabilityCurve curve = sbm_stability_curve(s_sizes, s_trials, cfg, s_seed, parse_sbm_signal(s_signal));
      emit(s_out, to_csv(curve), out);
      return kOk;
    }

    if (*mnist) {
      m_cfg.scattering = m_flags.config();
      const MnistPipelineResult r = run_mnist_pipeline(m_cfg);
      json j;
      j["train_n"] = r.train_n;
      j["test_n"] = r.test_n;
      j["vertices"] = r.n;
      j["paths_per_channel"] = r.paths_per_channel;
      j["feature_dim"] = r.feature_dim;
      j["pca_k"] = r.pca_k;
      j["l2_grid"] = m_cfg.l2_grid;
      j["holdout_accuracy"] = r.holdout_accuracy;
      j["chosen_l2"] = r.chosen_l2;
      j["train_accuracy"] = r.train_accuracy;
      j["test_accuracy"] = r.test_accuracy;
      emit(m_out, j.dump(2) + "\n", out);
      err << "mnist pipeline finished in " << r.seconds << " s\n";
      return kOk;
    }

    if (*grid) {
      const SimpleGraph g = build_grid_graph({g_height, g_width});
      std::ostringstream tsv;
      write_edge_list(g, tsv);
      emit(g_out, tsv.str(), out);
      return kOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace gscat::cli
