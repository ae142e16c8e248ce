#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gscat/cli.hpp"
#include "gscat/datasets.hpp"
#include "helpers.hpp"

using namespace gscat;
using namespace gscat::testing;

namespace {

const std::string kData = GSCAT_DATA_DIR;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Cli, GridTwoByTwoIsComplete) {
  const auto r = run_cli({"grid", "--height", "2", "--width", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(r.out), 6);
}

TEST(Cli, PermCheckOnFixture) {
  const auto r = run_cli({"check", "--suite", "perm", "--graph", kData + "/fixtures/four_vertex.tsv", "--signal",
                          kData + "/fixtures/four_vertex_signal.csv", "--permutation", "2,0,3,1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j.size(), 1u);
  EXPECT_TRUE(j[0]["passed"].get<bool>());
  EXPECT_LE(j[0]["lhs"].get<double>(), 1e-8);
}

TEST(Cli, OtherSuitesOnFixture) {
  for (std::string suite : {"energy", "invariance", "stability"}) {
    const auto r = run_cli({"check", "--suite", suite, "--graph", kData + "/fixtures/four_vertex.tsv", "--wavelet",
                            "meyer"});
    EXPECT_EQ(r.code, 0) << suite << ": " << r.err << r.out;
  }
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli({"grid", "--bogus"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"check", "--graph", kData + "/fixtures/four_vertex.tsv"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"check", "--suite", "perm", "--graph", "/nonexistent/graph.tsv"}).code, cli::kIoError);
  EXPECT_EQ(run_cli({"check", "--suite", "energy", "--graph", kData + "/fixtures/four_vertex.tsv", "--scale-j", "0"}).code,
            cli::kUsage);
  EXPECT_EQ(run_cli({"sbm-stability", "--sizes", "5", "--trials", "0"}).code, cli::kUsage);
}

TEST(Cli, TransformWritesCsvAndManifest) {
  const auto dir = scratch_dir();
  const auto out = (dir / "features.csv").string();
  const auto r = run_cli({"transform", "--graph", kData + "/fixtures/four_vertex.tsv", "--signal",
                          kData + "/fixtures/four_vertex_signal.csv", "--out", out, "--scale-j", "2", "--depth",
                          "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(out);
  EXPECT_EQ(csv.rfind("channel,path,vertex_0,vertex_1,vertex_2,vertex_3\n0,\"[]\",", 0), 0u);
  const auto manifest = nlohmann::json::parse(slurp(out + ".json"));
  const int paths = static_cast<int>(manifest["paths"].size());
  EXPECT_EQ(count_lines(csv), 1 + paths);
  EXPECT_EQ(manifest["n"], 4);
  EXPECT_EQ(manifest["J"], 2);
  EXPECT_NEAR(manifest["energy"]["output_total"].get<double>() + manifest["energy"]["frontier"].get<double>(),
              manifest["energy"]["signal"].get<double>(), 1e-12);
}

TEST(Cli, TransformIsByteDeterministic) {
  const auto dir = scratch_dir();
  std::string bytes[2];
  for (int k = 0; k < 2; ++k) {
    const auto out = (dir / ("f" + std::to_string(k) + ".csv")).string();
    ASSERT_EQ(run_cli({"transform", "--graph", kData + "/fixtures/four_vertex.tsv", "--signal",
                       kData + "/fixtures/four_vertex_signal.csv", "--out", out, "--wavelet", "meyer"})
                  .code,
              0);
    bytes[k] = slurp(out);
  }
  EXPECT_EQ(bytes[0], bytes[1]);
}

TEST(Cli, SbmStabilityCsv) {
  const auto r = run_cli({"sbm-stability", "--sizes", "5,10", "--trials", "2", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("N,mean_relative_error\n5,", 0), 0u);
  EXPECT_EQ(count_lines(r.out), 3);
}

TEST(Cli, MnistImageOnPixelGrid) {
  const auto dir = scratch_dir();
  const auto graph = (dir / "grid.tsv").string();
  ASSERT_EQ(run_cli({"grid", "--height", "28", "--width", "28", "--out", graph}).code, 0);

  const auto imgs = read_idx_images(kData + "/mnist-subset/test-images-idx3-ubyte",
                                    kData + "/mnist-subset/test-labels-idx1-ubyte", 1);
  const auto signal = dir / "digit.csv";
  write_signal_csv(imgs.images.row(0).transpose(), signal);

  const auto out = (dir / "digit_features.csv").string();
  const auto r = run_cli({"transform", "--graph", graph, "--signal", signal.string(), "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(slurp(out));
  std::string line;
  std::getline(csv, line);
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    const auto tail = line.substr(line.rfind('"'));
    EXPECT_EQ(std::count(tail.begin(), tail.end(), ','), 784);
  }
  EXPECT_EQ(rows, 13);
}
