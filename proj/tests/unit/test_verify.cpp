#include <cmath>

#include <json.hpp>

#include "gscat/datasets.hpp"
#include "gscat/error.hpp"
#include "gscat/spectral.hpp"
#include "gscat/verify.hpp"
#include "helpers.hpp"

using namespace gscat;
using namespace gscat::testing;

namespace {

ScatteringConfig config(int J, int depth, FilterFamily fam = FilterFamily::shannon()) {
  ScatteringConfig cfg;
  cfg.J = J;
  cfg.depth = depth;
  cfg.family = fam;
  return cfg;
}

const TheoremReport& find(const std::vector<TheoremReport>& reports, const std::string& name) {
  for (const auto& r : reports)
    if (r.name == name) return r;
  throw std::runtime_error("missing report " + name);
}

}  // namespace

TEST(Report, PassRuleAndJson) {
  EXPECT_TRUE(make_report("a", 1.0, 1.0, 0.0).passed);
  EXPECT_FALSE(make_report("a", 1.1, 1.0, 0.05).passed);
  EXPECT_TRUE(make_report("a", 1.1, std::nullopt, 0.0, false).passed);
  auto r = make_report("logged", 2.0, std::nullopt, 0.0, false);
  r.context["n"] = 4LL;
  const auto j = nlohmann::json::parse(to_json(std::vector<TheoremReport>{r}));
  EXPECT_TRUE(j[0]["rhs_bound"].is_null());
  EXPECT_EQ(j[0]["name"], "logged");
  EXPECT_EQ(j[0]["context"]["n"], 4);
}

TEST(Covariance, IdentityIsExact) {
  const SimpleGraph g = validate(fixture_weights());
  const Vector f = (Vector(4) << 2, 1, 0, 0).finished();
  const auto r = check_permutation_covariance(g, f, Permutation::identity(4), config(3, 3));
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_TRUE(r.passed);
}

TEST(Covariance, WorkedFixture) {
  const SimpleGraph g = validate(fixture_weights());
  const Vector f = (Vector(4) << 2, 1, 0, 0).finished();
  for (auto fam : {FilterFamily::shannon(), FilterFamily::meyer()}) {
    const auto r = check_permutation_covariance(g, f, fixture_permutation(), config(3, 3, fam));
    EXPECT_TRUE(r.passed) << r.lhs;
    EXPECT_LE(r.lhs, 1e-8);
  }
}

TEST(Covariance, RandomTriples) {
  Rng rng = make_rng(239);
  for (int t = 0; t < 100; ++t) {
    const SimpleGraph g = random_graph(12, rng);
    const auto r = check_permutation_covariance(g, random_signal(12, rng), Permutation::random(12, rng),
                                                config(1 + t % 4, 1 + (t / 4) % 4, t % 2 ? FilterFamily::meyer()
                                                                                         : FilterFamily::shannon()));
    EXPECT_TRUE(r.passed) << "trial " << t << " lhs " << r.lhs;
  }
}

TEST(Invariance, IdentityPermutation) {
  Rng rng = make_rng(241);
  const SimpleGraph g = random_graph(10, rng);
  const auto r = check_invariance_bound(g, random_signal(10, rng), Permutation::identity(10), config(3, 3));
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(*r.rhs_bound, 0.0);
  EXPECT_TRUE(r.passed);
}

TEST(Invariance, TwoVertexSwapClosedForm) {
  const Vector f = (Vector(2) << 1, 0).finished();
  const auto r = check_invariance_bound(path_graph(2), f, Permutation({1, 0}), config(3, 3));
  // S[p] f is (1/2, 1/2) on [] and [0] and zero elsewhere, for f and for P f alike.
  EXPECT_LE(r.lhs, 1e-15);
  // 2 * 2^-3.5 / 2 * sqrt(4) * 2 * 1
  EXPECT_NEAR(*r.rhs_bound, std::pow(2.0, -1.5), 1e-12);
  EXPECT_TRUE(r.passed);
}

TEST(Invariance, RandomInstancesShrinkWithJ) {
  Rng rng = make_rng(251);
  for (int t = 0; t < 10; ++t) {
    const SimpleGraph g = random_graph(10, rng);
    const auto r = check_invariance_bound(g, random_signal(10, rng), Permutation::random(10, rng), config(3, 3));
    EXPECT_TRUE(r.passed) << r.lhs << " vs " << *r.rhs_bound;
    EXPECT_LE(std::get<double>(r.context.at("lhs_at_J_plus_2")), r.lhs + 1e-9);
  }
}

TEST(Energy, ConstantSignal) {
  Rng rng = make_rng(257);
  const auto reports = check_energy_theorems(random_graph(9, rng), Vector::Ones(9), config(2, 3));
  EXPECT_TRUE(all_passed(reports));
  EXPECT_LE(find(reports, "frontier_bound").lhs, 1e-24);
}

TEST(Energy, TwoVertexEqualityCase) {
  const Vector f = (Vector(2) << 1, -1).finished();
  const auto cfg = config(3, 4);
  const auto reports = check_energy_theorems(path_graph(2), f, cfg);
  EXPECT_TRUE(all_passed(reports));
  EXPECT_NEAR(find(reports, "decay_rate").lhs, 0.0, 1e-12);
  EXPECT_EQ(*find(reports, "decay_rate").rhs_bound, 0.0);

  const auto dec = decompose(path_graph(2));
  const auto out = scatter(dec, build_filter_bank(dec, cfg), f, cfg);
  EXPECT_NEAR(out.per_layer_propagated_energy[1], 2.0, 1e-14);
  EXPECT_NEAR(out.per_layer_output_energy[1], 2.0, 1e-14);
  EXPECT_NEAR(out.per_layer_propagated_energy[2] / out.per_layer_propagated_energy[1], 1.0 - 2.0 / 2.0, 1e-12);
}

TEST(Energy, RandomMeyerDepthFour) {
  Rng rng = make_rng(263);
  for (int t = 0; t < 5; ++t) {
    const auto reports = check_energy_theorems(random_graph(32, rng), random_signal(32, rng),
                                               config(2 + t % 2, 4, FilterFamily::meyer()));
    for (const auto& r : reports) EXPECT_TRUE(r.passed) << r.name << " " << r.lhs;
  }
}

TEST(Energy, SpectralModulusLogsDecay) {
  Rng rng = make_rng(269);
  auto cfg = config(2, 4, FilterFamily::meyer());
  cfg.nonlinearity = Nonlinearity::SpectralModulus;
  const auto reports = check_energy_theorems(random_graph(16, rng), random_signal(16, rng), cfg);
  EXPECT_TRUE(find(reports, "energy_balance").passed);
  EXPECT_TRUE(find(reports, "norm_preservation").passed);
  EXPECT_FALSE(find(reports, "decay_rate").asserted);
}

TEST(PerturbationCheck, TinyBoundGivesTinyDeviations) {
  Rng rng = make_rng(271);
  const SimpleGraph g = random_graph(10, rng);
  const auto reports = check_weight_perturbation(g, 1e-9, config(2, 3, FilterFamily::meyer()), 5);
  EXPECT_TRUE(all_passed(reports));
  EXPECT_LE(find(reports, "weyl_eigenvalue_shift").lhs, 1e-9);
  EXPECT_LE(find(reports, "davis_kahan_angle").lhs, 1e-6);
  EXPECT_FALSE(find(reports, "scaled_scattering_distance").rhs_bound.has_value());
}

TEST(PerturbationCheck, TwoVertexClosedForm) {
  const auto reports = check_weight_perturbation(path_graph(2), 0.5, config(2, 3, FilterFamily::meyer()), 3);
  EXPECT_TRUE(all_passed(reports));
  const double e = find(reports, "perturbation_operator_norm").lhs;
  // L - L~ for a single edge change d is d * [[-1, 1], [1, -1]]: norm 2|d|, and lambda_1 moves by 2|d|.
  EXPECT_LE(e, 2 * 0.5 / 4 + 1e-15);
  EXPECT_NEAR(find(reports, "weyl_eigenvalue_shift").lhs, e, 1e-12);
  EXPECT_LE(find(reports, "davis_kahan_angle").lhs, 1e-7);
}

TEST(PerturbationCheck, PathGraphMeyer) {
  const auto reports = check_weight_perturbation(path_graph(3), 1.0, config(2, 3, FilterFamily::meyer()), 11);
  for (const auto& r : reports) EXPECT_TRUE(r.passed) << r.name;
}

TEST(PerturbationCheck, Errors) {
  EXPECT_THROW_CODE(check_weight_perturbation(cycle_graph(4), 0.1, config(2, 2), 1), GapTooSmall);
  EXPECT_THROW_CODE(check_weight_perturbation(path_graph(3), 1.6, config(2, 2), 1), InvalidBound);
}

TEST(Sbm, ProbabilityRule) {
  EXPECT_EQ(sbm_p_in(5), 1.0);
  EXPECT_NEAR(sbm_p_in(50), 0.4694427606513775, 1e-15);
  EXPECT_NEAR(sbm_p_out(50), 0.07824046010856292, 1e-15);
}

TEST(Sbm, FlipTwiceIsExactlyZero) {
  const SimpleGraph g = sample_sbm({5, 2, sbm_p_in(5), sbm_p_out(5), 1});
  const SimpleGraph back = flip_edge(flip_edge(g, 0, 7), 0, 7);
  const auto cfg = config(3, 3, FilterFamily::meyer());
  const auto a = decompose(g), b = decompose(back);
  const Matrix F = Matrix::Identity(10, 10);
  EXPECT_EQ((scatter_batch(a, build_filter_bank(a, cfg), F, cfg).data -
             scatter_batch(b, build_filter_bank(b, cfg), F, cfg).data).norm(), 0.0);
}

TEST(Sbm, CurveIsDeterministic) {
  const auto cfg = config(3, 3, FilterFamily::meyer());
  const auto a = sbm_stability_curve({5}, 1, cfg, 77);
  const auto b = sbm_stability_curve({5}, 1, cfg, 77);
  EXPECT_EQ(a.mean_relative_error, b.mean_relative_error);
  EXPECT_GT(a.mean_relative_error[0], 0.0);
  EXPECT_EQ(to_csv(a).rfind("N,mean_relative_error\n5,", 0), 0u);
}

TEST(Sbm, ConstantSignalIsBlind) {
  const auto cfg = config(3, 3, FilterFamily::meyer());
  const auto curve = sbm_stability_curve({10, 20}, 3, cfg, 5, SbmSignal::Ones);
  for (double e : curve.mean_relative_error) EXPECT_LE(e, 1e-12);
}

TEST(EnergyFractions, Cumulative) {
  Rng rng = make_rng(277);
  const auto dec = decompose(random_graph(12, rng));
  const auto cfg = config(2, 3);
  Matrix F(12, 3);
  for (int c = 0; c < 3; ++c) F.col(c) = random_signal(12, rng);
  const auto fm = scatter_batch(dec, build_filter_bank(dec, cfg), F, cfg);
  const Matrix frac = cumulative_energy_fractions(fm, F);
  for (int c = 0; c < 3; ++c) {
    for (int m = 1; m < 3; ++m) EXPECT_GE(frac(c, m), frac(c, m - 1));
    EXPECT_NEAR(frac(c, 2) + fm.frontier_energy(c) / F.col(c).squaredNorm(), 1.0, 1e-9);
  }
}
