#include <cmath>
#include <numbers>

#include "gscat/error.hpp"
#include "gscat/filters.hpp"
#include "helpers.hpp"

using namespace gscat;
using namespace gscat::testing;

TEST(FilterFamily, ClosedForms) {
  const auto sh = FilterFamily::shannon();
  EXPECT_EQ(sh.c_phi, 2.0);
  EXPECT_FALSE(sh.lipschitz.has_value());
  EXPECT_EQ(sh.lowpass_hat(0.0), 1.0);
  EXPECT_EQ(sh.lowpass_hat(2.0), 1.0);
  EXPECT_EQ(sh.lowpass_hat(2.0000001), 0.0);
  EXPECT_EQ(sh.wavelet_hat(0.0), 0.0);
  EXPECT_EQ(sh.wavelet_hat(1.0), 0.0);
  EXPECT_EQ(sh.wavelet_hat(1.5), 1.0);
  EXPECT_EQ(sh.wavelet_hat(2.0), 1.0);
  EXPECT_EQ(sh.wavelet_hat(2.5), 0.0);

  const auto me = FilterFamily::meyer();
  EXPECT_EQ(me.c_phi, 4.0);
  ASSERT_TRUE(me.lipschitz.has_value());
  EXPECT_LE(*me.lipschitz, std::numbers::pi / std::numbers::ln2);
  EXPECT_EQ(me.lowpass_hat(0.0), 1.0);
  EXPECT_EQ(me.wavelet_hat(0.0), 0.0);
  EXPECT_NEAR(me.wavelet_hat(std::sqrt(2.0)), std::sin(std::numbers::pi / 4), 1e-15);
  EXPECT_NEAR(me.lowpass_hat(2 * std::sqrt(2.0)), std::cos(std::numbers::pi / 4), 1e-15);
  EXPECT_EQ(me.wavelet_hat(4.0), 0.0);
  EXPECT_EQ(me.lowpass_hat(4.5), 0.0);
}

TEST(FilterFamily, DecayConstantHolds) {
  for (auto fam : {FilterFamily::shannon(), FilterFamily::meyer()}) {
    for (double w = 0.01; w < 20.0; w *= 1.01) EXPECT_LE(fam.lowpass_hat(w), fam.c_phi / w + 1e-15);
  }
}

TEST(FilterFamily, MeyerLipschitzConstantHolds) {
  const auto me = FilterFamily::meyer();
  double steepest = 0.0;
  const double h = 1e-6;
  for (double w = 0.0; w < 5.0; w += 1e-3) {
    steepest = std::max(steepest, std::abs(me.wavelet_hat(w + h) - me.wavelet_hat(w)) / h);
    steepest = std::max(steepest, std::abs(me.lowpass_hat(w + h) - me.lowpass_hat(w)) / h);
  }
  EXPECT_LE(steepest, *me.lipschitz * (1 + 1e-6));
  EXPECT_GE(steepest, 0.99 * *me.lipschitz);
}

TEST(FilterFamily, Parse) {
  EXPECT_EQ(parse_filter_kind("meyer"), FilterKind::Meyer);
  EXPECT_EQ(to_string(FilterKind::Shannon), "shannon");
  EXPECT_THROW_CODE(parse_filter_kind("haar"), InvalidScaleParameter);
}

TEST(FilterBank, ZeroEigenvalueRow) {
  Rng rng = make_rng(61);
  const auto dec = decompose(random_graph(12, rng));
  for (auto fam : {FilterFamily::shannon(), FilterFamily::meyer()}) {
    for (bool normalize : {true, false}) {
      const auto bank = build_filter_bank(dec, 3, fam, normalize);
      EXPECT_EQ(bank.lowpass(0), 1.0);
      EXPECT_EQ(bank.wavelets.col(0).cwiseAbs().maxCoeff(), 0.0);
    }
  }
}

TEST(FilterBank, ShannonNormalizedScales) {
  Rng rng = make_rng(67);
  const auto dec = decompose(random_graph(16, rng));
  const auto bank = build_filter_bank(dec, 3, FilterFamily::shannon());
  EXPECT_EQ(bank.scales, (std::vector<int>{-2, -1, 0}));
  ASSERT_TRUE(bank.normalization.has_value());
  EXPECT_DOUBLE_EQ(*bank.normalization, 2.0 / dec.lambda_max());
  // The top eigenvalue lands in the band of j = 0 only.
  const int top = dec.n() - 1;
  EXPECT_EQ(bank.evaluated_at(top), 2.0);
  EXPECT_EQ(bank.lowpass(top), 0.0);
  EXPECT_EQ(bank.wavelets(2, top), 1.0);
  EXPECT_EQ(bank.wavelets(0, top), 0.0);
  EXPECT_EQ(bank.wavelets(1, top), 0.0);
}

TEST(FilterBank, UnnormalizedScalesFollowLambdaMax) {
  const auto dec = decompose(validate(fixture_weights()));  // lambda_max ~ 5.709
  const auto sh = build_filter_bank(dec, 2, FilterFamily::shannon(), false);
  EXPECT_EQ(sh.scales, (std::vector<int>{-1, 0, 1, 2}));
  EXPECT_FALSE(sh.normalization.has_value());
  EXPECT_LE(littlewood_paley_deviation(sh), 1e-15);
  const auto me = build_filter_bank(dec, 1, FilterFamily::meyer(), false);
  EXPECT_EQ(me.scales, (std::vector<int>{0, 1, 2}));
  EXPECT_LE(littlewood_paley_deviation(me), 1e-12);
}

TEST(FilterBank, LittlewoodPaley) {
  Rng rng = make_rng(71);
  for (int t = 0; t < 10; ++t) {
    const auto dec = decompose(random_graph(16, rng));
    for (int J = 1; J <= 5; ++J) {
      EXPECT_LE(littlewood_paley_deviation(build_filter_bank(dec, J, FilterFamily::shannon())), 1e-15);
      EXPECT_LE(littlewood_paley_deviation(build_filter_bank(dec, J, FilterFamily::meyer())), 1e-12);
    }
  }
}

TEST(FilterBank, CorruptedBankIsDetected) {
  Rng rng = make_rng(73);
  const auto dec = decompose(random_graph(16, rng));
  auto bank = build_filter_bank(dec, 3, FilterFamily::meyer());
  int s = 0, l = 0;
  bank.wavelets.cwiseAbs().maxCoeff(&s, &l);
  const double v = bank.wavelets(s, l);
  bank.wavelets(s, l) = 0.0;
  EXPECT_NEAR(littlewood_paley_deviation(bank), v * v, 1e-12);
}

TEST(FilterBank, Errors) {
  const auto dec = decompose(path_graph(3));
  EXPECT_THROW_CODE(build_filter_bank(dec, 0, FilterFamily::shannon()), InvalidScaleParameter);
  const SpectralDecomposition flat(Vector::Zero(2), Matrix::Identity(2, 2), 0.0);
  EXPECT_THROW_CODE(build_filter_bank(flat, 2, FilterFamily::shannon()), DegenerateSpectrum);
  const auto bank = build_filter_bank(dec, 2, FilterFamily::shannon());
  EXPECT_THROW_CODE(bank.scale_index(5), UnknownScale);
}

TEST(FilterBank, SupportsCoverNonzeroValues) {
  Rng rng = make_rng(79);
  const auto dec = decompose(random_graph(24, rng));
  const auto bank = build_filter_bank(dec, 3, FilterFamily::meyer());
  auto check = [&](const Vector& values, const SpectralSupport& sup) {
    for (int l = 0; l < values.size(); ++l)
      if (l < sup.begin || l >= sup.end) {
        EXPECT_EQ(values(l), 0.0);
      }
  };
  check(bank.lowpass, bank.lowpass_support);
  for (int s = 0; s < bank.scale_count(); ++s) check(bank.wavelet(s), bank.wavelet_supports[static_cast<std::size_t>(s)]);
}

TEST(ApplyFilter, SpecialFilters) {
  Rng rng = make_rng(83);
  const auto dec = decompose(random_graph(10, rng));
  const Vector f = random_signal(10, rng);
  EXPECT_LE((apply_filter(dec, Vector::Ones(10), f) - f).cwiseAbs().maxCoeff(), 1e-12);
  const Vector u0 = dec.eigenvector(0);
  EXPECT_LE((apply_filter(dec, Vector::Unit(10, 0), f) - u0 * u0.dot(f)).cwiseAbs().maxCoeff(), 1e-12);
  const auto bank = build_filter_bank(dec, 3, FilterFamily::shannon());
  for (int s = 0; s < bank.scale_count(); ++s) {
    EXPECT_LE(apply_filter(dec, bank.wavelet(s), Vector::Constant(10, 3.0)).cwiseAbs().maxCoeff(), 1e-12);
  }
  const Vector via_gft = igft(dec, {bank.lowpass.cwiseProduct(gft(dec, f).values)});
  EXPECT_LE((apply_filter(dec, bank.lowpass, f) - via_gft).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW_CODE(apply_filter(dec, Vector::Ones(9), f), LengthMismatch);
}

TEST(ApplyFilter, OnePassEnergySplit) {
  Rng rng = make_rng(89);
  for (int t = 0; t < 20; ++t) {
    const auto dec = decompose(random_graph(5 + t, rng));
    const Vector f = random_signal(dec.n(), rng);
    for (auto fam : {FilterFamily::shannon(), FilterFamily::meyer()}) {
      const auto bank = build_filter_bank(dec, 3, fam);
      double total = apply_filter(dec, bank.lowpass, f).squaredNorm();
      for (int s = 0; s < bank.scale_count(); ++s) total += apply_filter(dec, bank.wavelet(s), f).squaredNorm();
      EXPECT_NEAR(total, f.squaredNorm(), 1e-10 * f.squaredNorm());
    }
  }
}

TEST(ApplyFilter, FiltersCommute) {
  Rng rng = make_rng(97);
  const auto dec = decompose(random_graph(14, rng));
  const auto bank = build_filter_bank(dec, 2, FilterFamily::meyer());
  const Vector f = random_signal(14, rng);
  for (int s = 0; s < bank.scale_count(); ++s) {
    const Vector a = apply_filter(dec, bank.lowpass, apply_filter(dec, bank.wavelet(s), f));
    const Vector b = apply_filter(dec, bank.wavelet(s), apply_filter(dec, bank.lowpass, f));
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(ApplyFilter, EigenvectorSignFree) {
  Rng rng = make_rng(101);
  const auto dec = decompose(random_graph(12, rng));
  Matrix flipped = dec.eigenvectors();
  for (int l = 0; l < 12; l += 3) flipped.col(l) *= -1.0;
  const SpectralDecomposition other(dec.eigenvalues(), flipped, dec.residual());
  const auto bank = build_filter_bank(dec, 3, FilterFamily::meyer());
  const Vector f = random_signal(12, rng);
  for (int s = 0; s < bank.scale_count(); ++s) {
    EXPECT_LE((apply_filter(dec, bank.wavelet(s), f) - apply_filter(other, bank.wavelet(s), f)).cwiseAbs().maxCoeff(),
              1e-12);
  }
}
