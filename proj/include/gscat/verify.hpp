#pragma once

// Numerical checks of the transform's energy, covariance, invariance and
// stability properties, plus the SBM edge-flip experiment.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gscat/graph.hpp"
#include "gscat/scattering.hpp"

namespace gscat {

using ContextValue = std::variant<bool, long long, double, std::string>;

struct TheoremReport {
  std::string name;
  double lhs = 0.0;
  std::optional<double> rhs_bound;  // absent for logged-only quantities
  double tolerance = 0.0;
  bool asserted = true;             // false: recorded for reference, never fails
  bool passed = false;
  std::map<std::string, ContextValue> context;
};

/// passed = lhs <= rhs + tolerance (or true when not asserted)
TheoremReport make_report(std::string name, double lhs, std::optional<double> rhs, double tolerance,
                          bool asserted = true);

bool all_passed(const std::vector<TheoremReport>& reports);

std::string to_json(const TheoremReport& report);
std::string to_json(const std::vector<TheoremReport>& reports);

/// max over output paths of || S[PG][p](P f) - P S[G][p] f ||_inf; tolerance 1e-8.
TheoremReport check_permutation_covariance(const SimpleGraph& g, const Vector& f, const Permutation& p,
                                           const ScatteringConfig& cfg);

/// lhs = || S[PG](P f) - S[G] f || over output paths, compared with
/// c_phi 2^-(J+1/2) / lambda_1 * sqrt(n+2) * ||P - I|| * ||f||. Also requires the
/// lhs at J+2 not to exceed the lhs at J (context: lhs_at_J_plus_2).
TheoremReport check_invariance_bound(const SimpleGraph& g, const Vector& f, const Permutation& p,
                                     const ScatteringConfig& cfg);

/// Layer balance, truncated norm identity, frontier bound, decay rate, and
/// the zero mean of wavelet outputs.
std::vector<TheoremReport> check_energy_theorems(const SimpleGraph& g, const Vector& f, const ScatteringConfig& cfg);

/// Perturbs the weights by at most c_sharp / n^2 and checks ||L - L~|| <= c_sharp/n,
/// Weyl's bound, and the Davis-Kahan angle bound 2 c_sharp / (n delta). The
/// scaled scattering distance sqrt(n) ||S[G]f - S[G~]f|| / ||f|| is logged.
/// Throws GapTooSmall when delta = 0, InvalidBound when c_sharp > n delta / 2.
std::vector<TheoremReport> check_weight_perturbation(const SimpleGraph& g, double c_sharp,
                                                     const ScatteringConfig& cfg, std::uint64_t seed,
                                                     std::optional<Vector> f = std::nullopt);

enum class SbmSignal { Ones, Identity, Random };

std::string_view to_string(SbmSignal s) noexcept;
SbmSignal parse_sbm_signal(std::string_view name);

struct StabilityCurve {
  std::vector<int> sizes;
  std::vector<double> mean_relative_error;
  int trials = 0;
  std::uint64_t seed = 0;
  SbmSignal signal = SbmSignal::Identity;
};

/// Two-class SBM with p_in = min(1, 6 ln N / N), p_out = ln N / N. Each trial
/// flips one uniformly drawn vertex pair (redrawing pairs whose flip would
/// disconnect the graph) and records ||S[G]F - S[G~]F||_F / ||F||_F.
StabilityCurve sbm_stability_curve(const std::vector<int>& sizes, int trials, const ScatteringConfig& cfg,
                                   std::uint64_t seed, SbmSignal signal = SbmSignal::Identity);

double sbm_p_in(int n_per_class);
double sbm_p_out(int n_per_class);

/// `N,mean_relative_error` rows.
std::string to_csv(const StabilityCurve& curve);

/// channels x M: share of ||f_c||^2 captured by output layers 0..m.
Matrix cumulative_energy_fractions(const FeatureMatrix& features, const Matrix& F);

}  // namespace gscat
