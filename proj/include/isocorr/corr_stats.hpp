#pragma once

// Pairwise correlation sampling, the Fisher z-transform and a
// Kolmogorov-Smirnov test against a Normal reference.

#include <cstdint>
#include <span>
#include <vector>

#include "isocorr/panel.hpp"

namespace isocorr {

/// |r| is clamped to this before atanh when sampling pairs.
inline constexpr double kMaxAbsCorrelation = 1.0 - 1e-12;

struct PairSample {
    int asset_a = 0;
    int asset_b = 0;
    double pearson_r = 0.0;
    double fisher_z = 0.0;
    int n_obs = 0;
    /// False when one of the two series has zero variance; r and z are NaN.
    bool defined = true;
    /// True when |r| had to be clamped to kMaxAbsCorrelation before atanh.
    bool clamped = false;
};

/// Draws `trials` asset pairs, each uniformly among the N(N-1)/2 distinct
/// pairs (pairs may repeat across trials). Deterministic for a given seed.
std::vector<PairSample> sample_pairs(const ReturnsPanel& panel, int trials, std::uint64_t seed);

/// Number of distinct unordered pairs, N(N-1)/2.
std::int64_t pair_population(std::int64_t n);

/// Product-moment correlation. Throws UndefinedCorrelation on zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

/// sqrt(n_obs - 3) * atanh(r). Throws InfiniteTransform for |r| >= 1 and
/// InsufficientData for n_obs < 4.
double fisher_z(double r, int n_obs);

double normal_cdf(double x, double mean, double sd);

/// Asymptotic Kolmogorov survival function Q(lambda).
double kolmogorov_q(double lambda);

struct KsResult {
    double d_statistic = 0.0;
    double p_value = 1.0;
};

/// Two-sided one-sample KS test against Normal(mean, sd).
KsResult ks_test_normal(std::span<const double> samples, double mean, double sd);

struct HistogramBin {
    double left = 0.0;
    double right = 0.0;
    std::int64_t count = 0;
};

/// Equal-width bins over [lo, hi]; values outside are ignored, hi itself
/// falls in the last bin.
std::vector<HistogramBin> histogram(std::span<const double> values, int bins, double lo, double hi);

}  // namespace isocorr
