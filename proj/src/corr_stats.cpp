#include "isocorr/corr_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "isocorr/error.hpp"
#include "isocorr/parallel.hpp"
#include "isocorr/random.hpp"

namespace isocorr {

void ReturnsPanel::validate() const {
    if (static_cast<std::size_t>(returns.cols()) != asset_ids.size()) {
        throw ValidationError("ReturnsPanel: " + std::to_string(returns.cols()) + " columns but " +
                              std::to_string(asset_ids.size()) + " asset ids");
    }
    if (static_cast<std::size_t>(returns.rows()) != period_stamps.size()) {
        throw ValidationError("ReturnsPanel: " + std::to_string(returns.rows()) + " rows but " +
                              std::to_string(period_stamps.size()) + " period stamps");
    }
    if (!returns.allFinite()) {
        throw ValidationError("ReturnsPanel: missing or non-finite return cells");
    }
}

std::int64_t pair_population(std::int64_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw DimensionMismatch("pearson: series lengths differ (" + std::to_string(x.size()) +
                                " vs " + std::to_string(y.size()) + ")");
    }
    const std::size_t n = x.size();
    if (n < 2) {
        throw InsufficientData("pearson: need at least 2 observations");
    }
    // A constant series can leave rounding residue in the centred sums below.
    auto constant = [](std::span<const double> v) {
        return std::all_of(v.begin(), v.end(), [&](double e) { return e == v[0]; });
    };
    if (constant(x) || constant(y)) {
        throw UndefinedCorrelation("pearson: zero-variance series");
    }
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) {
        throw UndefinedCorrelation("pearson: zero-variance series");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double fisher_z(double r, int n_obs) {
    if (n_obs < 4) {
        throw InsufficientData("fisher_z: need n_obs >= 4, got " + std::to_string(n_obs));
    }
    if (!(std::abs(r) < 1.0)) {
        throw InfiniteTransform("fisher_z: |r| >= 1 (r=" + std::to_string(r) + ")");
    }
    const double atanh_r = 0.5 * std::log((1.0 + r) / (1.0 - r));
    return std::sqrt(static_cast<double>(n_obs - 3)) * atanh_r;
}

std::vector<PairSample> sample_pairs(const ReturnsPanel& panel, int trials, std::uint64_t seed) {
    panel.validate();
    const int n = panel.assets();
    const int t = panel.periods();
    if (n < 2) {
        throw InsufficientData("sample_pairs: need at least 2 assets, got " + std::to_string(n));
    }
    if (t < 4) {
        throw InsufficientData("sample_pairs: need at least 4 periods, got " + std::to_string(t));
    }
    if (trials < 1) {
        throw ValidationError("sample_pairs: trials must be >= 1");
    }

    std::vector<PairSample> out(static_cast<std::size_t>(trials));
    parallel_for(out.size(), [&](std::size_t trial) {
        Rng rng(derive_seed(seed, trial));
        auto a = rng.index(static_cast<std::size_t>(n));
        auto b = rng.index(static_cast<std::size_t>(n - 1));
        if (b >= a) {
            ++b;
        }
        if (a > b) {
            std::swap(a, b);
        }

        PairSample s;
        s.asset_a = static_cast<int>(a);
        s.asset_b = static_cast<int>(b);
        s.n_obs = t;
        const auto col_a = panel.returns.col(static_cast<Eigen::Index>(a));
        const auto col_b = panel.returns.col(static_cast<Eigen::Index>(b));
        try {
            s.pearson_r = pearson({col_a.data(), static_cast<std::size_t>(t)},
                                  {col_b.data(), static_cast<std::size_t>(t)});
            double r = s.pearson_r;
            if (std::abs(r) > kMaxAbsCorrelation) {
                r = std::copysign(kMaxAbsCorrelation, r);
                s.clamped = true;
            }
            s.fisher_z = fisher_z(r, t);
        } catch (const UndefinedCorrelation&) {
            s.defined = false;
            s.pearson_r = std::numeric_limits<double>::quiet_NaN();
            s.fisher_z = std::numeric_limits<double>::quiet_NaN();
        }
        out[trial] = s;
    });
    return out;
}

double normal_cdf(double x, double mean, double sd) {
    return 0.5 * std::erfc(-(x - mean) / (sd * M_SQRT2));
}

double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) {
        return 1.0;
    }
    // Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2)
    const double a = -2.0 * lambda * lambda;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * sign * std::exp(a * k * k);
        sum += term;
        if (std::abs(term) < 1e-12) {
            return std::clamp(sum, 0.0, 1.0);
        }
        sign = -sign;
    }
    // Did not converge: lambda is tiny and Q is 1 to working precision.
    return 1.0;
}

KsResult ks_test_normal(std::span<const double> samples, double mean, double sd) {
    if (samples.size() < 8) {
        throw InsufficientData("ks_test_normal: need at least 8 samples, got " +
                               std::to_string(samples.size()));
    }
    if (!(sd > 0.0)) {
        throw ValidationError("ks_test_normal: sd must be positive");
    }
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());

    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = normal_cdf(sorted[i], mean, sd);
        const double above = static_cast<double>(i + 1) / n - f;
        const double below = f - static_cast<double>(i) / n;
        d = std::max({d, above, below});
    }
    return KsResult{d, kolmogorov_q(std::sqrt(n) * d)};
}

std::vector<HistogramBin> histogram(std::span<const double> values, int bins, double lo, double hi) {
    if (bins < 1 || !(hi > lo)) {
        throw ValidationError("histogram: need bins >= 1 and hi > lo");
    }
    const double width = (hi - lo) / bins;
    std::vector<HistogramBin> out(static_cast<std::size_t>(bins));
    for (int i = 0; i < bins; ++i) {
        out[i].left = lo + i * width;
        out[i].right = (i + 1 == bins) ? hi : lo + (i + 1) * width;
    }
    for (double v : values) {
        if (!std::isfinite(v) || v < lo || v > hi) {
            continue;
        }
        auto idx = static_cast<int>((v - lo) / width);
        idx = std::clamp(idx, 0, bins - 1);
        ++out[static_cast<std::size_t>(idx)].count;
    }
    return out;
}

}  // namespace isocorr
