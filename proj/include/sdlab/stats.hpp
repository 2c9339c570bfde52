#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace sdlab::stats {

/// Monte Carlo mean with its standard error (sample std / sqrt(n)).
struct EstimateWithCI {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
    std::optional<std::uint64_t> seed;

    double stderr() const { return stderr_; }
    /// True when |mean - target| <= k * stderr + slack.
    bool covers(double target, double k = 3.0, double slack = 0.0) const;
};

/// Fixed summation order; throws SampleSizeError when fewer than two samples.
EstimateWithCI estimate_mean_ci(std::span<const double> samples, std::optional<std::uint64_t> seed = std::nullopt);

/// Sup distance between the empirical CDF of `samples` and `cdf`. Input order
/// is irrelevant (a sorted copy is used). Requires n >= 10.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Asymptotic Kolmogorov tail probability P(D_n >= d) with the Stephens
/// small-sample correction. `n_eff` is n for one sample, nm/(n+m) for two.
double ks_pvalue(double distance, double n_eff);

struct ChiSquare {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
};

/// Pearson chi-square against equal expected counts in every cell.
ChiSquare chi_square_uniform(std::span<const std::uint64_t> counts);

/// Chi-square homogeneity test of two count vectors over the same cells.
/// Cells empty in both rows are dropped.
ChiSquare chi_square_homogeneity(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

/// Upper-tail probability of the chi-square distribution.
double chi_square_sf(double statistic, std::size_t dof);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

/// Weighted least squares y = a + b x. With per-point standard errors the
/// slope error is the propagated one; without, the residual-based one.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y, std::span<const double> y_stderr = {});

/// Unweighted least squares, with the slope error propagated from independent
/// per-point standard errors.
LinearFit ols_fit(std::span<const double> x, std::span<const double> y, std::span<const double> y_stderr);

double median(std::vector<double> values);

}  // namespace sdlab::stats
