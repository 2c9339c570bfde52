#include "sdlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>

#include "sdlab/error.hpp"

namespace sdlab::stats {

bool EstimateWithCI::covers(double target, double k, double slack) const {
    return std::abs(mean - target) <= k * stderr_ + slack;
}

EstimateWithCI estimate_mean_ci(std::span<const double> samples, std::optional<std::uint64_t> seed) {
    if (samples.size() < 2) throw SampleSizeError("estimate_mean_ci: need at least two samples");
    double sum = 0.0;
    for (double v : samples) sum += v;
    const double n = static_cast<double>(samples.size());
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    const double var = ss / (n - 1.0);
    return {mean, std::sqrt(var / n), samples.size(), seed};
}

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
    if (samples.size() < 10) throw SampleSizeError("ks_statistic: need at least 10 samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return std::clamp(d, 0.0, 1.0);
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw SampleSizeError("ks_two_sample: empty sample");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < sa.size() && j < sb.size()) {
        const double v = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] <= v) ++i;
        while (j < sb.size() && sb[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_pvalue(double distance, double n_eff) {
    if (distance <= 0.0) return 1.0;
    const double root = std::sqrt(n_eff);
    const double lambda = (root + 0.12 + 0.11 / root) * distance;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double chi_square_sf(double statistic, std::size_t dof) {
    if (dof == 0) return 1.0;
    boost::math::chi_squared dist(static_cast<double>(dof));
    return boost::math::cdf(boost::math::complement(dist, std::max(statistic, 0.0)));
}

ChiSquare chi_square_uniform(std::span<const std::uint64_t> counts) {
    if (counts.size() < 2) throw DomainError("chi_square_uniform: need at least two cells");
    double total = 0.0;
    for (auto c : counts) total += static_cast<double>(c);
    if (total <= 0.0) throw DomainError("chi_square_uniform: no observations");
    const double expected = total / static_cast<double>(counts.size());
    double stat = 0.0;
    for (auto c : counts) {
        const double diff = static_cast<double>(c) - expected;
        stat += diff * diff / expected;
    }
    const std::size_t dof = counts.size() - 1;
    return {stat, dof, chi_square_sf(stat, dof)};
}

ChiSquare chi_square_homogeneity(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
    if (a.size() != b.size()) throw DomainError("chi_square_homogeneity: cell count mismatch");
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        na += static_cast<double>(a[i]);
        nb += static_cast<double>(b[i]);
    }
    if (na <= 0.0 || nb <= 0.0) throw DomainError("chi_square_homogeneity: empty row");
    const double total = na + nb;
    double stat = 0.0;
    std::size_t cells = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double col = static_cast<double>(a[i] + b[i]);
        if (col == 0.0) continue;
        ++cells;
        const double ea = col * na / total;
        const double eb = col * nb / total;
        stat += (static_cast<double>(a[i]) - ea) * (static_cast<double>(a[i]) - ea) / ea;
        stat += (static_cast<double>(b[i]) - eb) * (static_cast<double>(b[i]) - eb) / eb;
    }
    const std::size_t dof = cells > 1 ? cells - 1 : 0;
    return {stat, dof, chi_square_sf(stat, dof)};
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y, std::span<const double> y_stderr) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("linear_fit: need >= 2 paired points");
    if (!y_stderr.empty() && y_stderr.size() != y.size()) throw DomainError("linear_fit: stderr size mismatch");
    const bool weighted = !y_stderr.empty();
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double w = 1.0;
        if (weighted) {
            const double s = y_stderr[i];
            w = s > 0.0 ? 1.0 / (s * s) : 1.0;
        }
        sw += w;
        sx += w * x[i];
        sy += w * y[i];
        sxx += w * x[i] * x[i];
        sxy += w * x[i] * y[i];
    }
    const double det = sw * sxx - sx * sx;
    if (det == 0.0) throw DomainError("linear_fit: degenerate abscissae");
    LinearFit fit;
    fit.slope = (sw * sxy - sx * sy) / det;
    fit.intercept = (sxx * sy - sx * sxy) / det;
    if (weighted) {
        fit.slope_stderr = std::sqrt(sw / det);
    } else if (x.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - fit.intercept - fit.slope * x[i];
            rss += r * r;
        }
        fit.slope_stderr = std::sqrt(rss / static_cast<double>(x.size() - 2) * sw / det);
    }
    return fit;
}

LinearFit ols_fit(std::span<const double> x, std::span<const double> y, std::span<const double> y_stderr) {
    if (y_stderr.size() != y.size()) throw DomainError("ols_fit: stderr size mismatch");
    LinearFit fit = linear_fit(x, y);
    double xbar = 0.0;
    for (double v : x) xbar += v;
    xbar /= static_cast<double>(x.size());
    double sxx = 0.0;
    for (double v : x) sxx += (v - xbar) * (v - xbar);
    double var = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = (x[i] - xbar) / sxx;
        var += w * w * y_stderr[i] * y_stderr[i];
    }
    fit.slope_stderr = std::sqrt(var);
    return fit;
}

double median(std::vector<double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    const auto mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double hi = values[mid];
    if (values.size() % 2 == 1) return hi;
    const double lo = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

}  // namespace sdlab::stats
