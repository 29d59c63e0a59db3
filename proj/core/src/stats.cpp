#include "supersde/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace supersde {

MeanCI mean_ci(std::span<const double> xs) {
    double s = 0.0, s2 = 0.0;
    for (double x : xs) {
        s += x;
        s2 += x * x;
    }
    return mean_ci_from_sums(s, s2, std::int64_t(xs.size()));
}

MeanCI mean_ci_from_sums(double sum, double sum_sq, std::int64_t n) {
    MeanCI out;
    out.n = n;
    if (n <= 0) return out;
    out.mean = sum / double(n);
    if (n > 1) {
        const double var = std::max(0.0, (sum_sq - sum * sum / double(n)) / double(n - 1));
        out.se = std::sqrt(var / double(n));
    }
    out.ci_low = out.mean - 1.96 * out.se;
    out.ci_high = out.mean + 1.96 * out.se;
    return out;
}

double ks_statistic_uniform(std::vector<double> xs) {
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    const double n = double(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = std::min(std::max(xs[i], 0.0), 1.0);
        d = std::max(d, std::abs((i + 1) / n - f));
        d = std::max(d, std::abs(f - i / n));
    }
    return d;
}

bool ks_uniform_pass(double ks_stat, std::int64_t n, double level) {
    // asymptotic critical values of the Kolmogorov distribution
    double c;
    if (level <= 0.01) c = 1.628;
    else if (level <= 0.05) c = 1.358;
    else c = 1.224;
    return std::sqrt(double(n)) * ks_stat <= c;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y,
                 std::span<const double> w) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need >= 2 matching points");
    LineFit out;
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double wi = w.empty() ? 1.0 : w[i];
        sw += wi;
        sx += wi * x[i];
        sy += wi * y[i];
        sxx += wi * x[i] * x[i];
        sxy += wi * x[i] * y[i];
    }
    const double den = sw * sxx - sx * sx;
    if (den <= 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    out.slope = (sw * sxy - sx * sy) / den;
    out.intercept = (sy - out.slope * sx) / sw;
    out.used = int(x.size());
    // residual-based slope standard error (weighted)
    if (x.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double wi = w.empty() ? 1.0 : w[i];
            const double r = y[i] - out.intercept - out.slope * x[i];
            rss += wi * r * r;
        }
        const double sigma2 = rss / double(x.size() - 2);
        out.slope_se = std::sqrt(sigma2 * sw / den);
    }
    out.slope_ci_low = out.slope - 1.96 * out.slope_se;
    out.slope_ci_high = out.slope + 1.96 * out.slope_se;
    return out;
}

double quantile(std::vector<double> xs, double q) {
    if (xs.empty()) throw std::invalid_argument("quantile: empty sample");
    std::sort(xs.begin(), xs.end());
    const double pos = q * double(xs.size() - 1);
    const std::size_t lo = std::size_t(pos);
    const double f = pos - double(lo);
    if (lo + 1 >= xs.size()) return xs.back();
    return xs[lo] * (1.0 - f) + xs[lo + 1] * f;
}

}  // namespace supersde
