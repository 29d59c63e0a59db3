#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace supersde {

struct MeanCI {
    double mean = 0.0;
    double se = 0.0;       // standard error of the mean
    double ci_low = 0.0;   // mean -/+ 1.96 se
    double ci_high = 0.0;
    std::int64_t n = 0;
};

MeanCI mean_ci(std::span<const double> xs);
/// From accumulated sums (deterministic block reductions).
MeanCI mean_ci_from_sums(double sum, double sum_sq, std::int64_t n);

/// One-sample Kolmogorov-Smirnov statistic against U[0,1]; pass at level
/// alpha when sqrt(n) D_n <= c(alpha) (c(0.01) = 1.628).
double ks_statistic_uniform(std::vector<double> xs);
bool ks_uniform_pass(double ks_stat, std::int64_t n, double level = 0.01);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double slope_ci_low = 0.0;
    double slope_ci_high = 0.0;
    int used = 0;
};

/// Weighted least squares y = a + b x; weights default to 1.
LineFit fit_line(std::span<const double> x, std::span<const double> y,
                 std::span<const double> w = {});

double quantile(std::vector<double> xs, double q);

}  // namespace supersde
