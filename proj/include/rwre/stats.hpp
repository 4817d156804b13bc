#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace rwre {

struct MeanEstimate {
    double mean = 0.0;
    double se = 0.0;  // standard error of the mean
    std::size_t n = 0;

    // Half width of the two-sided normal confidence interval.
    double half_width(double confidence) const;
};

MeanEstimate mean_estimate(std::span<const double> xs);

double normal_quantile(double p);

// Exact binomial interval for k successes in n trials.
std::pair<double, double> clopper_pearson(std::size_t k, std::size_t n, double confidence);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double r2 = 0.0;
    std::size_t n = 0;
};

// Ordinary least squares y ~ a + b x. Needs n >= 2 distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

double autocorrelation(std::span<const double> xs, std::size_t lag);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;  // asymptotic Kolmogorov distribution
};

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Type-7 (linear interpolation) sample quantile.
double quantile(std::vector<double> xs, double q);

}  // namespace rwre
