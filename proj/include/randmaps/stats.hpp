#pragma once

#include <cstdint>
#include <vector>

namespace randmaps {

// Two-sample Kolmogorov-Smirnov sup distance on raw samples.
double ks_distance(std::vector<double> a, std::vector<double> b);

// Upper regularized incomplete gamma Q(a, x).
double gamma_q(double a, double x);

// Survival function of the chi-square distribution with df degrees of freedom.
double chi_square_sf(double stat, double df);

// Pearson chi-square p-value of observed counts against expected weights
// (weights are normalized internally). Cells with zero expectation must have
// zero observations.
double chi_square_pvalue(const std::vector<std::int64_t>& observed,
                         const std::vector<double>& expected_weights);

struct MeanStderr {
    double mean = 0;
    double stderr_ = 0;
    std::int64_t count = 0;
};
MeanStderr mean_stderr(const std::vector<double>& xs);

// Least-squares slope/intercept of y against x.
struct LineFit {
    double slope = 0;
    double intercept = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Empirical quantile (sorted copy, nearest-rank with linear interpolation).
double quantile(std::vector<double> xs, double q);

}  // namespace randmaps
