#include "randmaps/stats.hpp"

#include <algorithm>
#include <cmath>

#include "randmaps/errors.hpp"

namespace randmaps {

double ks_distance(std::vector<double> a, std::vector<double> b) {
    RM_CHECK(!a.empty() && !b.empty(), "ks: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

// series / continued-fraction evaluation of the regularized incomplete gamma
static double gamma_p_series(double a, double x) {
    double sum = 1.0 / a, term = sum;
    for (int n = 1; n < 1000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

static double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1 - a, c = 1 / tiny, d = 1 / b, h = d;
    for (int i = 1; i < 1000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double gamma_q(double a, double x) {
    if (x < 0 || a <= 0) return 1.0;
    if (x == 0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi_square_sf(double stat, double df) { return gamma_q(df / 2.0, stat / 2.0); }

double chi_square_pvalue(const std::vector<std::int64_t>& observed,
                         const std::vector<double>& expected_weights) {
    RM_CHECK(observed.size() == expected_weights.size() && !observed.empty(),
             "chi-square: size mismatch");
    std::int64_t total = 0;
    double wsum = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        total += observed[i];
        wsum += expected_weights[i];
    }
    RM_CHECK(total > 0 && wsum > 0, "chi-square: empty data");
    double stat = 0;
    std::int64_t df = -1;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double expect = static_cast<double>(total) * expected_weights[i] / wsum;
        if (expect == 0.0) {
            RM_CHECK(observed[i] == 0, "chi-square: observation in zero-probability cell");
            continue;
        }
        double diff = static_cast<double>(observed[i]) - expect;
        stat += diff * diff / expect;
        ++df;
    }
    if (df <= 0) return 1.0;
    return chi_square_sf(stat, static_cast<double>(df));
}

MeanStderr mean_stderr(const std::vector<double>& xs) {
    MeanStderr out;
    out.count = static_cast<std::int64_t>(xs.size());
    if (xs.empty()) return out;
    double s = 0;
    for (double x : xs) s += x;
    out.mean = s / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double v = 0;
        for (double x : xs) v += (x - out.mean) * (x - out.mean);
        v /= static_cast<double>(xs.size() - 1);
        out.stderr_ = std::sqrt(v / static_cast<double>(xs.size()));
    }
    return out;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    RM_CHECK(x.size() == y.size() && x.size() >= 2, "fit: need >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

double quantile(std::vector<double> xs, double q) {
    RM_CHECK(!xs.empty(), "quantile: empty sample");
    std::sort(xs.begin(), xs.end());
    double pos = q * static_cast<double>(xs.size() - 1);
    auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= xs.size()) return xs.back();
    double frac = pos - static_cast<double>(lo);
    return xs[lo] * (1 - frac) + xs[lo + 1] * frac;
}

}  // namespace randmaps
