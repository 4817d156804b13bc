#include "rwre/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/normal.hpp>

namespace rwre {

double MeanEstimate::half_width(double confidence) const {
    return normal_quantile(0.5 + confidence / 2.0) * se;
}

MeanEstimate mean_estimate(std::span<const double> xs) {
    MeanEstimate est;
    est.n = xs.size();
    if (xs.empty()) return est;
    double sum = 0.0;
    for (double x : xs) sum += x;
    est.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - est.mean) * (x - est.mean);
        est.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
    }
    return est;
}

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal_distribution<double>(), p); }

std::pair<double, double> clopper_pearson(std::size_t k, std::size_t n, double confidence) {
    if (n == 0 || k > n) throw std::invalid_argument("clopper_pearson: need 0 <= k <= n, n > 0");
    const double a = (1.0 - confidence) / 2.0;
    const double kk = static_cast<double>(k);
    const double nn = static_cast<double>(n);
    const double lo = k == 0 ? 0.0 : boost::math::quantile(boost::math::beta_distribution<double>(kk, nn - kk + 1), a);
    const double hi =
        k == n ? 1.0 : boost::math::quantile(boost::math::beta_distribution<double>(kk + 1, nn - kk), 1.0 - a);
    return {lo, hi};
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 paired points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0) throw std::invalid_argument("fit_line: x values are all equal");
    LineFit fit;
    fit.n = x.size();
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        sse += r * r;
    }
    fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    fit.slope_se = x.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
    return fit;
}

double autocorrelation(std::span<const double> xs, std::size_t lag) {
    if (xs.size() <= lag + 1) throw std::invalid_argument("autocorrelation: series too short");
    const double n = static_cast<double>(xs.size());
    double m = 0.0;
    for (double x : xs) m += x;
    m /= n;
    double var = 0.0;
    for (double x : xs) var += (x - m) * (x - m);
    if (var == 0.0) return 0.0;
    double cov = 0.0;
    for (std::size_t i = lag; i < xs.size(); ++i) cov += (xs[i] - m) * (xs[i - lag] - m);
    return cov / var;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KsResult res;
    res.statistic = d;
    const double en = std::sqrt(na * nb / (na + nb));
    const double lambda = (en + 0.12 + 0.11 / en) * d;
    if (lambda < 1e-3) return res;
    double q = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
        q += term;
        if (std::abs(term) < 1e-12) break;
    }
    res.p_value = std::clamp(q, 0.0, 1.0);
    return res;
}

double quantile(std::vector<double> xs, double q) {
    if (xs.empty()) throw std::invalid_argument("quantile of empty sample");
    std::sort(xs.begin(), xs.end());
    const double pos = q * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

}  // namespace rwre
