#include "rwre/regen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rwre/stats.hpp"

namespace rwre {

RegenerationRecord find_regenerations(std::span<const std::int64_t> heights, std::int64_t guard) {
    RegenerationRecord rec;
    rec.guard = guard;
    const std::size_t n = heights.size();
    if (n < 2) return rec;

    // suffix_min[k] = min over j >= k of h_j; sentinel past the end.
    std::vector<std::int64_t> suffix_min(n + 1, std::numeric_limits<std::int64_t>::max());
    for (std::size_t k = n; k-- > 0;) suffix_min[k] = std::min(suffix_min[k + 1], heights[k]);

    const std::int64_t final_height = heights[n - 1];
    std::int64_t prefix_max = heights[0];
    for (std::size_t k = 1; k < n; ++k) {
        const std::int64_t h = heights[k];
        if (prefix_max < h && h <= suffix_min[k + 1]) {
            rec.candidates.push_back(k);
            if (k + 1 < n && final_height >= h + guard) rec.times.push_back(k);
        }
        prefix_max = std::max(prefix_max, h);
    }
    return rec;
}

RegenerationRecord find_regenerations(const Trajectory& traj, const Site& direction, std::int64_t guard) {
    const auto positions = traj.positions();
    std::vector<std::int64_t> heights;
    heights.reserve(positions.size());
    for (const auto& x : positions) heights.push_back(dot(x, direction));
    auto rec = find_regenerations(heights, guard);
    if (!rec.times.empty()) rec.first_position = positions[rec.times.front()];
    for (std::size_t i = 0; i + 1 < rec.times.size(); ++i) {
        rec.increments.push_back({rec.times[i + 1] - rec.times[i], positions[rec.times[i + 1]] - positions[rec.times[i]]});
    }
    return rec;
}

IidReport iid_diagnostics(std::span<const RegenerationRecord> records) {
    IidReport rep;
    std::vector<double> pooled;
    std::vector<std::array<double, kMaxDim>> dx;
    std::size_t records_with_pairs = 0;
    for (const auto& r : records) {
        for (const auto& inc : r.increments) {
            pooled.push_back(static_cast<double>(inc.dtau));
            dx.push_back({static_cast<double>(inc.dx[0]), static_cast<double>(inc.dx[1]), static_cast<double>(inc.dx[2])});
        }
        if (r.increments.size() >= 2) ++records_with_pairs;
    }
    rep.increments = pooled.size();
    if (records_with_pairs == 0 || pooled.size() < 4) {
        rep.insufficient = true;
        return rep;
    }

    const double n = static_cast<double>(pooled.size());
    double mean = 0.0;
    for (double v : pooled) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : pooled) var += (v - mean) * (v - mean);
    rep.mean_dtau = mean;
    rep.var_dtau = var / (n - 1.0);

    double cov = 0.0;
    std::size_t pairs = 0;
    for (const auto& r : records) {
        for (std::size_t i = 1; i < r.increments.size(); ++i) {
            cov += (static_cast<double>(r.increments[i].dtau) - mean) * (static_cast<double>(r.increments[i - 1].dtau) - mean);
            ++pairs;
        }
    }
    rep.lag1_autocorrelation = var > 0.0 ? (cov / static_cast<double>(pairs)) / (var / n) : 0.0;

    const std::size_t half = pooled.size() / 2;
    const auto ks = ks_two_sample(std::vector<double>(pooled.begin(), pooled.begin() + static_cast<std::ptrdiff_t>(half)),
                                  std::vector<double>(pooled.begin() + static_cast<std::ptrdiff_t>(half), pooled.end()));
    rep.ks_statistic = ks.statistic;
    rep.ks_p_value = ks.p_value;

    for (std::size_t a = 0; a < kMaxDim; ++a) {
        double m = 0.0;
        for (const auto& v : dx) m += v[a];
        m /= n;
        double s = 0.0;
        for (const auto& v : dx) s += (v[a] - m) * (v[a] - m);
        rep.mean_dx[a] = m;
        rep.var_dx[a] = s / (n - 1.0);
    }
    return rep;
}

TailEstimate tail_estimate(std::span<const double> samples, std::span<const double> u_grid, double confidence) {
    if (samples.empty()) throw std::invalid_argument("tail_estimate: no samples");
    for (std::size_t i = 1; i < u_grid.size(); ++i) {
        if (!(u_grid[i] > u_grid[i - 1])) throw std::invalid_argument("tail_estimate: u grid must increase");
    }
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double max_sample = sorted.back();

    TailEstimate est;
    for (double u : u_grid) {
        const auto above = static_cast<std::size_t>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), u));
        TailPoint p;
        p.u = u;
        p.survival = static_cast<double>(above) / static_cast<double>(n);
        if (u >= max_sample) {
            p.beyond_max = true;
            p.lower = 0.0;
            p.upper = 1.0 - std::pow(1.0 - confidence, 1.0 / static_cast<double>(n));
        } else {
            std::tie(p.lower, p.upper) = clopper_pearson(above, n, confidence);
        }
        est.points.push_back(p);
    }

    std::vector<double> x, y, lu;
    for (const auto& p : est.points) {
        if (p.u > std::exp(1.0) && p.survival > 0.0 && p.survival < 1.0) {
            x.push_back(std::log(std::log(p.u)));
            lu.push_back(std::log(p.u));
            y.push_back(std::log(-std::log(p.survival)));
        }
    }
    if (x.size() >= 3) {
        TailFit fit;
        const auto loglog = fit_line(x, y);
        const auto power = fit_line(lu, y);
        fit.alpha = loglog.slope;
        fit.r2 = loglog.r2;
        fit.power_slope = power.slope;
        fit.power_r2 = power.r2;
        fit.non_log_shape = power.r2 > loglog.r2;
        fit.points = x.size();
        fit.caveat =
            "exp(-(log u)^alpha) tails are asymptotic in u; sample sizes reachable here do not enter that regime, "
            "so alpha is descriptive only";
        est.fit = fit;
    }
    return est;
}

}  // namespace rwre
