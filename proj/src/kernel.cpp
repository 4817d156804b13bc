#include "rwre/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rwre/parallel.hpp"

namespace rwre {

KernelField::KernelField(Kind kind, int dim, std::uint64_t time, Site anchor)
    : kind_(kind), time_(time), box_(dim, static_cast<std::int64_t>(time), anchor), values_(box_.volume(), 0.0) {}

double KernelField::total() const noexcept {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
}

double KernelField::max_value() const noexcept {
    return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

void KernelField::for_each_nonzero(const std::function<void(const Site&, double)>& fn) const {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] != 0.0) fn(box_.site(i), values_[i]);
    }
}

namespace {

template <class F>
void ball_loop(int dim, std::int64_t r, int parity, F&& fn) {
    auto first = [&](std::int64_t lo, std::int64_t partial) {
        return ((partial + lo) % 2 + 2) % 2 == parity ? lo : lo + 1;
    };
    Site o;
    if (dim == 1) {
        for (o[0] = first(-r, 0); o[0] <= r; o[0] += 2) fn(o);
        return;
    }
    for (o[0] = -r; o[0] <= r; ++o[0]) {
        const std::int64_t r1 = r - std::abs(o[0]);
        if (dim == 2) {
            for (o[1] = first(-r1, o[0]); o[1] <= r1; o[1] += 2) fn(o);
            continue;
        }
        for (o[1] = -r1; o[1] <= r1; ++o[1]) {
            const std::int64_t r2 = r1 - std::abs(o[1]);
            for (o[2] = first(-r2, o[0] + o[1]); o[2] <= r2; o[2] += 2) fn(o);
        }
    }
}

std::size_t checked_volume(int dim, std::uint64_t radius, std::size_t budget) {
    double cells = 1.0;
    for (int i = 0; i < dim; ++i) cells *= 2.0 * static_cast<double>(radius) + 1.0;
    if (cells > static_cast<double>(budget)) {
        throw ResourceGuardError("kernel-volume", "kernel-volume guard: radius " + std::to_string(radius) + " in d=" +
                                                      std::to_string(dim) + " exceeds the cell budget");
    }
    return static_cast<std::size_t>(cells);
}

}  // namespace

void for_each_ball_site(int dim, std::int64_t radius, int parity, const std::function<void(const Site&)>& fn) {
    ball_loop(dim, radius, parity, fn);
}

std::vector<KernelField> heat_kernel_forward_at(const Environment& env, const Site& z,
                                                std::span<const std::uint64_t> times, std::size_t cell_budget) {
    if (times.empty()) return {};
    if (!std::is_sorted(times.begin(), times.end())) throw std::invalid_argument("kernel times must ascend");
    const int dim = env.dim();
    const std::uint64_t n = times.back();
    checked_volume(dim, n, cell_budget);
    const EnvWindow window(env, static_cast<std::int64_t>(n), z, cell_budget);
    const BoxIndex& box = window.box();
    std::array<std::ptrdiff_t, 2 * kMaxDim> shift{};
    for (int s = 0; s < num_steps(dim); ++s) {
        shift[static_cast<std::size_t>(s)] = step_sign(s) * static_cast<std::ptrdiff_t>(box.stride(step_axis(s)));
    }

    std::vector<double> cur(box.volume(), 0.0), next(box.volume(), 0.0);
    cur[box.index(z)] = 1.0;
    double pruned = 0.0;
    std::vector<KernelField> out;
    std::size_t want = 0;

    auto snapshot = [&](std::uint64_t k) {
        while (want < times.size() && times[want] == k) {
            KernelField f(KernelField::Kind::forward, dim, times[want], z);
            const BoxIndex& fb = f.box();
            ball_loop(dim, static_cast<std::int64_t>(k), static_cast<int>(k % 2), [&](const Site& o) {
                const double v = cur[box.index(z + o)];
                if (v >= kPruneThreshold) {
                    f.values()[fb.index(z + o)] = v;
                } else {
                    pruned += v;
                }
            });
            f.add_pruned(pruned);
            out.push_back(std::move(f));
            ++want;
        }
    };

    snapshot(0);
    for (std::uint64_t k = 0; k < n; ++k) {
        ball_loop(dim, static_cast<std::int64_t>(k), static_cast<int>(k % 2), [&](const Site& o) {
            const std::size_t idx = box.index(z + o);
            double m = cur[idx];
            if (m == 0.0) return;
            cur[idx] = 0.0;
            if (m < kPruneThreshold) {
                pruned += m;
                return;
            }
            const SiteDistribution& w = window.at_index(idx);
            for (int s = 0; s < num_steps(dim); ++s) {
                next[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(idx) + shift[static_cast<std::size_t>(s)])] +=
                    m * w[s];
            }
        });
        std::swap(cur, next);
        snapshot(k + 1);
    }
    return out;
}

KernelField heat_kernel_forward(const Environment& env, const Site& z, std::uint64_t n, std::size_t cell_budget) {
    const std::uint64_t t[] = {n};
    return std::move(heat_kernel_forward_at(env, z, t, cell_budget).front());
}

namespace {

// Runs the backward recursion to time n; calls on_step(k, h_k, box) after each step.
template <class OnStep>
void backward_pass(const Environment& env, std::uint64_t n, std::size_t cell_budget, OnStep&& on_step) {
    const int dim = env.dim();
    // One extra layer: the pull at radius k + 1 reads neighbours at k + 2.
    checked_volume(dim, n + 1, cell_budget);
    const EnvWindow window(env, static_cast<std::int64_t>(n) + 1, Site{}, cell_budget);
    const BoxIndex& box = window.box();
    std::array<std::ptrdiff_t, 2 * kMaxDim> shift{};
    for (int s = 0; s < num_steps(dim); ++s) {
        shift[static_cast<std::size_t>(s)] = step_sign(s) * static_cast<std::ptrdiff_t>(box.stride(step_axis(s)));
    }
    std::vector<double> cur(box.volume(), 0.0), next(box.volume(), 0.0);
    cur[box.index(Site{})] = 1.0;
    on_step(std::uint64_t{0}, cur, box);
    for (std::uint64_t k = 0; k < n; ++k) {
        ball_loop(dim, static_cast<std::int64_t>(k + 1), static_cast<int>((k + 1) % 2), [&](const Site& o) {
            const std::size_t idx = box.index(o);
            const SiteDistribution& w = window.at_index(idx);
            double h = 0.0;
            for (int s = 0; s < num_steps(dim); ++s) {
                h += w[s] * cur[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(idx) + shift[static_cast<std::size_t>(s)])];
            }
            next[idx] = h < kPruneThreshold ? 0.0 : h;
        });
        // Clear time-k values so the buffer is zero outside the next support.
        ball_loop(dim, static_cast<std::int64_t>(k), static_cast<int>(k % 2),
                  [&](const Site& o) { cur[box.index(o)] = 0.0; });
        std::swap(cur, next);
        on_step(k + 1, cur, box);
    }
}

}  // namespace

KernelField backward_kernel(const Environment& env, std::uint64_t n, std::size_t cell_budget) {
    KernelField f(KernelField::Kind::backward, env.dim(), n, Site{});
    backward_pass(env, n, cell_budget, [&](std::uint64_t k, const std::vector<double>& h, const BoxIndex& box) {
        if (k != n) return;
        ball_loop(env.dim(), static_cast<std::int64_t>(n), static_cast<int>(n % 2),
                  [&](const Site& o) { f.values()[f.box().index(o)] = h[box.index(o)]; });
    });
    return f;
}

std::vector<double> f_n_sequence(const Environment& env, std::uint64_t n, std::size_t cell_budget) {
    std::vector<double> out;
    out.reserve(n + 1);
    backward_pass(env, n, cell_budget, [&](std::uint64_t k, const std::vector<double>& h, const BoxIndex& box) {
        double s = 0.0;
        ball_loop(env.dim(), static_cast<std::int64_t>(k), static_cast<int>(k % 2),
                  [&](const Site& o) { s += h[box.index(o)]; });
        out.push_back(s);
    });
    return out;
}

double f_n_exact(const Environment& env, std::uint64_t n, std::size_t cell_budget) {
    return f_n_sequence(env, n, cell_budget).back();
}

FnTail f_n_tail(const EnvironmentLaw& law, std::uint64_t n, std::size_t env_count, std::span<const double> u_grid,
                std::uint64_t master_seed, int threads, const EnvTransform& transform) {
    if (env_count == 0) throw std::invalid_argument("f_n_tail: env_count must be >= 1");
    const std::uint64_t tag = hash_tag("fn_tail");
    FnTail out;
    out.n = n;
    out.samples = parallel_map(env_count, threads, [&](std::size_t i) {
        Environment env(law, derive_seed(master_seed, tag, i, StreamRole::env));
        if (transform) env = transform(env);
        return f_n_exact(env, n);
    });
    out.mean = mean_estimate(out.samples);
    for (double u : u_grid) {
        const auto above = static_cast<std::size_t>(
            std::count_if(out.samples.begin(), out.samples.end(), [&](double f) { return f > u; }));
        FnTail::Point p;
        p.u = u;
        p.survival = static_cast<double>(above) / static_cast<double>(env_count);
        std::tie(p.lower, p.upper) = clopper_pearson(above, env_count, 0.95);
        out.survival.push_back(p);
    }
    return out;
}

std::vector<KernelField> annealed_kernels(const EnvironmentLaw& law, std::span<const std::uint64_t> times,
                                          std::size_t env_count, std::uint64_t master_seed, int threads) {
    if (env_count == 0) throw std::invalid_argument("annealed_kernels: env_count must be >= 1");
    const std::uint64_t tag = hash_tag("annealed_kernel");
    std::vector<KernelField> sum;
    constexpr std::size_t kBatch = 8;
    for (std::size_t begin = 0; begin < env_count; begin += kBatch) {
        const std::size_t count = std::min(kBatch, env_count - begin);
        auto batch = parallel_map(count, threads, [&](std::size_t j) {
            const Environment env(law, derive_seed(master_seed, tag, begin + j, StreamRole::env));
            return heat_kernel_forward_at(env, Site{}, times);
        });
        for (auto& fields : batch) {
            if (sum.empty()) {
                sum = std::move(fields);
                continue;
            }
            for (std::size_t t = 0; t < sum.size(); ++t) {
                auto& acc = sum[t].values();
                const auto& v = fields[t].values();
                for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
                sum[t].add_pruned(fields[t].pruned_mass());
            }
        }
    }
    const double scale = 1.0 / static_cast<double>(env_count);
    for (auto& f : sum) {
        for (double& v : f.values()) v *= scale;
    }
    return sum;
}

LocalCltReport local_clt_report(const KernelField& kernel) {
    const int dim = kernel.dim();
    LocalCltReport rep;
    rep.n = kernel.time();
    const double total = kernel.total();
    Vec mean{};
    kernel.for_each_nonzero([&](const Site& x, double p) {
        for (int a = 0; a < dim; ++a) mean[static_cast<std::size_t>(a)] += p * static_cast<double>(x[a]);
    });
    for (double& m : mean) m /= total;
    auto& cov = rep.covariance;
    kernel.for_each_nonzero([&](const Site& x, double p) {
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b)
                cov[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] +=
                    p * (static_cast<double>(x[a]) - mean[static_cast<std::size_t>(a)]) *
                    (static_cast<double>(x[b]) - mean[static_cast<std::size_t>(b)]);
    });
    for (auto& row : cov)
        for (double& c : row) c /= total;
    rep.mean = mean;

    // Cholesky factor of the covariance.
    double chol[kMaxDim][kMaxDim] = {};
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = cov[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            for (int k = 0; k < j; ++k) s -= chol[i][k] * chol[j][k];
            if (i == j) {
                if (!(s > 1e-12)) {
                    rep.singular = true;
                    return rep;
                }
                chol[i][i] = std::sqrt(s);
            } else {
                chol[i][j] = s / chol[j][j];
            }
        }
    }
    double log_det = 0.0;
    for (int i = 0; i < dim; ++i) log_det += 2.0 * std::log(chol[i][i]);
    const double log_norm = std::log(2.0) - 0.5 * dim * std::log(2.0 * std::numbers::pi) - 0.5 * log_det;

    const int parity_class = (parity(kernel.anchor()) + static_cast<int>(kernel.time() % 2)) % 2;
    const BoxIndex& box = kernel.box();
    double tv = 0.0;
    for (std::size_t idx = 0; idx < box.volume(); ++idx) {
        const Site x = box.site(idx);
        if (parity(x) != parity_class) continue;
        // Solve L y = x - mean; quadratic form is |y|^2.
        double y[kMaxDim] = {};
        double q = 0.0;
        for (int i = 0; i < dim; ++i) {
            double s = static_cast<double>(x[i]) - mean[static_cast<std::size_t>(i)];
            for (int k = 0; k < i; ++k) s -= chol[i][k] * y[k];
            y[i] = s / chol[i][i];
            q += y[i] * y[i];
        }
        const double g = std::exp(log_norm - 0.5 * q);
        tv += std::abs(kernel.values()[idx] - g);
    }
    rep.tv = std::min(1.0, 0.5 * tv);
    return rep;
}

LocalCltReport local_clt_gap(const EnvironmentLaw& law, std::uint64_t n, std::size_t env_count,
                             std::uint64_t master_seed, int threads) {
    const std::uint64_t t[] = {n};
    return local_clt_report(annealed_kernels(law, t, env_count, master_seed, threads).front());
}

KernelDecay annealed_kernel_decay(const EnvironmentLaw& law, std::span<const std::uint64_t> n_grid,
                                  std::size_t env_count, std::uint64_t master_seed, int threads) {
    if (n_grid.size() < 2) throw std::invalid_argument("annealed_kernel_decay: need >= 2 times");
    KernelDecay out;
    out.n_grid.assign(n_grid.begin(), n_grid.end());
    const auto fields = annealed_kernels(law, n_grid, env_count, master_seed, threads);
    std::vector<double> x, y;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        out.max_prob.push_back(fields[i].max_value());
        x.push_back(std::log(static_cast<double>(n_grid[i])));
        y.push_back(std::log(out.max_prob.back()));
    }
    out.fit = fit_line(x, y);
    return out;
}

}  // namespace rwre
