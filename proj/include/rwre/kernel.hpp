#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rwre/env_window.hpp"
#include "rwre/environment.hpp"
#include "rwre/stats.hpp"

namespace rwre {

// Nonnegative function on Z^d supported in the l1 ball of radius `time`
// around an anchor, stored densely on the enclosing box.
//   forward:  x -> P_omega^anchor(X_time = x)
//   backward: z -> P_omega^z(X_time = anchor)
class KernelField {
public:
    enum class Kind { forward, backward };

    KernelField() = default;
    KernelField(Kind kind, int dim, std::uint64_t time, Site anchor);

    Kind kind() const noexcept { return kind_; }
    int dim() const noexcept { return box_.dim(); }
    std::uint64_t time() const noexcept { return time_; }
    const Site& anchor() const noexcept { return box_.anchor(); }
    const BoxIndex& box() const noexcept { return box_; }

    double at(const Site& x) const noexcept { return box_.contains(x) ? values_[box_.index(x)] : 0.0; }
    double total() const noexcept;
    double max_value() const noexcept;
    // Mass dropped by underflow pruning while building the field.
    double pruned_mass() const noexcept { return pruned_mass_; }

    // Visits every site with a nonzero value, in index order.
    void for_each_nonzero(const std::function<void(const Site&, double)>& fn) const;

    std::vector<double>& values() noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }
    void add_pruned(double m) noexcept { pruned_mass_ += m; }

private:
    Kind kind_ = Kind::forward;
    std::uint64_t time_ = 0;
    BoxIndex box_;
    std::vector<double> values_;
    double pruned_mass_ = 0.0;
};

inline constexpr double kPruneThreshold = 1e-300;

// Calls fn(offset) for offsets with |offset|_1 <= radius and coordinate sum
// of the given parity, in lexicographic order.
void for_each_ball_site(int dim, std::int64_t radius, int parity, const std::function<void(const Site&)>& fn);

// P_omega^z(X_n = .) by the forward recursion.
KernelField heat_kernel_forward(const Environment& env, const Site& z, std::uint64_t n,
                                std::size_t cell_budget = kDefaultCellBudget);

// Forward kernels from z at each requested time (ascending), one pass.
std::vector<KernelField> heat_kernel_forward_at(const Environment& env, const Site& z,
                                                std::span<const std::uint64_t> times,
                                                std::size_t cell_budget = kDefaultCellBudget);

// h_n(z) = P_omega^z(X_n = 0) by the backward recursion.
KernelField backward_kernel(const Environment& env, std::uint64_t n, std::size_t cell_budget = kDefaultCellBudget);

// f_n(omega) = sum_z P_omega^z(X_n = 0).
double f_n_exact(const Environment& env, std::uint64_t n, std::size_t cell_budget = kDefaultCellBudget);

// f_0..f_n from one backward pass.
std::vector<double> f_n_sequence(const Environment& env, std::uint64_t n,
                                 std::size_t cell_budget = kDefaultCellBudget);

using EnvTransform = std::function<Environment(const Environment&)>;

struct FnTail {
    std::uint64_t n = 0;
    std::vector<double> samples;  // f_n per environment, in environment order
    MeanEstimate mean;
    struct Point {
        double u = 0.0;
        double survival = 0.0;
        double lower = 0.0;
        double upper = 1.0;
    };
    std::vector<Point> survival;
};

// Exact f_n over i.i.d. environments; `transform` (e.g. trap planting) is
// applied to each environment before the computation.
FnTail f_n_tail(const EnvironmentLaw& law, std::uint64_t n, std::size_t env_count, std::span<const double> u_grid,
                std::uint64_t master_seed, int threads = 1, const EnvTransform& transform = {});

// Environment average of exact quenched forward kernels from the origin at
// each time in `times`. The sum runs in environment order.
std::vector<KernelField> annealed_kernels(const EnvironmentLaw& law, std::span<const std::uint64_t> times,
                                          std::size_t env_count, std::uint64_t master_seed, int threads = 1);

struct LocalCltReport {
    std::uint64_t n = 0;
    Vec mean{};
    std::array<std::array<double, kMaxDim>, kMaxDim> covariance{};
    double tv = 1.0;
    bool singular = false;
};

// Gaussian fit of a forward field and its total-variation gap on the
// reachable parity class (Gaussian density doubled on that class).
LocalCltReport local_clt_report(const KernelField& kernel);

LocalCltReport local_clt_gap(const EnvironmentLaw& law, std::uint64_t n, std::size_t env_count,
                             std::uint64_t master_seed, int threads = 1);

struct KernelDecay {
    std::vector<std::uint64_t> n_grid;
    std::vector<double> max_prob;
    LineFit fit;  // log max_x P(X_n = x) against log n
};

KernelDecay annealed_kernel_decay(const EnvironmentLaw& law, std::span<const std::uint64_t> n_grid,
                                  std::size_t env_count, std::uint64_t master_seed, int threads = 1);

}  // namespace rwre
