#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rwre/environment.hpp"

namespace rwre {

class ResourceGuardError : public std::runtime_error {
public:
    ResourceGuardError(std::string guard, const std::string& what)
        : std::runtime_error(what), guard_(std::move(guard)) {}
    const std::string& guard() const noexcept { return guard_; }

private:
    std::string guard_;
};

// Dense box [-radius, radius]^d (per active axis) of offsets around an anchor.
class BoxIndex {
public:
    BoxIndex() = default;
    BoxIndex(int dim, std::int64_t radius, Site anchor = {});

    int dim() const noexcept { return dim_; }
    std::int64_t radius() const noexcept { return radius_; }
    const Site& anchor() const noexcept { return anchor_; }
    std::size_t volume() const noexcept { return volume_; }

    bool contains(const Site& x) const noexcept {
        for (int i = 0; i < dim_; ++i) {
            const std::int64_t o = x[i] - anchor_[i];
            if (o < -radius_ || o > radius_) return false;
        }
        return true;
    }
    std::size_t index(const Site& x) const noexcept {
        std::size_t idx = 0;
        for (int i = 0; i < dim_; ++i) idx = idx * side_ + static_cast<std::size_t>(x[i] - anchor_[i] + radius_);
        return idx;
    }
    Site site(std::size_t idx) const noexcept {
        Site x;
        for (int i = dim_ - 1; i >= 0; --i) {
            x[i] = static_cast<std::int64_t>(idx % side_) - radius_ + anchor_[i];
            idx /= side_;
        }
        return x;
    }
    std::size_t stride(int axis) const noexcept {
        std::size_t s = 1;
        for (int i = axis + 1; i < dim_; ++i) s *= side_;
        return s;
    }

private:
    int dim_ = 0;
    std::int64_t radius_ = 0;
    Site anchor_{};
    std::size_t side_ = 1;
    std::size_t volume_ = 1;
};

// Largest number of cells a dense window may allocate before the
// kernel-volume guard trips.
inline constexpr std::size_t kDefaultCellBudget = 40'000'000;

// Environment tabulated on a box; falls back to the lazy environment outside.
class EnvWindow {
public:
    EnvWindow(const Environment& env, std::int64_t radius, Site anchor = {},
              std::size_t cell_budget = kDefaultCellBudget);

    int dim() const noexcept { return env_->dim(); }
    const BoxIndex& box() const noexcept { return box_; }
    const Environment& environment() const noexcept { return *env_; }

    SiteDistribution at(const Site& x) const {
        return box_.contains(x) ? table_[box_.index(x)] : env_->at(x);
    }
    const SiteDistribution& at_index(std::size_t idx) const noexcept { return table_[idx]; }

private:
    const Environment* env_;
    BoxIndex box_;
    std::vector<SiteDistribution> table_;
};

}  // namespace rwre
