#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <string>

namespace rwre {

inline constexpr int kMaxDim = 3;

// A point of Z^d, d <= 3. Coordinates beyond the active dimension are zero,
// so norms and inner products do not need the dimension.
struct Site {
    std::array<std::int64_t, kMaxDim> c{};

    constexpr std::int64_t& operator[](int i) noexcept { return c[static_cast<std::size_t>(i)]; }
    constexpr std::int64_t operator[](int i) const noexcept { return c[static_cast<std::size_t>(i)]; }

    constexpr auto operator<=>(const Site&) const = default;

    constexpr Site& operator+=(const Site& o) noexcept {
        for (int i = 0; i < kMaxDim; ++i) (*this)[i] += o[i];
        return *this;
    }
    constexpr Site& operator-=(const Site& o) noexcept {
        for (int i = 0; i < kMaxDim; ++i) (*this)[i] -= o[i];
        return *this;
    }
    friend constexpr Site operator+(Site a, const Site& b) noexcept { return a += b; }
    friend constexpr Site operator-(Site a, const Site& b) noexcept { return a -= b; }
};

constexpr Site origin() noexcept { return Site{}; }

inline bool valid_dim(int dim) noexcept { return dim >= 1 && dim <= kMaxDim; }

// Steps are indexed 0..2d-1 as (+e1, -e1, +e2, -e2, +e3, -e3).
constexpr int num_steps(int dim) noexcept { return 2 * dim; }
constexpr int step_axis(int step) noexcept { return step / 2; }
constexpr int step_sign(int step) noexcept { return (step % 2 == 0) ? 1 : -1; }
constexpr int opposite_step(int step) noexcept { return step ^ 1; }

constexpr Site unit_step(int step) noexcept {
    Site s;
    s[step_axis(step)] = step_sign(step);
    return s;
}

constexpr Site& apply_step(Site& x, int step) noexcept {
    x[step_axis(step)] += step_sign(step);
    return x;
}

constexpr std::int64_t norm1(const Site& x) noexcept {
    std::int64_t s = 0;
    for (int i = 0; i < kMaxDim; ++i) s += x[i] < 0 ? -x[i] : x[i];
    return s;
}

constexpr std::int64_t norm_inf(const Site& x) noexcept {
    std::int64_t m = 0;
    for (int i = 0; i < kMaxDim; ++i) {
        const std::int64_t a = x[i] < 0 ? -x[i] : x[i];
        if (a > m) m = a;
    }
    return m;
}

constexpr std::int64_t norm2_squared(const Site& x) noexcept {
    std::int64_t s = 0;
    for (int i = 0; i < kMaxDim; ++i) s += x[i] * x[i];
    return s;
}

double norm2(const Site& x) noexcept;

constexpr std::int64_t dot(const Site& a, const Site& b) noexcept {
    std::int64_t s = 0;
    for (int i = 0; i < kMaxDim; ++i) s += a[i] * b[i];
    return s;
}

// Coordinate sum mod 2, in {0,1}.
constexpr int parity(const Site& x) noexcept {
    std::int64_t s = 0;
    for (int i = 0; i < kMaxDim; ++i) s += x[i];
    return static_cast<int>(((s % 2) + 2) % 2);
}

constexpr std::int64_t floor_mod(std::int64_t a, std::int64_t m) noexcept {
    const std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

// Representative of x in the fundamental domain [0, side)^d.
constexpr Site reduce_mod(Site x, std::int64_t side, int dim) noexcept {
    for (int i = 0; i < dim; ++i) x[i] = floor_mod(x[i], side);
    return x;
}

// Packs coordinates with |c_i| < 2^20 into one word for hashing.
constexpr std::uint64_t pack_site(const Site& x) noexcept {
    constexpr std::int64_t off = std::int64_t{1} << 20;
    return (static_cast<std::uint64_t>(x[0] + off) << 42) | (static_cast<std::uint64_t>(x[1] + off) << 21) |
           static_cast<std::uint64_t>(x[2] + off);
}

std::string to_string(const Site& x, int dim);

}  // namespace rwre
