#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string_view>

namespace rwre {

// 64-bit finalizer from SplitMix64; a bijection on uint64.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Order-sensitive hash of a short list of words. Used as the counter-based
// key for environment sites and for trial stream derivation.
std::uint64_t hash_words(std::initializer_list<std::uint64_t> words) noexcept;

// FNV-1a over bytes; stable tag for experiment kinds.
std::uint64_t hash_tag(std::string_view text) noexcept;

enum class StreamRole : std::uint64_t { env = 0, walk1 = 1, walk2 = 2 };

// Seed for one (experiment, trial, role) stream. Independent of scheduling.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t experiment_tag,
                          std::uint64_t trial_index, StreamRole role) noexcept;

// SplitMix64 stream. Satisfies UniformRandomBitGenerator so it plugs into
// <random> distributions.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    // Uniform on [0,1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1]; safe argument for log.
    double uniform_open0() noexcept { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }

    double exponential() noexcept { return -std::log(uniform_open0()); }

private:
    std::uint64_t state_;
};

}  // namespace rwre
