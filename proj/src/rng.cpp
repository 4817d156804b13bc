#include "rwre/rng.hpp"

namespace rwre {

std::uint64_t hash_words(std::initializer_list<std::uint64_t> words) noexcept {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (std::uint64_t w : words) {
        h = mix64(h ^ mix64(w + 0x9e3779b97f4a7c15ULL));
    }
    return h;
}

std::uint64_t hash_tag(std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t experiment_tag,
                          std::uint64_t trial_index, StreamRole role) noexcept {
    return hash_words({master_seed, experiment_tag, trial_index, static_cast<std::uint64_t>(role)});
}

}  // namespace rwre
