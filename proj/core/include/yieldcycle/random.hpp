#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace yieldcycle {

/// xoshiro256** seeded through splitmix64. All draws are defined here rather
/// than through <random> distributions so that streams are identical across
/// standard-library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next();
    /// Uniform in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n);
    /// Uniform in [0, 1).
    double uniform();
    double normal();

    template <class T>
    void shuffle(std::span<T> values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_index(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::uint64_t state_[4];
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a(std::string_view text);

/// Independent stream seed for one (spec, fold) unit of work, so concurrent
/// schedules produce the same results as sequential ones.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view spec_id, std::uint64_t fold);

} // namespace yieldcycle
