#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mimo {

std::uint64_t splitmix64(std::uint64_t x);

/// Folds tags into a master seed. Any change to the master seed or to a tag
/// changes the result, and the result does not depend on scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags);

// Purpose and indicator tags for derive_seed.
namespace seed_tag {
inline constexpr std::uint64_t threshold = 0x7468726573686f6cULL;
inline constexpr std::uint64_t prefix_bound = 0x7072656669780000ULL;
inline constexpr std::uint64_t split = 0x73706c6974000000ULL;
inline constexpr std::uint64_t trial = 0x747269616c000000ULL;
inline constexpr std::uint64_t outer = 0x6f75746572000000ULL;
inline constexpr std::uint64_t reference = 0x7265666572656e63ULL;
inline constexpr std::uint64_t dice = 1;
inline constexpr std::uint64_t hd = 2;
}  // namespace seed_tag

/// mt19937_64 with a portable bounded draw (std::uniform_int_distribution is
/// implementation-defined, so results would differ across standard libraries).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        // Lemire's multiply-shift with rejection; unbiased.
        __extension__ using u128 = unsigned __int128;
        u128 product = static_cast<u128>(engine_()) * bound;
        auto low = static_cast<std::uint64_t>(product);
        if (low < bound) {
            const std::uint64_t floor = (0 - bound) % bound;
            while (low < floor) {
                product = static_cast<u128>(engine_()) * bound;
                low = static_cast<std::uint64_t>(product);
            }
        }
        return static_cast<std::uint64_t>(product >> 64);
    }
    /// Uniform in [0, bound) from 32-bit halves of the engine output, two
    /// draws per engine call. bound must be in (0, 2^32].
    std::uint32_t below_small(std::uint64_t bound) {
        std::uint64_t product = std::uint64_t{half()} * bound;
        auto low = static_cast<std::uint32_t>(product);
        if (low < bound) {
            const auto floor = static_cast<std::uint32_t>((std::uint64_t{1} << 32) % bound);
            while (low < floor) {
                product = std::uint64_t{half()} * bound;
                low = static_cast<std::uint32_t>(product);
            }
        }
        return static_cast<std::uint32_t>(product >> 32);
    }
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    double normal();

private:
    std::uint32_t half() {
        if (spare_) {
            spare_ = false;
            return static_cast<std::uint32_t>(word_ >> 32);
        }
        word_ = engine_();
        spare_ = true;
        return static_cast<std::uint32_t>(word_);
    }

    std::mt19937_64 engine_;
    std::uint64_t word_ = 0;
    bool spare_ = false;
};

}  // namespace mimo
