#ifndef FDRLAB_RANDOM_HPP
#define FDRLAB_RANDOM_HPP

#include <cstdint>
#include <limits>
#include <random>
#include <span>

namespace fdrlab {

/// (seed, stream_id) names one reproducible substream. Monte-Carlo replicate
/// r of an experiment with seed s draws from {s, r}.
struct RandomSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    friend bool operator==(const RandomSeed&, const RandomSeed&) = default;
};

/// mt19937_64 keyed by all 128 bits of a RandomSeed through std::seed_seq,
/// both of which are fully specified by the standard.
class Rng {
public:
    explicit Rng(RandomSeed s) : engine_(make_engine(s)) {}

    /// Uniform on the open interval (0,1), 53-bit resolution.
    double uniform()
    {
        const std::uint64_t bits = engine_() >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    /// Unbiased integer in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n)
    {
        const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t limit = max - (max % n + 1) % n;
        std::uint64_t x = engine_();
        while (x > limit)
            x = engine_();
        return x % n;
    }

    /// Fisher-Yates, back to front.
    template <class T>
    void shuffle(std::span<T> items)
    {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    static std::mt19937_64 make_engine(RandomSeed s)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(s.seed), static_cast<std::uint32_t>(s.seed >> 32),
                          static_cast<std::uint32_t>(s.stream_id),
                          static_cast<std::uint32_t>(s.stream_id >> 32)};
        return std::mt19937_64(seq);
    }

    std::mt19937_64 engine_;
};

} // namespace fdrlab

#endif // FDRLAB_RANDOM_HPP
