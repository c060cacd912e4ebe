#ifndef PPPCI_RANDOM_HPP
#define PPPCI_RANDOM_HPP

#include <cstdint>
#include <limits>
#include <vector>

namespace pppci {

// SplitMix64 stream addressed by (seed, stream). Substreams are derived by
// hashing, so (seed, stream, id) always yields the same sequence no matter in
// which order or thread it is consumed. Satisfies UniformRandomBitGenerator.
class RandomSource {
public:
    using result_type = std::uint64_t;

    explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    RandomSource substream(std::uint64_t id) const;
    // Consumes one draw and returns the substream keyed by it, so that
    // successive calls on the same source give independent streams.
    RandomSource split();

    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    // Inversion for mean < 30, std::poisson_distribution otherwise.
    std::uint64_t poisson(double mean);
    // Index i with cumulative[i-1] <= u < cumulative[i].
    std::size_t categorical(const std::vector<double>& cumulative);

private:
    RandomSource(std::uint64_t seed, std::uint64_t stream, std::uint64_t key);

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t key_;
    std::uint64_t state_;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace pppci

#endif
