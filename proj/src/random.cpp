#include "pppci/random.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pppci {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

RandomSource::RandomSource(std::uint64_t seed, std::uint64_t stream)
    : RandomSource(seed, stream, mix64(mix64(seed) ^ (stream * 0xd1b54a32d192ed03ull))) {}

RandomSource::RandomSource(std::uint64_t seed, std::uint64_t stream, std::uint64_t key)
    : seed_(seed), stream_(stream), key_(key), state_(key) {}

RandomSource::result_type RandomSource::operator()() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

RandomSource RandomSource::substream(std::uint64_t id) const {
    return RandomSource(seed_, stream_, mix64(key_ ^ mix64(id + 0x632be59bd9b4e019ull)));
}

RandomSource RandomSource::split() {
    return substream((*this)());
}

double RandomSource::uniform() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomSource::poisson(double mean) {
    if (!(mean > 0)) return 0;
    if (mean < 30) {
        double u = uniform();
        double p = std::exp(-mean);
        double cdf = p;
        std::uint64_t k = 0;
        while (u >= cdf) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
            if (p < 1e-300 && k > mean) break;
        }
        return k;
    }
    std::poisson_distribution<std::uint64_t> dist(mean);
    return dist(*this);
}

std::size_t RandomSource::categorical(const std::vector<double>& cumulative) {
    double u = uniform();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) return cumulative.size() - 1;
    return static_cast<std::size_t>(it - cumulative.begin());
}

}  // namespace pppci
