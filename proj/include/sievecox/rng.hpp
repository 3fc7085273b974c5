#pragma once
// Deterministic counter-keyed random streams. Every stochastic component
// derives its stream from (seed, index...) so results do not depend on
// execution order or worker count.

#include <cstdint>
#include <cmath>

#include "sievecox/errors.hpp"

namespace sievecox {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// xoshiro256** with splitmix-expanded seeding.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) word = splitmix64(x = splitmix64(x) + 1);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform on [0, 1) with 53-bit resolution
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on (0, 1); never returns the endpoints
    double uniform_open() {
        double u;
        do {
            u = uniform();
        } while (u == 0.0);
        return u;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // integer uniform on {lo, ..., hi} inclusive, rejection-free enough for our ranges
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
        const std::uint64_t span = hi - lo + 1;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return lo + x % span;
    }

    bool bernoulli(double p) { return uniform() < p; }

    double exponential(double rate) {
        if (!(rate > 0.0))
            throw Error(ErrorCode::DomainError, "exponential rate must be > 0");
        return -std::log(uniform_open()) / rate;
    }

    // Exact by construction; m stays modest (<= a few thousand) in this codebase.
    long long binomial(long long m, double q) {
        if (q <= 0.0) return 0;
        if (q >= 1.0) return m;
        long long k = 0;
        for (long long i = 0; i < m; ++i) k += bernoulli(q);
        return k;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t state_[4];
};

// Stream keyed by up to three indices (e.g. seed / replicate / bootstrap draw).
inline Rng make_stream(std::uint64_t seed, std::uint64_t i1 = 0,
                       std::uint64_t i2 = 0, std::uint64_t i3 = 0) {
    std::uint64_t key = splitmix64(seed);
    key = splitmix64(key ^ (0x1000000000000001ULL + i1));
    key = splitmix64(key ^ (0x2000000000000003ULL + i2));
    key = splitmix64(key ^ (0x3000000000000007ULL + i3));
    return Rng(key);
}

}  // namespace sievecox
