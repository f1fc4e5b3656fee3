#pragma once

#include <cstdint>
#include <cmath>
#include <vector>

namespace randmaps {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++ with explicit, platform-independent derived distributions.
// All randomness in the project flows through this type so that runs are
// reproducible bit-exactly from a seed.
class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) { reseed(seed); }

    void reseed(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
        have_spare_ = false;
    }

    // Stream splitting rule (documented contract for experiment replication):
    // child state = splitmix chain over (seed, id0, id1, id2).
    static Rng derive(std::uint64_t seed, std::uint64_t id0, std::uint64_t id1 = 0,
                      std::uint64_t id2 = 0) {
        std::uint64_t sm = seed;
        std::uint64_t h = splitmix64(sm);
        sm = h ^ (0x632be59bd9b4e019ULL + id0);
        h = splitmix64(sm);
        sm = h ^ (0x9e6c63d0a0e4b8a7ULL + id1);
        h = splitmix64(sm);
        sm = h ^ (0xc2b2ae3d27d4eb4fULL + id2);
        return Rng(splitmix64(sm));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // in [0,1)
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    // in (0,1]; safe under log()
    double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // uniform on {0,...,n-1}; n >= 1
    std::uint64_t uniform_below(std::uint64_t n) {
        // rejection from the top to avoid modulo bias
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {  // inclusive
        return lo + static_cast<std::int64_t>(uniform_below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool bernoulli(double p) { return uniform01() < p; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform_pos();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // geometric on {0,1,2,...} with P(k) = (1-beta) beta^k
    std::int64_t geometric(double beta) {
        if (beta <= 0.0) return 0;
        double u = uniform_pos();
        return static_cast<std::int64_t>(std::floor(std::log(u) / std::log(beta)));
    }

    // uniform k-subset of {0,...,m-1}, returned sorted; O(m) sequential scan
    std::vector<std::int64_t> k_subset(std::int64_t k, std::int64_t m) {
        std::vector<std::int64_t> out;
        out.reserve(static_cast<std::size_t>(k));
        std::int64_t need = k;
        for (std::int64_t t = 0; t < m && need > 0; ++t) {
            if (uniform_below(static_cast<std::uint64_t>(m - t)) <
                static_cast<std::uint64_t>(need)) {
                out.push_back(t);
                --need;
            }
        }
        return out;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace randmaps
