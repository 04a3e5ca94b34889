#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace ratekit {

// Bit-mixing finalizer used to derive child-stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Seeded deterministic generator. The engine (mt19937_64) is fully specified
// by the standard and all variate transforms below are hand-rolled, so the
// same seed yields the same stream on every platform and compiler.
//
// All stochastic stages of a run (init, dropout, shuffling, sampling) draw
// from streams split off one run seed via split().
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)), seed_base_(mix64(seed)) {}

    // Independent child stream; distinct ids give decorrelated streams.
    Rng split(std::uint64_t stream_id) const {
        return Rng(seed_base_ ^ mix64(stream_id));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; second variate cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // Uniform integer in [0, n), rejection sampled to avoid modulo bias.
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return x % n;
    }

    // Fisher-Yates.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_base_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace ratekit
