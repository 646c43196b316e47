#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace fogsim {

// Seed mixer; used to derive independent sub-stream seeds from a master seed.
constexpr uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// FNV-1a over a label, for deriving named sub-seeds (e.g. "policy", "tamper").
constexpr uint64_t hash_label(std::string_view label) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : label) {
        h ^= static_cast<uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr uint64_t derive_seed(uint64_t master, std::string_view label) {
    return splitmix64(master ^ hash_label(label));
}

constexpr uint64_t derive_seed(uint64_t master, uint64_t index) {
    return splitmix64(master ^ splitmix64(index + 0x9e3779b97f4a7c15ULL));
}

// Deterministic RNG. mt19937_64 is fully specified by the standard; the
// distributions below are hand-rolled so sequences are bit-identical across
// standard library implementations, which the reproducibility contract needs.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1), 53 bits of precision.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Uniform integer in [0, n). Unbiased via rejection sampling; n must be > 0.
    uint64_t uniform_int(uint64_t n) {
        const uint64_t threshold = (-n) % n;  // 2^64 mod n
        for (;;) {
            const uint64_t r = gen_();
            if (r >= threshold) return r % n;
        }
    }

    // Exponential with the given mean, via inverse CDF.
    double exponential(double mean) {
        // uniform01() < 1, so the log argument stays in (0, 1].
        return -mean * std::log1p(-uniform01());
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Fisher-Yates; deterministic given the generator state.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace fogsim
