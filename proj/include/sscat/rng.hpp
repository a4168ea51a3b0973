#pragma once

#include <cstdint>
#include <random>

namespace sscat {

// Deterministic uniform source. std::mt19937_64 output is pinned by the
// standard; the float mapping below is done by hand because the distribution
// classes in <random> are not bit-identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1) with 53 random bits
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    float uniform_f(float lo, float hi) { return static_cast<float>(uniform(lo, hi)); }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

    bool chance(double p) { return uniform() < p; }

    // Random value on the dyadic grid step*[-m, m]. Sums and differences of
    // such values are exact in double, which some bitwise tests rely on.
    double dyadic(double step, std::int64_t m) {
        const std::int64_t q = static_cast<std::int64_t>(below(2 * static_cast<std::uint64_t>(m) + 1)) - m;
        return step * static_cast<double>(q);
    }

private:
    std::mt19937_64 engine_;
};

// Stateless mix for deriving per-component seeds from one run seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace sscat
