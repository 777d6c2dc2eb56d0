#pragma once

#include <cstdint>
#include <random>

namespace podcount {

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for scene/image `index` under a dataset-level seed. Mixing through
/// splitmix64 keeps per-index streams independent and order-free.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Deterministic RNG. mt19937_64 gives a standard-defined bit stream; the
/// distributions are hand-rolled because the std distribution algorithms are
/// implementation-defined and would break byte-identical reruns across
/// standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [lo, hi). Empty range returns lo.
    double uniform_real(double lo, double hi) {
        const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;  // [0,1)
        return lo + (hi - lo) * u;
    }

    /// Uniform integer in [lo, hi], inclusive. Unbiased via rejection.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    /// Bernoulli(p).
    bool bernoulli(double p) { return uniform_real(0.0, 1.0) < p; }

    /// Standard normal via polar Box-Muller, spare value cached.
    double normal();
    double normal(double mu, double sigma) { return mu + sigma * normal(); }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace podcount
