#pragma once

#include <cmath>
#include <cstdint>

namespace clfkit {

/// Counter-seeded random stream (splitmix64).
///
/// Streams derived from the same (seed, epoch, index) triple produce the same
/// value sequence on every platform and regardless of which other streams were
/// consumed first. That is what makes augmentation reproducible and safe to
/// parallelize: each work item owns an independently derived stream.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    /// Independent stream for one (seed, epoch, index) work item.
    static Rng derive(std::uint64_t seed, std::uint64_t epoch, std::uint64_t index) {
        std::uint64_t h = mix(seed + 0x9E3779B97F4A7C15ull);
        h = mix(h ^ (epoch + 0xD1B54A32D192ED03ull));
        h = mix(h ^ (index + 0x8CB92BA72F3D8DD7ull));
        return Rng(h);
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi); a degenerate interval always yields lo.
    double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

    /// Uniform integer in [0, n). Modulo bias is negligible for n << 2^64.
    std::uint64_t uniform_below(std::uint64_t n) { return next_u64() % n; }

    /// Fair coin flip.
    bool coin() { return uniform01() < 0.5; }

    /// Standard normal draw (Box-Muller, two uniforms per call).
    double normal() {
        double u1 = uniform01();
        const double u2 = uniform01();
        if (u1 <= 0.0) {
            u1 = 0x1.0p-53;
        }
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

  private:
    std::uint64_t state_;
};

}  // namespace clfkit
