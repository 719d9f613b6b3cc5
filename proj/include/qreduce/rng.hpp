#pragma once

#include <cmath>
#include <cstdint>

namespace qreduce {

/// Counter-based pseudo-random stream (SplitMix64).
///
/// The state advances by a fixed odd constant and every output is a bijective
/// integer mix of the state, so draw i of a stream with key k is
/// mix(k + (i+1)*GAMMA) -- pure 64-bit integer arithmetic, identical on every
/// platform. Sub-streams are derived by mixing a master seed with a stream
/// index; trajectory i therefore consumes the same draws whether the ensemble
/// runs serially or fanned across threads.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t key) : state_(key) {}

    /// Stream for trajectory `index` of an ensemble keyed by `master_seed`.
    static RandomStream substream(std::uint64_t master_seed, std::uint64_t index) {
        return RandomStream(mix(master_seed ^ mix(kGamma * (index + 1))));
    }

    std::uint64_t next_u64() { return mix(state_ += kGamma); }

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal deviate (Box-Muller, two uniforms per pair).
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace qreduce
