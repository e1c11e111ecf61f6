#ifndef QSF_RNG_HPP
#define QSF_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace qsf {

/// SplitMix64 mixing step; used to derive independent per-trajectory
/// streams from a base seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seedable generator with documented Gaussian sampling (Marsaglia polar
/// method) so runs are bit-reproducible within this implementation.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Stream for trajectory `index`: seed XOR splitmix64(index + 1).
    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        return Rng(seed ^ splitmix64(index + 1));
    }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() {
        return double(gen_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via the polar method.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace qsf

#endif
