#ifndef MISOLAB_RNG_HPP
#define MISOLAB_RNG_HPP

#include "misolab/types.hpp"

#include <cmath>
#include <cstdint>

namespace misolab {

// Self-contained counter-free generator (splitmix64 core) so that streams are
// portable across standard libraries and cheap to fork per entity.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in (0, 1]; never returns 0 so log() is safe.
    double uniform_pos() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(th);
        have_spare_ = true;
        return r * std::cos(th);
    }

    /// Complex Gaussian with unit variance per real component.
    cdbl cnormal() {
        const double re = normal();
        const double im = normal();
        return {re, im};
    }

    /// Isotropic unit vector of dimension n.
    CVec unit_vector(int n) {
        CVec v(n);
        for (int i = 0; i < n; ++i) v(i) = cnormal();
        const double nrm = v.norm();
        if (nrm == 0.0) return unit_vector(n);
        return v / nrm;
    }

    /// Derives a decorrelated seed from (a, b); used to fork per-entity streams.
    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 0x632be59bd9b4e019ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace misolab

#endif
