#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace hmclab {

/// SplitMix64 step; used to derive well-separated substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Substreams of a chain's random input. Refresh noise, integration
/// durations, permutations etc. are kept on disjoint streams so coupling
/// experiments can share exactly the noise they need.
enum class Substream : std::uint64_t {
    InitX = 1,
    InitV = 2,
    Refresh = 3,
    Duration = 4,
    Permutation = 5,
    CoordPick = 6,
    IntegratorTau = 7,
};

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t chain, Substream s) {
    std::uint64_t st = seed;
    (void)splitmix64(st);
    st ^= 0x517cc1b727220a95ULL * (chain + 1);
    (void)splitmix64(st);
    st ^= 0xd1b54a32d192ed03ULL * static_cast<std::uint64_t>(s);
    return splitmix64(st);
}

/// Deterministic random stream: mt19937_64 plus a portable Box-Muller
/// normal so that draws do not depend on the standard library's
/// distribution implementations.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform in [0, 1).
    double uniform() {
        return (next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal via Box-Muller (pair-cached).
    double gauss() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        // u1 == 0 would give log(0); the shifted argument stays in (0,1].
        double r = std::sqrt(-2.0 * std::log(1.0 - u1));
        double th = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(th);
        has_spare_ = true;
        return r * std::cos(th);
    }

    void gauss_fill(std::vector<double>& out) {
        for (auto& o : out) o = gauss();
    }

    /// Exponential with the given mean.
    double exponential(double mean) {
        return -mean * std::log(1.0 - uniform());
    }

    /// Uniform integer in [0, n) by rejection.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t lim = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= lim);
        return v % n;
    }

    template <typename T>
    void shuffle(std::vector<T>& xs) {
        for (std::size_t i = xs.size(); i > 1; --i) {
            std::swap(xs[i - 1], xs[next_below(i)]);
        }
    }

  private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

inline RngStream make_stream(std::uint64_t seed, std::uint64_t chain, Substream s) {
    return RngStream(derive_seed(seed, chain, s));
}

/// The bundle of substreams one chain consumes.
struct ChainRng {
    RngStream init_x, init_v, refresh, duration, perm, coord, tau;

    ChainRng(std::uint64_t seed, std::uint64_t chain)
        : init_x(make_stream(seed, chain, Substream::InitX)),
          init_v(make_stream(seed, chain, Substream::InitV)),
          refresh(make_stream(seed, chain, Substream::Refresh)),
          duration(make_stream(seed, chain, Substream::Duration)),
          perm(make_stream(seed, chain, Substream::Permutation)),
          coord(make_stream(seed, chain, Substream::CoordPick)),
          tau(make_stream(seed, chain, Substream::IntegratorTau)) {}
};

}  // namespace hmclab
