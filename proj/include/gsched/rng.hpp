#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace gsched {

// Derives independent well-mixed seeds from (seed, index) so parallel or
// per-point generation streams never overlap.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// mt19937_64 is fully specified by the standard, but the standard
// distributions are not; drawing through these helpers keeps generated
// tasksets bit-identical for a given seed everywhere.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double real01() {
        return static_cast<double>(bits() >> 11) * 0x1.0p-53;
    }

    double real(double lo, double hi) { return lo + (hi - lo) * real01(); }

    // Uniform integer in [lo, hi], inclusive.
    long long integer(long long lo, long long hi) {
        const unsigned long long range =
            static_cast<unsigned long long>(hi - lo) + 1ULL;
        const unsigned __int128 wide =
            static_cast<unsigned __int128>(bits()) * range;
        return lo + static_cast<long long>(wide >> 64);
    }

    template <typename T> void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(
                integer(0, static_cast<long long>(i) - 1));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 eng_;
};

} // namespace gsched
