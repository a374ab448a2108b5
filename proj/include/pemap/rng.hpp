#ifndef PEMAP_RNG_HPP
#define PEMAP_RNG_HPP

#include <cstdint>
#include <cmath>
#include <random>
#include <string_view>

namespace pemap {

// Seeded stream with tag-derived substreams. Gaussian variates go through an
// explicit Box-Muller transform so the byte-level sequence does not depend on
// the standard library's distribution implementations.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

    // Stable substream derivation: FNV-1a over the tag mixed into the seed.
    static RandomStream derive(std::uint64_t seed, std::string_view tag, std::uint64_t idx = 0) {
        std::uint64_t h = 1469598103934665603ull;
        for (char c : tag) {
            h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
            h *= 1099511628211ull;
        }
        h ^= idx + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        return RandomStream(seed ^ h);
    }

    std::uint64_t bits() { return eng_(); }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(bits() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection to kill modulo bias.
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = bits();
        while (v >= limit) v = bits();
        return v % n;
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace pemap

#endif
