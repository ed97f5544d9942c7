#pragma once

#include <cmath>
#include <cstdint>

namespace coopdec {

// Counter-free splitmix64 stream. Used everywhere randomness is needed so
// that results are bit-identical across platforms and thread schedules.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0,1), 53-bit resolution
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n), n > 0
    std::uint64_t below(std::uint64_t n) {
        return std::uint64_t((static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    bool coin() { return (next() >> 63) != 0; }

    // standard normal via Box-Muller (pair cached)
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Derives an independent stream seed from (master, a, b). Feeding each index
// through one splitmix round decorrelates nearby indices.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    Rng r(master);
    std::uint64_t s = r.next();
    Rng ra(s ^ (a * 0x9e3779b97f4a7c15ull + 0x632be59bd9b4e019ull));
    s = ra.next();
    Rng rb(s ^ (b * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull));
    return rb.next();
}

} // namespace coopdec
