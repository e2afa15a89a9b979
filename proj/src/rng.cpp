#include "qtarrow/rng.hpp"

#include <cmath>

namespace qta {

namespace {

std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

}  // namespace

Rng Rng::stream(std::uint64_t seed, std::uint64_t index) {
    // two scramble rounds decorrelate (seed, index) pairs even for small values
    std::uint64_t s = mix(seed + 0x9e3779b97f4a7c15ULL);
    s = mix(s ^ (index + 0x9e3779b97f4a7c15ULL) * 0xbf58476d1ce4e5b9ULL);
    return Rng(s);
}

std::uint64_t Rng::next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * 3.14159265358979323846 * u2;
    spare_ = mag * std::sin(ang);
    has_spare_ = true;
    return mag * std::cos(ang);
}

}  // namespace qta
