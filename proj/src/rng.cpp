#include "pdtomo/rng.hpp"

#include <cmath>
#include <numbers>

namespace pdtomo::rng {

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_key(std::uint64_t seed, std::string_view tag,
                         std::initializer_list<std::uint64_t> indices) {
    std::uint64_t h = mix(seed);
    for (unsigned char c : tag) {
        h = mix(h ^ c);
    }
    for (std::uint64_t idx : indices) {
        h = mix(h ^ idx);
    }
    return h;
}

std::uint64_t Stream::next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Stream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    spare_ = mag * std::sin(ang);
    has_spare_ = true;
    return mag * std::cos(ang);
}

}  // namespace pdtomo::rng
