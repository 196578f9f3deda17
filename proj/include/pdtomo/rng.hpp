#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace pdtomo::rng {

// splitmix64 finalizer; full avalanche on 64 bits
std::uint64_t mix(std::uint64_t x);

// Stable key for an independent stream, derived from (seed, purpose tag,
// index tuple). Streams keyed this way do not depend on evaluation order.
std::uint64_t derive_key(std::uint64_t seed, std::string_view tag,
                         std::initializer_list<std::uint64_t> indices = {});

// Counter-based generator (splitmix64 core). Bit-stable across platforms,
// which std::normal_distribution is not.
class Stream {
  public:
    explicit Stream(std::uint64_t key) : state_(key) {}

    std::uint64_t next_u64();
    double uniform();  // [0, 1)
    double normal();   // standard normal via Box-Muller

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace pdtomo::rng
