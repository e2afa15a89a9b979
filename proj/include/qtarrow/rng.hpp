#pragma once

#include <cstdint>

namespace qta {

// splitmix64 stream with Box-Muller gaussians. Hand-rolled (not <random>
// distributions) because output sequences must be identical across standard
// library implementations and across thread counts; parallel ensembles derive
// one independent stream per trajectory index via stream().
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // independent stream for (seed, index); avalanches both inputs so that
    // adjacent indices are uncorrelated
    static Rng stream(std::uint64_t seed, std::uint64_t index);

    std::uint64_t next_u64();

    // uniform on [0, 1), 53-bit resolution
    double uniform();

    // standard normal; consumes 0 or 2 uniforms (Box-Muller pair, spare cached)
    double gaussian();

  private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace qta
