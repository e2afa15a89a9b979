#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace qta {

// All times in seconds, rates in 1/s, angles in radians.
struct SimParams {
    double dt = 16e-9;               // integration step
    double tau = 1.0 / 1.97e6;       // characteristic measurement time; strength = 1/tau
    double rabi = 2.0 * 3.14159265358979323846 * 2.16e6;  // drive angular frequency
    double duration = 0.32e-6;       // total evolution time; n_steps = floor(duration/dt)

    double strength() const { return 1.0 / tau; }
    // absolute nudge absorbs representation error in duration/dt ratios near integers
    long n_steps() const { return static_cast<long>(std::floor(duration / dt + 1e-9)); }
    void validate() const {
        if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
        if (!(tau > 0)) throw std::invalid_argument("tau must be positive");
        if (!std::isfinite(rabi)) throw std::invalid_argument("rabi must be finite");
        if (!(duration >= 0)) throw std::invalid_argument("duration must be >= 0");
    }
};

enum class Basis { compatible_z, incompatible_phi };

struct UnravelConfig {
    double eta = 0.4;                // monitored fraction; 0 < eta <= 1
    Basis basis = Basis::compatible_z;
    int n_samples = 1000;
    std::uint64_t seed = 1;

    void validate() const {
        if (!(eta > 0.0 && eta <= 1.0))
            throw std::invalid_argument("eta must be in (0, 1]");
        if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
    }
};

}  // namespace qta
