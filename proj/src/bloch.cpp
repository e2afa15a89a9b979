#include "qtarrow/bloch.hpp"

#include "qtarrow/numeric.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qta {

namespace {
constexpr double two_pi = 2.0 * 3.14159265358979323846;
}

double QubitState::norm() const {
    return std::sqrt(x * x + y * y + z * z);
}

bool QubitState::is_physical(double tol) const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z) &&
           norm() <= 1.0 + tol;
}

bool QubitState::is_pure(double tol) const {
    return is_physical(tol) && std::abs(norm() - 1.0) <= tol;
}

QubitState povm_update(const QubitState& st, double r, double strength, double dt) {
    const double s = r * dt * strength;
    // branch weights (1 +- z) e^{+-s}, shifted by e^{-|s|} so neither overflows;
    // at a z eigenstate the dead branch is exactly 0 and the state is fixed
    const double a = std::abs(s);
    const double wp = (1.0 + st.z) * std::exp(s - a);
    const double wm = (1.0 - st.z) * std::exp(-s - a);
    const double denom = wp + wm;
    if (denom == 0.0) return st;  // both factors underflowed: |z| = 1 limit
    const double t_scale = 2.0 * std::exp(-a) / denom;
    return {st.x * t_scale, st.y * t_scale, (wp - wm) / denom};
}

double readout_log_density(const QubitState& st, double r, double strength, double dt) {
    const double beta = dt * strength;
    const double wp = 0.5 * (1.0 + st.z);
    const double wm = 0.5 * (1.0 - st.z);
    const double lp = (wp > 0.0) ? std::log(wp) - 0.5 * beta * (r - 1.0) * (r - 1.0)
                                 : -std::numeric_limits<double>::infinity();
    const double lm = (wm > 0.0) ? std::log(wm) - 0.5 * beta * (r + 1.0) * (r + 1.0)
                                 : -std::numeric_limits<double>::infinity();
    return 0.5 * std::log(beta / two_pi) + log_sum_exp(lp, lm);
}

double readout_density(const QubitState& st, double r, double strength, double dt) {
    return std::exp(readout_log_density(st, r, strength, dt));
}

double sample_readout(const QubitState& st, double strength, double dt, Rng& rng) {
    const double branch = (rng.uniform() < 0.5 * (1.0 + st.z)) ? 1.0 : -1.0;
    return branch + rng.gaussian() / std::sqrt(dt * strength);
}

QubitState rabi_rotate(const QubitState& st, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {st.x * c + st.z * s, st.y, -st.x * s + st.z * c};
}

QubitState dephase(const QubitState& st, double lambda, double dt) {
    if (lambda < 0.0) throw std::invalid_argument("dephase: negative rate");
    const double f = std::exp(-lambda * dt);
    return {st.x * f, st.y * f, st.z};
}

QubitState phase_kick(const QubitState& st, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {st.x * c - st.y * s, st.x * s + st.y * c, st.z};
}

double undo_weight(const QubitState& st, double r, double strength, double dt) {
    const double fwd = readout_log_density(st, r, strength, dt);
    const double bwd = readout_log_density(povm_update(st, r, strength, dt), -r,
                                           strength, dt);
    return std::exp(fwd + bwd);
}

}  // namespace qta
