#pragma once

// Independent 2x2 complex density-matrix model of every Bloch-vector map in
// the library. Kept deliberately naive (matrix algebra, no closed forms) so a
// shared algebra bug cannot cancel between implementation and test.

#include "qtarrow/bloch.hpp"

#include <array>
#include <cmath>
#include <complex>

namespace oracle {

using cplx = std::complex<double>;
using mat2 = std::array<cplx, 4>;  // row major: [0]=00 [1]=01 [2]=10 [3]=11

inline mat2 mul(const mat2& a, const mat2& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

inline mat2 dagger(const mat2& a) {
    return {std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])};
}

inline mat2 from_bloch(const qta::QubitState& s) {
    return {cplx(0.5 * (1.0 + s.z), 0.0), cplx(0.5 * s.x, -0.5 * s.y),
            cplx(0.5 * s.x, 0.5 * s.y), cplx(0.5 * (1.0 - s.z), 0.0)};
}

inline qta::QubitState to_bloch(const mat2& rho) {
    return {(rho[1] + rho[2]).real(), ((rho[1] - rho[2]) * cplx(0.0, 1.0)).real(),
            (rho[0] - rho[3]).real()};
}

// measurement operator diag exponents scaled by their max so huge |r| stays finite
inline mat2 povm_op(double r, double strength, double dt) {
    const double beta = dt * strength;
    const double e_up = -beta * (r - 1.0) * (r - 1.0) / 4.0;
    const double e_dn = -beta * (r + 1.0) * (r + 1.0) / 4.0;
    const double m = std::max(e_up, e_dn);
    const double pref = std::pow(beta / (2.0 * M_PI), 0.25) * std::exp(m);
    return {cplx(pref * std::exp(e_up - m), 0.0), 0.0, 0.0,
            cplx(pref * std::exp(e_dn - m), 0.0)};
}

inline double trace_re(const mat2& a) { return (a[0] + a[3]).real(); }

// returns the normalized post-measurement state; density = tr(M rho M^dagger)
inline qta::QubitState povm_apply(const qta::QubitState& s, double r, double strength,
                                  double dt, double* density = nullptr) {
    const mat2 m = povm_op(r, strength, dt);
    mat2 rho = mul(mul(m, from_bloch(s)), dagger(m));
    const double tr = trace_re(rho);
    if (density) *density = tr;
    for (auto& v : rho) v /= tr;
    return to_bloch(rho);
}

inline qta::QubitState rotate_y(const qta::QubitState& s, double angle) {
    const double c = std::cos(0.5 * angle), sn = std::sin(0.5 * angle);
    const mat2 u = {cplx(c, 0.0), cplx(-sn, 0.0), cplx(sn, 0.0), cplx(c, 0.0)};
    return to_bloch(mul(mul(u, from_bloch(s)), dagger(u)));
}

inline qta::QubitState rotate_z(const qta::QubitState& s, double angle) {
    const mat2 u = {std::exp(cplx(0.0, -0.5 * angle)), 0.0, 0.0,
                    std::exp(cplx(0.0, 0.5 * angle))};
    return to_bloch(mul(mul(u, from_bloch(s)), dagger(u)));
}

inline qta::QubitState dephase_rho(const qta::QubitState& s, double lambda, double dt) {
    mat2 rho = from_bloch(s);
    rho[1] *= std::exp(-lambda * dt);
    rho[2] *= std::exp(-lambda * dt);
    return to_bloch(rho);
}

}  // namespace oracle
