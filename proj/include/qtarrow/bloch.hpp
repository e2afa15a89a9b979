#pragma once

#include "qtarrow/rng.hpp"

namespace qta {

// Qubit state as a Bloch vector; rho = (1 + x sx + y sy + z sz)/2, trace 1.
// Physical iff x^2+y^2+z^2 <= 1 (pure on the unit sphere).
struct QubitState {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const;
    bool is_physical(double tol = 1e-9) const;
    bool is_pure(double tol = 1e-9) const;
};

// Weak z-measurement update for readout r over dt. The readout couples to
// sigma_z with Gaussian branch densities N(+-1, 1/(dt*strength)).
// Stable for |s| up to ~700 (s = r*dt*strength); branch weights are evaluated
// with an exp(-|s|) shift so eigenstates stay exact fixed points.
QubitState povm_update(const QubitState& st, double r, double strength, double dt);

// log of the readout probability density at r: two-branch Gaussian mixture
// with weights (1 +- z)/2, evaluated by log-sum-exp.
double readout_log_density(const QubitState& st, double r, double strength, double dt);
double readout_density(const QubitState& st, double r, double strength, double dt);

// draws a readout: branch +-1 with probability (1 +- z)/2, then
// r ~ N(branch, 1/(dt*strength)); consumes one uniform and one gaussian
double sample_readout(const QubitState& st, double strength, double dt, Rng& rng);

// right-handed rotation about +y by angle: +z rotates toward +x
QubitState rabi_rotate(const QubitState& st, double angle);

// transverse decay x,y *= exp(-lambda*dt); throws std::invalid_argument for lambda < 0
QubitState dephase(const QubitState& st, double lambda, double dt);

// right-handed rotation about +z by angle
QubitState phase_kick(const QubitState& st, double angle);

// scalar weight of the measure-then-unmeasure composition (readout r then -r):
// the product of the two readout densities, which is state independent,
//   (dt*strength/2pi) * exp(-dt*strength*(r^2+1))
double undo_weight(const QubitState& st, double r, double strength, double dt);

}  // namespace qta
