#pragma once

#include "qtarrow/params.hpp"
#include "qtarrow/trajectory.hpp"

#include <utility>
#include <vector>

namespace qta {

// Pure-state decomposition of a finite-efficiency record under the
// time-segmented splitter: each step is assigned to the monitored channel with
// probability eta (consuming the stored readout at the boosted strength
// 1/(eta*tau)) or to the unmonitored channel (a synthetic draw in the
// configured basis at the same strength). Every trajectory stays pure.
struct UnravelEnsemble {
    std::vector<Trajectory> trajectories;          // record slots hold the consumed readout per step
    std::vector<std::vector<char>> channel_masks;  // 'a' monitored / 'b' synthetic, per step
    MeasurementRecord alice_record;                // the shared input record
    double boosted_strength = 0.0;                 // 1/(eta*tau)
};

UnravelEnsemble unravel_record(const MeasurementRecord& rec, const SimParams& p,
                               const UnravelConfig& cfg, const QubitState& initial);

// synthetic z-basis step: draws a readout from the current state at strength
// 1/(eta*tau) and applies the matching povm_update
std::pair<double, QubitState> sample_bob_z(const QubitState& st, const SimParams& p,
                                           double eta, Rng& rng);

// synthetic phase-basis step: draws theta ~ N(0, eta*tau/dt) and applies a
// z-rotation by 2*Gamma*dt*theta; z is untouched, transverse components decay
// as exp(-Gamma*dt) on ensemble average
std::pair<double, QubitState> sample_rob_phi(const QubitState& st, const SimParams& p,
                                             double eta, Rng& rng);

// per-trajectory arrow statistic of the monitored channel: exact increments
// summed over monitored steps only, at the boosted strength
std::vector<double> alice_arrow_from_ensemble(const UnravelEnsemble& ens);

// diffusive-limit cross-check restricted to monitored steps (midpoint z)
std::vector<double> alice_arrow_continuous(const UnravelEnsemble& ens);

}  // namespace qta
