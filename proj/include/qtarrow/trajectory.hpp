#pragma once

#include "qtarrow/bloch.hpp"
#include "qtarrow/params.hpp"
#include "qtarrow/record.hpp"
#include "qtarrow/rng.hpp"

#include <vector>

namespace qta {

// Within-step ordering. Forward steps measure then rotate; reversed replicas
// rotate (by the negated angle) then unmeasure, so the tag is metadata the
// reversal needs to stay an involution.
enum class StepOrder { measure_then_rotate, rotate_then_measure };

struct Trajectory {
    std::vector<QubitState> states;    // n+1 grid states
    MeasurementRecord record;          // n readouts
    std::vector<double> q_increments;  // n, one per measurement sub-step
    double rabi_angle = 0.0;           // per-step rotation, radians
    double dephase_extra = 0.0;        // extra transverse decay rate, 0 = unit efficiency
    StepOrder order = StepOrder::measure_then_rotate;
    double q_total = 0.0;              // accumulated sum of q_increments

    std::size_t n_steps() const { return record.values.size(); }
    void check_consistent() const;     // size and finiteness invariants
};

// Unit-efficiency forward simulation: per step sample readout from the current
// state at strength 1/tau, apply povm_update, then rabi_rotate.
Trajectory generate_trajectory(const SimParams& p, const QubitState& initial, Rng& rng);

// Finite-efficiency physical model for record generation: the tracked state is
// the observer's dephased state; readouts are sampled from it at strength
// 1/tau and each step appends dephase(Gamma - 1/(2 tau)) with Gamma = 1/(2 eta tau).
// eta = 1 reduces to generate_trajectory.
Trajectory generate_trajectory_dephased(const SimParams& p, double eta,
                                        const QubitState& initial, Rng& rng);

// Replays a stored record: povm_update, dephase(dephase_extra), rabi_rotate.
// dephase_extra = 0 reproduces the unit-efficiency state sequence exactly.
Trajectory reconstruct_trajectory(const MeasurementRecord& rec, const SimParams& p,
                                  const QubitState& initial, double dephase_extra);

// One measurement sub-step's log-likelihood ratio between the forward readout r
// (density at the pre-measurement state) and the reversed readout -r (density at
// the post-measurement, pre-rotation state). Computed from the mixture
// log-densities; the Gaussian prefactors cancel.
double arrow_increment(const QubitState& pre, const QubitState& post_meas,
                       double r, double strength, double dt);

// Sum of arrow_increment over all measurement sub-steps. Rotations contribute
// nothing: the reversed drive restores the same state the backward density is
// evaluated at.
double arrow_statistic(const Trajectory& t);

// Diffusive-limit form 2*dt*strength*sum_k r_k*z_mid,k with z_mid the average of
// the pre- and post-measurement z. The midpoint carries the Ito correction
// (1-z^2)s^2 of the exact increment, so the gap to arrow_statistic is O(dt).
double arrow_statistic_continuous(const Trajectory& t);

// Time reversal: replay in reverse order with negated readouts and negated
// rotation, unmeasuring each step. Requires a unit-efficiency trajectory;
// throws std::invalid_argument when dephase_extra > 0 (dephasing has no inverse).
// The result ends at the original initial state and has q_total = -q_total.
Trajectory reverse_trajectory(const Trajectory& t);

// CSV "step,x,y,z,r,q_inc": n+1 rows; row 0 is the initial state with empty
// r/q_inc, row k>0 is the state after step k-1 with that step's readout and
// arrow increment.
std::string trajectory_csv(const Trajectory& t);
void write_trajectory(const Trajectory& t, const std::string& csv_path);

}  // namespace qta
