#include "qtarrow/trajectory.hpp"

#include "qtarrow/numeric.hpp"

#include <cmath>
#include <cstddef>
#include <fstream>
#include <stdexcept>

namespace qta {

void Trajectory::check_consistent() const {
    const std::size_t n = record.values.size();
    if (states.size() != n + 1)
        throw std::runtime_error("trajectory: states must have one more entry than record");
    if (q_increments.size() != n)
        throw std::runtime_error("trajectory: one arrow increment per readout");
    record.validate();
    if (dephase_extra < 0)
        throw std::runtime_error("trajectory: negative dephase rate");
    for (const auto& st : states)
        if (!st.is_physical())
            throw std::runtime_error("trajectory: state outside the Bloch ball");
    for (double q : q_increments)
        if (!std::isfinite(q))
            throw std::runtime_error("trajectory: non-finite arrow increment");
}

double arrow_increment(const QubitState& pre, const QubitState& post_meas,
                       double r, double strength, double dt) {
    return readout_log_density(pre, r, strength, dt) -
           readout_log_density(post_meas, -r, strength, dt);
}

Trajectory generate_trajectory(const SimParams& p, const QubitState& initial, Rng& rng) {
    p.validate();
    const std::size_t n = p.n_steps();
    const double strength = p.strength();
    Trajectory t;
    t.rabi_angle = p.rabi * p.dt;
    t.record.dt = p.dt;
    t.record.strength = strength;
    t.states.reserve(n + 1);
    t.record.values.reserve(n);
    t.q_increments.reserve(n);
    t.states.push_back(initial);
    for (std::size_t k = 0; k < n; ++k) {
        const QubitState pre = t.states.back();
        const double r = sample_readout(pre, strength, p.dt, rng);
        const QubitState post = povm_update(pre, r, strength, p.dt);
        t.record.values.push_back(r);
        t.q_increments.push_back(arrow_increment(pre, post, r, strength, p.dt));
        t.states.push_back(rabi_rotate(post, t.rabi_angle));
    }
    t.q_total = kahan_total(t.q_increments);
    return t;
}

Trajectory generate_trajectory_dephased(const SimParams& p, double eta,
                                        const QubitState& initial, Rng& rng) {
    p.validate();
    if (!(eta > 0.0) || eta > 1.0)
        throw std::invalid_argument("efficiency must lie in (0, 1]");
    const std::size_t n = p.n_steps();
    const double strength = p.strength();
    const double gamma = 1.0 / (2.0 * eta * p.tau);
    const double extra = gamma - 0.5 * strength;
    Trajectory t;
    t.rabi_angle = p.rabi * p.dt;
    t.dephase_extra = extra;
    t.record.dt = p.dt;
    t.record.strength = strength;
    t.states.reserve(n + 1);
    t.record.values.reserve(n);
    t.q_increments.reserve(n);
    t.states.push_back(initial);
    for (std::size_t k = 0; k < n; ++k) {
        const QubitState pre = t.states.back();
        const double r = sample_readout(pre, strength, p.dt, rng);
        QubitState post = povm_update(pre, r, strength, p.dt);
        t.record.values.push_back(r);
        t.q_increments.push_back(arrow_increment(pre, post, r, strength, p.dt));
        post = dephase(post, extra, p.dt);
        t.states.push_back(rabi_rotate(post, t.rabi_angle));
    }
    t.q_total = kahan_total(t.q_increments);
    return t;
}

Trajectory reconstruct_trajectory(const MeasurementRecord& rec, const SimParams& p,
                                  const QubitState& initial, double dephase_extra) {
    rec.validate();
    p.validate();
    if (std::abs(rec.dt - p.dt) > 1e-12 * p.dt)
        throw std::invalid_argument("record dt does not match simulation dt");
    if (dephase_extra < 0)
        throw std::invalid_argument("dephase rate must be nonnegative");
    const std::size_t n = rec.values.size();
    Trajectory t;
    t.rabi_angle = p.rabi * rec.dt;
    t.dephase_extra = dephase_extra;
    t.record = rec;
    t.states.reserve(n + 1);
    t.q_increments.reserve(n);
    t.states.push_back(initial);
    for (std::size_t k = 0; k < n; ++k) {
        const QubitState pre = t.states.back();
        const double r = rec.values[k];
        QubitState post = povm_update(pre, r, rec.strength, rec.dt);
        t.q_increments.push_back(arrow_increment(pre, post, r, rec.strength, rec.dt));
        if (dephase_extra > 0) post = dephase(post, dephase_extra, rec.dt);
        t.states.push_back(rabi_rotate(post, t.rabi_angle));
    }
    t.q_total = kahan_total(t.q_increments);
    return t;
}

double arrow_statistic(const Trajectory& t) { return kahan_total(t.q_increments); }

double arrow_statistic_continuous(const Trajectory& t) {
    const double dt = t.record.dt;
    const double strength = t.record.strength;
    std::vector<double> terms;
    terms.reserve(t.n_steps());
    for (std::size_t k = 0; k < t.n_steps(); ++k) {
        QubitState pre = t.states[k];
        if (t.order == StepOrder::rotate_then_measure)
            pre = rabi_rotate(pre, t.rabi_angle);
        const double r = t.record.values[k];
        const QubitState post = povm_update(pre, r, strength, dt);
        const double z_mid = 0.5 * (pre.z + post.z);
        terms.push_back(2.0 * dt * strength * r * z_mid);
    }
    return kahan_total(terms);
}

Trajectory reverse_trajectory(const Trajectory& t) {
    t.check_consistent();
    if (t.dephase_extra > 0)
        throw std::invalid_argument("dephased trajectory has no reversal");
    const std::size_t n = t.n_steps();
    const double dt = t.record.dt;
    const double strength = t.record.strength;
    Trajectory rev;
    rev.rabi_angle = -t.rabi_angle;
    rev.order = (t.order == StepOrder::measure_then_rotate)
                    ? StepOrder::rotate_then_measure
                    : StepOrder::measure_then_rotate;
    rev.record.dt = dt;
    rev.record.strength = strength;
    rev.states.reserve(n + 1);
    rev.record.values.reserve(n);
    rev.q_increments.reserve(n);
    rev.states.push_back(t.states.back());
    for (std::size_t j = 0; j < n; ++j) {
        const double r = -t.record.values[n - 1 - j];
        QubitState pre = rev.states.back();
        if (rev.order == StepOrder::rotate_then_measure)
            pre = rabi_rotate(pre, rev.rabi_angle);
        const QubitState post = povm_update(pre, r, strength, dt);
        const QubitState next = (rev.order == StepOrder::rotate_then_measure)
                                    ? post
                                    : rabi_rotate(post, rev.rabi_angle);
        rev.record.values.push_back(r);
        rev.q_increments.push_back(arrow_increment(pre, post, r, strength, dt));
        rev.states.push_back(next);
    }
    rev.q_total = kahan_total(rev.q_increments);
    return rev;
}

std::string trajectory_csv(const Trajectory& t) {
    std::string out = "step,x,y,z,r,q_inc\n";
    for (std::size_t k = 0; k < t.states.size(); ++k) {
        const auto& st = t.states[k];
        out += std::to_string(k) + "," + format_double(st.x) + "," +
               format_double(st.y) + "," + format_double(st.z) + ",";
        if (k > 0)
            out += format_double(t.record.values[k - 1]) + "," +
                   format_double(t.q_increments[k - 1]);
        else
            out += ",";
        out += "\n";
    }
    return out;
}

void write_trajectory(const Trajectory& t, const std::string& csv_path) {
    std::ofstream f(csv_path);
    if (!f) throw std::runtime_error("cannot write " + csv_path);
    f << trajectory_csv(t);
    if (!f) throw std::runtime_error("write failed: " + csv_path);
}

}  // namespace qta
