#include "qtarrow/unravel.hpp"

#include "qtarrow/numeric.hpp"

#include <cmath>
#include <stdexcept>

namespace qta {

std::pair<double, QubitState> sample_bob_z(const QubitState& st, const SimParams& p,
                                           double eta, Rng& rng) {
    const double boosted = 1.0 / (eta * p.tau);
    const double r = sample_readout(st, boosted, p.dt, rng);
    return {r, povm_update(st, r, boosted, p.dt)};
}

std::pair<double, QubitState> sample_rob_phi(const QubitState& st, const SimParams& p,
                                             double eta, Rng& rng) {
    const double gamma = 1.0 / (2.0 * eta * p.tau);
    const double theta = rng.gaussian() * std::sqrt(eta * p.tau / p.dt);
    return {theta, phase_kick(st, 2.0 * gamma * p.dt * theta)};
}

UnravelEnsemble unravel_record(const MeasurementRecord& rec, const SimParams& p,
                               const UnravelConfig& cfg, const QubitState& initial) {
    rec.validate();
    p.validate();
    cfg.validate();
    if (std::abs(rec.dt - p.dt) > 1e-12 * p.dt)
        throw std::invalid_argument("record dt does not match simulation dt");
    if (!initial.is_pure())
        throw std::invalid_argument("pure-state decomposition needs a pure initial state");

    const std::size_t n = rec.values.size();
    const std::size_t n_samples = static_cast<std::size_t>(cfg.n_samples);
    const double boosted = 1.0 / (cfg.eta * p.tau);
    const double angle = p.rabi * p.dt;

    UnravelEnsemble ens;
    ens.alice_record = rec;
    ens.boosted_strength = boosted;
    ens.trajectories.reserve(n_samples);
    ens.channel_masks.reserve(n_samples);

    for (std::size_t i = 0; i < n_samples; ++i) {
        Rng rng = Rng::stream(cfg.seed, i);
        Trajectory t;
        t.rabi_angle = angle;
        t.record.dt = p.dt;
        t.record.strength = boosted;
        t.states.reserve(n + 1);
        t.record.values.reserve(n);
        t.q_increments.reserve(n);
        t.states.push_back(initial);
        std::vector<char> mask(n, 'b');
        for (std::size_t k = 0; k < n; ++k) {
            const QubitState pre = t.states.back();
            double consumed;
            double q_inc;
            QubitState post;
            if (rng.uniform() < cfg.eta) {
                mask[k] = 'a';
                consumed = rec.values[k];
                post = povm_update(pre, consumed, boosted, p.dt);
                q_inc = arrow_increment(pre, post, consumed, boosted, p.dt);
            } else if (cfg.basis == Basis::compatible_z) {
                auto [r, st] = sample_bob_z(pre, p, cfg.eta, rng);
                consumed = r;
                post = st;
                q_inc = arrow_increment(pre, post, r, boosted, p.dt);
            } else {
                auto [theta, st] = sample_rob_phi(pre, p, cfg.eta, rng);
                consumed = theta;
                post = st;
                q_inc = 0.0;  // unitary kick, no likelihood ratio
            }
            t.record.values.push_back(consumed);
            t.q_increments.push_back(q_inc);
            t.states.push_back(rabi_rotate(post, angle));
        }
        t.q_total = kahan_total(t.q_increments);
        ens.trajectories.push_back(std::move(t));
        ens.channel_masks.push_back(std::move(mask));
    }
    return ens;
}

std::vector<double> alice_arrow_from_ensemble(const UnravelEnsemble& ens) {
    std::vector<double> out;
    out.reserve(ens.trajectories.size());
    for (std::size_t i = 0; i < ens.trajectories.size(); ++i) {
        const auto& t = ens.trajectories[i];
        const auto& mask = ens.channel_masks[i];
        std::vector<double> terms;
        terms.reserve(mask.size());
        for (std::size_t k = 0; k < mask.size(); ++k)
            if (mask[k] == 'a') terms.push_back(t.q_increments[k]);
        out.push_back(kahan_total(terms));
    }
    return out;
}

std::vector<double> alice_arrow_continuous(const UnravelEnsemble& ens) {
    std::vector<double> out;
    out.reserve(ens.trajectories.size());
    for (std::size_t i = 0; i < ens.trajectories.size(); ++i) {
        const auto& t = ens.trajectories[i];
        const auto& mask = ens.channel_masks[i];
        const double dt = t.record.dt;
        const double strength = t.record.strength;
        std::vector<double> terms;
        terms.reserve(mask.size());
        for (std::size_t k = 0; k < mask.size(); ++k) {
            if (mask[k] != 'a') continue;
            const double r = t.record.values[k];
            const QubitState& pre = t.states[k];
            const QubitState post = povm_update(pre, r, strength, dt);
            terms.push_back(2.0 * dt * strength * r * 0.5 * (pre.z + post.z));
        }
        out.push_back(kahan_total(terms));
    }
    return out;
}

}  // namespace qta
