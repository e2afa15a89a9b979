#include "qtarrow/verify.hpp"

#include "qtarrow/numeric.hpp"
#include "qtarrow/runner.hpp"
#include "qtarrow/stats.hpp"
#include "qtarrow/trajectory.hpp"
#include "qtarrow/unravel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace qta {

namespace {

constexpr double pi = 3.14159265358979323846;

__attribute__((format(printf, 1, 2))) std::string strf(const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, ap);
    va_end(ap);
    return buf;
}

// dt/tau pinned to 1/32 for the undriven closed-form checks
SimParams qnd_params(double theta) {
    SimParams p;
    p.dt = 16e-9;
    p.tau = 32.0 * p.dt;
    p.rabi = 0.0;
    p.duration = theta * p.tau;
    return p;
}

// reference driven run: 2.16 MHz drive, 0.32 us window
SimParams driven_params() {
    SimParams p;
    p.dt = 16e-9;
    p.tau = 1.0 / 1.97e6;
    p.rabi = 2.0 * pi * 2.16e6;
    p.duration = 0.32e-6;
    return p;
}

QubitState random_pure(Rng& rng) {
    const double c = 2.0 * rng.uniform() - 1.0;
    const double ph = 2.0 * pi * rng.uniform();
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    return {s * std::cos(ph), s * std::sin(ph), c};
}

double ln_cosh(double a) {
    const double x = std::abs(a);
    return x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0);
}

struct VarEst {
    double var = 0.0;
    double se = 0.0;
};

VarEst variance_with_se(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    kahan_sum sum;
    for (double x : v) sum.add(x);
    const double mean = sum.value() / n;
    kahan_sum s2, s4;
    for (double x : v) {
        const double d = x - mean;
        s2.add(d * d);
        s4.add(d * d * d * d);
    }
    const double m2 = s2.value() / n;
    const double m4 = s4.value() / n;
    VarEst e;
    e.var = s2.value() / (n - 1.0);
    e.se = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
    return e;
}

CriterionResult c1_reversal(const RunConfig& cfg) {
    const double dt = 16e-9;
    const double tau = 32.0 * dt;
    const double strength = 1.0 / tau;
    Rng rng = Rng::stream(cfg.seed, 101);
    double max_state = 0.0, max_w = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const QubitState st = random_pure(rng);
        const double branch = rng.uniform() < 0.5 ? 1.0 : -1.0;
        const double r = branch + rng.gaussian() * std::sqrt(tau / dt);
        const QubitState back =
            povm_update(povm_update(st, r, strength, dt), -r, strength, dt);
        max_state = std::max({max_state, std::abs(back.x - st.x),
                              std::abs(back.y - st.y), std::abs(back.z - st.z)});
        const double w = undo_weight(st, r, strength, dt);
        const double beta = dt * strength;
        const double expect = beta / (2.0 * pi) * std::exp(-beta * (r * r + 1.0));
        max_w = std::max(max_w, std::abs(w - expect) / expect);
    }
    const bool pass = max_state <= 1e-12 && max_w <= 1e-12;
    return {1, "reversal_identity", pass,
            strf("max state error %.3g, max undo weight rel error %.3g (gates 1e-12)",
                 max_state, max_w)};
}

CriterionResult c2_closed_form(const RunConfig& cfg) {
    const SimParams p = qnd_params(100.0 / 32.0);  // 100 steps
    const double beta = p.dt / p.tau;
    double max_z = 0.0, max_x = 0.0;
    for (int i = 0; i < 1000; ++i) {
        Rng rng = Rng::stream(cfg.seed, 201 + static_cast<std::uint64_t>(i));
        MeasurementRecord rec;
        rec.dt = p.dt;
        rec.strength = p.strength();
        kahan_sum s;
        for (int k = 0; k < 100; ++k) {
            const double r = rng.gaussian() * std::sqrt(p.tau / p.dt);
            rec.values.push_back(r);
            s.add(r);
        }
        const Trajectory tz = reconstruct_trajectory(rec, p, {0, 0, 1}, 0.0);
        max_z = std::max(max_z, std::abs(tz.q_total - 2.0 * beta * s.value()));
        const Trajectory tx = reconstruct_trajectory(rec, p, {1, 0, 0}, 0.0);
        max_x = std::max(max_x, std::abs(tx.q_total - 2.0 * ln_cosh(beta * s.value())));
    }
    const bool pass = max_z <= 1e-12 && max_x <= 1e-9;
    return {2, "closed_form_q_oracles", pass,
            strf("eigenstate |Q - 2(dt/tau)Sum r| max %.3g (gate 1e-12), "
                 "equator |Q - 2 ln cosh| max %.3g (gate 1e-9)",
                 max_z, max_x)};
}

CriterionResult c3_distribution(const RunConfig& cfg) {
    const double thetas[] = {0.5, 1.0, 2.0};
    std::string detail;
    bool pass = true;
    for (double theta : thetas) {
        const SimParams p = qnd_params(theta);
        const EnsembleQ eq =
            run_ensemble_q(p, 1.0, {1, 0, 0}, cfg.n_traj, cfg.seed, cfg.threads);
        QEnsemble ens;
        ens.values = eq.q;
        ens.duration = eq.duration;
        const double T = eq.duration;
        const double tau = p.tau;
        const double ks = ks_distance(
            ens, [T, tau](double q) { return analytic_qnd_cdf(q, T, tau); });
        pass = pass && ks < 0.02;
        if (!detail.empty()) detail += ", ";
        detail += strf("T/tau=%.1f ks=%.4f", theta, ks);
    }
    return {3, "qnd_distribution_match", pass, detail + " (gate < 0.02)"};
}

CriterionResult c4_ft_slope(const RunConfig& cfg) {
    const SimParams p = driven_params();
    const EnsembleQ eq =
        run_ensemble_q(p, 1.0, {1, 0, 0}, cfg.n_traj, cfg.seed, cfg.threads);
    QEnsemble ens;
    ens.values = eq.q;
    ens.duration = eq.duration;
    try {
        const Histogram h = build_histogram(ens, 0.25, 12.0);
        const FtCurve c = detailed_ft_curve(h, 3.0, 10);
        const bool pass = std::abs(c.slope - 1.0) <= 0.1;
        return {4, "detailed_ft_slope", pass,
                strf("ln(P(Q)/P(-Q)) slope %.3f +- %.3f over |Q| <= 3 (gate 1.0 +- 0.1)",
                     c.slope, c.slope_err)};
    } catch (const std::runtime_error& e) {
        return {4, "detailed_ft_slope", false, std::string("no fit: ") + e.what()};
    }
}

CriterionResult c5_integral_ft(const RunConfig& cfg) {
    const SimParams pd = driven_params();
    const EnsembleQ eqd =
        run_ensemble_q(pd, 1.0, {1, 0, 0}, cfg.n_traj, cfg.seed, cfg.threads);
    QEnsemble ensd;
    ensd.values = eqd.q;
    ensd.duration = eqd.duration;
    const IntegralFt ifd = integral_ft(ensd);
    const bool pass_driven = std::abs(ifd.mean - 1.0) <= 3.0 * ifd.stderr_;
    std::string detail = strf("driven mean e^{-Q} %.4f +- %.4f (gate 1 within 3 se)",
                              ifd.mean, ifd.stderr_);

    bool pass_qnd = true;
    double prev_deficit = -1.0;
    bool monotone = true;
    const double thetas[] = {0.5, 1.0, 2.0};
    for (double theta : thetas) {
        const SimParams p = qnd_params(theta);
        const EnsembleQ eq =
            run_ensemble_q(p, 1.0, {1, 0, 0}, cfg.n_traj, cfg.seed, cfg.threads);
        QEnsemble ens;
        ens.values = eq.q;
        ens.duration = eq.duration;
        const IntegralFt f = integral_ft(ens);
        const double deficit = 1.0 - f.mean;
        pass_qnd = pass_qnd && deficit > 5.0 * f.stderr_;
        monotone = monotone && deficit > prev_deficit;
        prev_deficit = deficit;
        detail += strf("; qnd T/tau=%.1f deficit %.4f +- %.4f", theta, deficit, f.stderr_);
    }
    detail += " (gates: each deficit > 5 se, deficit monotone in T)";
    const bool pass = pass_driven && pass_qnd && monotone;
    return {5, "integral_ft", pass, detail};
}

CriterionResult c6_unravel_consistency(const RunConfig& cfg) {
    const double eta = 0.4;
    SimParams p = driven_params();
    const QubitState initial{1, 0, 0};
    Rng rr = Rng::stream(cfg.seed, 601);
    const Trajectory alice = generate_trajectory_dephased(p, eta, initial, rr);
    const double extra = 1.0 / (2.0 * eta * p.tau) - 0.5 / p.tau;
    const Trajectory ref = reconstruct_trajectory(alice.record, p, initial, extra);

    bool mean_ok = true;
    bool y_z_ok = true, y_phi_ok = false;
    std::string detail;
    for (int b = 0; b < 2; ++b) {
        UnravelConfig uc;
        uc.eta = eta;
        uc.basis = b == 0 ? Basis::compatible_z : Basis::incompatible_phi;
        uc.n_samples = 1000;
        uc.seed = Rng::stream(cfg.seed, 602 + static_cast<std::uint64_t>(b)).next_u64();
        const UnravelEnsemble ens = unravel_record(alice.record, p, uc, initial);
        const std::size_t n = alice.record.values.size();
        const double ns = static_cast<double>(uc.n_samples);
        double worst = 0.0;
        for (std::size_t k = 0; k <= n; ++k) {
            double m[3] = {0, 0, 0};
            for (const auto& t : ens.trajectories) {
                m[0] += t.states[k].x;
                m[1] += t.states[k].y;
                m[2] += t.states[k].z;
            }
            for (auto& v : m) v /= ns;
            double s2[3] = {0, 0, 0};
            for (const auto& t : ens.trajectories) {
                const double d0 = t.states[k].x - m[0];
                const double d1 = t.states[k].y - m[1];
                const double d2 = t.states[k].z - m[2];
                s2[0] += d0 * d0;
                s2[1] += d1 * d1;
                s2[2] += d2 * d2;
            }
            const double rf[3] = {ref.states[k].x, ref.states[k].y, ref.states[k].z};
            for (int c = 0; c < 3; ++c) {
                const double se = std::sqrt(s2[c] / (ns * (ns - 1.0)));
                const double diff = std::abs(m[c] - rf[c]);
                if (diff > 3.0 * se) mean_ok = false;
                if (se > 0) worst = std::max(worst, diff / se);
            }
        }
        double max_abs_y = 0.0;
        for (const auto& t : ens.trajectories)
            for (const auto& st : t.states) max_abs_y = std::max(max_abs_y, std::abs(st.y));
        if (b == 0)
            y_z_ok = max_abs_y < 1e-9;
        else
            y_phi_ok = max_abs_y > 0.05;
        detail += strf("%s: worst mean z-score %.1f, max |y| %.3g; ",
                       b == 0 ? "z-basis" : "phi-basis", worst, max_abs_y);
    }
    const bool pass = mean_ok && y_z_ok && y_phi_ok;
    return {6, "unraveling_consistency", pass,
            detail + "(gates: every step within 3 se; z keeps |y| < 1e-9; "
                     "phi reaches |y| > 0.05)"};
}

CriterionResult c7_basis_spread(const RunConfig& cfg) {
    const double eta = 0.4;
    SimParams p = driven_params();
    const QubitState initial{1, 0, 0};
    std::vector<double> qz, qphi;
    qz.reserve(100000);
    qphi.reserve(100000);
    for (int i = 0; i < 1000; ++i) {
        Rng rg = Rng::stream(cfg.seed, 700000 + static_cast<std::uint64_t>(i));
        const Trajectory alice = generate_trajectory_dephased(p, eta, initial, rg);
        for (int b = 0; b < 2; ++b) {
            UnravelConfig uc;
            uc.eta = eta;
            uc.basis = b == 0 ? Basis::compatible_z : Basis::incompatible_phi;
            uc.n_samples = 100;
            uc.seed = Rng::stream(cfg.seed,
                                  800000 + static_cast<std::uint64_t>(2 * i + b))
                          .next_u64();
            const UnravelEnsemble ens = unravel_record(alice.record, p, uc, initial);
            auto qs = alice_arrow_from_ensemble(ens);
            auto& dst = b == 0 ? qz : qphi;
            dst.insert(dst.end(), qs.begin(), qs.end());
        }
    }
    const VarEst vz = variance_with_se(qz);
    const VarEst vp = variance_with_se(qphi);
    const double z =
        (vz.var - vp.var) / std::sqrt(vz.se * vz.se + vp.se * vp.se);
    const bool pass = z >= 3.0;
    return {7, "basis_q_spread", pass,
            strf("var(Q) z-basis %.3f +- %.3f vs phi-basis %.3f +- %.3f, "
                 "one-sided z = %.1f (gate >= 3)",
                 vz.var, vz.se, vp.var, vp.se, z)};
}

CriterionResult c8_continuous_limit(const RunConfig& cfg) {
    SimParams pf = driven_params();
    SimParams ph = pf;
    ph.dt = 0.5 * pf.dt;
    const QubitState initial{1, 0, 0};
    double means[2] = {0, 0};
    const SimParams* ps[2] = {&pf, &ph};
    for (int j = 0; j < 2; ++j) {
        kahan_sum acc;
        for (int i = 0; i < 1000; ++i) {
            Rng rng = Rng::stream(cfg.seed,
                                  810000 + static_cast<std::uint64_t>(10000 * j + i));
            const Trajectory t = generate_trajectory(*ps[j], initial, rng);
            acc.add(std::abs(arrow_statistic_continuous(t) - t.q_total));
        }
        means[j] = acc.value() / 1000.0;
    }
    const double ratio = means[1] / means[0];
    const bool pass = std::abs(ratio - 0.5) <= 0.15;
    return {8, "continuous_limit", pass,
            strf("mean |Q_cont - Q| %.3g at dt, %.3g at dt/2, ratio %.3f "
                 "(gate 0.5 +- 0.15)",
                 means[0], means[1], ratio)};
}

CriterionResult c9_normalization(const RunConfig& cfg) {
    const double thetas[] = {0.25, 0.5, 1.0, 2.0, 4.0};
    double max_err_density = 0.0;
    for (double theta : thetas) {
        const double T = theta, tau = 1.0;
        // q = u^2 substitution removes the integrable 1/sqrt(q) edge
        const auto g = [T, tau](double u) {
            return analytic_qnd_density(u * u, T, tau) * 2.0 * u;
        };
        const double q_hi = 40.0 + 20.0 * theta;
        const double I = integrate(g, 0.0, std::sqrt(q_hi), 1e-9);
        max_err_density = std::max(max_err_density, std::abs(I - 1.0));
    }

    const double dt = 16e-9;
    const double tau = 32.0 * dt;
    const double strength = 1.0 / tau;
    const double sd = std::sqrt(tau / dt);
    Rng rng = Rng::stream(cfg.seed, 901);
    double max_err_readout = 0.0;
    for (int i = 0; i < 100; ++i) {
        const QubitState st = random_pure(rng);
        const auto f = [&st, strength, dt](double r) {
            return readout_density(st, r, strength, dt);
        };
        const double I = integrate(f, -1.0 - 10.0 * sd, 1.0 + 10.0 * sd, 1e-9);
        max_err_readout = std::max(max_err_readout, std::abs(I - 1.0));
    }
    const bool pass = max_err_density <= 1e-6 && max_err_readout <= 1e-6;
    return {9, "density_normalization", pass,
            strf("analytic law max |integral - 1| %.3g, readout density max %.3g "
                 "(gates 1e-6)",
                 max_err_density, max_err_readout)};
}

}  // namespace

CriterionResult run_criterion(int id, const RunConfig& cfg) {
    switch (id) {
        case 1: return c1_reversal(cfg);
        case 2: return c2_closed_form(cfg);
        case 3: return c3_distribution(cfg);
        case 4: return c4_ft_slope(cfg);
        case 5: return c5_integral_ft(cfg);
        case 6: return c6_unravel_consistency(cfg);
        case 7: return c7_basis_spread(cfg);
        case 8: return c8_continuous_limit(cfg);
        case 9: return c9_normalization(cfg);
        default: throw std::invalid_argument("criterion id must be 1..9");
    }
}

std::vector<CriterionResult> run_all_criteria(const RunConfig& cfg) {
    std::vector<CriterionResult> out;
    out.reserve(9);
    for (int id = 1; id <= 9; ++id) out.push_back(run_criterion(id, cfg));
    return out;
}

}  // namespace qta
