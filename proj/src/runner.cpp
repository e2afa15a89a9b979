#include "qtarrow/runner.hpp"

#include "qtarrow/numeric.hpp"
#include "qtarrow/record.hpp"
#include "qtarrow/trajectory.hpp"
#include "qtarrow/unravel.hpp"
#include "qtarrow/verify.hpp"
#include "qtarrow/version.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace qta {

namespace {

int resolve_workers(int threads, long n_items) {
    int w = threads > 0 ? threads
                        : static_cast<int>(std::thread::hardware_concurrency());
    if (w < 1) w = 1;
    if (n_items < w) w = static_cast<int>(n_items);
    return w;
}

std::string duration_label(double seconds) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "T%ldns", std::lround(seconds * 1e9));
    return buf;
}

}  // namespace

EnsembleQ run_ensemble_q(const SimParams& p, double eta, const QubitState& initial,
                         long n_traj, std::uint64_t seed, int threads) {
    p.validate();
    if (n_traj < 1) throw std::invalid_argument("n_traj: must be >= 1");
    EnsembleQ out;
    out.n_steps = p.n_steps();
    out.duration = static_cast<double>(out.n_steps) * p.dt;
    out.q.resize(static_cast<std::size_t>(n_traj));
    out.q_cont.resize(static_cast<std::size_t>(n_traj));

    const int workers = resolve_workers(threads, n_traj);
    std::atomic<long> next{0};
    constexpr long block = 256;
    std::mutex err_mu;
    std::exception_ptr first_err;
    auto work = [&]() {
        try {
            for (;;) {
                const long b = next.fetch_add(block);
                if (b >= n_traj) return;
                const long e = std::min(b + block, n_traj);
                for (long i = b; i < e; ++i) {
                    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
                    const Trajectory t = generate_trajectory_dephased(p, eta, initial, rng);
                    out.q[static_cast<std::size_t>(i)] = t.q_total;
                    out.q_cont[static_cast<std::size_t>(i)] = arrow_statistic_continuous(t);
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lk(err_mu);
            if (!first_err) first_err = std::current_exception();
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (first_err) std::rethrow_exception(first_err);
    return out;
}

ArtifactWriter::ArtifactWriter(std::string out_dir) : dir_(std::move(out_dir)) {
    if (dir_.empty()) throw std::invalid_argument("out_dir: must be nonempty");
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw std::runtime_error("cannot create " + dir_ + ": " + ec.message());
}

std::string ArtifactWriter::path_of(const std::string& name) const {
    return dir_ + "/" + name;
}

void ArtifactWriter::write_text(const std::string& name, const std::string& content) {
    const std::string path = path_of(name);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write failed: " + path);
    entries_.push_back({name, content.size(), fnv1a64_hex(content)});
}

void ArtifactWriter::write_manifest(const RunConfig& cfg, double wall_ms,
                                    long total_steps, bool partial) {
    if (manifest_written_) throw std::runtime_error("manifest already written");
    manifest_written_ = true;
    nlohmann::ordered_json j;
    j["version"] = version;
    j["config"] = nlohmann::ordered_json::parse(config_json(cfg));
    j["seed"] = cfg.seed;
    j["partial"] = partial;
    j["wall_ms"] = wall_ms;
    j["total_steps"] = total_steps;
    auto files = nlohmann::ordered_json::array();
    for (const auto& e : entries_) {
        nlohmann::ordered_json fe;
        fe["name"] = e.path;
        fe["bytes"] = e.bytes;
        fe["fnv1a64"] = e.checksum;
        files.push_back(fe);
    }
    j["files"] = files;
    const std::string path = path_of("manifest.json");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << j.dump(2) << '\n';
    f.flush();
    if (!f) throw std::runtime_error("write failed: " + path);
}

void write_q_ensemble(ArtifactWriter& w, const std::string& name, const QEnsemble& ens,
                      const RunConfig& cfg) {
    ens.validate();
    std::string csv = "q\n";
    for (double v : ens.values) csv += format_double(v) + "\n";
    w.write_text(name, csv);
    nlohmann::ordered_json meta;
    meta["duration_s"] = ens.duration;
    meta["n"] = ens.values.size();
    meta["params_fingerprint"] = ens.params_fingerprint;
    meta["mode"] = cfg.mode == RunMode::driven ? "driven" : "qnd";
    meta["seed"] = cfg.seed;
    meta["version"] = version;
    w.write_text(sidecar_path(name), meta.dump(2) + "\n");
}

QEnsemble read_q_ensemble(const std::string& csv_path) {
    const std::string meta_path = sidecar_path(csv_path);
    std::ifstream m(meta_path);
    if (!m)
        throw std::invalid_argument("missing ensemble sidecar: expected " + meta_path);
    nlohmann::json meta = nlohmann::json::parse(m);
    if (!meta.contains("duration_s"))
        throw std::invalid_argument(meta_path + ": not a q ensemble sidecar");
    QEnsemble ens;
    ens.duration = meta.at("duration_s").get<double>();
    ens.params_fingerprint = meta.value("params_fingerprint", "");

    std::ifstream f(csv_path);
    if (!f) throw std::invalid_argument("cannot read " + csv_path);
    std::string line;
    if (!std::getline(f, line) || line.rfind("q", 0) != 0 || line.size() > 2)
        throw std::invalid_argument(csv_path + ": expected header q");
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        ens.values.push_back(std::stod(line));
    }
    if (meta.contains("n") && meta.at("n").get<std::size_t>() != ens.values.size())
        throw std::invalid_argument(csv_path + ": row count disagrees with sidecar");
    ens.validate();
    return ens;
}

namespace {

std::string histogram_csv(const Histogram& h) {
    std::string out = "q_lo,q_hi,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const double lo = h.center(i) - 0.5 * h.bin_width;
        const double hi = h.center(i) + 0.5 * h.bin_width;
        out += format_double(lo) + "," + format_double(hi) + "," +
               std::to_string(h.counts[i]) + "\n";
    }
    return out;
}

std::string ft_curve_csv(const FtCurve& c) {
    std::string out = "q,ln_ratio,stderr\n";
    for (const auto& pt : c.points)
        out += format_double(pt.q) + "," + format_double(pt.ln_ratio) + "," +
               format_double(pt.stderr_) + "\n";
    return out;
}

// histogram + integral FT + (where mirrored bins exist) detailed FT curve
void write_stats_artifacts(ArtifactWriter& w, const std::string& label,
                           const QEnsemble& ens, const RunConfig& cfg) {
    const Histogram h = build_histogram(ens, cfg.bin_width, cfg.q_max);
    w.write_text("hist_" + label + ".csv", histogram_csv(h));
    const IntegralFt ift = integral_ft(ens);

    nlohmann::ordered_json j;
    j["n"] = ens.values.size();
    j["duration_s"] = ens.duration;
    j["params_fingerprint"] = ens.params_fingerprint;
    j["integral_ft"] = {{"mean_exp_neg_q", ift.mean},
                        {"stderr", ift.stderr_},
                        {"median_exp_neg_q", ift.median}};
    j["histogram"] = {{"bin_width", h.bin_width},
                      {"half_bins", h.half_bins},
                      {"total", h.total},
                      {"overflow_low", h.overflow_low},
                      {"overflow_high", h.overflow_high}};
    try {
        const FtCurve c = detailed_ft_curve(h, cfg.ft_window, cfg.min_bin_count);
        w.write_text("ft_curve_" + label + ".csv", ft_curve_csv(c));
        j["ft_curve"] = {{"slope", c.slope},
                         {"slope_err", c.slope_err},
                         {"window", c.window},
                         {"min_count", c.min_count},
                         {"n_points", c.points.size()}};
    } catch (const std::runtime_error& e) {
        j["ft_curve"] = nullptr;
        j["ft_curve_skipped"] = e.what();
    }
    w.write_text("stats_" + label + ".json", j.dump(2) + "\n");
}

double elapsed_ms(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     t0)
        .count();
}

}  // namespace

int cmd_simulate(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    cfg.validate();
    ArtifactWriter w(cfg.out_dir);
    const QubitState initial = cfg.initial();
    long total_steps = 0;
    try {
        for (double d : cfg.durations) {
            SimParams p = cfg.params;
            p.duration = d;
            if (p.n_steps() < 1)
                throw std::invalid_argument("duration_us: shorter than one step");
            const std::string label = duration_label(static_cast<double>(p.n_steps()) * p.dt);

            // the record of trajectory 0, regenerated with full state history,
            // doubles as the unravel input artifact
            Rng rng0 = Rng::stream(cfg.seed, 0);
            const Trajectory t0x =
                generate_trajectory_dephased(p, cfg.unravel.eta, initial, rng0);
            w.write_text("record_" + label + ".csv", record_csv(t0x.record));
            w.write_text(sidecar_path("record_" + label + ".csv"),
                         record_meta_json(t0x.record, cfg.seed));

            if (cfg.n_traj < cfg.min_bin_count) {
                // degenerate ensemble: trajectory export only, stats need counts
                w.write_text("trajectory_" + label + ".csv", trajectory_csv(t0x));
                total_steps += static_cast<long>(t0x.n_steps());
                continue;
            }

            const EnsembleQ eq = run_ensemble_q(p, cfg.unravel.eta, initial, cfg.n_traj,
                                                cfg.seed, cfg.threads);
            total_steps += eq.n_steps * cfg.n_traj;
            QEnsemble ens;
            ens.values = eq.q;
            ens.duration = eq.duration;
            ens.params_fingerprint = params_fingerprint(cfg);
            write_q_ensemble(w, "q_" + label + ".csv", ens, cfg);
            write_stats_artifacts(w, label, ens, cfg);
        }
    } catch (const std::runtime_error&) {
        w.write_manifest(cfg, elapsed_ms(t0), total_steps, true);
        throw;
    }
    w.write_manifest(cfg, elapsed_ms(t0), total_steps, false);
    return 0;
}

int cmd_unravel(const RunConfig& cfg, const std::string& record_path) {
    const auto t0 = std::chrono::steady_clock::now();
    cfg.validate();
    const MeasurementRecord rec = read_record(record_path);
    SimParams p = cfg.params;
    p.duration = static_cast<double>(rec.values.size()) * rec.dt;
    UnravelConfig ucfg = cfg.unravel;
    ucfg.seed = cfg.seed;
    const QubitState initial = cfg.initial();

    const UnravelEnsemble ens = unravel_record(rec, p, ucfg, initial);
    const double gamma = 1.0 / (2.0 * ucfg.eta * p.tau);
    const Trajectory ref =
        reconstruct_trajectory(rec, p, initial, gamma - 0.5 / p.tau);

    ArtifactWriter w(cfg.out_dir);
    const std::size_t n_steps = rec.values.size();
    const std::size_t n_samp = ens.trajectories.size();
    long total_steps = 0;
    try {
        for (std::size_t i = 0; i < n_samp; ++i) {
            const auto& t = ens.trajectories[i];
            const auto& mask = ens.channel_masks[i];
            std::string csv = "step,x,y,z,r,q_inc,channel\n";
            for (std::size_t k = 0; k < t.states.size(); ++k) {
                const auto& st = t.states[k];
                csv += std::to_string(k) + "," + format_double(st.x) + "," +
                       format_double(st.y) + "," + format_double(st.z) + ",";
                if (k > 0)
                    csv += format_double(t.record.values[k - 1]) + "," +
                           format_double(t.q_increments[k - 1]) + "," + mask[k - 1];
                else
                    csv += ",,";
                csv += "\n";
            }
            char name[48];
            std::snprintf(name, sizeof(name), "unravel_%05zu.csv", i);
            w.write_text(name, csv);
            total_steps += static_cast<long>(n_steps);
        }

        // per-step ensemble mean and stderr, plus gap to the dephased reference
        std::string summary = "step,mean_x,mean_y,mean_z,stderr_x,stderr_y,stderr_z\n";
        std::string compare =
            "step,dx,dy,dz,stderr_x,stderr_y,stderr_z,ref_x,ref_y,ref_z\n";
        for (std::size_t k = 0; k <= n_steps; ++k) {
            double m[3] = {0, 0, 0}, s2[3] = {0, 0, 0};
            for (const auto& t : ens.trajectories) {
                m[0] += t.states[k].x;
                m[1] += t.states[k].y;
                m[2] += t.states[k].z;
            }
            for (auto& v : m) v /= static_cast<double>(n_samp);
            for (const auto& t : ens.trajectories) {
                const double d0 = t.states[k].x - m[0];
                const double d1 = t.states[k].y - m[1];
                const double d2 = t.states[k].z - m[2];
                s2[0] += d0 * d0;
                s2[1] += d1 * d1;
                s2[2] += d2 * d2;
            }
            double se[3];
            for (int c = 0; c < 3; ++c)
                se[c] = n_samp > 1 ? std::sqrt(s2[c] / (static_cast<double>(n_samp) *
                                                        static_cast<double>(n_samp - 1)))
                                   : 0.0;
            summary += std::to_string(k);
            for (int c = 0; c < 3; ++c) summary += "," + format_double(m[c]);
            for (int c = 0; c < 3; ++c) summary += "," + format_double(se[c]);
            summary += "\n";
            const auto& rf = ref.states[k];
            compare += std::to_string(k) + "," + format_double(m[0] - rf.x) + "," +
                       format_double(m[1] - rf.y) + "," + format_double(m[2] - rf.z);
            for (int c = 0; c < 3; ++c) compare += "," + format_double(se[c]);
            compare += "," + format_double(rf.x) + "," + format_double(rf.y) + "," +
                       format_double(rf.z) + "\n";
        }
        w.write_text("ensemble_summary.csv", summary);
        w.write_text("comparison.csv", compare);

        QEnsemble aq;
        aq.values = alice_arrow_from_ensemble(ens);
        aq.duration = static_cast<double>(n_steps) * rec.dt;
        aq.params_fingerprint = params_fingerprint(cfg);
        write_q_ensemble(w, "alice_q.csv", aq, cfg);
    } catch (const std::runtime_error&) {
        w.write_manifest(cfg, elapsed_ms(t0), total_steps, true);
        throw;
    }
    w.write_manifest(cfg, elapsed_ms(t0), total_steps, false);
    return 0;
}

int cmd_analyze(const RunConfig& cfg, const std::string& ensemble_path) {
    const auto t0 = std::chrono::steady_clock::now();
    cfg.validate();
    const QEnsemble ens = read_q_ensemble(ensemble_path);
    ArtifactWriter w(cfg.out_dir);
    try {
        write_stats_artifacts(w, "analyze", ens, cfg);
    } catch (const std::runtime_error&) {
        w.write_manifest(cfg, elapsed_ms(t0), 0, true);
        throw;
    }
    w.write_manifest(cfg, elapsed_ms(t0), 0, false);
    return 0;
}

int cmd_verify(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    cfg.validate();
    ArtifactWriter w(cfg.out_dir);
    const std::vector<CriterionResult> results = run_all_criteria(cfg);
    bool all_pass = true;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : results) {
        all_pass = all_pass && r.pass;
        std::cout << "criterion " << r.id << ' ' << (r.pass ? "PASS" : "FAIL") << ' '
                  << r.name << ": " << r.detail << '\n';
        nlohmann::ordered_json e;
        e["id"] = r.id;
        e["name"] = r.name;
        e["pass"] = r.pass;
        e["detail"] = r.detail;
        arr.push_back(e);
    }
    nlohmann::ordered_json report;
    report["all_pass"] = all_pass;
    report["criteria"] = arr;
    w.write_text("verify_report.json", report.dump(2) + "\n");
    w.write_manifest(cfg, elapsed_ms(t0), 0, false);
    return all_pass ? 0 : 3;
}

}  // namespace qta
