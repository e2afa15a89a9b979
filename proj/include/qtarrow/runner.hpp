#pragma once

#include "qtarrow/run_config.hpp"
#include "qtarrow/stats.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qta {

// Streaming ensemble results: per-trajectory arrow statistics without state
// history, so 1e5-trajectory runs stay cheap. Entry i always comes from RNG
// stream (seed, i); the worker pool partitions indices, so outputs are
// byte-identical for any thread count.
struct EnsembleQ {
    std::vector<double> q;         // exact arrow statistic per trajectory
    std::vector<double> q_cont;    // diffusive-limit form per trajectory
    long n_steps = 0;
    double duration = 0.0;         // n_steps * dt
};

EnsembleQ run_ensemble_q(const SimParams& p, double eta, const QubitState& initial,
                         long n_traj, std::uint64_t seed, int threads);

// Output-file bookkeeping; every artifact a command writes lands here with its
// checksum, and the manifest is written exactly once per run.
class ArtifactWriter {
  public:
    explicit ArtifactWriter(std::string out_dir);
    void write_text(const std::string& name, const std::string& content);
    std::string path_of(const std::string& name) const;
    // emits manifest.json: config, seed, version, file checksums, timing
    void write_manifest(const RunConfig& cfg, double wall_ms, long total_steps,
                        bool partial);

  private:
    std::string dir_;
    struct Entry { std::string path; std::uint64_t bytes; std::string checksum; };
    std::vector<Entry> entries_;
    bool manifest_written_ = false;
};

// Q-ensemble CSV (single column q) plus .meta.json sidecar with duration,
// sample count, fingerprint, mode and seed.
void write_q_ensemble(ArtifactWriter& w, const std::string& name, const QEnsemble& ens,
                      const RunConfig& cfg);
QEnsemble read_q_ensemble(const std::string& csv_path);

// subcommand bodies; throw std::invalid_argument (exit 1) on bad input and
// std::runtime_error (exit 2) on runtime failure; cmd_verify returns 3 when
// any acceptance criterion fails
int cmd_simulate(const RunConfig& cfg);
int cmd_unravel(const RunConfig& cfg, const std::string& record_path);
int cmd_analyze(const RunConfig& cfg, const std::string& ensemble_path);
int cmd_verify(const RunConfig& cfg);

}  // namespace qta
