#pragma once

#include "qtarrow/bloch.hpp"
#include "qtarrow/params.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qta {

enum class RunMode { driven, qnd };

// Resolved run configuration. Times cross the CLI/config boundary with units in
// the key name (dt_ns, tau_us, duration_us, rabi_mhz = drive frequency in MHz)
// and are stored in seconds / angular units here.
struct RunConfig {
    SimParams params;                    // dt, tau, rabi; duration unused (see durations)
    std::vector<double> durations{0.32e-6};  // seconds, one ensemble per entry
    UnravelConfig unravel;               // eta, basis, n_samples
    long n_traj = 100000;
    std::uint64_t seed = 1;
    std::string initial_state = "x+";    // z+ | z- | x+ | y+ | "x,y,z" triple
    RunMode mode = RunMode::driven;      // qnd forces rabi = 0
    std::string out_dir = "out";
    double bin_width = 0.25;
    double q_max = 12.0;
    int min_bin_count = 10;
    double ft_window = 3.0;
    int threads = 0;                     // 0 = hardware concurrency

    QubitState initial() const;          // decodes initial_state; throws on bad input
    void finalize();                     // applies mode coupling (qnd -> rabi 0)
    void validate() const;               // throws std::invalid_argument naming the key
};

// Parses argv-style arguments for one subcommand: flag > config file > default.
// Unknown config keys and out-of-range values throw std::invalid_argument with
// the offending key named. Returns the subcommand ("simulate", "unravel",
// "verify", "analyze") and fills cfg and positional input path (record or
// ensemble CSV, where the subcommand takes one).
std::string parse_cli(const std::vector<std::string>& args, RunConfig& cfg,
                      std::string& input_path);

// canonical JSON of the resolved config (stable key order)
std::string config_json(const RunConfig& cfg);

// flat key = value rendering accepted back by --config; round-trips the config
std::string config_flat(const RunConfig& cfg);

// FNV-1a hash of the physics parameters (times, rates, unraveling setup,
// initial state, seed); operational keys like threads or out_dir are excluded
// so reruns of the same ensemble fingerprint identically
std::string params_fingerprint(const RunConfig& cfg);

}  // namespace qta
