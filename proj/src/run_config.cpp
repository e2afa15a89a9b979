#include "qtarrow/run_config.hpp"

#include "qtarrow/numeric.hpp"
#include "qtarrow/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace qta {

namespace {

constexpr double ns = 1e-9;
constexpr double us = 1e-6;
constexpr double two_pi = 2.0 * 3.14159265358979323846;
constexpr double mhz = 1e6;  // rabi_mhz is the drive frequency Omega/2pi

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size() || !std::isfinite(x))
            throw std::invalid_argument("");
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument(key + ": unparseable value '" + v + "'");
    }
}

long parse_long(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long x = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument("");
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument(key + ": unparseable value '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const unsigned long long x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument("");
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument(key + ": unparseable value '" + v + "'");
    }
}

RunMode parse_mode(const std::string& v) {
    if (v == "driven") return RunMode::driven;
    if (v == "qnd") return RunMode::qnd;
    throw std::invalid_argument("mode: expected driven or qnd, got '" + v + "'");
}

Basis parse_basis(const std::string& v) {
    if (v == "z") return Basis::compatible_z;
    if (v == "phi") return Basis::incompatible_phi;
    throw std::invalid_argument("basis: expected z or phi, got '" + v + "'");
}

std::vector<double> parse_duration_list(const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_double("duration_us", item) * us);
    }
    if (out.empty()) throw std::invalid_argument("duration_us: empty list");
    return out;
}

void apply_kv(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "dt_ns")
        cfg.params.dt = parse_double(key, value) * ns;
    else if (key == "tau_us")
        cfg.params.tau = parse_double(key, value) * us;
    else if (key == "rabi_mhz")
        cfg.params.rabi = parse_double(key, value) * two_pi * mhz;
    else if (key == "duration_us")
        cfg.durations = parse_duration_list(value);
    else if (key == "eta")
        cfg.unravel.eta = parse_double(key, value);
    else if (key == "basis")
        cfg.unravel.basis = parse_basis(value);
    else if (key == "n_samples")
        cfg.unravel.n_samples = static_cast<int>(parse_long(key, value));
    else if (key == "n_traj")
        cfg.n_traj = parse_long(key, value);
    else if (key == "seed")
        cfg.seed = parse_u64(key, value);
    else if (key == "initial_state")
        cfg.initial_state = value;
    else if (key == "mode")
        cfg.mode = parse_mode(value);
    else if (key == "out_dir")
        cfg.out_dir = value;
    else if (key == "bin_width")
        cfg.bin_width = parse_double(key, value);
    else if (key == "q_max")
        cfg.q_max = parse_double(key, value);
    else if (key == "min_bin_count")
        cfg.min_bin_count = static_cast<int>(parse_long(key, value));
    else if (key == "ft_window")
        cfg.ft_window = parse_double(key, value);
    else if (key == "threads")
        cfg.threads = static_cast<int>(parse_long(key, value));
    else
        throw std::invalid_argument("unknown config key: " + key);
}

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("config: cannot read " + path);
    std::string line;
    long lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key = value");
        apply_kv(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

}  // namespace

QubitState RunConfig::initial() const {
    if (initial_state == "z+") return {0.0, 0.0, 1.0};
    if (initial_state == "z-") return {0.0, 0.0, -1.0};
    if (initial_state == "x+") return {1.0, 0.0, 0.0};
    if (initial_state == "y+") return {0.0, 1.0, 0.0};
    std::stringstream ss(initial_state);
    std::string item;
    std::vector<double> parts;
    while (std::getline(ss, item, ','))
        parts.push_back(parse_double("initial_state", trim(item)));
    if (parts.size() != 3)
        throw std::invalid_argument("initial_state: expected z+|z-|x+|y+ or an x,y,z triple");
    const QubitState st{parts[0], parts[1], parts[2]};
    if (!st.is_physical())
        throw std::invalid_argument("initial_state: Bloch vector longer than 1");
    return st;
}

void RunConfig::finalize() {
    if (mode == RunMode::qnd) params.rabi = 0.0;
}

void RunConfig::validate() const {
    if (!(params.dt > 0)) throw std::invalid_argument("dt_ns: must be positive");
    if (!(params.tau > 0)) throw std::invalid_argument("tau_us: must be positive");
    if (!std::isfinite(params.rabi)) throw std::invalid_argument("rabi_mhz: must be finite");
    if (durations.empty()) throw std::invalid_argument("duration_us: at least one value");
    for (double d : durations)
        if (!(d > 0)) throw std::invalid_argument("duration_us: must be positive");
    if (!(unravel.eta > 0.0 && unravel.eta <= 1.0))
        throw std::invalid_argument("eta: must lie in (0, 1]");
    if (unravel.n_samples < 1) throw std::invalid_argument("n_samples: must be >= 1");
    if (n_traj < 1) throw std::invalid_argument("n_traj: must be >= 1");
    if (!(bin_width > 0)) throw std::invalid_argument("bin_width: must be positive");
    if (!(q_max > 0)) throw std::invalid_argument("q_max: must be positive");
    if (min_bin_count < 1) throw std::invalid_argument("min_bin_count: must be >= 1");
    if (!(ft_window > 0)) throw std::invalid_argument("ft_window: must be positive");
    if (threads < 0) throw std::invalid_argument("threads: must be >= 0");
    if (out_dir.empty()) throw std::invalid_argument("out_dir: must be nonempty");
    (void)initial();
}

std::string parse_cli(const std::vector<std::string>& args, RunConfig& cfg,
                      std::string& input_path) {
    // config file first so explicit flags override its keys
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size())
                throw std::invalid_argument("config: missing path after --config");
            load_config_file(cfg, args[i + 1]);
        } else if (args[i].rfind("--config=", 0) == 0) {
            load_config_file(cfg, args[i].substr(9));
        }
    }

    CLI::App app{"weak-measurement trajectory toolkit"};
    app.require_subcommand(1);
    std::string ignored_config;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", ignored_config, "flat key = value config file");
        sub->add_option_function<std::uint64_t>(
            "--seed", [&](std::uint64_t v) { cfg.seed = v; }, "base RNG seed");
        sub->add_option_function<std::string>(
            "--out", [&](const std::string& v) { cfg.out_dir = v; }, "output directory");
        sub->add_option_function<long>(
            "--n-traj", [&](long v) { cfg.n_traj = v; }, "ensemble size");
        sub->add_option_function<std::string>(
            "--mode", [&](const std::string& v) { cfg.mode = parse_mode(v); },
            "driven or qnd (qnd forces rabi = 0)");
        sub->add_option_function<double>(
            "--eta", [&](double v) { cfg.unravel.eta = v; }, "monitored fraction, (0, 1]");
        sub->add_option_function<std::string>(
            "--basis", [&](const std::string& v) { cfg.unravel.basis = parse_basis(v); },
            "unmonitored channel basis: z or phi");
        sub->add_option_function<std::vector<double>>(
            "--duration-us",
            [&](const std::vector<double>& v) {
                cfg.durations.clear();
                for (double d : v) cfg.durations.push_back(d * us);
            },
            "evolution time in microseconds (repeatable)");
        sub->add_option_function<double>(
            "--bin-width", [&](double v) { cfg.bin_width = v; }, "histogram bin width");
        sub->add_option_function<int>(
            "--threads", [&](int v) { cfg.threads = v; }, "worker count, 0 = all cores");
    };
    auto* sim = app.add_subcommand("simulate", "generate trajectory ensembles and arrow statistics");
    auto* unr = app.add_subcommand("unravel", "decompose a stored record into pure-state samples");
    auto* ver = app.add_subcommand("verify", "run the acceptance checks end to end");
    auto* ana = app.add_subcommand("analyze", "recompute statistics over a stored Q ensemble");
    add_common(sim);
    add_common(unr);
    add_common(ver);
    add_common(ana);
    unr->add_option("record", input_path, "measurement record CSV (with .meta.json sidecar)")
        ->required();
    ana->add_option("ensemble", input_path, "Q ensemble CSV (with .meta.json sidecar)")
        ->required();

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return "";
    } catch (const CLI::ParseError& e) {
        throw std::invalid_argument(e.what());
    }

    cfg.finalize();
    cfg.validate();
    return app.get_subcommands().front()->get_name();
}

namespace {

std::string basis_name(Basis b) { return b == Basis::compatible_z ? "z" : "phi"; }
std::string mode_name(RunMode m) { return m == RunMode::driven ? "driven" : "qnd"; }

}  // namespace

std::string config_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["dt_ns"] = cfg.params.dt / ns;
    j["tau_us"] = cfg.params.tau / us;
    j["rabi_mhz"] = cfg.params.rabi / (two_pi * mhz);
    auto arr = nlohmann::ordered_json::array();
    for (double d : cfg.durations) arr.push_back(d / us);
    j["duration_us"] = arr;
    j["eta"] = cfg.unravel.eta;
    j["basis"] = basis_name(cfg.unravel.basis);
    j["n_samples"] = cfg.unravel.n_samples;
    j["n_traj"] = cfg.n_traj;
    j["seed"] = cfg.seed;
    j["initial_state"] = cfg.initial_state;
    j["mode"] = mode_name(cfg.mode);
    j["out_dir"] = cfg.out_dir;
    j["bin_width"] = cfg.bin_width;
    j["q_max"] = cfg.q_max;
    j["min_bin_count"] = cfg.min_bin_count;
    j["ft_window"] = cfg.ft_window;
    j["threads"] = cfg.threads;
    j["version"] = version;
    return j.dump(2);
}

std::string config_flat(const RunConfig& cfg) {
    std::string out;
    out += "dt_ns = " + format_double(cfg.params.dt / ns) + "\n";
    out += "tau_us = " + format_double(cfg.params.tau / us) + "\n";
    out += "rabi_mhz = " + format_double(cfg.params.rabi / (two_pi * mhz)) + "\n";
    std::string ds;
    for (double d : cfg.durations) {
        if (!ds.empty()) ds += ",";
        ds += format_double(d / us);
    }
    out += "duration_us = " + ds + "\n";
    out += "eta = " + format_double(cfg.unravel.eta) + "\n";
    out += "basis = " + basis_name(cfg.unravel.basis) + "\n";
    out += "n_samples = " + std::to_string(cfg.unravel.n_samples) + "\n";
    out += "n_traj = " + std::to_string(cfg.n_traj) + "\n";
    out += "seed = " + std::to_string(cfg.seed) + "\n";
    out += "initial_state = " + cfg.initial_state + "\n";
    out += "mode = " + mode_name(cfg.mode) + "\n";
    out += "out_dir = " + cfg.out_dir + "\n";
    out += "bin_width = " + format_double(cfg.bin_width) + "\n";
    out += "q_max = " + format_double(cfg.q_max) + "\n";
    out += "min_bin_count = " + std::to_string(cfg.min_bin_count) + "\n";
    out += "ft_window = " + format_double(cfg.ft_window) + "\n";
    out += "threads = " + std::to_string(cfg.threads) + "\n";
    return out;
}

std::string params_fingerprint(const RunConfig& cfg) {
    // physics surface only; operational keys (threads, out_dir) must not
    // change ensemble identity
    nlohmann::ordered_json j;
    j["dt_ns"] = cfg.params.dt / ns;
    j["tau_us"] = cfg.params.tau / us;
    j["rabi_mhz"] = cfg.params.rabi / (two_pi * mhz);
    auto arr = nlohmann::ordered_json::array();
    for (double d : cfg.durations) arr.push_back(d / us);
    j["duration_us"] = arr;
    j["eta"] = cfg.unravel.eta;
    j["basis"] = basis_name(cfg.unravel.basis);
    j["n_samples"] = cfg.unravel.n_samples;
    j["initial_state"] = cfg.initial_state;
    j["mode"] = mode_name(cfg.mode);
    j["seed"] = cfg.seed;
    return fnv1a64_hex(j.dump());
}

}  // namespace qta
