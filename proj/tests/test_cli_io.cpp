#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qtarrow/numeric.hpp"
#include "qtarrow/record.hpp"
#include "qtarrow/run_config.hpp"
#include "qtarrow/runner.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace qta;
namespace fs = std::filesystem;

namespace {

struct Parsed {
    std::string cmd;
    RunConfig cfg;
    std::string input;
};

Parsed parse(const std::vector<std::string>& args) {
    Parsed p;
    p.cmd = parse_cli(args, p.cfg, p.input);
    return p;
}

std::string slurp(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void put(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    f << content;
}

std::string message_of(const std::vector<std::string>& args) {
    try {
        parse(args);
    } catch (const std::invalid_argument& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("bare subcommand resolves to the reference operating point") {
    const Parsed p = parse({"simulate"});
    CHECK(p.cmd == "simulate");
    CHECK(p.cfg.params.dt == 16e-9);
    CHECK(p.cfg.params.tau == 1.0 / 1.97e6);
    CHECK(p.cfg.params.rabi ==
          doctest::Approx(2.0 * 3.14159265358979323846 * 2.16e6));
    REQUIRE(p.cfg.durations.size() == 1);
    CHECK(p.cfg.durations[0] == 0.32e-6);
    CHECK(p.cfg.unravel.eta == 0.4);
    CHECK(p.cfg.unravel.basis == Basis::compatible_z);
    CHECK(p.cfg.unravel.n_samples == 1000);
    CHECK(p.cfg.n_traj == 100000);
    CHECK(p.cfg.seed == 1);
    CHECK(p.cfg.initial_state == "x+");
    CHECK(p.cfg.mode == RunMode::driven);
    CHECK(p.cfg.bin_width == 0.25);
    CHECK(p.cfg.threads == 0);
}

TEST_CASE("explicit flags override config file keys which override defaults") {
    const fs::path dir = "tmp_cli_cfg";
    fs::create_directories(dir);
    put(dir / "run.cfg",
        "# comment line\n"
        "eta = 0.7   # trailing comment\n"
        "seed = 9\n"
        "\n"
        "n_traj = 123\n");
    const std::string cfg_path = (dir / "run.cfg").string();
    const Parsed p = parse({"simulate", "--config", cfg_path, "--eta", "0.9"});
    CHECK(p.cfg.unravel.eta == 0.9);
    CHECK(p.cfg.seed == 9);
    CHECK(p.cfg.n_traj == 123);
    const Parsed q = parse({"simulate", "--config=" + cfg_path});
    CHECK(q.cfg.unravel.eta == 0.7);
    fs::remove_all(dir);
}

TEST_CASE("rejections name the offending key") {
    CHECK(message_of({"simulate", "--eta", "1.2"}).find("eta") != std::string::npos);
    CHECK(message_of({"simulate", "--mode", "warp"}).find("mode") !=
          std::string::npos);
    CHECK(message_of({"simulate", "--n-traj", "0"}).find("n_traj") !=
          std::string::npos);
    CHECK(!message_of({"simulate", "--bogus", "1"}).empty());
    CHECK(!message_of({"unravel"}).empty());  // record path is required
    CHECK(!message_of({"analyze"}).empty());

    const fs::path dir = "tmp_cli_badcfg";
    fs::create_directories(dir);
    put(dir / "bad.cfg", "detuning = 3\n");
    const std::string msg =
        message_of({"simulate", "--config", (dir / "bad.cfg").string()});
    CHECK(msg.find("unknown config key: detuning") != std::string::npos);
    put(dir / "noeq.cfg", "eta 0.5\n");
    CHECK(message_of({"simulate", "--config", (dir / "noeq.cfg").string()})
              .find("expected key = value") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("initial state decoding covers presets and explicit triples") {
    RunConfig cfg;
    cfg.initial_state = "z-";
    CHECK(cfg.initial().z == -1.0);
    cfg.initial_state = "y+";
    CHECK(cfg.initial().y == 1.0);
    cfg.initial_state = "0.6, 0, 0.8";
    const QubitState st = cfg.initial();
    CHECK(st.x == 0.6);
    CHECK(st.z == 0.8);
    cfg.initial_state = "2,0,0";
    CHECK_THROWS_AS(cfg.initial(), std::invalid_argument);
    cfg.initial_state = "sideways";
    CHECK_THROWS_AS(cfg.initial(), std::invalid_argument);
}

TEST_CASE("measurement-only mode zeroes the drive") {
    const Parsed p = parse({"simulate", "--mode", "qnd"});
    CHECK(p.cfg.params.rabi == 0.0);
    CHECK(p.cfg.mode == RunMode::qnd);
}

TEST_CASE("flat rendering of a resolved config round-trips through --config") {
    const Parsed a = parse({"simulate", "--seed", "42", "--eta", "0.5",
                            "--basis", "phi", "--mode", "qnd", "--n-traj", "500",
                            "--bin-width", "0.5", "--threads", "2",
                            "--duration-us", "0.16", "--duration-us", "0.64"});
    REQUIRE(a.cfg.durations.size() == 2);
    CHECK(a.cfg.durations[0] == doctest::Approx(0.16e-6));
    const fs::path dir = "tmp_cli_roundtrip";
    fs::create_directories(dir);
    put(dir / "resolved.cfg", config_flat(a.cfg));
    const Parsed b = parse({"simulate", "--config", (dir / "resolved.cfg").string()});
    CHECK(config_json(b.cfg) == config_json(a.cfg));
    CHECK(params_fingerprint(b.cfg) == params_fingerprint(a.cfg));
    fs::remove_all(dir);
}

TEST_CASE("help short-circuits without a resolved command") {
    RunConfig cfg;
    std::string input;
    CHECK(parse_cli({"--help"}, cfg, input).empty());
}

TEST_CASE("simulation artifacts agree with their manifest") {
    const fs::path dir = "tmp_cli_sim";
    fs::remove_all(dir);
    const Parsed p = parse({"simulate", "--n-traj", "300", "--seed", "3",
                            "--threads", "1", "--out", dir.string()});
    CHECK(cmd_simulate(p.cfg) == 0);
    CHECK(fs::exists(dir / "record_T320ns.csv"));
    CHECK(fs::exists(dir / "record_T320ns.meta.json"));
    CHECK(fs::exists(dir / "q_T320ns.csv"));
    CHECK(fs::exists(dir / "hist_T320ns.csv"));
    CHECK(fs::exists(dir / "stats_T320ns.json"));

    const QEnsemble ens = read_q_ensemble((dir / "q_T320ns.csv").string());
    CHECK(ens.values.size() == 300);
    CHECK(ens.duration == doctest::Approx(0.32e-6));
    CHECK(ens.params_fingerprint == params_fingerprint(p.cfg));

    const MeasurementRecord rec = read_record((dir / "record_T320ns.csv").string());
    CHECK(rec.values.size() == 20);
    CHECK(rec.dt == p.cfg.params.dt);
    CHECK(rec.strength == p.cfg.params.strength());

    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest.at("partial").get<bool>() == false);
    CHECK(manifest.at("seed").get<std::uint64_t>() == 3);
    CHECK(manifest.at("total_steps").get<long>() == 300 * 20);
    CHECK(manifest.at("config").at("eta").get<double>() == 0.4);
    const auto& files = manifest.at("files");
    CHECK(files.size() >= 5);
    for (const auto& fe : files) {
        const std::string content = slurp(dir / fe.at("name").get<std::string>());
        CHECK(content.size() == fe.at("bytes").get<std::size_t>());
        CHECK(fnv1a64_hex(content) == fe.at("fnv1a64").get<std::string>());
    }
    fs::remove_all(dir);
}

TEST_CASE("thread count changes nothing but the wall clock") {
    const fs::path da = "tmp_cli_det_a";
    const fs::path db = "tmp_cli_det_b";
    fs::remove_all(da);
    fs::remove_all(db);
    const Parsed a = parse({"simulate", "--n-traj", "400", "--seed", "11",
                            "--threads", "1", "--out", da.string()});
    const Parsed b = parse({"simulate", "--n-traj", "400", "--seed", "11",
                            "--threads", "4", "--out", db.string()});
    CHECK(cmd_simulate(a.cfg) == 0);
    CHECK(cmd_simulate(b.cfg) == 0);
    for (const char* name : {"q_T320ns.csv", "record_T320ns.csv", "hist_T320ns.csv",
                             "stats_T320ns.json", "ft_curve_T320ns.csv"}) {
        if (!fs::exists(da / name)) {
            CHECK(!fs::exists(db / name));
            continue;
        }
        CHECK(slurp(da / name) == slurp(db / name));
    }
    const auto ma = nlohmann::json::parse(slurp(da / "manifest.json"));
    const auto mb = nlohmann::json::parse(slurp(db / "manifest.json"));
    CHECK(ma.at("files") == mb.at("files"));
    fs::remove_all(da);
    fs::remove_all(db);
}

TEST_CASE("an ensemble too small for statistics degrades to a trajectory dump") {
    const fs::path dir = "tmp_cli_tiny";
    fs::remove_all(dir);
    const Parsed p = parse({"simulate", "--n-traj", "1", "--seed", "2", "--out",
                            dir.string()});
    CHECK(cmd_simulate(p.cfg) == 0);
    CHECK(fs::exists(dir / "trajectory_T320ns.csv"));
    CHECK(fs::exists(dir / "record_T320ns.csv"));
    CHECK(!fs::exists(dir / "q_T320ns.csv"));
    CHECK(fs::exists(dir / "manifest.json"));
    fs::remove_all(dir);
}

TEST_CASE("measurement-only ensembles from the equator never run backward") {
    const fs::path dir = "tmp_cli_qnd";
    fs::remove_all(dir);
    const Parsed p = parse({"simulate", "--mode", "qnd", "--n-traj", "200",
                            "--seed", "5", "--threads", "1", "--out", dir.string()});
    CHECK(cmd_simulate(p.cfg) == 0);
    const QEnsemble ens = read_q_ensemble((dir / "q_T320ns.csv").string());
    for (double q : ens.values) CHECK(q >= -1e-12);
    fs::remove_all(dir);
}

TEST_CASE("record decomposition writes per-sample files and the monitored arrow") {
    const fs::path src = "tmp_cli_unravel_src";
    const fs::path dst = "tmp_cli_unravel_out";
    fs::remove_all(src);
    fs::remove_all(dst);
    const Parsed gen = parse({"simulate", "--n-traj", "1", "--seed", "21", "--out",
                              src.string()});
    CHECK(cmd_simulate(gen.cfg) == 0);
    const std::string record_path = (src / "record_T320ns.csv").string();

    fs::create_directories(dst);
    put(dst / "u.cfg", "n_samples = 40\n");
    const Parsed p = parse({"unravel", record_path, "--config",
                            (dst / "u.cfg").string(), "--seed", "7", "--out",
                            dst.string()});
    CHECK(p.cmd == "unravel");
    CHECK(p.input == record_path);
    CHECK(cmd_unravel(p.cfg, p.input) == 0);

    CHECK(fs::exists(dst / "unravel_00000.csv"));
    CHECK(fs::exists(dst / "unravel_00039.csv"));
    CHECK(!fs::exists(dst / "unravel_00040.csv"));
    CHECK(fs::exists(dst / "ensemble_summary.csv"));
    CHECK(fs::exists(dst / "comparison.csv"));

    // per-sample rows carry the channel tag in the last column
    std::ifstream f(dst / "unravel_00000.csv");
    std::string header, row0, row1;
    std::getline(f, header);
    CHECK(header == "step,x,y,z,r,q_inc,channel");
    std::getline(f, row0);
    std::getline(f, row1);
    const char tag = row1.back();
    CHECK((tag == 'a' || tag == 'b'));

    const QEnsemble aq = read_q_ensemble((dst / "alice_q.csv").string());
    CHECK(aq.values.size() == 40);

    // 21 rows (header + initial + 20 steps) in the summary
    std::ifstream s(dst / "ensemble_summary.csv");
    std::size_t rows = 0;
    std::string line;
    while (std::getline(s, line)) ++rows;
    CHECK(rows == 22);

    const std::string stray = (src / "stray.csv").string();
    put(stray, slurp(record_path));
    CHECK_THROWS_AS(cmd_unravel(p.cfg, stray), std::invalid_argument);
    fs::remove_all(src);
    fs::remove_all(dst);
}

TEST_CASE("stored ensembles re-analyze and reject corrupt sidecars") {
    const fs::path src = "tmp_cli_analyze_src";
    const fs::path dst = "tmp_cli_analyze_out";
    fs::remove_all(src);
    fs::remove_all(dst);
    const Parsed gen = parse({"simulate", "--n-traj", "300", "--seed", "13",
                              "--threads", "1", "--out", src.string()});
    CHECK(cmd_simulate(gen.cfg) == 0);

    const Parsed p = parse({"analyze", (src / "q_T320ns.csv").string(), "--out",
                            dst.string()});
    CHECK(p.cmd == "analyze");
    CHECK(cmd_analyze(p.cfg, p.input) == 0);
    CHECK(fs::exists(dst / "hist_analyze.csv"));
    CHECK(fs::exists(dst / "stats_analyze.json"));
    const auto stats = nlohmann::json::parse(slurp(dst / "stats_analyze.json"));
    CHECK(stats.at("n").get<std::size_t>() == 300);
    CHECK(stats.at("integral_ft").at("mean_exp_neg_q").is_number());

    put(src / "broken.csv", "q\n0.5\n-0.25\n1.0\n");
    put(src / "broken.meta.json",
        "{\"duration_s\": 3.2e-07, \"n\": 5, \"params_fingerprint\": \"x\"}\n");
    CHECK_THROWS_AS(read_q_ensemble((src / "broken.csv").string()),
                    std::invalid_argument);
    CHECK_THROWS_AS(read_q_ensemble((src / "missing.csv").string()),
                    std::invalid_argument);
    fs::remove_all(src);
    fs::remove_all(dst);
}
