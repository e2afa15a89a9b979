#include "qtarrow/run_config.hpp"
#include "qtarrow/runner.hpp"

#include <exception>
#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    qta::RunConfig cfg;
    std::string input_path;
    try {
        const std::string cmd = qta::parse_cli(args, cfg, input_path);
        if (cmd.empty()) return 0;  // help requested
        if (cmd == "simulate") return qta::cmd_simulate(cfg);
        if (cmd == "unravel") return qta::cmd_unravel(cfg, input_path);
        if (cmd == "analyze") return qta::cmd_analyze(cfg, input_path);
        if (cmd == "verify") return qta::cmd_verify(cfg);
        std::cerr << "error: unknown subcommand " << cmd << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
