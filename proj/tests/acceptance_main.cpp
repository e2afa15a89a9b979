// Acceptance gate: one line per criterion, nonzero exit if any requested
// criterion fails. Arguments select criterion ids (default: all nine).
#include "qtarrow/run_config.hpp"
#include "qtarrow/verify.hpp"

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <vector>

int main(int argc, char** argv) {
    qta::RunConfig cfg;
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
    if (ids.empty())
        for (int id = 1; id <= 9; ++id) ids.push_back(id);

    bool all_pass = true;
    for (int id : ids) {
        try {
            const qta::CriterionResult r = qta::run_criterion(id, cfg);
            std::printf("criterion %d %s %s: %s\n", r.id, r.pass ? "PASS" : "FAIL",
                        r.name.c_str(), r.detail.c_str());
            all_pass = all_pass && r.pass;
        } catch (const std::exception& e) {
            std::printf("criterion %d FAIL exception: %s\n", id, e.what());
            all_pass = false;
        }
    }
    return all_pass ? 0 : 1;
}
