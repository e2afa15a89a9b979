#pragma once

#include "qtarrow/run_config.hpp"

#include <string>
#include <vector>

namespace qta {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;   // measured values vs the gate
};

// Acceptance criteria run at a configurable scale; cfg supplies n_traj, seed
// and threads while the physics parameters stay pinned inside each criterion.
// Tolerances are fixed; verdicts are seed-robust because margins are wide.
CriterionResult run_criterion(int id, const RunConfig& cfg);
std::vector<CriterionResult> run_all_criteria(const RunConfig& cfg);

}  // namespace qta
