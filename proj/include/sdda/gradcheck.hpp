#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sdda {

struct GradCheckOptions {
    std::string scope = "all";  // all|ssc|coral|mmd|cmd|msm|intra|inter|network|composite
    std::size_t trials = 20;
    std::uint64_t seed = 7;
    double tolerance = 1e-4;
    // Test hook: every analytic gradient entry is multiplied by this
    // before comparison, so any value other than 1.0 must trip the check.
    double corrupt_scale = 1.0;
};

struct GradCheckEntry {
    std::string name;
    double max_rel_err = 0.0;
    std::size_t worst_trial = 0;
    bool passed = true;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;
    bool all_passed() const;
};

bool valid_gradcheck_scope(const std::string& scope);

/// Compares each analytic gradient in scope against a central
/// finite-difference estimate at `trials` seeded random points; an entry
/// passes when max_i |a_i - n_i| / max(1, |a_i|, |n_i|) <= tolerance at
/// every point. Throws std::invalid_argument for an unknown scope.
GradCheckReport run_gradcheck(const GradCheckOptions& opts);

} // namespace sdda
