#pragma once

#include <iosfwd>
#include <string>
#include <vector>

// Full verification suite: nine numbered checks covering the regularized
// constants, pipeline/closed-form equivalence, sliced-propagator and
// boundary-value oracles, spectrum, trace, PDE residuals, limit chains and
// the sine-mode diagnostic, each with a pinned tolerance and runtime bound.

namespace proplab {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    double observed = 0.0;   // headline metric (comparison units per check)
    double threshold = 0.0;  // pinned bound the metric must not exceed
    double seconds = 0.0;
    double time_limit = 0.0;
    std::string detail;
};

struct AcceptanceOptions {
    // Scales every pinned tolerance; 1.0 runs the suite as specified.
    double tolerance_scale = 1.0;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

// One line per criterion, PASS/FAIL with the metric and timing.
void print_acceptance(const std::vector<CriterionResult>& results, std::ostream& out);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace proplab
