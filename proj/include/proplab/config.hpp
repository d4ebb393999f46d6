#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "proplab/types.hpp"

// Flat key = value run configuration shared by every CLI command.

namespace proplab {

struct RunConfig {
    SystemConfig system{};
    Endpoints endpoints{};
    long slices = 1024;
    int basis = 40;
    double tolerance = 1.0;  // scales acceptance thresholds in `verify`
    std::filesystem::path output;
};

// Accepted keys: mass, charge, b_field, e_field_x, e_field_y, omega_x,
// omega_y, hbar, x_a, y_a, x_b, y_b, duration_t, slices, basis, tolerance.
// Lines are `key = value`; '#' starts a comment; unknown keys are rejected.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& file);

enum class ExitStatus { ok = 0, tolerance_failure = 1, input_error = 2 };

struct ExitReport {
    ExitStatus status = ExitStatus::ok;
    std::vector<std::string> messages;
    std::vector<std::filesystem::path> artifacts_written;
};

}  // namespace proplab
