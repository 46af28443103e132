#pragma once

#include "cheyette_lv/errors.hpp"
#include "run_config.hpp"

namespace cli {

/// Process exit codes; a stable contract for scripts driving the tool.
enum ExitCode : int {
    exit_ok = 0,
    exit_check_failed = 1, // ig-check found a mismatch
    exit_input = 2,
    exit_domain = 3,
    exit_simulation = 4,
    exit_calibration = 5
};

int exit_code_for(cheyette::ErrorKind kind);

int cmd_localvol(const RunConfig& config);
int cmd_roundtrip(const RunConfig& config);
int cmd_mueff(const RunConfig& config);
int cmd_calibrate_swaption(const RunConfig& config);
int cmd_ig_check(const RunConfig& config);

} // namespace cli
