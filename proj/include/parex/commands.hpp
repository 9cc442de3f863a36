#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "parex/config.hpp"

namespace parex {

/// Exit codes shared by the CLI and the in-process command API.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitHorizon = 3,
    kExitValidation = 4,
};

struct CommandOptions {
    std::string config_path;
    std::vector<double> y;
    std::vector<double> x;
    double t = 0.1;
    double t1 = 0.0;
    double t2 = 0.0;
    std::uint64_t seed = 0;
    std::string out_path;
    bool diagnose = false;
    int compose = 0;
};

int cmd_expand(const ProblemConfig& cfg, const CommandOptions& opt, std::string* output);
int cmd_horizon(const ProblemConfig& cfg, const CommandOptions& opt, std::string* output);
int cmd_solve(const ProblemConfig& cfg, const CommandOptions& opt, std::string* output);
int cmd_compose(const ProblemConfig& cfg, const CommandOptions& opt, std::string* output);
int cmd_split_solve(const ProblemConfig& cfg, const CommandOptions& opt, std::string* output);
int cmd_validate(const ProblemConfig& cfg, const CommandOptions& opt, std::string* output);

/// Loads the config and dispatches; exceptions are mapped to exit codes.
int run_command(const std::string& command, const CommandOptions& opt, std::string* output);

} // namespace parex
