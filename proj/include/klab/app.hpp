#pragma once

// Subcommands of the klab command-line tool. Each returns a process exit code:
//   0 success, 1 negative result (inconclusive certificate, empty admissible
//   set), 2 configuration error, 3 numerical failure.

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "klab/config.hpp"

namespace klab {

enum ExitCode : int { kExitOk = 0, kExitNegative = 1, kExitConfig = 2, kExitNumerical = 3 };

struct RunOptions {
    std::filesystem::path out_dir;  // empty: the config's output.directory
    bool quiet = false;
    bool timing = false;           // add wall time to JSON summaries
    std::ostream* out = nullptr;   // progress; default std::cout
    std::ostream* err = nullptr;   // diagnostics; default std::cerr
};

int run_solve(const Config& cfg, const RunOptions& opt);
int run_certify(const Config& cfg, const RunOptions& opt);
/// Empty alphas: the config's [eigen] alphas, else logspace 0.01 100 20.
int run_eigen(const Config& cfg, const std::vector<double>& alphas, bool write_fields, const RunOptions& opt);
/// Empty scales: the config's [study] scales, else 0, 0.5, 1, 2, 4.
int run_scan_study(const Config& cfg, const std::vector<double>& scales, const RunOptions& opt);
int run_example(const Config& cfg, const RunOptions& opt);

/// Full command line: parses flags, loads the config, dispatches.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace klab
