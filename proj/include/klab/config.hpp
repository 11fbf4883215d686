#pragma once

// Experiment configuration: INI sections with `key = value` lines and
// whole-line `#` or `;` comments.
//
//   [grid]          nx, ny (required); x0, y0 (default 0); lx, ly (default 1)
//   [coefficients]  a, b, h as expressions in x, y, or a_file, b_file, h_file
//                   naming field files (relative to the config file)
//   [solver]        method = scan | newton, n_samples, newton_tol, s_max_override
//   [output]        directory, formats (comma list of csv, json, field)
//   [eigen]         alphas: comma list, or "logspace lo hi n"
//   [study]         scales: comma list

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "klab/grid.hpp"

namespace klab {

struct GridConfig {
    int nx = 0;
    int ny = 0;
    double x0 = 0.0;
    double y0 = 0.0;
    double lx = 1.0;
    double ly = 1.0;

    Grid make() const { return Grid::rectangle(nx, ny, x0, y0, lx, ly); }
};

struct CoefficientSource {
    std::optional<std::string> expression;
    std::optional<std::filesystem::path> file;

    bool present() const { return expression || file; }
};

struct SolverConfig {
    enum class Method { Scan, Newton };
    Method method = Method::Scan;
    int n_samples = 256;
    double newton_tol = 1e-9;
    std::optional<double> s_max_override;
};

struct OutputConfig {
    std::filesystem::path directory = ".";
    std::set<std::string> formats{"csv", "json", "field"};

    bool wants(const std::string& f) const { return formats.count(f) != 0; }
};

struct Config {
    GridConfig grid;
    CoefficientSource a;
    CoefficientSource b;
    CoefficientSource h;
    SolverConfig solver;
    OutputConfig output;
    std::vector<double> alphas;  // empty: use the default sweep
    std::vector<double> scales;  // empty: use the default sweep
};

/// Throws Error(Config) naming the offending section.key.
Config parse_config(std::istream& in, const std::filesystem::path& base_dir = ".");
Config load_config(const std::filesystem::path& path);

/// "0.1, 1, 10" or "logspace 0.01 100 20". Throws Error(Config) naming `key`.
std::vector<double> parse_number_list(const std::string& text, const std::string& key);

/// Evaluates the named coefficient ("a", "b" or "h") on the grid. Throws
/// Error(Config) when it is missing.
ScalarField load_coefficient(const Config& cfg, const std::string& name);

}  // namespace klab
