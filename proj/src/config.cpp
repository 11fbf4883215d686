#include "klab/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "klab/eigenproblem.hpp"
#include "klab/error.hpp"
#include "klab/expr.hpp"
#include "klab/format.hpp"

namespace klab {

namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void config_error(const std::string& key, const std::string& what) {
    throw Error(ErrorKind::Config, key + ": " + what);
}

double to_number(const std::string& text, const std::string& key) {
    const auto v = parse_double(trim(text));
    if (!v || !std::isfinite(*v)) config_error(key, "expected a number, got '" + text + "'");
    return *v;
}

int to_int(const std::string& text, const std::string& key) {
    const double v = to_number(text, key);
    if (v != std::floor(v) || std::abs(v) > 1e9) config_error(key, "expected an integer, got '" + text + "'");
    return static_cast<int>(v);
}

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"grid", {"nx", "ny", "x0", "y0", "lx", "ly"}},
        {"coefficients", {"a", "b", "h", "a_file", "b_file", "h_file"}},
        {"solver", {"method", "n_samples", "newton_tol", "s_max_override"}},
        {"output", {"directory", "formats"}},
        {"eigen", {"alphas"}},
        {"study", {"scales"}},
    };
    return keys;
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    std::vector<double> out;
    if (t.rfind("logspace", 0) == 0) {
        std::istringstream in(t.substr(8));
        std::string lo, hi, n, extra;
        if (!(in >> lo >> hi >> n) || (in >> extra)) config_error(key, "expected 'logspace lo hi n'");
        try {
            return logspace(to_number(lo, key), to_number(hi, key), to_int(n, key));
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Config) throw;
            config_error(key, e.message());
        }
    }
    std::istringstream in(t);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(to_number(item, key));
    if (out.empty()) config_error(key, "empty list");
    return out;
}

Config parse_config(std::istream& in, const std::filesystem::path& base_dir) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw Error(ErrorKind::Config, "line " + std::to_string(e.line()) + ": " + e.message());
    }

    for (const auto& [section, body] : tree) {
        const auto it = known_keys().find(section);
        if (it == known_keys().end()) {
            if (!body.data().empty()) config_error(section, "key outside any section");
            config_error("[" + section + "]", "unknown section");
        }
        for (const auto& [key, value] : body) {
            if (!it->second.count(key)) config_error(section + "." + key, "unknown key");
        }
    }

    auto get = [&](const std::string& section, const std::string& key) -> std::optional<std::string> {
        const auto v = tree.get_optional<std::string>(pt::ptree::path_type(section + "/" + key, '/'));
        if (!v) return std::nullopt;
        return trim(*v);
    };

    Config cfg;
    const auto nx = get("grid", "nx");
    const auto ny = get("grid", "ny");
    if (!nx) config_error("grid.nx", "missing");
    if (!ny) config_error("grid.ny", "missing");
    cfg.grid.nx = to_int(*nx, "grid.nx");
    cfg.grid.ny = to_int(*ny, "grid.ny");
    if (cfg.grid.nx < 1) config_error("grid.nx", "must be >= 1");
    if (cfg.grid.ny < 1) config_error("grid.ny", "must be >= 1");
    if (auto v = get("grid", "x0")) cfg.grid.x0 = to_number(*v, "grid.x0");
    if (auto v = get("grid", "y0")) cfg.grid.y0 = to_number(*v, "grid.y0");
    if (auto v = get("grid", "lx")) cfg.grid.lx = to_number(*v, "grid.lx");
    if (auto v = get("grid", "ly")) cfg.grid.ly = to_number(*v, "grid.ly");
    if (!(cfg.grid.lx > 0.0)) config_error("grid.lx", "must be > 0");
    if (!(cfg.grid.ly > 0.0)) config_error("grid.ly", "must be > 0");

    for (auto [name, slot] : {std::pair{"a", &cfg.a}, std::pair{"b", &cfg.b}, std::pair{"h", &cfg.h}}) {
        const std::string n = name;
        const auto expr = get("coefficients", n);
        const auto file = get("coefficients", n + "_file");
        if (expr && file) config_error("coefficients." + n, "both '" + n + "' and '" + n + "_file' are set");
        if (expr) {
            if (expr->empty()) config_error("coefficients." + n, "empty expression");
            slot->expression = *expr;
        }
        if (file) slot->file = base_dir / *file;
    }

    if (auto v = get("solver", "method")) {
        if (*v == "scan") cfg.solver.method = SolverConfig::Method::Scan;
        else if (*v == "newton") cfg.solver.method = SolverConfig::Method::Newton;
        else config_error("solver.method", "expected 'scan' or 'newton', got '" + *v + "'");
    }
    if (auto v = get("solver", "n_samples")) {
        cfg.solver.n_samples = to_int(*v, "solver.n_samples");
        if (cfg.solver.n_samples < 16) config_error("solver.n_samples", "must be >= 16");
    }
    if (auto v = get("solver", "newton_tol")) {
        cfg.solver.newton_tol = to_number(*v, "solver.newton_tol");
        if (!(cfg.solver.newton_tol > 0.0)) config_error("solver.newton_tol", "must be > 0");
    }
    if (auto v = get("solver", "s_max_override")) {
        cfg.solver.s_max_override = to_number(*v, "solver.s_max_override");
        if (!(*cfg.solver.s_max_override > 0.0)) config_error("solver.s_max_override", "must be > 0");
    }

    if (auto v = get("output", "directory")) cfg.output.directory = *v;
    if (auto v = get("output", "formats")) {
        cfg.output.formats.clear();
        std::istringstream list(*v);
        std::string item;
        while (std::getline(list, item, ',')) {
            item = trim(item);
            if (item != "csv" && item != "json" && item != "field") {
                config_error("output.formats", "unknown format '" + item + "'");
            }
            cfg.output.formats.insert(item);
        }
    }

    if (auto v = get("eigen", "alphas")) cfg.alphas = parse_number_list(*v, "eigen.alphas");
    if (auto v = get("study", "scales")) cfg.scales = parse_number_list(*v, "study.scales");
    return cfg;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot open config file '" + path.string() + "'");
    return parse_config(in, path.parent_path());
}

ScalarField load_coefficient(const Config& cfg, const std::string& name) {
    const CoefficientSource* src = name == "a" ? &cfg.a : name == "b" ? &cfg.b : name == "h" ? &cfg.h : nullptr;
    if (!src) throw Error(ErrorKind::InvalidArgument, "unknown coefficient '" + name + "'");
    if (!src->present()) config_error("coefficients." + name, "missing (set '" + name + "' or '" + name + "_file')");

    const Grid grid = cfg.grid.make();
    if (src->expression) {
        try {
            return eval_field(parse(*src->expression), grid);
        } catch (const Error& e) {
            config_error("coefficients." + name, std::string(to_string(e.kind())) + ": " + e.message());
        }
    }
    ScalarField f = read_field_file(src->file->string());
    if (!(f.grid() == grid)) {
        config_error("coefficients." + name + "_file", "field grid does not match [grid]");
    }
    return f;
}

}  // namespace klab
