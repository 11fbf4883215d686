#include "klab/app.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <string>

#include "klab/certify.hpp"
#include "klab/eigenproblem.hpp"
#include "klab/error.hpp"
#include "klab/format.hpp"
#include "klab/kirchhoff.hpp"

namespace klab {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::ostream& out_of(const RunOptions& o) { return o.out ? *o.out : std::cout; }
std::ostream& err_of(const RunOptions& o) { return o.err ? *o.err : std::cerr; }

int exit_code_for(ErrorKind k) {
    switch (k) {
        case ErrorKind::Config:
        case ErrorKind::UnbalancedParen:
        case ErrorKind::UnknownIdentifier:
        case ErrorKind::UnexpectedToken:
        case ErrorKind::EmptyInput:
        case ErrorKind::DomainError:
        case ErrorKind::GridMismatch:
        case ErrorKind::InvalidGrid:
        case ErrorKind::FieldFormat:
        case ErrorKind::NonPositiveCoefficient:
        case ErrorKind::NonPositiveC:
        case ErrorKind::InvalidArgument:
            return kExitConfig;
        default:
            return kExitNumerical;
    }
}

// Runs body, turning exceptions into exit codes and a message on stderr.
template <class F>
int guarded(const RunOptions& opt, F&& body) {
    try {
        return body();
    } catch (const Error& e) {
        err_of(opt) << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const fs::filesystem_error& e) {
        err_of(opt) << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

fs::path output_dir(const Config& cfg, const RunOptions& opt) {
    fs::path dir = opt.out_dir.empty() ? cfg.output.directory : opt.out_dir;
    fs::create_directories(dir);
    return dir;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream f(path);
    if (!f) throw Error(ErrorKind::Config, "cannot write '" + path.string() + "'");
    return f;
}

void write_json(const fs::path& path, const json& j) { open_output(path) << j.dump(2) << '\n'; }

std::vector<double> resolve_list(const std::vector<double>& given, const std::vector<double>& configured,
                                 std::vector<double> fallback) {
    if (!given.empty()) return given;
    if (!configured.empty()) return configured;
    return fallback;
}

}  // namespace

int run_solve(const Config& cfg, const RunOptions& opt) {
    return guarded(opt, [&] {
        const Stopwatch clock;
        const Problem p(load_coefficient(cfg, "a"), load_coefficient(cfg, "b"), load_coefficient(cfg, "h"));
        const fs::path dir = output_dir(cfg, opt);

        std::vector<NonlocalSolution> roots;
        std::optional<ScanReport> scan;
        if (cfg.solver.method == SolverConfig::Method::Newton) {
            try {
                roots.push_back(newton_solve(p, std::nullopt, cfg.solver.newton_tol));
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::NoConvergence && e.kind() != ErrorKind::SingularJacobian &&
                    e.kind() != ErrorKind::CheckFailed) {
                    throw;
                }
                err_of(opt) << "warning: Newton failed (" << e.what() << "); falling back to the scan\n";
            }
        }
        if (roots.empty()) {
            scan = fixed_point_scan(p, cfg.solver.n_samples, cfg.solver.s_max_override);
            roots = scan->roots;
        }
        if (roots.empty()) {
            err_of(opt) << "error: no fixed point found on the scan interval\n";
            return static_cast<int>(kExitNumerical);
        }

        if (cfg.output.wants("csv")) {
            std::ofstream csv = open_output(dir / "scan.csv");
            csv << "s,phi_s,kind\n";
            if (scan) {
                for (const auto& [s, ph] : scan->samples) csv << format_double(s) << ',' << format_double(ph) << ",sample\n";
                for (double s : scan->suspected_tangencies) {
                    csv << format_double(s) << ',' << format_double(phi(p, s)) << ",tangency\n";
                }
            }
            for (const auto& r : roots) csv << format_double(r.s) << ',' << format_double(grad_norm_sq(r.u)) << ",root\n";
        }

        json jroots = json::array();
        for (std::size_t k = 0; k < roots.size(); ++k) {
            const NonlocalSolution& r = roots[k];
            json jr;
            jr["s"] = r.s;
            jr["residual"] = r.residual;
            jr["method"] = to_string(r.method);
            jr["iterations"] = r.iterations;
            jr["jacobian_functional"] = jacobian_functional(p, r.u);
            if (cfg.output.wants("field")) {
                const std::string name = "solution_" + std::to_string(k) + ".field";
                write_field_file((dir / name).string(), r.u);
                jr["field"] = name;
            }
            jroots.push_back(std::move(jr));
        }

        if (cfg.output.wants("json")) {
            json j;
            j["command"] = "solve";
            j["grid"] = to_json(p.grid());
            j["method"] = cfg.solver.method == SolverConfig::Method::Newton ? "newton" : "scan";
            j["s_max"] = cfg.solver.s_max_override ? *cfg.solver.s_max_override : s_upper_bound(p);
            j["n_samples"] = cfg.solver.n_samples;
            j["n_roots"] = roots.size();
            j["roots"] = std::move(jroots);
            j["suspected_tangencies"] = scan ? json(scan->suspected_tangencies) : json::array();
            if (opt.timing) j["runtime_seconds"] = clock.seconds();
            write_json(dir / "summary.json", j);
        }

        if (!opt.quiet) {
            out_of(opt) << roots.size() << " solution(s):";
            for (const auto& r : roots) out_of(opt) << " s = " << format_double(r.s);
            out_of(opt) << '\n';
            if (scan && !scan->suspected_tangencies.empty()) {
                out_of(opt) << scan->suspected_tangencies.size() << " suspected tangency point(s)\n";
            }
        }
        return static_cast<int>(kExitOk);
    });
}

int run_certify(const Config& cfg, const RunOptions& opt) {
    return guarded(opt, [&] {
        const Certificate cert = certify(load_coefficient(cfg, "a"), load_coefficient(cfg, "b"));
        const fs::path dir = output_dir(cfg, opt);
        if (cfg.output.wants("json")) write_json(dir / "certificate.json", to_json(cert));
        if (!opt.quiet) {
            out_of(opt) << to_string(cert.verdict) << ": ratio " << format_double(cert.ratio_value) << ", min D "
                        << format_double(cert.min_D) << '\n';
        }
        return static_cast<int>(cert.verdict == Verdict::Inconclusive ? kExitNegative : kExitOk);
    });
}

int run_eigen(const Config& cfg, const std::vector<double>& alphas, bool write_fields, const RunOptions& opt) {
    return guarded(opt, [&] {
        const std::vector<double> list = resolve_list(alphas, cfg.alphas, logspace(1e-2, 1e2, 20));
        for (double a : list) {
            if (!(a > 0.0)) throw Error(ErrorKind::Config, "eigen.alphas: every alpha must be > 0");
        }
        const ScalarField a = load_coefficient(cfg, "a");
        const ScalarField b = load_coefficient(cfg, "b");
        if (!(a.min() > 0.0) || !(b.min() > 0.0)) {
            throw Error(ErrorKind::NonPositiveCoefficient, "a and b must be positive");
        }
        const ScalarField c = a / b;
        const EigenCurve curve = eigen_curve(c, list);
        const fs::path dir = output_dir(cfg, opt);

        if (cfg.output.wants("csv")) {
            std::ofstream csv = open_output(dir / "eigen_curve.csv");
            write_eigen_curve_csv(csv, curve);
        }
        if (write_fields) {
            for (std::size_t k = 0; k < curve.rows.size(); ++k) {
                const EigenPair ep = solve_ep(c, curve.rows[k].alpha);
                write_field_file((dir / ("eigen_" + std::to_string(k) + ".field")).string(), ep.u);
            }
        }
        if (curve.rows.empty()) {
            err_of(opt) << "admissible set empty: m_alpha is nowhere positive for the sampled alphas\n";
            return static_cast<int>(kExitNegative);
        }
        if (!opt.quiet) {
            out_of(opt) << curve.rows.size() << " of " << list.size() << " alphas in the admissible set\n";
        }
        return static_cast<int>(kExitOk);
    });
}

int run_scan_study(const Config& cfg, const std::vector<double>& scales, const RunOptions& opt) {
    return guarded(opt, [&] {
        const std::vector<double> list = resolve_list(scales, cfg.scales, {0.0, 0.5, 1.0, 2.0, 4.0});
        const Problem base(load_coefficient(cfg, "a"), load_coefficient(cfg, "b"), load_coefficient(cfg, "h"));
        const fs::path dir = output_dir(cfg, opt);

        std::ostringstream csv;
        csv << "k,n_roots,s_values\n";
        for (double k : list) {
            const ScanReport r =
                fixed_point_scan(base.with_source(k * base.h()), cfg.solver.n_samples, cfg.solver.s_max_override);
            std::string s_values;
            for (const auto& root : r.roots) s_values += (s_values.empty() ? "" : ";") + format_double(root.s);
            csv << format_double(k) << ',' << r.roots.size() << ',' << s_values << '\n';
            if (!opt.quiet) out_of(opt) << "k = " << format_double(k) << ": " << r.roots.size() << " root(s)\n";
        }
        if (cfg.output.wants("csv")) open_output(dir / "scan_study.csv") << csv.str();
        return static_cast<int>(kExitOk);
    });
}

int run_example(const Config& cfg, const RunOptions& opt) {
    return guarded(opt, [&] {
        const Grid grid = cfg.grid.make();
        const ScalarField c = pointwise_example(grid);
        const Certificate cert = certify(c, ScalarField(grid, 1.0));
        const fs::path dir = output_dir(cfg, opt);
        if (cfg.output.wants("field")) write_field_file((dir / "example_c.field").string(), c);
        if (cfg.output.wants("json")) write_json(dir / "example_certificate.json", to_json(cert));
        if (!opt.quiet) {
            out_of(opt) << "c in [" << format_double(c.min()) << ", " << format_double(c.max()) << "], min D "
                        << format_double(cert.min_D) << ", " << to_string(cert.verdict) << '\n';
        }
        return static_cast<int>(kExitOk);
    });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Nonlocal Kirchhoff problem laboratory", "klab"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    RunOptions opt;
    opt.out = &out;
    opt.err = &err;
    app.add_option("--config", config_path, "Experiment configuration (INI)")->required();
    app.add_option("--out", out_dir, "Output directory, overrides output.directory");
    app.add_flag("--quiet", opt.quiet, "No progress output");
    app.add_flag("--timing", opt.timing, "Record wall time in JSON summaries");

    auto* solve = app.add_subcommand("solve", "Find all solutions of the nonlocal problem");
    auto* cert = app.add_subcommand("certify", "Check the uniqueness criteria for c = a/b");
    auto* eigen = app.add_subcommand("eigen", "Principal eigenvalue curve over alpha");
    std::string alphas_text;
    bool write_fields = false;
    eigen->add_option("--alphas", alphas_text, "Comma list, or 'logspace lo hi n'");
    eigen->add_flag("--write-fields", write_fields, "Write each eigenfunction as a field file");
    auto* study = app.add_subcommand("scan-study", "Root counts of the scan under h -> k h");
    std::string scales_text;
    study->add_option("--scales", scales_text, "Comma list of factors k");
    auto* example = app.add_subcommand("example", "Emit a coefficient satisfying the pointwise criterion");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
    }
    opt.out_dir = out_dir;

    Config cfg;
    std::vector<double> alphas, scales;
    const int loaded = guarded(opt, [&] {
        cfg = load_config(config_path);
        if (!alphas_text.empty()) alphas = parse_number_list(alphas_text, "--alphas");
        if (!scales_text.empty()) scales = parse_number_list(scales_text, "--scales");
        return static_cast<int>(kExitOk);
    });
    if (loaded != kExitOk) return loaded;

    if (*solve) return run_solve(cfg, opt);
    if (*cert) return run_certify(cfg, opt);
    if (*eigen) return run_eigen(cfg, alphas, write_fields, opt);
    if (*study) return run_scan_study(cfg, scales, opt);
    if (*example) return run_example(cfg, opt);
    return kExitConfig;
}

}  // namespace klab
