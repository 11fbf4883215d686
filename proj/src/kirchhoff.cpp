#include "klab/kirchhoff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "klab/eigenproblem.hpp"
#include "klab/format.hpp"

namespace klab {

namespace {

void require_same_grid(const Grid& g, const ScalarField& f, const char* what) {
    if (!(f.grid() == g)) throw Error(ErrorKind::GridMismatch, std::string(what) + " is on a different grid");
}

void require_finite(const ScalarField& f, const char* what) {
    if (!f.all_finite()) throw Error(ErrorKind::InvalidArgument, std::string(what) + " has non-finite values");
}

}  // namespace

const char* to_string(NonlocalSolution::Method m) {
    return m == NonlocalSolution::Method::Newton ? "newton" : "fixed-point-scan";
}

Problem::Problem(ScalarField a, ScalarField b, ScalarField h)
    : a_(std::move(a)), b_(std::move(b)), h_(std::move(h)), a0_(0.0), b0_(0.0) {
    require_same_grid(a_.grid(), b_, "b");
    require_same_grid(a_.grid(), h_, "h");
    require_finite(a_, "a");
    require_finite(b_, "b");
    require_finite(h_, "h");
    a0_ = a_.min();
    b0_ = b_.min();
    if (!(a0_ > 0.0)) throw Error(ErrorKind::NonPositiveCoefficient, "min a = " + format_double(a0_) + " is not positive");
    if (!(b0_ > 0.0)) throw Error(ErrorKind::NonPositiveCoefficient, "min b = " + format_double(b0_) + " is not positive");
    laplace_ = std::make_shared<const BandedCholesky>(assemble_laplacian(a_.grid()));
}

Problem Problem::with_source(ScalarField h) const {
    require_same_grid(grid(), h, "h");
    require_finite(h, "h");
    Problem p = *this;
    p.h_ = std::move(h);
    return p;
}

ScalarField Problem::solve_poisson(const ScalarField& f) const {
    require_same_grid(grid(), f, "right-hand side");
    return ScalarField(grid(), laplace_->solve(f.values()));
}

ScalarField m_field(const Problem& p, double s) {
    if (!(s >= 0.0)) throw Error(ErrorKind::NegativeS, "nonlocal scalar must be >= 0, got " + format_double(s));
    return p.a() + s * p.b();
}

ScalarField solve_at_s(const Problem& p, double s) { return p.solve_poisson(p.h() / m_field(p, s)); }

double phi(const Problem& p, double s) { return grad_norm_sq(solve_at_s(p, s)); }

double s_upper_bound(const Problem& p) {
    return integrate(p.h() * p.h()) / (p.a0() * p.a0() * p.grid().lambda1());
}

ScanReport fixed_point_scan(const Problem& p, int n_samples, std::optional<double> s_max_override) {
    if (n_samples < 16) throw Error(ErrorKind::InvalidArgument, "scan needs at least 16 samples");
    if (s_max_override && !(*s_max_override >= 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "s_max override must be >= 0");
    }

    ScanReport report;
    report.s_max = s_max_override ? *s_max_override : s_upper_bound(p);
    const double ceiling = 1.05 * std::max(report.s_max, kScanFloor);
    const auto n = static_cast<std::size_t>(n_samples);

    std::vector<double> s(n), f(n);
    report.samples.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        s[k] = ceiling * static_cast<double>(k) / static_cast<double>(n - 1);
        const double ph = phi(p, s[k]);
        f[k] = ph - s[k];
        report.samples.emplace_back(s[k], ph);
    }

    auto add_root = [&](double root, int steps) {
        ScalarField u = solve_at_s(p, root);
        const double r = residual(p, u);
        report.roots.push_back({std::move(u), root, r, NonlocalSolution::Method::FixedPointScan, steps});
    };
    auto crosses = [&](std::size_t k) { return f[k] != 0.0 && f[k + 1] != 0.0 && (f[k] < 0.0) != (f[k + 1] < 0.0); };

    for (std::size_t k = 0; k < n; ++k) {
        if (f[k] == 0.0) add_root(s[k], 0);
        if (k + 1 == n || !crosses(k)) continue;

        double lo = s[k];
        double hi = s[k + 1];
        double flo = f[k];
        bool found = false;
        for (int step = 1; step <= kMaxBisections; ++step) {
            const double mid = 0.5 * (lo + hi);
            const double fm = phi(p, mid) - mid;
            if (std::abs(fm) <= kRootTolerance * (1.0 + mid)) {
                add_root(mid, step);
                found = true;
                break;
            }
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        if (!found) {
            throw Error(ErrorKind::NoConvergence, "bisection on [" + format_double(s[k]) + ", " +
                                                      format_double(s[k + 1]) + "] did not reach tolerance");
        }
    }

    for (std::size_t k = 0; k < n; ++k) {
        const double v = std::abs(f[k]);
        if (f[k] == 0.0 || !(v < kTangencyTolerance * (1.0 + s[k]))) continue;
        if (k > 0 && (std::abs(f[k - 1]) < v || crosses(k - 1))) continue;
        if (k + 1 < n && (std::abs(f[k + 1]) < v || crosses(k))) continue;
        report.suspected_tangencies.push_back(s[k]);
    }
    return report;
}

ScalarField residual_field(const Problem& p, const ScalarField& u) {
    require_same_grid(p.grid(), u, "u");
    return m_field(p, grad_norm_sq(u)) * laplacian(u) + p.h();
}

double residual(const Problem& p, const ScalarField& u) { return residual_field(p, u).max_abs(); }

double jacobian_functional(const Problem& p, const ScalarField& u) {
    require_same_grid(p.grid(), u, "u");
    return integrate(p.b() * u * laplacian(u) / m_field(p, grad_norm_sq(u)));
}

double linearized_defect(const Problem& p, const ScalarField& u, const ScalarField& v, const ScalarField& g) {
    const ScalarField lu = laplacian(u);
    const double coupling = face_inner(gradient(u), gradient(v));
    const ScalarField d = (2.0 * coupling) * (p.b() * lu) + m_field(p, grad_norm_sq(u)) * laplacian(v) + g;
    return d.max_abs();
}

ScalarField linearized_solve(const Problem& p, const ScalarField& u, const ScalarField& g) {
    require_same_grid(p.grid(), u, "u");
    require_same_grid(p.grid(), g, "g");
    const ScalarField m = m_field(p, grad_norm_sq(u));
    const ScalarField lu = laplacian(u);
    const ScalarField two_b_lu_over_m = 2.0 * (p.b() * lu) / m;

    const double d = integrate(two_b_lu_over_m * u) - 1.0;
    if (std::abs(d) < kSingularJacobian) {
        throw Error(ErrorKind::SingularJacobian,
                    "integrate(2 b u lap u / M) - 1 = " + format_double(d) + " is too close to zero");
    }
    // Pairing the equation for w with u gives t * d = integrate(g u / M).
    const double t = integrate(g * u / m) / d;
    const ScalarField w = t * two_b_lu_over_m - g / m;
    ScalarField v = p.solve_poisson(-w);

    const double defect = linearized_defect(p, u, v, g);
    const double bound = kLinearizedCheck * (1.0 + g.max_abs());
    if (!(defect <= bound)) {
        throw Error(ErrorKind::CheckFailed,
                    "linearized equation defect " + format_double(defect) + " exceeds " + format_double(bound));
    }
    return v;
}

NonlocalSolution newton_solve(const Problem& p, std::optional<ScalarField> u0, double tol) {
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "Newton tolerance must be > 0");
    ScalarField u = u0 ? std::move(*u0) : solve_at_s(p, 0.0);
    require_same_grid(p.grid(), u, "initial guess");

    for (int it = 0;; ++it) {
        const ScalarField r = residual_field(p, u);
        const double rn = r.max_abs();
        if (rn <= tol) return {u, grad_norm_sq(u), rn, NonlocalSolution::Method::Newton, it};
        if (it == kNewtonMaxIterations || !std::isfinite(rn)) {
            throw NewtonFailure("Newton stopped after " + std::to_string(it) + " iterations with residual " +
                                    format_double(rn),
                                {u, grad_norm_sq(u), rn, NonlocalSolution::Method::Newton, it});
        }
        u += linearized_solve(p, u, r);
    }
}

IdentityPair eureka_identity(const Problem& p, const ScalarField& u) {
    require_same_grid(p.grid(), u, "u");
    const ScalarField c = p.ratio();
    const double s = grad_norm_sq(u);
    const ScalarField cs = map(c, [s](double v) { return v + s; });
    const double lhs = integrate(u * laplacian(u) / cs);
    const double rhs = -integrate(energy_density(u) / cs) + 0.5 * integrate(u * u * weight_m(c, s));
    return {lhs, rhs};
}

}  // namespace klab
