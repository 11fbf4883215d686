#include "klab/eigenproblem.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "klab/error.hpp"
#include "klab/format.hpp"

namespace klab {

namespace {

void require_positive_c(const ScalarField& c) {
    const auto [lo, hi] = coefficient_range(c);
    (void)hi;
    if (!(c.min() > 0.0) || !(lo > 0.0)) {
        throw Error(ErrorKind::NonPositiveC,
                    "c must be positive at every node and at the extrapolated boundary; min is " + format_double(lo));
    }
}

void require_alpha(double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw Error(ErrorKind::InvalidArgument, "alpha must be finite and >= 0, got " + format_double(alpha));
    }
}

}  // namespace

CoefficientStats coefficient_stats(const ScalarField& c) {
    require_positive_c(c);
    const auto [lo, hi] = coefficient_range(c);
    return {lo, hi, coefficient_grad_sup(c), c.grid().lambda1()};
}

FaceField weight_flux(const ScalarField& c, double alpha) {
    require_alpha(alpha);
    require_positive_c(c);
    FaceField g = coefficient_gradient(c);
    const FaceField mean = coefficient_face_mean(c);
    for (std::size_t k = 0; k < g.xfaces.size(); ++k) {
        const double d = mean.xfaces[k] + alpha;
        g.xfaces[k] /= d * d;
    }
    for (std::size_t k = 0; k < g.yfaces.size(); ++k) {
        const double d = mean.yfaces[k] + alpha;
        g.yfaces[k] /= d * d;
    }
    return g;
}

ScalarField weight_m(const ScalarField& c, double alpha) { return -divergence(weight_flux(c, alpha)); }

bool in_admissible_set(const ScalarField& c, double alpha) {
    return weight_m(c, alpha).max() > kPositiveWeightThreshold;
}

FaceField stiffness_face_weights(const ScalarField& c, double alpha) {
    require_alpha(alpha);
    require_positive_c(c);
    const Grid& g = c.grid();
    const int nx = g.nx();
    const int ny = g.ny();
    const ScalarField w = map(c, [alpha](double v) { return 1.0 / (v + alpha); });
    FaceField f(g);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            if (i == 0) f.x(i, j) = w(0, j);
            else if (i == nx) f.x(i, j) = w(nx - 1, j);
            else f.x(i, j) = 0.5 * (w(i - 1, j) + w(i, j));
        }
    }
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            if (j == 0) f.y(i, j) = w(i, 0);
            else if (j == ny) f.y(i, j) = w(i, ny - 1);
            else f.y(i, j) = 0.5 * (w(i, j - 1) + w(i, j));
        }
    }
    return f;
}

Pencil eigen_pencil(const ScalarField& c, double alpha) {
    const double area = c.grid().cell_area();
    const ScalarField w = map(c, [alpha](double v) { return 1.0 / (v + alpha); });
    SparseMatrix a = assemble_weighted_laplacian(w).scaled(area);
    const ScalarField m = weight_m(c, alpha);
    std::vector<double> b(m.values().begin(), m.values().end());
    for (double& v : b) v *= area;
    return Pencil(std::move(a), std::move(b));
}

EigenPair solve_ep(const ScalarField& c, double alpha) {
    if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be > 0");
    if (!in_admissible_set(c, alpha)) {
        throw Error(ErrorKind::NotInAdmissibleSet,
                    "weight m_alpha is nowhere positive for alpha = " + format_double(alpha));
    }
    const Pencil p = eigen_pencil(c, alpha);
    const auto pair = smallest_positive(p);
    if (!pair) throw Error(ErrorKind::NotInAdmissibleSet, "pencil has no positive eigenvalue");

    const double res = pencil_residual(p, *pair);
    if (!(res <= kEigenResidualTolerance)) {
        throw Error(ErrorKind::CheckFailed, "eigen residual " + format_double(res) + " exceeds tolerance");
    }

    ScalarField u(c.grid(), pair->vector);
    u *= std::sqrt(alpha / grad_norm_sq(u));
    const double top = u.max();
    if (u.min() < -kSignTolerance * top) {
        throw Error(ErrorKind::SignChange, "principal eigenvector changes sign (min " + format_double(u.min()) +
                                               ", max " + format_double(top) + "); refine the grid");
    }
    return {alpha, pair->lambda, std::move(u), res};
}

double rayleigh_numerator(const ScalarField& c, double alpha, const ScalarField& u) {
    if (!(u.grid() == c.grid())) throw Error(ErrorKind::GridMismatch, "u and c live on different grids");
    const FaceField gu = gradient(u);
    return face_inner(scale_faces(gu, stiffness_face_weights(c, alpha)), gu);
}

double rayleigh(const ScalarField& c, double alpha, const ScalarField& u) {
    const double num = rayleigh_numerator(c, alpha, u);
    const double den = integrate(u * u * weight_m(c, alpha));
    if (den == 0.0) throw Error(ErrorKind::ZeroDenominator, "integral of u^2 m_alpha vanishes");
    return num / den;
}

double ee_lower_bound(const ScalarField& c, double alpha) {
    require_alpha(alpha);
    const CoefficientStats st = coefficient_stats(c);
    if (st.grad_sup == 0.0) throw Error(ErrorKind::ConstantC, "c is constant; the bound is +infinity");
    const double low = st.c_low + alpha;
    return std::sqrt(st.lambda1) * low * low / (2.0 * st.grad_sup * (st.c_high + alpha));
}

EigenCurve eigen_curve(const ScalarField& c, const std::vector<double>& alphas) {
    EigenCurve curve;
    for (double alpha : alphas) {
        if (!(alpha > 0.0) || !in_admissible_set(c, alpha)) continue;
        const EigenPair ep = solve_ep(c, alpha);
        const double gap = std::abs(rayleigh(c, alpha, ep.u) - ep.lambda);
        curve.rows.push_back({alpha, ep.lambda, ee_lower_bound(c, alpha), gap});
    }
    return curve;
}

void write_eigen_curve_csv(std::ostream& out, const EigenCurve& curve) {
    out << "alpha,lambda,ee_bound,rayleigh_gap\n";
    for (const auto& r : curve.rows) {
        out << format_double(r.alpha) << ',' << format_double(r.lambda) << ',' << format_double(r.ee_bound) << ','
            << format_double(r.rayleigh_gap) << '\n';
    }
}

std::vector<double> logspace(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw Error(ErrorKind::InvalidArgument, "logspace needs 0 < lo <= hi, n >= 1");
    if (n == 1) return {lo};
    std::vector<double> out(static_cast<std::size_t>(n));
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = std::pow(10.0, a + (b - a) * k / (n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

}  // namespace klab
