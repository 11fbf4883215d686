#include "klab/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "klab/eigenproblem.hpp"
#include "klab/error.hpp"
#include "klab/format.hpp"
#include "klab/linalg.hpp"

namespace klab {

namespace {

// |grad c|_inf (c_max + alpha) / (sqrt(lambda1) (c_min + alpha)^2)
double ratio_at(const CoefficientStats& st, double alpha) {
    const double low = st.c_low + alpha;
    return st.grad_sup * (st.c_high + alpha) / (std::sqrt(st.lambda1) * low * low);
}

}  // namespace

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::UniqueConstantRatio: return "UniqueConstantRatio";
        case Verdict::UniquePointwise: return "UniquePointwise";
        case Verdict::UniqueRatioBound: return "UniqueRatioBound";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

ScalarField pointwise_D(const ScalarField& c) {
    (void)coefficient_stats(c);  // positivity check
    const FaceField gc = coefficient_gradient(c);
    return divergence(gc) - 2.0 * (node_norm_sq(gc) / c);
}

DSummary summarize_D(const ScalarField& d) {
    const Grid& g = d.grid();
    const int nx = g.nx();
    const int ny = g.ny();
    if (nx < 3 || ny < 3) return {d.min(), d.min(), false};
    double inner = std::numeric_limits<double>::infinity();
    double collar = std::numeric_limits<double>::infinity();
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const bool edge = i == 0 || j == 0 || i == nx - 1 || j == ny - 1;
            double& slot = edge ? collar : inner;
            slot = std::min(slot, d(i, j));
        }
    }
    return {inner, collar, true};
}

double ratio_criterion(const ScalarField& c) { return ratio_at(coefficient_stats(c), 0.0); }

double g_alpha(const ScalarField& c, double alpha) {
    if (!(alpha >= 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be >= 0");
    return ratio_at(coefficient_stats(c), alpha) - 1.0;
}

Certificate certify(const ScalarField& a, const ScalarField& b) {
    if (!(a.grid() == b.grid())) throw Error(ErrorKind::GridMismatch, "a and b are on different grids");
    if (!(a.min() > 0.0)) throw Error(ErrorKind::NonPositiveCoefficient, "min a = " + format_double(a.min()));
    if (!(b.min() > 0.0)) throw Error(ErrorKind::NonPositiveCoefficient, "min b = " + format_double(b.min()));

    const ScalarField c = a / b;
    const Grid& g = c.grid();
    CoefficientStats st{};
    try {
        st = coefficient_stats(c);
    } catch (const Error& e) {
        throw Error(ErrorKind::NonPositiveCoefficient, "a/b " + e.message());
    }

    const auto vals = c.values();
    const double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(vals.size());
    const double variation = (c.max() - c.min()) / std::abs(mean);
    const DSummary ds = summarize_D(pointwise_D(c));
    const double ratio = ratio_at(st, 0.0);

    Certificate cert{Verdict::Inconclusive, ratio, ds.interior_min, std::nullopt, st.lambda1, g, {}};
    if (variation <= kConstantRatioTolerance) {
        cert.verdict = Verdict::UniqueConstantRatio;
        cert.theta = mean;
    } else if (ds.interior_min >= -kPointwiseTolerance) {
        cert.verdict = Verdict::UniquePointwise;
    } else if (ratio <= kRatioBound) {
        cert.verdict = Verdict::UniqueRatioBound;
    }

    std::string det = "c = a/b: min " + format_double(c.min()) + ", max " + format_double(c.max()) +
                      ", relative variation " + format_double(variation) + "; c_L " + format_double(st.c_low) +
                      ", c_M " + format_double(st.c_high) + ", |grad c|_inf " + format_double(st.grad_sup) + "; ";
    if (ds.collar_excluded) {
        det += "min_D taken off the boundary collar, collar min " + format_double(ds.collar_min) + "; ";
    } else {
        det += "grid too small for a collar, min_D over all nodes; ";
    }
    det += "pointwise and ratio tests are applied for every source h, sign-changing or not";
    cert.details = std::move(det);
    return cert;
}

ScalarField pointwise_example(const Grid& grid) {
    const SparseMatrix lap = assemble_laplacian(grid);
    const std::vector<double> rhs(grid.size(), -1.0);  // the matrix is -laplacian
    const ScalarField e(grid, cg_solve(lap, rhs));

    const double grad_sup = std::sqrt(node_norm_sq(gradient(e)).max());
    const double e_sup = e.max_abs();
    const double delta = std::min(1.0 / (4.0 * grad_sup * grad_sup), 1.0 / (2.0 * e_sup));
    ScalarField c = map(e, [delta](double v) { return delta * v + 1.0; });

    if (!(c.min() > 0.0)) {
        throw Error(ErrorKind::ConstructionFailed, "min c = " + format_double(c.min()) + " is not positive");
    }
    double min_d = 0.0;
    try {
        min_d = summarize_D(pointwise_D(c)).interior_min;
    } catch (const Error& err) {
        throw Error(ErrorKind::ConstructionFailed, err.message());
    }
    if (min_d < -kConstructionTolerance) {
        throw Error(ErrorKind::ConstructionFailed, "min c = " + format_double(c.min()) + ", min D = " +
                                                       format_double(min_d) + "; grid too coarse");
    }
    return c;
}

nlohmann::ordered_json to_json(const Grid& g) {
    return {{"nx", g.nx()}, {"ny", g.ny()}, {"x0", g.x0()}, {"y0", g.y0()}, {"hx", g.hx()}, {"hy", g.hy()}};
}

nlohmann::ordered_json to_json(const Certificate& c) {
    nlohmann::ordered_json j;
    j["verdict"] = to_string(c.verdict);
    j["ratio_value"] = c.ratio_value;
    j["min_D"] = c.min_D;
    j["theta"] = c.theta ? nlohmann::ordered_json(*c.theta) : nlohmann::ordered_json(nullptr);
    j["lambda1"] = c.lambda1;
    j["grid"] = to_json(c.grid);
    j["details"] = c.details;
    return j;
}

}  // namespace klab
