#pragma once

// The weighted eigenproblem attached to a coefficient ratio c = a/b > 0:
//
//   -div(grad u / (c + alpha)) = lambda * m_alpha * u,   u = 0 on the boundary,
//   m_alpha = -div(grad c / (c + alpha)^2),
//
// with the eigenfunction normalized to |grad u|_2^2 = alpha. m_alpha is
// built in divergence form from face fluxes, so the discrete divergence
// theorem holds exactly for it.

#include <iosfwd>
#include <vector>

#include "klab/grid.hpp"
#include "klab/linalg.hpp"

namespace klab {

/// Quantities of c shared by the eigenvalue bound and the uniqueness tests.
/// c_low/c_high include extrapolated boundary values; grad_sup is the
/// largest node-averaged gradient magnitude.
struct CoefficientStats {
    double c_low;
    double c_high;
    double grad_sup;
    double lambda1;
};

/// Throws Error(NonPositiveC) unless c and its extrapolated boundary values
/// are positive.
CoefficientStats coefficient_stats(const ScalarField& c);

/// Face flux G = grad c / (c_face + alpha)^2.
FaceField weight_flux(const ScalarField& c, double alpha);

/// m_alpha = -divergence(weight_flux(c, alpha)).
/// Throws Error(NonPositiveC), Error(InvalidArgument) for alpha < 0.
ScalarField weight_m(const ScalarField& c, double alpha);

/// Node threshold for "m_alpha is positive somewhere".
inline constexpr double kPositiveWeightThreshold = 1e-10;

/// True iff weight_m(c, alpha) exceeds the threshold at one node or more.
bool in_admissible_set(const ScalarField& c, double alpha);

/// Face weights mean(1/(c+alpha)) used by the stiffness side of the pencil.
FaceField stiffness_face_weights(const ScalarField& c, double alpha);

/// A = hx*hy * (-div(w grad)), B = hx*hy * m_alpha.
Pencil eigen_pencil(const ScalarField& c, double alpha);

struct EigenPair {
    double alpha;
    double lambda;
    ScalarField u;
    double residual;  // pencil residual of u
};

inline constexpr double kEigenResidualTolerance = 1e-8;
inline constexpr double kSignTolerance = 1e-8;

/// Principal eigenpair for a given alpha. Throws Error(NotInAdmissibleSet),
/// Error(SignChange) if the eigenvector is not sign-definite to
/// kSignTolerance * max, Error(CheckFailed) if the pencil residual exceeds
/// kEigenResidualTolerance.
EigenPair solve_ep(const ScalarField& c, double alpha);

/// integral of |grad u|^2 / (c+alpha) with the pencil's face weights.
double rayleigh_numerator(const ScalarField& c, double alpha, const ScalarField& u);

/// rayleigh_numerator / integrate(u^2 m_alpha). Throws Error(ZeroDenominator).
double rayleigh(const ScalarField& c, double alpha, const ScalarField& u);

/// sqrt(lambda1) (c_L + alpha)^2 / (2 |grad c|_inf (c_M + alpha)).
/// Throws Error(ConstantC) when the gradient vanishes.
double ee_lower_bound(const ScalarField& c, double alpha);

struct EigenCurveRow {
    double alpha;
    double lambda;
    double ee_bound;
    double rayleigh_gap;  // |rayleigh - lambda|
};

struct EigenCurve {
    std::vector<EigenCurveRow> rows;
};

/// One row per alpha inside the admissible set, in input order.
EigenCurve eigen_curve(const ScalarField& c, const std::vector<double>& alphas);

/// CSV with header alpha,lambda,ee_bound,rayleigh_gap.
void write_eigen_curve_csv(std::ostream& out, const EigenCurve& curve);

/// n points log-spaced on [lo, hi].
std::vector<double> logspace(double lo, double hi, int n);

}  // namespace klab
