#pragma once

// The nonlocal Dirichlet problem
//
//   -(a + b s) laplacian(u) = h,   s = grad_norm_sq(u),
//
// solved two ways: by the scalar reduction s = Phi(s), Phi(s) = |grad u_s|^2
// with -laplacian(u_s) = h / (a + s b), and by Newton's method with the
// rank-one Jacobian inverse.

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "klab/error.hpp"
#include "klab/grid.hpp"
#include "klab/linalg.hpp"

namespace klab {

class Problem {
public:
    /// Throws Error(GridMismatch) if the fields do not share a grid,
    /// Error(NonPositiveCoefficient) unless min a > 0 and min b > 0.
    Problem(ScalarField a, ScalarField b, ScalarField h);

    const Grid& grid() const { return a_.grid(); }
    const ScalarField& a() const { return a_; }
    const ScalarField& b() const { return b_; }
    const ScalarField& h() const { return h_; }
    double a0() const { return a0_; }
    double b0() const { return b0_; }

    /// a / b nodewise.
    ScalarField ratio() const { return a_ / b_; }

    /// Same coefficients, new source. Shares the factorization.
    Problem with_source(ScalarField h) const;

    /// Solves -laplacian(u) = f with zero boundary values.
    ScalarField solve_poisson(const ScalarField& f) const;

private:
    ScalarField a_;
    ScalarField b_;
    ScalarField h_;
    double a0_;
    double b0_;
    std::shared_ptr<const BandedCholesky> laplace_;
};

struct NonlocalSolution {
    enum class Method { FixedPointScan, Newton };

    ScalarField u;
    double s;
    double residual;
    Method method;
    int iterations = 0;  // Newton steps or bisection steps
};

const char* to_string(NonlocalSolution::Method m);

struct ScanReport {
    double s_max;
    std::vector<std::pair<double, double>> samples;  // (s, Phi(s))
    std::vector<NonlocalSolution> roots;
    std::vector<double> suspected_tangencies;
};

/// a + s b. Throws Error(NegativeS).
ScalarField m_field(const Problem& p, double s);

/// u_s with -laplacian(u_s) = h / m_field(p, s).
ScalarField solve_at_s(const Problem& p, double s);

/// grad_norm_sq(solve_at_s(p, s)).
double phi(const Problem& p, double s);

/// integrate(h^2) / (a0^2 lambda1): every fixed point has s <= this.
double s_upper_bound(const Problem& p);

inline constexpr int kDefaultScanSamples = 256;
inline constexpr double kScanFloor = 1e-12;
inline constexpr double kRootTolerance = 1e-10;
inline constexpr double kTangencyTolerance = 1e-6;
inline constexpr int kMaxBisections = 120;

/// Samples Phi(s) - s uniformly on [0, 1.05 max(S_max, kScanFloor)] and
/// bisects every sign change. s_max_override, when set, replaces S_max.
/// Throws Error(InvalidArgument) for n_samples < 16, Error(NoConvergence)
/// if a bracket cannot be refined to tolerance.
ScanReport fixed_point_scan(const Problem& p, int n_samples = kDefaultScanSamples,
                            std::optional<double> s_max_override = std::nullopt);

/// m_field(p, grad_norm_sq(u)) * laplacian(u) + h
ScalarField residual_field(const Problem& p, const ScalarField& u);

/// max norm of residual_field.
double residual(const Problem& p, const ScalarField& u);

/// integrate(b u laplacian(u) / M), M = m_field(p, grad_norm_sq(u)).
double jacobian_functional(const Problem& p, const ScalarField& u);

inline constexpr double kSingularJacobian = 1e-8;
inline constexpr double kLinearizedCheck = 1e-6;

/// Max norm of 2 b laplacian(u) <grad u, grad v> + M laplacian(v) + g, i.e.
/// the derivative of the residual at u in direction v, plus g.
double linearized_defect(const Problem& p, const ScalarField& u, const ScalarField& v, const ScalarField& g);

/// v with (derivative of residual_field at u) v = -g, through the rank-one
/// closed form. Throws Error(SingularJacobian) when
/// |integrate(2 b u laplacian(u) / M) - 1| < kSingularJacobian and
/// Error(CheckFailed) if linearized_defect exceeds kLinearizedCheck (1 + |g|).
ScalarField linearized_solve(const Problem& p, const ScalarField& u, const ScalarField& g);

inline constexpr double kNewtonTolerance = 1e-9;
inline constexpr int kNewtonMaxIterations = 50;

/// Newton failure carrying the last iterate.
class NewtonFailure : public Error {
public:
    NewtonFailure(const std::string& message, NonlocalSolution last)
        : Error(ErrorKind::NoConvergence, message), last_(std::move(last)) {}
    const NonlocalSolution& last() const { return last_; }

private:
    NonlocalSolution last_;
};

/// Full Newton steps from u0 (default solve_at_s(p, 0)) until
/// residual <= tol. Throws NewtonFailure after kNewtonMaxIterations.
NonlocalSolution newton_solve(const Problem& p, std::optional<ScalarField> u0 = std::nullopt,
                              double tol = kNewtonTolerance);

struct IdentityPair {
    double lhs;
    double rhs;
};

/// Both sides of the integration-by-parts identity
///   integrate(u lap u / (c+s)) = -integrate(|grad u|^2 / (c+s)) + 1/2 integrate(u^2 m_s)
/// with c = a/b, s = grad_norm_sq(u), m_s the eigenproblem weight and
/// |grad u|^2 taken as energy_density(u).
IdentityPair eureka_identity(const Problem& p, const ScalarField& u);

}  // namespace klab
