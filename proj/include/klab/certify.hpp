#pragma once

// Uniqueness certificates for the nonlocal problem, checked in order:
//   1. a/b constant;
//   2. D = laplacian(c) - 2 |grad c|^2 / c >= 0 at every node, c = a/b;
//   3. |grad c|_inf c_max / (sqrt(lambda1) c_min^2) <= 3/2.

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "klab/grid.hpp"

namespace klab {

enum class Verdict { UniqueConstantRatio, UniquePointwise, UniqueRatioBound, Inconclusive };

const char* to_string(Verdict v);

struct Certificate {
    Verdict verdict;
    double ratio_value;
    double min_D;
    std::optional<double> theta;
    double lambda1;
    Grid grid;
    std::string details;
};

inline constexpr double kConstantRatioTolerance = 1e-10;
inline constexpr double kPointwiseTolerance = 1e-8;
inline constexpr double kRatioBound = 1.5;

/// Nodewise laplacian(c) - 2 |grad c|^2_node / c, differences taken with
/// extrapolated boundary values of c. Throws Error(NonPositiveC).
ScalarField pointwise_D(const ScalarField& c);

struct DSummary {
    double interior_min;  // over nodes off the one-node boundary collar
    double collar_min;    // over the collar; equals interior_min when the grid has no interior
    bool collar_excluded;
};

/// Min of pointwise_D, with the boundary collar reported separately.
DSummary summarize_D(const ScalarField& d);

/// |grad c|_inf c_max / (sqrt(lambda1) c_min^2).
double ratio_criterion(const ScalarField& c);

/// |grad c|_inf (c_max + alpha) / (sqrt(lambda1) (c_min + alpha)^2) - 1.
double g_alpha(const ScalarField& c, double alpha);

/// Throws Error(GridMismatch), Error(NonPositiveCoefficient).
Certificate certify(const ScalarField& a, const ScalarField& b);

inline constexpr double kConstructionTolerance = 1e-6;

/// c = delta e + 1 with laplacian(e) = 1, e = 0 on the boundary, and
/// delta = min(1 / (4 |grad e|_inf^2), 1 / (2 |e|_inf)). Such c satisfies
/// laplacian(c) >= 2 |grad c|^2 / c. Throws Error(ConstructionFailed) if the
/// discrete field is not positive or min D < -kConstructionTolerance.
ScalarField pointwise_example(const Grid& grid);

nlohmann::ordered_json to_json(const Grid& g);
nlohmann::ordered_json to_json(const Certificate& c);

}  // namespace klab
