#pragma once

// Seeded generators for test fields.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "klab/grid.hpp"

namespace klab::testing {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

private:
    std::mt19937_64 gen_;
};

/// Finite sine series vanishing on the boundary of the grid's rectangle, so
/// the same function can be sampled on several grids.
struct SineSeries {
    double x0 = 0.0, y0 = 0.0, lx = 1.0, ly = 1.0;
    std::vector<double> coef;  // modes x modes, row k*modes + l
    int modes = 0;

    double operator()(double x, double y) const {
        double v = 0.0;
        for (int k = 1; k <= modes; ++k) {
            const double sx = std::sin(k * std::numbers::pi * (x - x0) / lx);
            for (int l = 1; l <= modes; ++l) {
                v += coef[static_cast<std::size_t>((k - 1) * modes + (l - 1))] * sx *
                     std::sin(l * std::numbers::pi * (y - y0) / ly);
            }
        }
        return v;
    }
};

inline SineSeries random_series(const Grid& g, Rng& rng, int modes = 3) {
    SineSeries s{g.x0(), g.y0(), g.lx(), g.ly(), {}, modes};
    for (int k = 1; k <= modes; ++k) {
        for (int l = 1; l <= modes; ++l) s.coef.push_back(rng.normal() / (k * l));
    }
    return s;
}

inline ScalarField smooth_field(const Grid& g, Rng& rng, int modes = 3) {
    return ScalarField::sample(g, random_series(g, rng, modes));
}

/// Smooth field with both signs present.
inline ScalarField sign_changing_field(const Grid& g, Rng& rng) {
    for (;;) {
        ScalarField f = smooth_field(g, rng);
        const double top = f.max_abs();
        if (f.min() < -0.1 * top && f.max() > 0.1 * top) return f;
    }
}

/// Smooth, strictly positive, non-constant field with values within a
/// factor of about e^1.5 of `base`.
inline ScalarField positive_field(const Grid& g, Rng& rng, double base = 1.0) {
    const double p = rng.uniform(-0.5, 0.5);
    const double q = rng.uniform(-0.5, 0.5);
    const double r = rng.uniform(-0.5, 0.5);
    return ScalarField::sample(g, [=](double x, double y) {
        return base * std::exp(p * x + q * y + r * std::sin(std::numbers::pi * x) * std::cos(std::numbers::pi * y));
    });
}

/// h >= 0 (sign > 0) or h <= 0 (sign < 0), not identically zero.
inline ScalarField signed_field(const Grid& g, Rng& rng, double sign) {
    const ScalarField f = smooth_field(g, rng);
    const double shift = rng.uniform(0.0, 1.0) * f.max_abs();
    return map(f, [=](double v) { return sign * (std::abs(v) + shift); });
}

inline ScalarField random_values(const Grid& g, Rng& rng) {
    ScalarField f(g);
    for (double& v : f.values()) v = rng.uniform(-1.0, 1.0);
    return f;
}

inline FaceField random_faces(const Grid& g, Rng& rng) {
    FaceField f(g);
    for (double& v : f.xfaces) v = rng.uniform(-1.0, 1.0);
    for (double& v : f.yfaces) v = rng.uniform(-1.0, 1.0);
    return f;
}

}  // namespace klab::testing
