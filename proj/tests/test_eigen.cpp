#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "klab/certify.hpp"
#include "klab/eigenproblem.hpp"
#include "klab/error.hpp"
#include "support.hpp"

using namespace klab;
using klab::testing::Rng;

namespace {

constexpr double pi = std::numbers::pi;

template <class F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no klab::Error thrown";
    return ErrorKind::InvalidArgument;
}

ScalarField one_plus_x(const Grid& g) {
    return ScalarField::sample(g, [](double x, double) { return 1 + x; });
}

}  // namespace

TEST(Stats, OnePlusX) {
    const CoefficientStats s = coefficient_stats(one_plus_x(Grid::unit_square(16)));
    EXPECT_NEAR(s.c_low, 1.0, 1e-12);
    EXPECT_NEAR(s.c_high, 2.0, 1e-12);
    EXPECT_NEAR(s.grad_sup, 1.0, 1e-12);
    EXPECT_EQ(s.lambda1, Grid::unit_square(16).lambda1());
    ScalarField bad(Grid::unit_square(4), 1.0);
    bad(2, 2) = -1.0;
    EXPECT_EQ(kind_of([&] { coefficient_stats(bad); }), ErrorKind::NonPositiveC);
}

TEST(WeightM, ConstantCoefficientIsZero) {
    const ScalarField c(Grid::unit_square(10), 2.5);
    for (double alpha : {0.01, 1.0, 100.0}) EXPECT_EQ(weight_m(c, alpha).max_abs(), 0.0);
}

TEST(WeightM, OnePlusXMatchesClosedForm) {
    const Grid g = Grid::unit_square(64);
    const ScalarField c = one_plus_x(g);
    for (double alpha : {0.1, 1.0}) {
        const ScalarField m = weight_m(c, alpha);
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 0; i < g.nx(); ++i) {
                const double exact = 2.0 / std::pow(1 + g.x(i) + alpha, 3);
                EXPECT_LE(std::abs(m(i, j) - exact), 1e-2 * exact) << i << "," << j;
            }
        }
    }
}

TEST(WeightM, ArgumentChecks) {
    const Grid g = Grid::unit_square(4);
    EXPECT_EQ(kind_of([&] { weight_m(one_plus_x(g), -0.5); }), ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([&] { weight_m(ScalarField(g, -1.0), 1.0); }), ErrorKind::NonPositiveC);
}

TEST(WeightM, DiscreteDivergenceIdentity) {
    Rng rng(71);
    const Grid g = Grid::unit_square(20);
    const ScalarField c = klab::testing::positive_field(g, rng);
    for (int trial = 0; trial < 10; ++trial) {
        const double alpha = rng.uniform(0.01, 5.0);
        const ScalarField u = klab::testing::random_values(g, rng);
        const double lhs = integrate(u * u * weight_m(c, alpha));
        const double rhs = face_inner(gradient(u * u), weight_flux(c, alpha));
        EXPECT_NEAR(lhs, rhs, 1e-12 * (std::abs(lhs) + 1));
    }
}

TEST(Admissible, Examples) {
    const Grid g = Grid::unit_square(16);
    EXPECT_FALSE(in_admissible_set(ScalarField(g, 1.0), 1.0));
    EXPECT_TRUE(in_admissible_set(one_plus_x(g), 1.0));
    const ScalarField example = pointwise_example(g);
    for (double alpha : {0.01, 0.1, 1.0, 10.0, 100.0}) EXPECT_FALSE(in_admissible_set(example, alpha));
}

TEST(SolveEp, OnePlusX) {
    const Grid g = Grid::unit_square(32);
    const ScalarField c = one_plus_x(g);
    for (double alpha : {0.1, 1.0, 10.0}) {
        const EigenPair ep = solve_ep(c, alpha);
        EXPECT_EQ(ep.alpha, alpha);
        EXPECT_GT(ep.lambda, 0.0);
        EXPECT_LE(ep.residual, 1e-8);
        EXPECT_NEAR(grad_norm_sq(ep.u), alpha, 1e-8 * alpha);
        EXPECT_GE(ep.u.min(), -1e-8 * ep.u.max());
        EXPECT_GE(ep.lambda, ee_lower_bound(c, alpha) - 1e-8);
        EXPECT_NEAR(rayleigh(c, alpha, ep.u), ep.lambda, 1e-8 * ep.lambda);
    }
}

TEST(SolveEp, Rejections) {
    const Grid g = Grid::unit_square(8);
    EXPECT_EQ(kind_of([&] { solve_ep(ScalarField(g, 1.0), 1.0); }), ErrorKind::NotInAdmissibleSet);
    EXPECT_EQ(kind_of([&] { solve_ep(one_plus_x(g), 0.0); }), ErrorKind::InvalidArgument);
}

TEST(Rayleigh, ScaleInvarianceAndNumeratorBound) {
    Rng rng(72);
    const Grid g = Grid::unit_square(24);
    const ScalarField c = one_plus_x(g);
    const double c_high = coefficient_stats(c).c_high;
    for (int trial = 0; trial < 20; ++trial) {
        const double alpha = rng.uniform(0.05, 5.0);
        const ScalarField u = klab::testing::smooth_field(g, rng);
        const double r = rayleigh(c, alpha, u);
        EXPECT_NEAR(rayleigh(c, alpha, 3.7 * u), r, 1e-12 * std::abs(r));
        const ScalarField v = std::sqrt(alpha / grad_norm_sq(u)) * u;
        EXPECT_GE(rayleigh_numerator(c, alpha, v), alpha / (c_high + alpha) - 1e-8);
    }
}

TEST(Rayleigh, ZeroDenominator) {
    const Grid g = Grid::unit_square(8);
    Rng rng(73);
    const ScalarField u = klab::testing::smooth_field(g, rng);
    EXPECT_EQ(kind_of([&] { rayleigh(ScalarField(g, 1.0), 1.0, u); }), ErrorKind::ZeroDenominator);
}

TEST(EeBound, ExamplesAndChecks) {
    const Grid g = Grid::unit_square(64);
    const ScalarField c = one_plus_x(g);
    EXPECT_NEAR(ee_lower_bound(c, 1.0), std::sqrt(2 * pi * pi) * 4.0 / 6.0, 2e-3);
    EXPECT_EQ(kind_of([&] { ee_lower_bound(ScalarField(g, 1.0), 1.0); }), ErrorKind::ConstantC);
    double prev = ee_lower_bound(c, 2.0);
    for (double alpha = 4.0; alpha < 1000; alpha *= 2) {
        const double cur = ee_lower_bound(c, alpha);
        EXPECT_GT(cur, prev);
        prev = cur;
    }
}

TEST(EeBound, WeightIntegralBound) {
    const Grid g = Grid::unit_square(48);
    const ScalarField c = one_plus_x(g);
    const CoefficientStats s = coefficient_stats(c);
    for (double alpha : {0.05, 0.5, 5.0}) {
        const EigenPair ep = solve_ep(c, alpha);
        const double lhs = integrate(ep.u * ep.u * weight_m(c, alpha));
        const double bound = 2 * s.grad_sup * alpha / (std::sqrt(s.lambda1) * std::pow(s.c_low + alpha, 2));
        EXPECT_LE(lhs, bound * (1 + 1e-2));
    }
}

TEST(EigenCurve, ConstantIsEmpty) {
    const ScalarField c(Grid::unit_square(8), 3.0);
    EXPECT_TRUE(eigen_curve(c, logspace(0.01, 100, 10)).rows.empty());
}

TEST(EigenCurve, OnePlusXAndCsv) {
    const Grid g = Grid::unit_square(24);
    const EigenCurve curve = eigen_curve(one_plus_x(g), logspace(0.01, 100, 20));
    ASSERT_EQ(curve.rows.size(), 20u);
    for (const auto& row : curve.rows) {
        EXPECT_GE(row.lambda, row.ee_bound - 1e-8);
        EXPECT_LE(row.rayleigh_gap, 1e-8 * row.lambda);
    }
    std::ostringstream out;
    write_eigen_curve_csv(out, curve);
    const std::string text = out.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "alpha,lambda,ee_bound,rayleigh_gap");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 21);
}

TEST(Logspace, Endpoints) {
    const std::vector<double> v = logspace(0.01, 100, 5);
    ASSERT_EQ(v.size(), 5u);
    EXPECT_DOUBLE_EQ(v.front(), 0.01);
    EXPECT_DOUBLE_EQ(v[2], 1.0);
    EXPECT_DOUBLE_EQ(v.back(), 100.0);
}
