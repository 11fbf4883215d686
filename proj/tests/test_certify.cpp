#include <gtest/gtest.h>

#include <cmath>

#include "klab/certify.hpp"
#include "klab/eigenproblem.hpp"
#include "klab/error.hpp"
#include "klab/expr.hpp"
#include "klab/kirchhoff.hpp"
#include "support.hpp"

using namespace klab;
using klab::testing::Rng;

namespace {

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

ScalarField field(const std::string& expr, const Grid& g) { return eval_field(parse(expr), g); }

}  // namespace

TEST(PointwiseD, Examples) {
    const Grid g = Grid::unit_square(64);
    const DSummary constant = summarize_D(pointwise_D(ScalarField(g, 2.0)));
    EXPECT_EQ(constant.interior_min, 0.0);
    EXPECT_TRUE(constant.collar_excluded);

    const ScalarField d = pointwise_D(field("1+x", g));
    for (int j = 1; j + 1 < g.ny(); ++j) {
        for (int i = 1; i + 1 < g.nx(); ++i) EXPECT_NEAR(d(i, j), -2.0 / (1 + g.x(i)), 1e-3);
    }
    EXPECT_GE(summarize_D(pointwise_D(pointwise_example(g))).interior_min, -1e-6);
    EXPECT_FALSE(summarize_D(pointwise_D(ScalarField(Grid::unit_square(2), 1.0))).collar_excluded);
}

TEST(RatioCriterion, ExamplesAndScaleInvariance) {
    const Grid g = Grid::unit_square(64);
    EXPECT_EQ(ratio_criterion(ScalarField(g, 4.0)), 0.0);
    const ScalarField c = field("1+x", g);
    const double r = ratio_criterion(c);
    EXPECT_NEAR(r, 0.4502, 1e-3);
    for (double k : {0.5, 2.0, 10.0}) EXPECT_NEAR(ratio_criterion(k * c), r, 1e-12 * r);
}

TEST(GAlpha, Limits) {
    const Grid g = Grid::unit_square(32);
    const ScalarField c = field("1+x", g);
    EXPECT_EQ(g_alpha(c, 0.0), ratio_criterion(c) - 1.0);
    double prev = g_alpha(c, 0.0);
    for (double alpha = 0.01; alpha < 1e4; alpha *= 3) {
        const double cur = g_alpha(c, alpha);
        EXPECT_LT(cur, prev);
        prev = cur;
    }
    EXPECT_NEAR(g_alpha(c, 1e6), -1.0, 1e-3);
}

TEST(Certify, ConstantRatio) {
    Rng rng(81);
    const Grid g = Grid::unit_square(16);
    const ScalarField b = klab::testing::positive_field(g, rng);
    const Certificate c = certify(b, b);
    EXPECT_EQ(c.verdict, Verdict::UniqueConstantRatio);
    ASSERT_TRUE(c.theta);
    EXPECT_NEAR(*c.theta, 1.0, 1e-12);
    EXPECT_EQ(certify(3.0 * b, b).verdict, Verdict::UniqueConstantRatio);
}

TEST(Certify, RatioBoundPointwiseAndInconclusive) {
    const Grid g = Grid::unit_square(32);
    const ScalarField one(g, 1.0);
    const Certificate rb = certify(field("1+x", g), one);
    EXPECT_EQ(rb.verdict, Verdict::UniqueRatioBound);
    EXPECT_LE(rb.ratio_value, kRatioBound);
    EXPECT_FALSE(rb.theta);

    const ScalarField b = field("2+y", g);
    const Certificate pw = certify(pointwise_example(g) * b, b);
    EXPECT_EQ(pw.verdict, Verdict::UniquePointwise);
    EXPECT_GE(pw.min_D, -kPointwiseTolerance);

    const Certificate inc = certify(field("1+2*x^2*y", g), one);
    EXPECT_EQ(inc.verdict, Verdict::Inconclusive);
    EXPECT_GT(inc.ratio_value, kRatioBound);
    EXPECT_LT(inc.min_D, -kPointwiseTolerance);
}

TEST(Certify, Rejections) {
    const Grid g = Grid::unit_square(8);
    const ScalarField one(g, 1.0);
    EXPECT_EQ(kind_of([&] { certify(one, ScalarField(Grid::unit_square(9), 1.0)); }), ErrorKind::GridMismatch);
    ScalarField bad = one;
    bad(0, 0) = 0.0;
    EXPECT_EQ(kind_of([&] { certify(bad, one); }), ErrorKind::NonPositiveCoefficient);
}

TEST(Certify, DeterministicJson) {
    const Grid g = Grid::unit_square(24);
    const ScalarField a = field("1+x*y+0.3*sin(3*x)", g);
    const ScalarField b = field("1+y", g);
    const std::string first = to_json(certify(a, b)).dump(2);
    EXPECT_EQ(first, to_json(certify(a, b)).dump(2));
    const auto j = nlohmann::ordered_json::parse(first);
    for (const char* key : {"verdict", "ratio_value", "min_D", "lambda1", "grid", "details"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_EQ(j["grid"]["nx"], 24);
}

TEST(Certify, PointwiseExcludesAdmissibleAlphas) {
    const Grid g = Grid::unit_square(32);
    const ScalarField c = pointwise_example(g);
    ASSERT_EQ(certify(c, ScalarField(g, 1.0)).verdict, Verdict::UniquePointwise);
    for (double alpha : logspace(1e-3, 1e3, 25)) EXPECT_FALSE(in_admissible_set(c, alpha)) << alpha;
}

TEST(PointwiseExample, Properties) {
    for (int n : {8, 32, 64}) {
        const Grid g = Grid::unit_square(n);
        const ScalarField c = pointwise_example(g);
        EXPECT_GT(c.min(), 0.0);
        EXPECT_LE(c.max(), 1.5);
        EXPECT_GT(c.max() - c.min(), 1e-3);
        EXPECT_EQ(certify(c, ScalarField(g, 1.0)).verdict, Verdict::UniquePointwise);
    }
}

TEST(Certify, VerdictsAreSound) {
    Rng rng(82);
    const Grid g = Grid::unit_square(16);
    const std::vector<std::string> catalog{"2", "1+x", "1+0.5*(x^2+y^2)", "exp(0.5*x)", "2+x^2", "3+sin(pi*x)*sin(pi*y)",
                                           "1+0.2*sin(pi*x)", "1+0.1*(x^2+y^2)"};
    std::vector<ScalarField> ratios;
    for (const auto& e : catalog) ratios.push_back(field(e, g));
    ratios.push_back(pointwise_example(g));
    ratios.push_back(2.0 * pointwise_example(g));

    for (const ScalarField& c : ratios) {
        const ScalarField b = klab::testing::positive_field(g, rng);
        const Certificate cert = certify(c * b, b);
        ASSERT_NE(cert.verdict, Verdict::Inconclusive);
        for (int trial = 0; trial < 10; ++trial) {
            const Problem p(c * b, b, rng.uniform(0.1, 40.0) * klab::testing::smooth_field(g, rng));
            EXPECT_EQ(fixed_point_scan(p, 128).roots.size(), 1u) << to_string(cert.verdict);
        }
    }
}
