#include <gtest/gtest.h>

#include <random>

#include "nhsi/polyalg.hpp"

using namespace nhsi;

namespace {

std::vector<cplx> random_coeffs(std::mt19937& rng, int degree) {
    std::normal_distribution<double> n01;
    std::vector<cplx> c(static_cast<std::size_t>(degree) + 1);
    for (auto& x : c) x = {n01(rng), n01(rng)};
    return c;
}

double rel_err(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

} // namespace

TEST(UniPoly, TrimsTrailingNearZeros) {
    UniPoly p({1.0, 2.0, 1e-14});
    EXPECT_EQ(p.degree(), 1);
    EXPECT_EQ(UniPoly({0.0, 0.0}).degree(), -1);
}

TEST(UniPoly, HornerMatchesDirectSum) {
    UniPoly p({1.0, cplx(0, 2), -3.0, 0.5});
    cplx x(0.3, -1.2);
    cplx direct = 1.0 + cplx(0, 2) * x - 3.0 * x * x + 0.5 * x * x * x;
    EXPECT_LT(std::abs(p(x) - direct), 1e-14);
    EXPECT_LT(std::abs(p.derivative()(x) - p.derivative_at(x)), 1e-14);
}

TEST(PolyRoots, QuadraticPair) {
    auto r = poly_roots(UniPoly({0.25, 0.0, 1.0}));
    ASSERT_EQ(r.size(), 2u);
    EXPECT_LT(std::abs(r[0] - cplx(0, 0.5)), 1e-14);
    EXPECT_LT(std::abs(r[1] - cplx(0, -0.5)), 1e-14);
}

TEST(PolyRoots, TripleContactFactorization) {
    UniPoly p = UniPoly({1.0, 0.0, 0.0, 1.0}) * UniPoly({0.5, 1.5});
    auto r = poly_roots(p);
    ASSERT_EQ(r.size(), 4u);
    EXPECT_LT(std::abs(r[0] - cplx(-1.0 / 3.0, 0.0)), 1e-13);
    EXPECT_LT(std::abs(r[1] - std::polar(1.0, kPi / 3)), 1e-13);
    EXPECT_LT(std::abs(r[2] - std::polar(1.0, kPi)), 1e-13);
    EXPECT_LT(std::abs(r[3] - std::polar(1.0, 5 * kPi / 3)), 1e-13);
}

TEST(PolyRoots, RandomDegreeSevenResiduals) {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        UniPoly p(random_coeffs(rng, 7));
        auto r = poly_roots(p);
        ASSERT_EQ(r.size(), 7u);
        for (cplx z : r) EXPECT_LE(std::abs(p(z)), 1e-10 * p.scale() * std::max(1.0, std::pow(std::abs(z), 7)));
        for (std::size_t i = 1; i < r.size(); ++i) EXPECT_LE(std::abs(r[i - 1]), std::abs(r[i]) * (1 + 1e-9));
    }
}

TEST(PolyRoots, MonicReconstruction) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        int deg = 1 + trial % 6;
        UniPoly p(random_coeffs(rng, deg));
        auto r = poly_roots(p);
        UniPoly q = UniPoly::from_roots(r, p.leading());
        for (int i = 0; i <= deg; ++i) EXPECT_LT(std::abs(q[i] - p[i]), 1e-8 * p.scale());
    }
}

TEST(PolyRoots, MultipleRootsAreClustered) {
    UniPoly p = UniPoly::from_roots(std::vector<cplx>{0.5, 0.5, cplx(0, 2)});
    auto r = poly_roots(p);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_EQ(r[0], r[1]);
    EXPECT_LT(std::abs(r[0] - 0.5), 1e-7);
}

TEST(PolyRoots, Errors) {
    try {
        poly_roots(UniPoly({0.0, 0.0}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ZeroPolynomial);
    }
    try {
        poly_roots(UniPoly({3.0}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DegreeZero);
    }
}

TEST(Sylvester, LinearLayout) {
    auto s = sylvester(UniPoly({1.0, 2.0}), UniPoly({4.0, 3.0}));
    ASSERT_EQ(s.size(), 2);
    EXPECT_EQ(s(0, 0), 2.0);
    EXPECT_EQ(s(0, 1), 1.0);
    EXPECT_EQ(s(1, 0), 3.0);
    EXPECT_EQ(s(1, 1), 4.0);
}

TEST(Sylvester, QuadraticLinearLayout) {
    auto s = sylvester(UniPoly({-1.0, 0.0, 1.0}), UniPoly({-1.0, 1.0}));
    const double expected[3][3] = {{1, 0, -1}, {1, -1, 0}, {0, 1, -1}};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) EXPECT_EQ(s(r, c), expected[r][c]) << r << "," << c;
}

TEST(Sylvester, PolynomialEntriesVerbatim) {
    std::vector<std::string> vars{"x", "y"};
    auto x = MultiPoly::variable(vars, "x"), y = MultiPoly::variable(vars, "y");
    auto one = MultiPoly::constant(vars, 1.0);
    auto f = x * y + one;         // y·x + 1
    auto g = x * x + y * y * 3.0; // x² + 3y²
    auto s = sylvester(f, g, "x");
    ASSERT_EQ(s.size(), 3);
    EXPECT_EQ(s(0, 0).terms(), y.terms());
    EXPECT_EQ(s(0, 1).terms(), one.terms());
    EXPECT_TRUE(s(0, 2).is_zero());
    EXPECT_EQ(s(2, 0).terms(), one.terms());
    EXPECT_TRUE(s(2, 1).is_zero());
    EXPECT_EQ(s(2, 2).terms(), (y * y * 3.0).terms());
}

TEST(Sylvester, DegreeZeroRejected) {
    EXPECT_THROW(sylvester(UniPoly({1.0}), UniPoly({1.0, 1.0})), Error);
}

TEST(Resultant, LinearFactors) {
    cplx a(0.3, 1.0), b(-2.0, 0.5);
    EXPECT_LT(std::abs(resultant(UniPoly({-a, 1.0}), UniPoly({-b, 1.0})) - (a - b)), 1e-14);
    EXPECT_LT(std::abs(resultant(UniPoly({-1.0, 0.0, 1.0}), UniPoly({-1.0, 1.0}))), 1e-14);
}

TEST(Resultant, ProductFormula) {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 1 + trial % 5, m = 1 + (trial / 5) % 5;
        UniPoly f(random_coeffs(rng, n)), g(random_coeffs(rng, m));
        auto xi = poly_roots(f), eta = poly_roots(g);
        cplx expected = std::pow(f.leading(), m) * std::pow(g.leading(), n);
        for (cplx a : xi)
            for (cplx b : eta) expected *= a - b;
        EXPECT_LT(std::abs(resultant(f, g) - expected), 1e-8 * std::abs(expected)) << n << " " << m;
    }
}

TEST(Resultant, HatanoNelsonPairVanishesAtEqualArguments) {
    // P(β,E) = 0.5 − Eβ + 2β², eliminate E between P(β,E) and P(βw,E)
    std::vector<std::string> vars{"beta", "w", "E"};
    auto b = MultiPoly::variable(vars, "beta"), w = MultiPoly::variable(vars, "w"), E = MultiPoly::variable(vars, "E");
    auto one = MultiPoly::constant(vars, 1.0);
    auto P = [&](const MultiPoly& x) { return one * 0.5 - E * x + x * x * 2.0; };
    auto G = resultant(P(b), P(b * w), "E");
    std::mt19937 rng(5);
    std::normal_distribution<double> n01;
    for (int i = 0; i < 10; ++i) {
        cplx beta(n01(rng), n01(rng));
        EXPECT_LT(std::abs(G({beta, 1.0})), 1e-10 * G.magnitude_at(std::vector<cplx>{beta, 1.0}));
    }
}

TEST(Resultant, EvaluationInterpolationSoundness) {
    std::mt19937 rng(9);
    std::normal_distribution<double> n01;
    std::vector<std::string> vars{"x", "y", "z"};
    auto rand_poly = [&](int dx, int dy, int dz) {
        MultiPoly p(vars);
        for (int i = 0; i <= dx; ++i)
            for (int j = 0; j <= dy; ++j)
                for (int k = 0; k <= dz; ++k) p.add_term({i, j, k}, {n01(rng), n01(rng)});
        return p;
    };
    for (int trial = 0; trial < 5; ++trial) {
        auto f = rand_poly(2, 2, 1), g = rand_poly(3, 1, 2);
        auto R = resultant(f, g, "x");
        EXPECT_EQ(R.variables(), (std::vector<std::string>{"y", "z"}));
        cplx y(n01(rng), n01(rng)), z(n01(rng), n01(rng));
        std::vector<cplx> pt{0.0, y, z};
        auto fc = f.coefficients_at(0, pt), gc = g.coefficients_at(0, pt);
        cplx scalar = resultant(UniPoly(fc, 0.0), UniPoly(gc, 0.0));
        EXPECT_LT(rel_err(R({y, z}), scalar), 1e-8);
    }
}

TEST(Resultant, DegreeBudget) {
    std::vector<std::string> vars{"x", "y"};
    auto x = MultiPoly::variable(vars, "x"), y = MultiPoly::variable(vars, "y");
    InterpolationOptions opt;
    opt.max_degree = 4;
    try {
        resultant(x * x + y.pow(3), x + y, "x", opt);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DegreeBudgetExceeded);
    }
}

TEST(MultiPoly, CoefficientsInVariable) {
    std::vector<std::string> vars{"x", "y"};
    auto x = MultiPoly::variable(vars, "x"), y = MultiPoly::variable(vars, "y");
    auto p = x * x * y + x * 2.0 + y * y;
    auto cs = p.coefficients_in(0);
    ASSERT_EQ(cs.size(), 3u);
    EXPECT_EQ(cs[0].terms(), (y * y).terms());
    EXPECT_EQ(cs[1].terms(), MultiPoly::constant(vars, 2.0).terms());
    EXPECT_EQ(cs[2].terms(), y.terms());
    EXPECT_EQ(p.degree("x"), 2);
    EXPECT_EQ(p.total_degree(), 3);
}
