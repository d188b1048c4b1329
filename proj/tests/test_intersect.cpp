#include <gtest/gtest.h>

#include <random>

#include "nhsi/intersect.hpp"

using namespace nhsi;

namespace {

const SelfIntersection* at_energy(const std::vector<SelfIntersection>& pts, cplx E, double tol) {
    for (const auto& p : pts)
        if (std::abs(p.E0 - E) <= tol) return &p;
    return nullptr;
}

LaurentPoly random_q(std::mt19937& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (;;) {
        LaurentPoly q(std::map<int, cplx>{{-2, {U(rng), U(rng)}}, {-1, {U(rng), U(rng)}}, {0, {1.0 + U(rng), U(rng)}}});
        // |q| must stay away from zero on the unit circle
        double lo = INFINITY;
        for (int s = 0; s < 512; ++s) lo = std::min(lo, std::abs(q(std::polar(1.0, kTwoPi * s / 512))));
        if (lo > 0.1) return q;
    }
}

} // namespace

TEST(Orient2d, ExactSigns) {
    EXPECT_EQ(detail::orient2d({0, 0}, {1, 0}, {0, 1}), 1);
    EXPECT_EQ(detail::orient2d({0, 0}, {1, 0}, {0, -1}), -1);
    EXPECT_EQ(detail::orient2d({0, 0}, {1, 1}, {2, 2}), 0);
    // nearly collinear points where the naive formula loses the sign
    const double e = std::ldexp(1.0, -52);
    EXPECT_EQ(detail::orient2d({0.5, 0.5}, {12, 12}, {24, 24}), 0);
    EXPECT_EQ(detail::orient2d({0.5, 0.5 + e}, {12, 12}, {24, 24}), 1);
    EXPECT_EQ(detail::orient2d({0.5 + e, 0.5}, {12, 12}, {24, 24}), -1);
}

TEST(FindIntersections, TriplePoint) {
    auto res = find_intersections(extended_hn(0.5, 1.5, 0.5, 1.5));
    ASSERT_EQ(res.points.size(), 1u);
    const auto& si = res.points[0];
    EXPECT_LT(std::abs(si.E0), 1e-9);
    ASSERT_EQ(si.n, 3);
    const double expected[] = {kPi / 3, kPi, 5 * kPi / 3};
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(si.solutions[static_cast<std::size_t>(i)].k, expected[i], 1e-8);
        EXPECT_NEAR(std::abs(si.solutions[static_cast<std::size_t>(i)].beta()), 1.0, 1e-15);
    }
}

TEST(FindIntersections, TwoFoldPointsOnUnitTies) {
    struct Case {
        double gamma;
        IndexRange unit;
    };
    for (auto [g, unit] : {Case{-0.3, {3, 4}}, Case{-0.7, {2, 3}}}) {
        Model m = extended_hn_gamma(g);
        CharPoly cp(m);
        auto res = find_intersections(m);
        // three two-fold points each, frozen from the crossing sweep
        ASSERT_EQ(res.points.size(), 3u) << g;
        for (const auto& si : res.points) {
            EXPECT_EQ(si.n, 2);
            auto ord = ordered_roots(cp, si.E0);
            EXPECT_EQ(ord.unit_modulus(), unit) << g;
            for (const auto& s : si.solutions) {
                int i = ord.nearest(s.beta());
                EXPECT_LT(std::abs(ord.root(i) - s.beta()), 1e-8);
                EXPECT_TRUE(unit.contains(i));
                EXPECT_LT(std::abs(bloch_eval(m, s.beta())(0, 0) - si.E0), 1e-9);
            }
        }
    }
}

TEST(FindIntersections, ResolutionIndependent) {
    Model m = extended_hn_gamma(-0.7);
    auto a = find_intersections(m, 512), b = find_intersections(m, 2048);
    ASSERT_EQ(a.points.size(), b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_LT(std::abs(a.points[i].E0 - b.points[i].E0), 1e-10);
}

TEST(FindIntersections, HermitianHasNone) {
    auto res = find_intersections(extended_hn(0, 1, 1, 0));
    EXPECT_TRUE(res.points.empty());
    EXPECT_TRUE(find_intersections(extended_hn(0, 0.5, 2, 0)).points.empty());
}

TEST(FindIntersections, SshCrossBand) {
    Model m = nh_ssh(1, 1, 0.2, 1);
    auto res = find_intersections(m);
    ASSERT_EQ(res.points.size(), 2u);
    EXPECT_LT(std::abs(res.points[0].E0 - cplx(0, -0.6)), 1e-9);
    EXPECT_LT(std::abs(res.points[1].E0 - cplx(0, 0.6)), 1e-9);
    for (const auto& si : res.points) {
        EXPECT_EQ(si.n, 2);
        for (const auto& s : si.solutions) {
            auto ev = detail::bloch_energies(m, s.beta());
            double d = std::min(std::abs(ev[0] - si.E0), std::abs(ev[1] - si.E0));
            EXPECT_LT(d, 1e-9);
        }
    }
}

TEST(FindIntersections, Validation) {
    EXPECT_THROW(find_intersections(extended_hn_gamma(-0.3), 255), Error);
    IntersectOptions opt;
    opt.tol_E = 0.0;
    EXPECT_THROW(find_intersections(extended_hn_gamma(-0.3), 512, opt), Error);
}

TEST(FindIntersections, NfoldConstruction) {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> Phi(0.0, kTwoPi);
    for (int n : {2, 3, 4})
        for (int draw = 0; draw < 5; ++draw) {
            double phi = Phi(rng);
            auto m = nfold_construct(n, phi, random_q(rng));
            auto res = find_intersections(m, 1024);
            const auto* si = at_energy(res.points, 0.0, 1e-8);
            ASSERT_NE(si, nullptr) << n << " " << phi;
            EXPECT_EQ(si->n, n);
            auto expected = nfold_k_solutions(n, phi);
            ASSERT_EQ(si->solutions.size(), expected.size());
            for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(si->solutions[i].k, expected[i], 1e-8);
        }
}

TEST(LocalStructure, TriplePointAlternates) {
    Model m = extended_hn_gamma(-0.5);
    auto si = find_intersections(m).points.at(0);
    auto ls = local_structure(m, si);
    ASSERT_EQ(ls.edges.size(), 6u);
    ASSERT_EQ(ls.sector_windings.size(), 6u);
    for (std::size_t s = 0; s < 6; ++s) EXPECT_EQ(ls.sector_windings[s] + ls.sector_windings[(s + 1) % 6], 1);
    attach_local_structure(si, ls, 2);
    EXPECT_EQ(si.w_min, 0);
    EXPECT_EQ(si.w_max, 1);
    EXPECT_EQ(si.inward_count, 1);
    EXPECT_EQ(si.ordering_indices, (IndexRange{2, 4}));
}

TEST(LocalStructure, TwoFoldProperties) {
    for (const Model& m : {Model(extended_hn_gamma(-0.3)), Model(extended_hn_gamma(-0.7)), nh_ssh(1, 1, 0.2, 1)}) {
        CharPoly cp(m);
        for (auto si : find_intersections(m).points) {
            auto ls = local_structure(m, si);
            ASSERT_EQ(ls.sector_windings.size(), 4u);
            const auto& w = ls.sector_windings;
            EXPECT_EQ(w[0] + w[2], w[1] + w[3]);
            int inward = 0;
            for (const auto& e : ls.edges) inward += e.inward;
            EXPECT_EQ(inward, 2);
            attach_local_structure(si, ls, cp.pole_order());
            EXPECT_EQ(si.w_max - si.w_min, 2);
            EXPECT_EQ(si.n, (si.w_max - si.w_min) + 2 * si.inward_count);
        }
    }
}

TEST(LocalStructure, NfoldIndexAccounting) {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> Phi(0.0, kTwoPi);
    for (int n : {2, 3, 4}) {
        auto m = nfold_construct(n, Phi(rng), random_q(rng));
        auto res = find_intersections(m);
        for (auto si : res.points) {
            auto ls = local_structure(m, si);
            attach_local_structure(si, ls, CharPoly(m).pole_order());
            EXPECT_EQ(si.n, (si.w_max - si.w_min) + 2 * si.inward_count) << n;
            auto rep = verify_nfold_condition(m, si);
            EXPECT_TRUE(rep.pass) << rep.diagnostic;
        }
    }
}

TEST(NfoldCondition, PresetIndices) {
    struct Case {
        Model model;
        IndexRange indices;
    };
    for (const auto& [m, indices] : {Case{extended_hn_gamma(-0.5), {2, 4}}, Case{extended_hn_gamma(-0.3), {3, 4}},
                                     Case{extended_hn_gamma(-0.7), {2, 3}}, Case{nh_ssh(1, 1, 0.2, 1), {2, 3}}}) {
        CharPoly cp(m);
        for (auto si : find_intersections(m).points) {
            attach_local_structure(si, local_structure(m, si), cp.pole_order());
            auto rep = verify_nfold_condition(m, si);
            EXPECT_TRUE(rep.pass) << rep.diagnostic;
            EXPECT_EQ(rep.observed, indices);
            EXPECT_EQ(rep.observed.size(), si.n);
        }
    }
}

TEST(NfoldCondition, FailsWithoutLocalStructure) {
    Model m = extended_hn_gamma(-0.5);
    auto si = find_intersections(m).points.at(0);
    EXPECT_FALSE(verify_nfold_condition(m, si).pass);
}

TEST(BzAgbz, TriplePointPhases) {
    auto pts = bz_agbz_intersections(extended_hn_gamma(-0.5));
    ASSERT_EQ(pts.size(), 3u);
    const double expected[] = {kPi / 3, kPi, 5 * kPi / 3};
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(pts[static_cast<std::size_t>(i)].phi, expected[i], 1e-8);
        EXPECT_LT(std::abs(pts[static_cast<std::size_t>(i)].E), 1e-9);
    }
}

TEST(BzAgbz, HatanoNelsonEmpty) {
    EXPECT_TRUE(bz_agbz_intersections(extended_hn(0, 0.5, 2, 0)).empty());
}

TEST(BzAgbz, SshTwoFoldDegenerate) {
    Model m = nh_ssh(1, 1, 0.2, 1);
    CharPoly cp(m);
    auto pts = bz_agbz_intersections(m);
    ASSERT_EQ(pts.size(), 4u);
    for (const auto& p : pts) {
        auto ord = ordered_roots(cp, p.E);
        EXPECT_EQ(ord.unit_modulus().size(), 2);
    }
}

TEST(Correspondence, PresetsMatch) {
    for (const Model& m : {Model(extended_hn_gamma(-0.3)), Model(extended_hn_gamma(-0.5)),
                           Model(extended_hn_gamma(-0.7)), nh_ssh(1, 1, 0.2, 1)}) {
        auto rep = verify_correspondence(m);
        EXPECT_TRUE(rep.pass);
        for (const auto& v : rep.violations) ADD_FAILURE() << v;
        std::size_t total = 0;
        for (const auto& si : rep.intersections) {
            EXPECT_EQ(static_cast<int>(si.matched_agbz_phases.size()), si.n);
            total += static_cast<std::size_t>(si.n);
        }
        EXPECT_EQ(total, rep.agbz_points.size());
        EXPECT_EQ(rep.matches.size(), total);
    }
}

TEST(Correspondence, HatanoNelsonBothEmpty) {
    auto rep = verify_correspondence(extended_hn(0, 0.5, 2, 0));
    EXPECT_TRUE(rep.pass);
    EXPECT_TRUE(rep.intersections.empty());
    EXPECT_TRUE(rep.agbz_points.empty());
}
