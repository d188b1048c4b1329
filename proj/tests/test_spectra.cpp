#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "nhsi/gbz.hpp"
#include "nhsi/spectra.hpp"

using namespace nhsi;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::InvalidArgument;
}

double nearest_distance(cplx z, std::span<const cplx> set) {
    double best = INFINITY;
    for (cplx s : set) best = std::min(best, std::abs(z - s));
    return best;
}

std::vector<cplx> all_samples(const PbcSpectrum& s) {
    std::vector<cplx> v;
    for (const auto& b : s.bands) v.insert(v.end(), b.E.begin(), b.E.end());
    return v;
}

std::vector<cplx> gbz_betas(const Model& m) {
    CharPoly cp(m);
    auto pts = agbz_sample_theta(cp, default_theta_grid());
    std::vector<cplx> out;
    for (const auto& pt : gbz_extract(pts, cp)) out.push_back(pt.beta);
    return out;
}

} // namespace

TEST(Pbc, SumOfHopsAtKZero) {
    auto s = pbc_spectrum(extended_hn_gamma(-0.3), 64);
    ASSERT_EQ(s.bands.size(), 1u);
    EXPECT_NEAR(std::abs(s.bands[0].E[0] - cplx(4.0)), 0.0, 1e-14);
}

TEST(Pbc, TriplePointOnCurve) {
    auto s = pbc_spectrum(extended_hn_gamma(-0.5), 64);
    EXPECT_DOUBLE_EQ(s.bands[0].k[32], kPi);
    EXPECT_LT(std::abs(s.bands[0].E[32]), 1e-14);
}

TEST(Pbc, OneBandMatchesBlochExactly) {
    auto m = extended_hn_gamma(-0.7);
    auto s = pbc_spectrum(m, 40);
    const auto& c = s.bands[0];
    EXPECT_TRUE(c.closed);
    for (std::size_t j = 0; j < c.k.size(); ++j) {
        EXPECT_EQ(c.E[j], bloch_eval(m, std::polar(1.0, c.k[j]))(0, 0));
        if (j > 0) {
            EXPECT_LT(c.k[j - 1], c.k[j]);
        }
    }
}

TEST(Pbc, SshChiralPairs) {
    auto s = pbc_spectrum(nh_ssh(1, 1, 0.2, 1), 128);
    auto all = all_samples(s);
    for (cplx E : all) EXPECT_LT(nearest_distance(-E, all), 1e-10);
}

TEST(Pbc, RefinementAgreesOnSharedK) {
    for (const Model& m : {Model(extended_hn_gamma(-0.3)), nh_ssh(1, 1, 0.2, 1)}) {
        auto a = pbc_spectrum(m, 50), b = pbc_spectrum(m, 100);
        auto eb = all_samples(b);
        for (const auto& band : a.bands)
            for (std::size_t j = 0; j < band.E.size(); ++j) {
                EXPECT_EQ(band.k[j], b.bands[0].k[2 * j]);
                std::vector<cplx> shared;
                for (const auto& bb : b.bands) shared.push_back(bb.E[2 * j]);
                EXPECT_LT(nearest_distance(band.E[j], shared), 1e-12);
            }
    }
}

TEST(Pbc, TooFewSamples) {
    EXPECT_EQ(kind_of([] { pbc_spectrum(extended_hn_gamma(-0.3), 7); }), ErrorKind::InvalidArgument);
}

TEST(Pbc, DegenerateBandsWarn) {
    // Hermitian SSH at t1 = t2 closes the gap at k = π.
    auto s = pbc_spectrum(nh_ssh(1, 1, 0, 0), 16);
    ASSERT_FALSE(s.warnings.empty());
    EXPECT_EQ(s.warnings.front().kind, ErrorKind::BandTrackingAmbiguous);
    EXPECT_EQ(s.samples(), 16u);
}

TEST(Pbc, CsvLayout) {
    std::ostringstream os;
    write_pbc_csv(os, pbc_spectrum(extended_hn(0, 1, 1, 0), 8));
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "band,k,reE,imE");
    std::getline(is, line);
    EXPECT_EQ(line, "0,0,2,0");
}

TEST(ObcFinite, HermitianThreeSite) {
    auto s = obc_finite(extended_hn(0, 1, 1, 0), 3);
    ASSERT_EQ(s.values.size(), 3u);
    EXPECT_NEAR(s.values[0].real(), -std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(s.values[1].real(), 0.0, 1e-12);
    EXPECT_NEAR(s.values[2].real(), std::sqrt(2.0), 1e-12);
}

TEST(ObcFinite, HatanoNelsonSimilarityOracle) {
    // S H S⁻¹ with S = diag(r^j) is the symmetric chain with hopping √(t1 t-1) = 1.
    auto s = obc_finite(extended_hn(0, 0.5, 2, 0), 20);
    ASSERT_EQ(s.values.size(), 20u);
    for (int j = 1; j <= 20; ++j) {
        cplx expected = 2.0 * std::cos(j * kPi / 21.0);
        EXPECT_LT(nearest_distance(expected, s.values), 1e-8) << j;
    }
}

TEST(ObcFinite, CountIsQL) {
    EXPECT_EQ(obc_finite(extended_hn_gamma(-0.3), 40).values.size(), 40u);
    EXPECT_EQ(obc_finite(nh_ssh(1, 1, 0.2, 1), 20).values.size(), 40u);
}

TEST(ObcFinite, CapOnL) {
    EXPECT_EQ(kind_of([] { obc_finite(extended_hn_gamma(-0.3), 81); }), ErrorKind::TooLargeL);
    EXPECT_EQ(kind_of([] { obc_finite(extended_hn_gamma(-0.3), 1); }), ErrorKind::TooSmallL);
}

TEST(ObcFinite, SshChiralPairs) {
    for (int L : {20, 40, 60}) {
        auto s = obc_finite(nh_ssh(1, 1, 0.2, 1), L);
        for (cplx E : s.values) EXPECT_LT(nearest_distance(-E, s.values), 1e-8) << L;
    }
}

TEST(ObcThermodynamic, HatanoNelsonRealSegment) {
    auto s = obc_thermodynamic(extended_hn(0, 0.5, 2, 0), gbz_betas(extended_hn(0, 0.5, 2, 0)));
    ASSERT_FALSE(s.values.empty());
    double lo = INFINITY, hi = -INFINITY;
    for (cplx E : s.values) {
        EXPECT_LT(std::fabs(E.imag()), 1e-9);
        lo = std::min(lo, E.real());
        hi = std::max(hi, E.real());
    }
    EXPECT_NEAR(lo, -2.0, 1e-3);
    EXPECT_NEAR(hi, 2.0, 1e-3);
}

TEST(ObcThermodynamic, HermitianInsidePbc) {
    Model m = extended_hn(0.3, 1, 1, 0.3);
    auto pbc = all_samples(pbc_spectrum(m, 4096));
    auto obc = obc_thermodynamic(m, gbz_betas(m));
    for (cplx E : obc.values) EXPECT_LT(nearest_distance(E, pbc), 5e-3);
}

TEST(ObcThermodynamic, TriplePointSharedWithPbc) {
    auto obc = obc_thermodynamic(extended_hn_gamma(-0.5), gbz_betas(extended_hn_gamma(-0.5)));
    EXPECT_LT(nearest_distance(0.0, obc.values), 1e-2);
}

TEST(ObcThermodynamic, SshPointsMatch) {
    Model m = nh_ssh(1, 1, 0.2, 1);
    CharPoly cp(m);
    auto betas = gbz_betas(m);
    auto obc = obc_thermodynamic(m, betas);
    EXPECT_FALSE(obc.values.empty());
    // -E lies on the same curve up to the θ-grid spacing
    for (cplx E : obc.values) EXPECT_LT(nearest_distance(-E, obc.values), 0.05);
    for (cplx b : betas) {
        for (cplx ev : obc_thermodynamic(m, std::vector<cplx>{b}).values)
            EXPECT_LT(std::abs(cp(b, ev)), 1e-9 * cp.magnitude(b, ev));
    }
}

TEST(ObcThermodynamic, UnmatchedPoint) {
    std::vector<cplx> bogus{cplx(3.0, 0.0)};
    EXPECT_EQ(kind_of([&] { obc_thermodynamic(nh_ssh(1, 1, 0.2, 1), bogus); }), ErrorKind::UnmatchedGbzPoint);
    EXPECT_EQ(kind_of([] { obc_thermodynamic(extended_hn_gamma(-0.3), {}); }), ErrorKind::InvalidArgument);
}

TEST(ObcThermodynamic, FiniteSizeConvergence) {
    for (double g : {-0.3, -0.5, -0.7}) {
        Model m = extended_hn_gamma(g);
        auto thermo = obc_thermodynamic(m, gbz_betas(m));
        double prev = INFINITY;
        for (int L : {20, 40, 60}) {
            double d = hausdorff_distance(obc_finite(m, L).values, thermo.values);
            EXPECT_LE(d, prev + 1e-3) << "gamma " << g << " L " << L;
            prev = d;
        }
    }
}

TEST(Obc, CsvSource) {
    std::ostringstream os;
    write_obc_csv(os, obc_finite(extended_hn(0, 1, 1, 0), 3));
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "source,reE,imE");
    EXPECT_NE(os.str().find("\nfinite(L=3),"), std::string::npos);
}
