#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "nhsi/topology.hpp"

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

std::set<int> raster_values(const Model& m, int n = 80) {
    CharPoly cp(m);
    auto r = winding_raster(cp, spectrum_bbox(pbc_spectrum(m, 512), 0.5), n, n);
    std::set<int> out;
    for (const auto& v : r.values)
        if (v) out.insert(*v);
    return out;
}

} // namespace

TEST(WindingBz, Examples) {
    CharPoly hn(extended_hn(0, 0.5, 2, 0));
    EXPECT_EQ(winding_bz(hn, 0.0), 1);
    EXPECT_EQ(winding_bz(hn, cplx(0, 4)), 0);
    EXPECT_EQ(winding_bz(CharPoly(extended_hn(0, 1, 1, 0)), 5.0), 0);
}

TEST(WindingBz, OnSpectrumGuard) {
    Model m = extended_hn_gamma(-0.3);
    cplx on = bloch_eval(m, std::polar(1.0, 0.7))(0, 0);
    EXPECT_EQ(kind_of([&] { winding_bz(CharPoly(m), on); }), ErrorKind::OnSpectrum);
}

TEST(WindingContour, UnitCircleMatchesRootCount) {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> U(-3, 3);
    std::vector<Model> models{extended_hn(0, 0.5, 2, 0), extended_hn_gamma(-0.3), extended_hn_gamma(-0.5),
                              extended_hn_gamma(-0.7), nh_ssh(1, 1, 0.2, 1)};
    int draws = 0;
    while (draws < 50) {
        const Model& m = models[static_cast<std::size_t>(draws) % models.size()];
        CharPoly cp(m);
        cplx E(U(rng), U(rng));
        int expected;
        try {
            expected = winding_bz(cp, E);
        } catch (const Error&) {
            continue;
        }
        EXPECT_EQ(winding_contour(cp, E, circle_contour(0.0, 1.0)), expected) << E;
        ++draws;
    }
}

TEST(WindingContour, LargeAndTinyCircles) {
    CharPoly hn(extended_hn(0, 0.5, 2, 0));
    // two zeros and one pole inside radius 3
    EXPECT_EQ(winding_contour(hn, 1.0, circle_contour(0.0, 3.0)), 1);
    EXPECT_EQ(winding_contour(hn, 1.0, circle_contour(cplx(1.5, 1.5), 1e-3)), 0);
}

TEST(WindingContour, Unresolved) {
    ContourOptions opt;
    opt.max_samples = 8;
    CharPoly cp(extended_hn_gamma(-0.3));
    EXPECT_EQ(kind_of([&] { winding_contour(cp, 1.0, circle_contour(0.0, 3.0), 8, opt); }), ErrorKind::PhaseUnresolved);
}

TEST(WindingContour, HitsZero) {
    CharPoly hn(extended_hn(0, 0.5, 2, 0));
    // roots at E = 0 are ±0.5i
    EXPECT_EQ(kind_of([&] { winding_contour(hn, 0.0, circle_contour(0.0, 0.5), 8); }), ErrorKind::OnSpectrum);
}

TEST(WindingRaster, ExtendedHatanoNelsonValueSets) {
    EXPECT_EQ(raster_values(extended_hn_gamma(-0.3)), (std::set<int>{0, 1, 2}));
    EXPECT_EQ(raster_values(extended_hn_gamma(-0.5)), (std::set<int>{0, 1}));
    EXPECT_EQ(raster_values(extended_hn_gamma(-0.7)), (std::set<int>{-1, 0, 1}));
}

TEST(WindingRaster, RangeBound) {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> U(-1.2, 1.2);
    for (int d = 0; d < 6; ++d) {
        Model m = extended_hn(U(rng), U(rng), U(rng), U(rng));
        for (int v : raster_values(m, 32)) {
            EXPECT_GE(v, -2);
            EXPECT_LE(v, 2);
        }
    }
}

TEST(WindingRaster, UndefinedCellsAndCsv) {
    CharPoly cp(extended_hn(0, 1, 1, 0));
    auto r = winding_raster(cp, {-3, 3, -0.1, 0.1}, 16, 17);
    int na = 0;
    for (int i = 0; i < 16; ++i) {
        if (!r.at(i, 8)) ++na;
        EXPECT_EQ(r.at(i, 0), std::optional<int>(0));
    }
    EXPECT_GT(na, 0);
    std::ostringstream os;
    write_raster_csv(os, r);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "reE,imE,winding");
    EXPECT_NE(os.str().find(",NA\n"), std::string::npos);
    EXPECT_EQ(kind_of([&] { winding_raster(cp, {-1, 1, -1, 1}, 15, 16); }), ErrorKind::InvalidArgument);
}

TEST(WindingRaster, ThreadCountIndependent) {
    CharPoly cp(extended_hn_gamma(-0.7));
    Bbox b{-3, 5, -3, 3};
    set_max_threads(1);
    auto a = winding_raster(cp, b, 24, 24);
    set_max_threads(0);
    auto c = winding_raster(cp, b, 24, 24);
    EXPECT_EQ(a.values, c.values);
}

TEST(CrossingRule, LeftMinusRightIsOne) {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> K(0.0, kTwoPi);
    for (double g : {-0.3, -0.7}) {
        OneBandModel m = extended_hn_gamma(g);
        CharPoly cp(m);
        auto curve = pbc_spectrum(m, 4096).bands[0].E;
        int tested = 0;
        while (tested < 20) {
            double k = K(rng);
            cplx beta = std::polar(1.0, k);
            cplx E = bloch_eval(m, beta)(0, 0);
            cplx tangent = 0.0;  // dE/dk = iβ h'(β)
            for (const auto& [n, t] : m.hops()) tangent += cplx(0, 1) * static_cast<double>(n) * t * std::pow(beta, n);
            if (std::abs(tangent) < 1e-2) continue;
            const double delta = 1e-3;
            cplx normal = cplx(0, 1) * tangent / std::abs(tangent);
            // skip points near another branch of the curve
            bool isolated = true;
            for (std::size_t j = 0; j < curve.size() && isolated; ++j) {
                double kj = kTwoPi * static_cast<double>(j) / static_cast<double>(curve.size());
                if (circular_distance(kj, k) > 0.05 && std::abs(curve[j] - E) < 20 * delta) isolated = false;
            }
            if (!isolated) continue;
            ++tested;
            EXPECT_EQ(winding_bz(cp, E + delta * normal) - winding_bz(cp, E - delta * normal), 1) << g << " " << k;
        }
    }
}

TEST(MultiBand, SshSumOfBandWindings) {
    Model m = nh_ssh(1, 1, 0.2, 1);
    CharPoly cp(m);
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> U(-2.5, 2.5);
    int tested = 0;
    std::set<int> seen;
    while (tested < 20) {
        cplx E(U(rng), U(rng));
        int w;
        try {
            w = winding_bz(cp, E, 1e-2);
        } catch (const Error&) {
            continue;
        }
        ++tested;
        seen.insert(w);
        auto per_band = band_windings(m, E);
        ASSERT_EQ(per_band.size(), 2u);
        double total = per_band[0] + per_band[1];
        EXPECT_NEAR(total, w, 1e-6) << E;
        EXPECT_EQ(winding_contour(m, E, circle_contour(0.0, 1.0)), w);
    }
    EXPECT_GT(seen.size(), 1u);
}
