#pragma once

// PBC spectra with band tracking, finite OBC spectra, and thermodynamic OBC
// spectra obtained by inserting GBZ points into h(β).

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "nhsi/common.hpp"
#include "nhsi/error.hpp"
#include "nhsi/io.hpp"
#include "nhsi/model.hpp"
#include "nhsi/ordering.hpp"
#include "nhsi/parallel.hpp"

namespace nhsi {

struct SpectrumCurve {
    int band = 0;
    std::vector<double> k;
    std::vector<cplx> E;
    /// Band whose k = 0 sample continues this band past k → 2π.
    int continues_into = 0;
    bool closed = true;
};

struct PbcSpectrum {
    std::vector<SpectrumCurve> bands;
    Warnings warnings;

    std::size_t samples() const { return bands.empty() ? 0 : bands.front().k.size(); }
};

namespace detail {

/// Eigenvalues of h(β) in canonical (Re, Im) order.
inline std::vector<cplx> bloch_energies(const Model& model, cplx beta) {
    if (model.bands() == 1) return {model.entry(0, 0)(beta)};
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(model.bloch(beta), false);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::NonConvergence, "Bloch eigenvalue solve failed");
    std::vector<cplx> v(es.eigenvalues().begin(), es.eigenvalues().end());
    std::sort(v.begin(), v.end(), energy_less);
    return v;
}

/// Assignment next[perm[b]] ↔ prev[b] minimising Σ|ΔE|. Exhaustive for few
/// bands, greedy otherwise.
inline std::vector<int> match_bands(std::span<const cplx> prev, std::span<const cplx> next) {
    const int q = static_cast<int>(prev.size());
    std::vector<int> perm(static_cast<std::size_t>(q));
    std::iota(perm.begin(), perm.end(), 0);
    if (q == 1) return perm;
    if (q <= 6) {
        std::vector<int> best = perm;
        double best_cost = INFINITY;
        do {
            double cost = 0.0;
            for (int b = 0; b < q; ++b)
                cost += std::abs(prev[static_cast<std::size_t>(b)] - next[static_cast<std::size_t>(perm[static_cast<std::size_t>(b)])]);
            if (cost < best_cost) best_cost = cost, best = perm;
        } while (std::next_permutation(perm.begin(), perm.end()));
        return best;
    }
    std::vector<bool> used(static_cast<std::size_t>(q), false);
    for (int b = 0; b < q; ++b) {
        int pick = -1;
        for (int c = 0; c < q; ++c)
            if (!used[static_cast<std::size_t>(c)] &&
                (pick < 0 || std::abs(prev[static_cast<std::size_t>(b)] - next[static_cast<std::size_t>(c)]) <
                                 std::abs(prev[static_cast<std::size_t>(b)] - next[static_cast<std::size_t>(pick)])))
                pick = c;
        used[static_cast<std::size_t>(pick)] = true;
        perm[static_cast<std::size_t>(b)] = pick;
    }
    return perm;
}

} // namespace detail

inline constexpr double kBandTrackingTol = 1e-6;

/// Samples k_j = 2πj/numK, j = 0..numK−1, and tracks bands by
/// nearest-neighbour continuation in E.
inline PbcSpectrum pbc_spectrum(const Model& model, int numK) {
    if (numK < 8) throw Error(ErrorKind::InvalidArgument, "numK must be at least 8, got " + std::to_string(numK));
    const int q = model.bands();
    const auto n = static_cast<std::size_t>(numK);
    std::vector<std::vector<cplx>> raw(n);
    parallel_for(n, [&](std::size_t j) {
        raw[j] = detail::bloch_energies(model, std::polar(1.0, kTwoPi * static_cast<double>(j) / numK));
    });

    PbcSpectrum out;
    out.bands.resize(static_cast<std::size_t>(q));
    for (int b = 0; b < q; ++b) {
        auto& c = out.bands[static_cast<std::size_t>(b)];
        c.band = b;
        c.k.resize(n);
        c.E.resize(n);
    }
    std::vector<cplx> current = raw[0];
    for (std::size_t j = 0; j < n; ++j) {
        if (j > 0) {
            auto perm = detail::match_bands(current, raw[j]);
            for (int b = 0; b < q; ++b) current[static_cast<std::size_t>(b)] = raw[j][static_cast<std::size_t>(perm[static_cast<std::size_t>(b)])];
        }
        const double k = kTwoPi * static_cast<double>(j) / numK;
        for (int b = 0; b < q; ++b) {
            out.bands[static_cast<std::size_t>(b)].k[j] = k;
            out.bands[static_cast<std::size_t>(b)].E[j] = current[static_cast<std::size_t>(b)];
        }
        for (int a = 0; a < q; ++a)
            for (int b = a + 1; b < q; ++b) {
                cplx ea = current[static_cast<std::size_t>(a)], eb = current[static_cast<std::size_t>(b)];
                if (std::abs(ea - eb) <= kBandTrackingTol * std::max({1.0, std::abs(ea), std::abs(eb)}))
                    out.warnings.push_back({ErrorKind::BandTrackingAmbiguous,
                                            "bands " + std::to_string(a) + " and " + std::to_string(b) +
                                                " coincide at k = " + format_double(k)});
            }
    }
    // continuation across k = 2π
    auto wrap = detail::match_bands(current, raw[0]);
    for (int b = 0; b < q; ++b) {
        auto& c = out.bands[static_cast<std::size_t>(b)];
        c.continues_into = wrap[static_cast<std::size_t>(b)];
        c.closed = c.continues_into == b;
    }
    return out;
}

enum class ObcSource { Finite, Thermodynamic };

struct ObcSpectrum {
    ObcSource source = ObcSource::Finite;
    int L = 0;
    /// Sorted by (Re E, Im E).
    std::vector<cplx> values;
};

inline constexpr int kDefaultMaxL = 80;

inline ObcSpectrum obc_finite(const Model& model, int L, int max_L = kDefaultMaxL) {
    if (L > max_L)
        throw Error(ErrorKind::TooLargeL, "L = " + std::to_string(L) + " exceeds the cap " + std::to_string(max_L) +
                                              "; OBC eigenvalues of non-normal chains lose accuracy beyond it");
    Eigen::MatrixXcd H = real_space_hamiltonian(model, L, Boundary::OBC);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(H, false);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::NonConvergence, "OBC eigenvalue solve failed");
    ObcSpectrum out{ObcSource::Finite, L, {es.eigenvalues().begin(), es.eigenvalues().end()}};
    std::sort(out.values.begin(), out.values.end(), energy_less);
    return out;
}

/// E(β) for β on the GBZ. For several bands every eigenvalue of h(β) is kept
/// whose root ordering places β in the tie group spanning (p, p+1); with
/// chiral symmetry both E and −E qualify at the same β.
inline ObcSpectrum obc_thermodynamic(const Model& model, std::span<const cplx> gbz_betas) {
    if (gbz_betas.empty()) throw Error(ErrorKind::InvalidArgument, "no GBZ points supplied");
    ObcSpectrum out{ObcSource::Thermodynamic, 0, {}};
    if (model.bands() == 1) {
        for (cplx beta : gbz_betas) out.values.push_back(bloch_eval(model, beta)(0, 0));
    } else {
        CharPoly cp(model);
        const int p = cp.pole_order();
        std::vector<std::vector<cplx>> per_point(gbz_betas.size());
        parallel_for(gbz_betas.size(), [&](std::size_t i) {
            cplx beta = gbz_betas[i];
            for (cplx E : detail::bloch_energies(model, beta)) {
                auto ord = ordered_roots(cp, E);
                int near = ord.nearest(beta);
                const auto& g = ord.group_of(near);
                if (g.contains(p) && g.contains(p + 1) &&
                    std::abs(ord.root(near) - beta) <= 1e-6 * std::max(1.0, std::abs(beta)))
                    per_point[i].push_back(E);
            }
            if (per_point[i].empty())
                throw Error(ErrorKind::UnmatchedGbzPoint, "β = " + format_double(beta.real()) + "+" +
                                                              format_double(beta.imag()) + "i is not a (p,p+1) root at any eigenvalue");
        });
        for (const auto& v : per_point) out.values.insert(out.values.end(), v.begin(), v.end());
    }
    std::sort(out.values.begin(), out.values.end(), energy_less);
    return out;
}

inline void write_pbc_csv(std::ostream& os, const PbcSpectrum& s) {
    os << "band,k,reE,imE\n";
    for (const auto& c : s.bands)
        for (std::size_t j = 0; j < c.k.size(); ++j) write_csv_row(os, c.band, c.k[j], c.E[j].real(), c.E[j].imag());
}

inline void write_obc_csv(std::ostream& os, const ObcSpectrum& s, bool header = true) {
    if (header) os << "source,reE,imE\n";
    std::string src = s.source == ObcSource::Finite ? "finite(L=" + std::to_string(s.L) + ")" : "thermodynamic";
    for (cplx E : s.values) write_csv_row(os, src, E.real(), E.imag());
}

} // namespace nhsi
