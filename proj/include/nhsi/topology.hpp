#pragma once

// Spectral winding numbers: zero/pole counting, contour phase accumulation,
// per-band windings and rasters over the complex energy plane.

#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nhsi/common.hpp"
#include "nhsi/error.hpp"
#include "nhsi/io.hpp"
#include "nhsi/model.hpp"
#include "nhsi/ordering.hpp"
#include "nhsi/parallel.hpp"
#include "nhsi/spectra.hpp"

namespace nhsi {

inline constexpr double kGuardTol = 1e-4;

/// (# roots of P(·, E_b) inside the unit circle) − p.
inline int winding_bz(const CharPoly& cp, cplx E_b, double guard_tol = kGuardTol) {
    auto ord = ordered_roots(cp, E_b);
    int inside = 0;
    for (cplx r : ord.roots) {
        double m = std::abs(r);
        if (std::fabs(m - 1.0) <= guard_tol)
            throw Error(ErrorKind::OnSpectrum, "root with |β| = " + format_double(m) + " at E_b = " +
                                                   format_double(E_b.real()) + "+" + format_double(E_b.imag()) + "i");
        if (m < 1.0) ++inside;
    }
    return inside - cp.pole_order();
}

/// Closed loop s ∈ [0, 1) → β.
using Contour = std::function<cplx(double)>;

inline Contour circle_contour(cplx center, double radius) {
    return [=](double s) { return center + std::polar(radius, kTwoPi * s); };
}

struct ContourOptions {
    int max_samples = 1 << 22;
    double integer_tol = 0.1;
    /// |det| below this fraction of its term magnitude counts as a hit.
    double hit_tol = 1e-12;
};

/// Winding of det(h(β) − E_b) = P(β, E_b)/β^p along the contour. Uniform
/// samples are doubled until every phase step is below π/4.
inline int winding_contour(const CharPoly& cp, cplx E_b, const Contour& contour, int num_samples = 256,
                           const ContourOptions& opt = {}) {
    if (num_samples < 8) num_samples = 8;
    const int p = cp.pole_order();
    auto phase_at = [&](double s) {
        cplx beta = contour(s);
        if (beta == 0.0) throw Error(ErrorKind::OnSpectrum, "contour passes through β = 0");
        cplx v = cp(beta, E_b);
        if (std::abs(v) <= opt.hit_tol * cp.magnitude(beta, E_b))
            throw Error(ErrorKind::OnSpectrum, "contour passes through a zero at s = " + format_double(s));
        return std::arg(v) - p * std::arg(beta);
    };
    for (int n = num_samples; n <= opt.max_samples; n *= 2) {
        double total = 0.0, prev = phase_at(0.0);
        bool resolved = true;
        for (int j = 1; j <= n && resolved; ++j) {
            double cur = phase_at(j == n ? 0.0 : static_cast<double>(j) / n);
            double d = std::remainder(cur - prev, kTwoPi);
            if (std::fabs(d) >= kPi / 4) resolved = false;
            total += d;
            prev = cur;
        }
        if (!resolved) continue;
        double w = total / kTwoPi;
        double r = std::round(w);
        if (std::fabs(w - r) > opt.integer_tol)
            throw Error(ErrorKind::PhaseUnresolved, "accumulated winding " + format_double(w) + " is not near an integer");
        return static_cast<int>(r);
    }
    throw Error(ErrorKind::PhaseUnresolved, "phase steps stay above π/4 at " + std::to_string(opt.max_samples) + " samples");
}

inline int winding_contour(const Model& model, cplx E_b, const Contour& contour, int num_samples = 256,
                           const ContourOptions& opt = {}) {
    return winding_contour(CharPoly(model), E_b, contour, num_samples, opt);
}

/// Phase accumulated by E_n(k) − E_b along each tracked band over one period,
/// in units of 2π. A band that continues into another across k = 2π is
/// followed up to that band's first sample, so the sum over bands is the
/// total winding even when individual bands are not closed.
inline std::vector<double> band_windings(const Model& model, cplx E_b, int numK = 2048) {
    auto spec = pbc_spectrum(model, numK);
    std::vector<double> out;
    for (const auto& band : spec.bands) {
        double total = 0.0;
        for (std::size_t j = 0; j < band.E.size(); ++j) {
            cplx a = band.E[j] - E_b;
            cplx b = j + 1 < band.E.size() ? band.E[j + 1] - E_b
                                           : spec.bands[static_cast<std::size_t>(band.continues_into)].E.front() - E_b;
            total += std::arg(b / a);
        }
        out.push_back(total / kTwoPi);
    }
    return out;
}

struct Bbox {
    double re_min, re_max, im_min, im_max;
};

struct WindingRaster {
    Bbox bbox{};
    int nx = 0, ny = 0;
    /// Row-major, row j (Im) outer, column i (Re) inner; empty where the
    /// cell centre is within the guard distance of the spectrum.
    std::vector<std::optional<int>> values;

    cplx center(int i, int j) const {
        return {bbox.re_min + (i + 0.5) * (bbox.re_max - bbox.re_min) / nx,
                bbox.im_min + (j + 0.5) * (bbox.im_max - bbox.im_min) / ny};
    }
    const std::optional<int>& at(int i, int j) const {
        return values[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i)];
    }
};

inline WindingRaster winding_raster(const CharPoly& cp, const Bbox& bbox, int nx, int ny, double guard_tol = kGuardTol) {
    if (nx < 16 || ny < 16) throw Error(ErrorKind::InvalidArgument, "raster resolution must be at least 16×16");
    if (!(bbox.re_max > bbox.re_min) || !(bbox.im_max > bbox.im_min))
        throw Error(ErrorKind::InvalidArgument, "empty bounding box");
    WindingRaster r{bbox, nx, ny, std::vector<std::optional<int>>(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny))};
    parallel_for(static_cast<std::size_t>(ny), [&](std::size_t j) {
        for (int i = 0; i < nx; ++i) {
            try {
                r.values[j * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i)] =
                    winding_bz(cp, r.center(i, static_cast<int>(j)), guard_tol);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::OnSpectrum && e.kind() != ErrorKind::DegreeDrop) throw;
            }
        }
    });
    return r;
}

/// Bounding box of the PBC spectrum enlarged by `margin` on every side.
inline Bbox spectrum_bbox(const PbcSpectrum& spec, double margin) {
    Bbox b{INFINITY, -INFINITY, INFINITY, -INFINITY};
    for (const auto& band : spec.bands)
        for (cplx E : band.E) {
            b.re_min = std::min(b.re_min, E.real());
            b.re_max = std::max(b.re_max, E.real());
            b.im_min = std::min(b.im_min, E.imag());
            b.im_max = std::max(b.im_max, E.imag());
        }
    b.re_min -= margin, b.re_max += margin, b.im_min -= margin, b.im_max += margin;
    return b;
}

inline void write_raster_csv(std::ostream& os, const WindingRaster& r) {
    os << "reE,imE,winding\n";
    for (int j = 0; j < r.ny; ++j)
        for (int i = 0; i < r.nx; ++i) {
            cplx c = r.center(i, j);
            const auto& v = r.at(i, j);
            write_csv_row(os, c.real(), c.imag(), v ? std::to_string(*v) : std::string("NA"));
        }
}

} // namespace nhsi
