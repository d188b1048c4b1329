#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

namespace nhsi {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Relative magnitude below which a polynomial coefficient is treated as zero.
inline constexpr double kCoeffZeroTol = 1e-12;

/// Phase of z mapped to [0, 2π).
inline double phase_2pi(cplx z) {
    double a = std::arg(z);
    return a < 0.0 ? a + kTwoPi : a;
}

/// Reduces an angle to [0, 2π).
inline double wrap_2pi(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    if (a >= kTwoPi) a = 0.0;
    return a;
}

/// Distance between two angles on the circle, in [0, π].
inline double circular_distance(double a, double b) {
    double d = std::fabs(wrap_2pi(a) - wrap_2pi(b));
    return std::min(d, kTwoPi - d);
}

/// Sorts by modulus ascending; runs of moduli equal within `rel_tol` are
/// ordered by phase in [0, 2π).
inline void sort_by_modulus_phase(std::vector<cplx>& values, double rel_tol = 1e-9) {
    std::sort(values.begin(), values.end(),
              [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
    std::size_t start = 0;
    while (start < values.size()) {
        std::size_t end = start + 1;
        while (end < values.size() &&
               std::abs(values[end]) - std::abs(values[end - 1]) <=
                   rel_tol * std::max(std::abs(values[end]), 1e-300))
            ++end;
        std::sort(values.begin() + static_cast<std::ptrdiff_t>(start),
                  values.begin() + static_cast<std::ptrdiff_t>(end),
                  [](cplx a, cplx b) { return phase_2pi(a) < phase_2pi(b); });
        start = end;
    }
}

/// Canonical order for energies: by real part, then imaginary part.
inline bool energy_less(cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

/// Symmetric Hausdorff distance between two finite point sets.
inline double hausdorff_distance(std::span<const cplx> a, std::span<const cplx> b) {
    auto directed = [](std::span<const cplx> from, std::span<const cplx> to) {
        double worst = 0.0;
        for (cplx p : from) {
            double best = INFINITY;
            for (cplx q : to) best = std::min(best, std::abs(p - q));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

} // namespace nhsi
