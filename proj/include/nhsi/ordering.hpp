#pragma once

// Roots of P(·, E) ordered by modulus, with tie groups of equal modulus.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "nhsi/common.hpp"
#include "nhsi/error.hpp"
#include "nhsi/model.hpp"
#include "nhsi/polyalg.hpp"

namespace nhsi {

inline constexpr double kTieTol = 1e-6;

/// Closed 1-based index range [low, high].
struct IndexRange {
    int low = 0;
    int high = -1;

    int size() const { return high - low + 1; }
    bool empty() const { return high < low; }
    bool contains(int i) const { return low <= i && i <= high; }
    bool contains(const IndexRange& r) const { return r.empty() || (low <= r.low && r.high <= high); }
    friend bool operator==(const IndexRange&, const IndexRange&) = default;
    friend auto operator<=>(const IndexRange&, const IndexRange&) = default;
};

inline std::string to_string(const IndexRange& r) {
    return "[" + std::to_string(r.low) + "," + std::to_string(r.high) + "]";
}

struct RootOrdering {
    cplx E;
    /// β_1 … β_D ascending by modulus, ties ordered by phase.
    std::vector<cplx> roots;
    /// Maximal runs of equal modulus (within tie_tol), as 1-based ranges
    /// covering 1..D in order.
    std::vector<IndexRange> tie_groups;

    int degree() const { return static_cast<int>(roots.size()); }
    cplx root(int i) const { return roots[static_cast<std::size_t>(i - 1)]; }

    const IndexRange& group_of(int i) const {
        for (const auto& g : tie_groups)
            if (g.contains(i)) return g;
        throw Error(ErrorKind::InvalidArgument, "root index " + std::to_string(i) + " out of range");
    }

    /// True when |β_i| = |β_{i+1}| within the tie tolerance.
    bool tied(int i) const {
        return i >= 1 && i < degree() && group_of(i).contains(i + 1);
    }

    /// 1-based index of the root closest to β.
    int nearest(cplx beta) const {
        int best = 1;
        for (int i = 2; i <= degree(); ++i)
            if (std::abs(root(i) - beta) < std::abs(root(best) - beta)) best = i;
        return best;
    }

    /// Indices whose modulus is within `tol` of 1; empty range when none.
    /// Unit-modulus roots form a contiguous run because the list is sorted.
    IndexRange unit_modulus(double tol = kTieTol) const {
        IndexRange r{0, -1};
        for (int i = 1; i <= degree(); ++i)
            if (std::fabs(std::abs(root(i)) - 1.0) <= tol) {
                if (r.empty()) r.low = i;
                r.high = i;
            }
        return r;
    }
};

/// Orders the D roots of P(·, E). Throws DegreeDrop when the β^D coefficient
/// vanishes at this E.
inline RootOrdering ordered_roots(const CharPoly& cp, cplx E, double tie_tol = kTieTol) {
    auto coeffs = cp.beta_coeffs(E);
    double big = 0.0;
    for (cplx c : coeffs) big = std::max(big, std::abs(c));
    if (std::abs(coeffs.back()) <= kCoeffZeroTol * big)
        throw Error(ErrorKind::DegreeDrop, "leading β coefficient vanishes at E = " + std::to_string(E.real()) + "+" +
                                               std::to_string(E.imag()) + "i");
    RootOrdering out;
    out.E = E;
    out.roots = poly_roots(UniPoly(std::move(coeffs), 0.0));
    const int D = out.degree();
    int start = 1;
    for (int i = 2; i <= D + 1; ++i) {
        bool same = i <= D && std::abs(out.root(i)) - std::abs(out.root(i - 1)) <=
                                  tie_tol * std::max(std::abs(out.root(i)), 1e-300);
        if (!same) {
            out.tie_groups.push_back({start, i - 1});
            start = i;
        }
    }
    return out;
}

} // namespace nhsi
