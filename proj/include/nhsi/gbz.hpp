#pragma once

// Auxiliary and generalized Brillouin zones: θ-sweep sampling, the implicit
// real curve F(Re β, Im β) = 0 from resultant elimination, GBZ extraction
// and zero counting inside polygonized sub-boundaries.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nhsi/common.hpp"
#include "nhsi/error.hpp"
#include "nhsi/io.hpp"
#include "nhsi/model.hpp"
#include "nhsi/ordering.hpp"
#include "nhsi/parallel.hpp"
#include "nhsi/polyalg.hpp"

namespace nhsi {

struct AgbzPoint {
    cplx beta;
    cplx E;
    /// Tie group of β in the root ordering at E; (i, i+1) on a generic arc.
    IndexRange label;
    /// Phase θ of the partner root β e^{iθ}.
    double theta = 0.0;
};

struct AgbzOptions {
    double tie_tol = kTieTol;
    double dedup_tol = 1e-8;
    /// Relative residual accepted after (β, E) Newton polishing.
    double residual_tol = 1e-10;
};

/// θ_j = 2πj/n for j = 1 .. n−1.
inline std::vector<double> default_theta_grid(int n = 720) {
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "θ grid needs at least 2 intervals");
    std::vector<double> g;
    for (int j = 1; j < n; ++j) g.push_back(kTwoPi * j / n);
    return g;
}

namespace detail {

/// Coefficients of G_θ(β) = Res_E[P(β,E), P(βw,E)] in β, by sampling on the
/// unit circle. Degree bound 2qD.
inline std::vector<cplx> theta_resultant(const CharPoly& cp, cplx w, double& hadamard_peak) {
    const int deg = 2 * cp.bands() * cp.beta_degree();
    const int n = deg + 1;
    std::vector<cplx> values(static_cast<std::size_t>(n));
    hadamard_peak = 0.0;
    for (int a = 0; a < n; ++a) {
        cplx beta = std::polar(1.0, kTwoPi * a / n);
        auto f = cp.energy_coeffs(beta), g = cp.energy_coeffs(beta * w);
        values[static_cast<std::size_t>(a)] = sylvester_determinant(f, g);
        hadamard_peak = std::max(hadamard_peak, sylvester_hadamard_bound(f, g));
    }
    inverse_dft_tensor(values, {n});
    return values;
}

/// Newton on P(β,E) = P(βw,E) = 0.
inline bool polish_pair(const CharPoly& cp, cplx w, cplx& beta, cplx& E, double tol) {
    for (int it = 0; it < 40; ++it) {
        cplx f1 = cp(beta, E), f2 = cp(beta * w, E);
        Eigen::Matrix2cd J;
        J << cp.d_beta(beta, E), cp.d_E(beta, E), w * cp.d_beta(beta * w, E), cp.d_E(beta * w, E);
        Eigen::Vector2cd rhs(f1, f2);
        Eigen::Vector2cd step = J.fullPivLu().solve(rhs);
        if (!std::isfinite(std::abs(step(0))) || !std::isfinite(std::abs(step(1)))) break;
        beta -= step(0);
        E -= step(1);
        if (std::abs(step(0)) <= 1e-15 * std::max(1.0, std::abs(beta)) &&
            std::abs(step(1)) <= 1e-15 * std::max(1.0, std::abs(E)))
            break;
    }
    double r1 = std::abs(cp(beta, E)) / cp.magnitude(beta, E);
    double r2 = std::abs(cp(beta * w, E)) / cp.magnitude(beta * w, E);
    return std::max(r1, r2) <= tol;
}

} // namespace detail

/// Tie group of β among the roots at E, when β is a root sharing its modulus
/// with at least one other root.
inline std::optional<IndexRange> agbz_label(const CharPoly& cp, cplx beta, cplx E, double tie_tol = kTieTol) {
    auto ord = ordered_roots(cp, E, tie_tol);
    int i = ord.nearest(beta);
    if (std::abs(ord.root(i) - beta) > 1e-6 * std::max(1.0, std::abs(beta))) return std::nullopt;
    const auto& g = ord.group_of(i);
    if (g.size() < 2) return std::nullopt;
    return g;
}

/// Checks β against every eigenvalue of h(β); returns the first tie label.
inline std::optional<AgbzPoint> is_agbz_point(const CharPoly& cp, cplx beta, double tie_tol = kTieTol) {
    for (cplx E : cp.energies(beta))
        if (auto label = agbz_label(cp, beta, E, tie_tol)) return AgbzPoint{beta, E, *label, 0.0};
    return std::nullopt;
}

/// For each θ: eliminate E between P(β,E) and P(βe^{iθ},E), root-find in β,
/// recover E from the shared roots, polish, and keep candidates whose root
/// ordering places β and βe^{iθ} in a common tie group.
inline std::vector<AgbzPoint> agbz_sample_theta(const CharPoly& cp, std::span<const double> theta_grid,
                                                const AgbzOptions& opt = {}) {
    for (double th : theta_grid)
        if (!(th > 0.0 && th < kTwoPi))
            throw Error(ErrorKind::InvalidArgument, "θ grid must lie strictly inside (0, 2π)");
    std::vector<std::vector<AgbzPoint>> per_theta(theta_grid.size());
    parallel_for(theta_grid.size(), [&](std::size_t idx) {
        const double theta = theta_grid[idx];
        const cplx w = std::polar(1.0, theta);
        double peak = 0.0;
        auto G = detail::theta_resultant(cp, w, peak);
        double big = 0.0;
        for (cplx c : G) big = std::max(big, std::abs(c));
        if (big <= 1e-13 * peak)
            throw Error(ErrorKind::EliminationDegenerate, "resultant vanishes identically at θ = " + format_double(theta));
        // strip the β^m factor and near-zero leading terms
        std::size_t lo = 0;
        while (lo < G.size() && std::abs(G[lo]) <= 1e-11 * big) ++lo;
        UniPoly g(std::vector<cplx>(G.begin() + static_cast<std::ptrdiff_t>(lo), G.end()), 1e-11);
        if (g.degree() < 1) return;
        RootOptions ro;
        ro.tol = 1e-6;
        auto betas = poly_roots(g, ro);

        auto& out = per_theta[idx];
        for (cplx b0 : betas) {
            if (std::abs(b0) < 1e-10) continue;
            for (cplx E0 : cp.energies(b0)) {
                cplx beta = b0, E = E0;
                if (std::abs(cp(beta * w, E)) > 1e-4 * cp.magnitude(beta * w, E)) continue;
                if (!detail::polish_pair(cp, w, beta, E, opt.residual_tol)) continue;
                RootOrdering ord;
                try {
                    ord = ordered_roots(cp, E, opt.tie_tol);
                } catch (const Error&) {
                    continue;
                }
                int i = ord.nearest(beta), j = ord.nearest(beta * w);
                const double tol = 1e-7;
                if (i == j || std::abs(ord.root(i) - beta) > tol * std::max(1.0, std::abs(beta)) ||
                    std::abs(ord.root(j) - beta * w) > tol * std::max(1.0, std::abs(beta)))
                    continue;
                const auto& group = ord.group_of(i);
                if (!group.contains(j)) continue;
                bool dup = false;
                for (const auto& q : out)
                    if (std::abs(q.beta - beta) <= opt.dedup_tol * std::max(1.0, std::abs(beta)) &&
                        std::abs(q.E - E) <= opt.dedup_tol * std::max(1.0, std::abs(E)))
                        dup = true;
                if (!dup) out.push_back({beta, E, group, theta});
            }
        }
    });
    std::vector<AgbzPoint> all;
    for (auto& v : per_theta) all.insert(all.end(), v.begin(), v.end());
    std::stable_sort(all.begin(), all.end(), [](const AgbzPoint& a, const AgbzPoint& b) {
        if (a.label != b.label) return a.label < b.label;
        double pa = phase_2pi(a.beta), pb = phase_2pi(b.beta);
        if (pa != pb) return pa < pb;
        return a.theta < b.theta;
    });
    return all;
}

/// Points on the GBZ: tie group contains both p and p+1.
inline std::vector<AgbzPoint> gbz_extract(std::span<const AgbzPoint> points, const CharPoly& cp) {
    const int p = cp.pole_order();
    std::vector<AgbzPoint> out;
    for (const auto& pt : points)
        if (pt.label.contains(p) && pt.label.contains(p + 1)) out.push_back(pt);
    return out;
}

/// Distinct β values lying on ∂B_{i,i+1}.
inline std::vector<cplx> sub_boundary(std::span<const AgbzPoint> points, int i, double dedup_tol = 1e-8) {
    std::vector<cplx> out;
    for (const auto& pt : points)
        if (pt.label.contains(i) && pt.label.contains(i + 1)) out.push_back(pt.beta);
    std::sort(out.begin(), out.end(), energy_less);
    std::vector<cplx> unique;
    for (cplx b : out) {
        bool dup = false;
        for (auto it = unique.rbegin(); it != unique.rend() && it->real() >= b.real() - dedup_tol * std::max(1.0, std::abs(b)); ++it)
            if (std::abs(*it - b) <= dedup_tol * std::max(1.0, std::abs(b))) dup = true;
        if (!dup) unique.push_back(b);
    }
    return unique;
}

// ---------------------------------------------------------------------------
// Polygonization and zero counting
// ---------------------------------------------------------------------------

struct Polygonization {
    std::vector<std::vector<cplx>> loops;
    double median_spacing = 0.0;
    /// Longest straight segment inserted to close chains.
    double max_bridge = 0.0;
};

/// Nearest-neighbour chaining. Chains break where no unvisited point lies
/// within `gap_factor` × median spacing. Chain ends are then joined
/// greedily, shortest bridge first, until every chain is a closed loop;
/// a bridge longer than `bridge_factor` × median spacing means the curve
/// cannot be closed (OpenCurve).
inline Polygonization polygonize(std::span<const cplx> pts, double gap_factor = 5.0, double bridge_factor = 60.0) {
    Polygonization out;
    const std::size_t n = pts.size();
    if (n < 3) throw Error(ErrorKind::OpenCurve, "fewer than three points");
    std::vector<double> nn(n, INFINITY);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (a != b) nn[a] = std::min(nn[a], std::abs(pts[a] - pts[b]));
    std::vector<double> sorted = nn;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2), sorted.end());
    out.median_spacing = std::max(sorted[n / 2], 1e-12);
    const double gap = gap_factor * out.median_spacing;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return energy_less(pts[a], pts[b]); });
    std::vector<bool> used(n, false);
    std::vector<std::vector<cplx>> chains;
    for (std::size_t start : order) {
        if (used[start]) continue;
        std::vector<cplx> chain{pts[start]};
        used[start] = true;
        // grow from both ends so a start in mid-arc does not split the arc
        for (int side = 0; side < 2; ++side) {
            for (;;) {
                cplx tip = side == 0 ? chain.back() : chain.front();
                std::size_t best = n;
                double bd = INFINITY;
                for (std::size_t c = 0; c < n; ++c)
                    if (!used[c] && std::abs(pts[c] - tip) < bd) bd = std::abs(pts[c] - tip), best = c;
                if (best == n || bd > gap) break;
                used[best] = true;
                if (side == 0) chain.push_back(pts[best]);
                else chain.insert(chain.begin(), pts[best]);
            }
        }
        chains.push_back(std::move(chain));
    }

    // greedy end-to-end joining; a chain whose own ends are closest closes
    struct End {
        std::size_t chain;
        bool back;
    };
    std::vector<bool> alive(chains.size(), true);
    for (;;) {
        double best = INFINITY;
        End ea{0, false}, eb{0, false};
        bool any = false;
        for (std::size_t a = 0; a < chains.size(); ++a) {
            if (!alive[a]) continue;
            any = true;
            double self = std::abs(chains[a].front() - chains[a].back());
            if (chains[a].size() >= 3 && self < best) best = self, ea = {a, true}, eb = {a, false};
            for (std::size_t b = a + 1; b < chains.size(); ++b) {
                if (!alive[b]) continue;
                for (int sa = 0; sa < 2; ++sa)
                    for (int sb = 0; sb < 2; ++sb) {
                        cplx pa = sa ? chains[a].back() : chains[a].front();
                        cplx pb = sb ? chains[b].back() : chains[b].front();
                        double d = std::abs(pa - pb);
                        if (d < best) best = d, ea = {a, sa == 1}, eb = {b, sb == 1};
                    }
            }
        }
        if (!any) break;
        if (best > bridge_factor * out.median_spacing)
            throw Error(ErrorKind::OpenCurve, "closing the curve needs a bridge of " + format_double(best) +
                                                  " (median spacing " + format_double(out.median_spacing) + ")");
        out.max_bridge = std::max(out.max_bridge, best);
        if (ea.chain == eb.chain) {
            out.loops.push_back(std::move(chains[ea.chain]));
            alive[ea.chain] = false;
            continue;
        }
        auto& A = chains[ea.chain];
        auto& B = chains[eb.chain];
        if (!ea.back) std::reverse(A.begin(), A.end());
        if (eb.back) std::reverse(B.begin(), B.end());
        A.insert(A.end(), B.begin(), B.end());
        alive[eb.chain] = false;
    }
    return out;
}

/// Even-odd point-in-polygon test over all loops.
inline bool inside(const Polygonization& poly, cplx z) {
    bool in = false;
    for (const auto& loop : poly.loops)
        for (std::size_t a = 0, b = loop.size() - 1; a < loop.size(); b = a++) {
            cplx pa = loop[a], pb = loop[b];
            if ((pa.imag() > z.imag()) != (pb.imag() > z.imag())) {
                double x = pa.real() + (z.imag() - pa.imag()) * (pb.real() - pa.real()) / (pb.imag() - pa.imag());
                if (z.real() < x) in = !in;
            }
        }
    return in;
}

/// Number of roots of P(·, E) strictly inside the polygonized ∂B_{i,i+1}.
/// Sub-boundaries that run off to β = ∞ are polygonized in z = 1/β, where
/// they pass through z = 0; the β = 0 side is then the outside of the loop.
inline int sub_boundary_zero_count(std::span<const AgbzPoint> points, int i, const CharPoly& cp, cplx E,
                                   double gap_factor = 5.0) {
    auto pts = sub_boundary(points, i);
    auto roots = ordered_roots(cp, E).roots;
    try {
        auto poly = polygonize(pts, gap_factor);
        return static_cast<int>(std::count_if(roots.begin(), roots.end(), [&](cplx r) { return inside(poly, r); }));
    } catch (const Error& direct) {
        if (direct.kind() != ErrorKind::OpenCurve) throw;
        std::vector<cplx> inv;
        for (cplx b : pts)
            if (b != 0.0) inv.push_back(1.0 / b);
        Polygonization poly;
        try {
            poly = polygonize(inv, gap_factor);
        } catch (const Error&) {
            throw direct;
        }
        int outside = 0;
        for (cplx r : roots)
            if (r == 0.0 || !inside(poly, 1.0 / r)) ++outside;
        return outside;
    }
}

// ---------------------------------------------------------------------------
// Implicit curve
// ---------------------------------------------------------------------------

struct ImplicitOptions {
    int max_degree = 512;
    std::size_t max_points = std::size_t{1} << 21;
    double prune_tol = 1e-13;
};

/// F(x, y) with x = Re β, y = Im β. Also keeps the real and imaginary parts
/// A(u, v, t), B(u, v, t) (u = β, v = β̄) whose t-resultant is F, so that F
/// can be evaluated stably as a Sylvester determinant.
struct ImplicitCurve {
    MultiPoly F;     ///< variables (x, y); max |c_ij| = 1
    MultiPoly F_uv;  ///< same curve in (u, v), same normalization
    MultiPoly A, B;  ///< variables (u, v, t)

    /// |F(β)| relative to the Hadamard bound of its Sylvester matrix; of
    /// order 1 away from the curve and zero on it.
    double relative_value(cplx beta) const {
        std::vector<cplx> pt{beta, std::conj(beta), 0.0};
        auto fa = A.coefficients_at(2, pt), fb = B.coefficients_at(2, pt);
        double h = sylvester_hadamard_bound(fa, fb);
        if (h == 0.0) return 0.0;
        return std::abs(sylvester_determinant(fa, fb)) / h;
    }

    /// Signed real value of the Sylvester determinant divided by its
    /// Hadamard bound. The sign is meaningful along a continuous path.
    double signed_value(cplx beta) const {
        std::vector<cplx> pt{beta, std::conj(beta), 0.0};
        auto fa = A.coefficients_at(2, pt), fb = B.coefficients_at(2, pt);
        double h = sylvester_hadamard_bound(fa, fb);
        if (h == 0.0) return 0.0;
        return sylvester_determinant(fa, fb).real() / h;
    }

    /// F from the exported (x, y) coefficients.
    cplx value(double x, double y) const { return F({x, y}); }
};

namespace detail {

/// Σ f_ab u^a v^b → Σ c_ij x^i y^j with u = x + iy, v = x − iy, by
/// binomial expansion of (x+iy)^a (x−iy)^b.
inline MultiPoly uv_to_xy(const MultiPoly& f) {
    const int top = std::max(0, std::max(f.degree(0), f.degree(1)));
    // (x + iy)^a = Σ_k plus[a][k] x^{a−k} y^k, similarly for (x − iy)^b
    std::vector<std::vector<cplx>> plus(static_cast<std::size_t>(top) + 1), minus(static_cast<std::size_t>(top) + 1);
    plus[0] = minus[0] = {1.0};
    for (int a = 1; a <= top; ++a) {
        auto& pa = plus[static_cast<std::size_t>(a)];
        auto& ma = minus[static_cast<std::size_t>(a)];
        const auto& pp = plus[static_cast<std::size_t>(a) - 1];
        const auto& mp = minus[static_cast<std::size_t>(a) - 1];
        pa.assign(static_cast<std::size_t>(a) + 1, 0.0);
        ma.assign(static_cast<std::size_t>(a) + 1, 0.0);
        for (int k = 0; k < a; ++k) {
            pa[static_cast<std::size_t>(k)] += pp[static_cast<std::size_t>(k)];
            pa[static_cast<std::size_t>(k) + 1] += cplx(0, 1) * pp[static_cast<std::size_t>(k)];
            ma[static_cast<std::size_t>(k)] += mp[static_cast<std::size_t>(k)];
            ma[static_cast<std::size_t>(k) + 1] += cplx(0, -1) * mp[static_cast<std::size_t>(k)];
        }
    }
    std::map<std::pair<int, int>, cplx> acc;
    for (const auto& [e, c] : f.terms()) {
        const int a = e[0], b = e[1];
        const auto& pa = plus[static_cast<std::size_t>(a)];
        const auto& mb = minus[static_cast<std::size_t>(b)];
        for (int k = 0; k <= a; ++k)
            for (int l = 0; l <= b; ++l) {
                int ypow = k + l;
                acc[{a + b - ypow, ypow}] += c * pa[static_cast<std::size_t>(k)] * mb[static_cast<std::size_t>(l)];
            }
    }
    MultiPoly out({"x", "y"});
    for (const auto& [e, c] : acc)
        if (c != 0.0) out.add_term({e.first, e.second}, c);
    return out;
}

} // namespace detail

/// G(β,w) = Res_E[P(β,E), P(βw,E)]; strip β and w powers; w = (1+it)/(1−it)
/// with denominators cleared; strip t^m; split into real and imaginary parts
/// A, B as polynomials in (β, β̄, t); F = Res_t[A, B].
inline ImplicitCurve agbz_implicit(const CharPoly& cp, const ImplicitOptions& opt = {}) {
    const std::vector<std::string> bwE{"beta", "w", "E"};
    MultiPoly P1(bwE), P2(bwE);
    for (int j = 0; j <= cp.bands(); ++j)
        for (int b = 0; b <= cp.beta_degree(); ++b)
            if (cplx c = cp.coefficient(j, b); c != 0.0) {
                P1.add_term({b, 0, j}, c);
                P2.add_term({b, b, j}, c);
            }
    InterpolationOptions io;
    io.max_degree = opt.max_degree;
    io.max_points = opt.max_points;
    io.prune_tol = opt.prune_tol;
    MultiPoly G = resultant(P1, P2, "E", io).pruned(1e-12);
    if (G.is_zero()) throw Error(ErrorKind::IdenticallyZero, "Res_E vanishes identically");
    G = G.divided_by_power(0, G.min_degree(0)).divided_by_power(1, G.min_degree(1));

    // Weierstrass substitution in w
    const int dw = G.degree(1);
    const std::vector<std::string> bt{"beta", "t"};
    const cplx I(0.0, 1.0);
    MultiPoly one = MultiPoly::constant(bt, 1.0), t = MultiPoly::variable(bt, "t");
    MultiPoly plus = one + t * I, minus = one - t * I;
    std::vector<MultiPoly> plus_pow{one}, minus_pow{one};
    for (int k = 1; k <= dw; ++k) {
        plus_pow.push_back(plus_pow.back() * plus);
        minus_pow.push_back(minus_pow.back() * minus);
    }
    MultiPoly H(bt);
    for (const auto& [e, c] : G.terms()) {
        MultiPoly term = plus_pow[static_cast<std::size_t>(e[1])] * minus_pow[static_cast<std::size_t>(dw - e[1])];
        for (const auto& [et, ct] : term.terms()) H.add_term({e[0], et[1]}, c * ct);
    }
    H = H.pruned(1e-12);
    if (H.is_zero()) throw Error(ErrorKind::IdenticallyZero, "substituted resultant vanishes");
    H = H.divided_by_power(1, H.min_degree(1));
    if (H.degree(1) < 1)
        throw Error(ErrorKind::IdenticallyZero, "no t dependence left after removing the θ = 0 factor");

    // real and imaginary parts in conjugate coordinates
    const std::vector<std::string> uvt{"u", "v", "t"};
    ImplicitCurve curve{MultiPoly({"x", "y"}), MultiPoly({"u", "v"}), MultiPoly(uvt), MultiPoly(uvt)};
    for (const auto& [e, c] : H.terms()) {
        curve.A.add_term({e[0], 0, e[1]}, c / 2.0);
        curve.A.add_term({0, e[0], e[1]}, std::conj(c) / 2.0);
        curve.B.add_term({e[0], 0, e[1]}, c / (2.0 * I));
        curve.B.add_term({0, e[0], e[1]}, -std::conj(c) / (2.0 * I));
    }
    if (curve.A.degree(2) < 1 || curve.B.degree(2) < 1)
        throw Error(ErrorKind::IdenticallyZero, "real or imaginary part is free of t");

    MultiPoly Fuv = resultant(curve.A, curve.B, "t", io);
    double scale = Fuv.max_abs_coefficient();
    if (scale == 0.0) throw Error(ErrorKind::IdenticallyZero, "Res_t of real and imaginary parts vanishes");
    curve.F_uv = Fuv.pruned(opt.prune_tol) * cplx(1.0 / scale);
    MultiPoly Fxy = detail::uv_to_xy(curve.F_uv);
    double sxy = Fxy.max_abs_coefficient();
    if (sxy == 0.0) throw Error(ErrorKind::IdenticallyZero, "F vanishes after change of variables");
    curve.F = (Fxy * cplx(1.0 / sxy)).pruned(1e-15);
    return curve;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

inline void write_agbz_csv(std::ostream& os, std::span<const AgbzPoint> pts) {
    os << "reBeta,imBeta,labelLow,labelHigh,theta,reE,imE\n";
    for (const auto& p : pts)
        write_csv_row(os, p.beta.real(), p.beta.imag(), p.label.low, p.label.high, p.theta, p.E.real(), p.E.imag());
}

/// JSON list of [i, j, re c_ij, im c_ij] in ascending (i, j).
inline void write_implicit_json(std::ostream& os, const ImplicitCurve& curve) {
    os << "[";
    bool first = true;
    for (const auto& [e, c] : curve.F.terms()) {
        os << (first ? "\n  " : ",\n  ") << "[" << e[0] << ", " << e[1] << ", " << format_double(c.real()) << ", "
           << format_double(c.imag()) << "]";
        first = false;
    }
    os << "\n]\n";
}

} // namespace nhsi
