#pragma once

// Self-intersections of the PBC spectrum, their local winding structure,
// the unit-modulus index condition, and the correspondence with points where
// the aGBZ meets the Brillouin zone.

#include <algorithm>
#include <numeric>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nhsi/common.hpp"
#include "nhsi/error.hpp"
#include "nhsi/gbz.hpp"
#include "nhsi/io.hpp"
#include "nhsi/model.hpp"
#include "nhsi/ordering.hpp"
#include "nhsi/parallel.hpp"
#include "nhsi/spectra.hpp"
#include "nhsi/topology.hpp"

namespace nhsi {

// ---------------------------------------------------------------------------
// Exact orientation predicate
// ---------------------------------------------------------------------------

namespace detail {

inline void two_sum(double a, double b, double& s, double& e) {
    s = a + b;
    double bv = s - a;
    e = (a - (s - bv)) + (b - bv);
}

inline void two_product(double a, double b, double& p, double& e) {
    p = a * b;
    e = std::fma(a, b, -p);
}

/// Sign of the exact sum of the given doubles (nonoverlapping expansion).
inline int exact_sign(std::span<const double> terms) {
    std::vector<double> h;
    for (double t : terms) {
        double q = t;
        std::vector<double> next;
        for (double c : h) {
            double s, e;
            two_sum(q, c, s, e);
            if (e != 0.0) next.push_back(e);
            q = s;
        }
        if (q != 0.0) next.push_back(q);
        h = std::move(next);
    }
    // components grow in magnitude; the largest one carries the sign
    if (h.empty()) return 0;
    return h.back() > 0 ? 1 : -1;
}

/// Exact sign of (b − a) × (c − a).
inline int orient2d(cplx a, cplx b, cplx c) {
    double det = (b.real() - a.real()) * (c.imag() - a.imag()) - (b.imag() - a.imag()) * (c.real() - a.real());
    double bound = 1e-15 * (std::fabs((b.real() - a.real()) * (c.imag() - a.imag())) +
                            std::fabs((b.imag() - a.imag()) * (c.real() - a.real())));
    if (std::fabs(det) > bound) return det > 0 ? 1 : -1;
    // (bx−ax)(cy−ay) − (by−ay)(cx−ax) expanded into exactly representable pieces
    double d[4][2];
    two_sum(b.real(), -a.real(), d[0][0], d[0][1]);
    two_sum(c.imag(), -a.imag(), d[1][0], d[1][1]);
    two_sum(b.imag(), -a.imag(), d[2][0], d[2][1]);
    two_sum(c.real(), -a.real(), d[3][0], d[3][1]);
    std::vector<double> terms;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double p, e;
            two_product(d[0][i], d[1][j], p, e);
            terms.push_back(p), terms.push_back(e);
            two_product(d[2][i], d[3][j], p, e);
            terms.push_back(-p), terms.push_back(-e);
        }
    return exact_sign(terms);
}

struct Segment {
    cplx a, b;
    int band = 0;
    double k0 = 0.0, dk = 0.0;
    std::size_t id = 0, next = 0;
    double xmin() const { return std::min(a.real(), b.real()); }
    double xmax() const { return std::max(a.real(), b.real()); }
    double ymin() const { return std::min(a.imag(), b.imag()); }
    double ymax() const { return std::max(a.imag(), b.imag()); }
};

/// Segment parameters (s, t) of a crossing, or nothing for disjoint or
/// collinear pairs. Endpoint touches count.
inline std::optional<std::pair<double, double>> segment_crossing(const Segment& p, const Segment& q) {
    int o1 = orient2d(p.a, p.b, q.a), o2 = orient2d(p.a, p.b, q.b);
    int o3 = orient2d(q.a, q.b, p.a), o4 = orient2d(q.a, q.b, p.b);
    if (o1 == 0 && o2 == 0) return std::nullopt;
    if (o1 * o2 > 0 || o3 * o4 > 0) return std::nullopt;
    cplx r = p.b - p.a, s = q.b - q.a, w = q.a - p.a;
    double den = r.real() * s.imag() - r.imag() * s.real();
    if (den == 0.0) return std::nullopt;
    double t_p = (w.real() * s.imag() - w.imag() * s.real()) / den;
    double t_q = (w.real() * r.imag() - w.imag() * r.real()) / den;
    return std::pair{std::clamp(t_p, 0.0, 1.0), std::clamp(t_q, 0.0, 1.0)};
}

struct PairSolution {
    double k1, k2;
    cplx E;
};

struct NewtonOptions {
    double step_tol = 1e-12;
    int max_iterations = 50;
    double residual_tol = 1e-10;
};

/// Newton on P(e^{ik1}, E) = P(e^{ik2}, E) = 0 in (k1, k2, Re E, Im E).
inline std::optional<PairSolution> refine_pair(const CharPoly& cp, double k1, double k2, cplx E,
                                               const NewtonOptions& opt = {}) {
    const cplx I(0.0, 1.0);
    const double s1 = std::max(cp.magnitude(std::polar(1.0, k1), E), 1e-300);
    const double s2 = std::max(cp.magnitude(std::polar(1.0, k2), E), 1e-300);
    bool converged = false;
    for (int it = 0; it < opt.max_iterations; ++it) {
        cplx b1 = std::polar(1.0, k1), b2 = std::polar(1.0, k2);
        cplx r1 = cp(b1, E) / s1, r2 = cp(b2, E) / s2;
        cplx a1 = cp.d_beta(b1, E) * I * b1 / s1, e1 = cp.d_E(b1, E) / s1;
        cplx a2 = cp.d_beta(b2, E) * I * b2 / s2, e2 = cp.d_E(b2, E) / s2;
        Eigen::Matrix4d J;
        J << a1.real(), 0.0, e1.real(), -e1.imag(),  //
            a1.imag(), 0.0, e1.imag(), e1.real(),    //
            0.0, a2.real(), e2.real(), -e2.imag(),   //
            0.0, a2.imag(), e2.imag(), e2.real();
        Eigen::Vector4d f(r1.real(), r1.imag(), r2.real(), r2.imag());
        Eigen::FullPivLU<Eigen::Matrix4d> lu(J);
        if (!lu.isInvertible()) return std::nullopt;
        Eigen::Vector4d dx = lu.solve(-f);
        if (!dx.allFinite()) return std::nullopt;
        k1 += dx[0];
        k2 += dx[1];
        E += cplx(dx[2], dx[3]);
        if (std::fabs(dx[0]) + std::fabs(dx[1]) + std::abs(cplx(dx[2], dx[3])) / (1.0 + std::abs(E)) <= opt.step_tol) {
            converged = true;
            break;
        }
    }
    cplx b1 = std::polar(1.0, k1), b2 = std::polar(1.0, k2);
    if (!converged) {
        // stagnation at round-off level still counts when the residual is tiny
        if (std::abs(cp(b1, E)) > 1e-13 * cp.magnitude(b1, E) || std::abs(cp(b2, E)) > 1e-13 * cp.magnitude(b2, E))
            return std::nullopt;
    }
    if (std::abs(cp(b1, E)) > opt.residual_tol * cp.magnitude(b1, E) ||
        std::abs(cp(b2, E)) > opt.residual_tol * cp.magnitude(b2, E))
        return std::nullopt;
    return PairSolution{wrap_2pi(k1), wrap_2pi(k2), E};
}

/// dE/dk along the branch through (e^{ik}, E).
inline cplx branch_tangent(const CharPoly& cp, double k, cplx E) {
    cplx b = std::polar(1.0, k);
    return -cp.d_beta(b, E) * cplx(0.0, 1.0) * b / cp.d_E(b, E);
}

/// Eigenvalue of h(e^{ik}) closest to `guess`.
inline cplx branch_energy(const Model& model, double k, cplx guess) {
    auto ev = bloch_energies(model, std::polar(1.0, k));
    return *std::min_element(ev.begin(), ev.end(),
                             [&](cplx a, cplx b) { return std::abs(a - guess) < std::abs(b - guess); });
}

} // namespace detail

// ---------------------------------------------------------------------------
// Self-intersections
// ---------------------------------------------------------------------------

struct KSolution {
    double k = 0.0;
    int band = 0;
    cplx beta() const { return std::polar(1.0, k); }
};

struct SelfIntersection {
    cplx E0;
    int n = 0;
    /// Sorted by k.
    std::vector<KSolution> solutions;
    // Filled by local_structure.
    bool has_local_structure = false;
    int w_min = 0, w_max = 0;
    int inward_count = 0;
    /// [l_min − inward + 1, l_max + inward] with l = p + w.
    IndexRange ordering_indices;
    // Filled by verify_correspondence.
    std::vector<double> matched_agbz_phases;
};

struct IntersectOptions {
    double tol_E = 1e-6;
    detail::NewtonOptions newton;
    /// |sin| of the angle between the two branch tangents below which a
    /// coincidence is treated as a touching, not a crossing.
    double transversality_tol = 1e-6;
};

struct IntersectionResult {
    std::vector<SelfIntersection> points;
    Warnings warnings;
};

inline IntersectionResult find_intersections(const Model& model, int numK = 1024, const IntersectOptions& opt = {}) {
    if (numK < 256) throw Error(ErrorKind::InvalidArgument, "numK must be at least 256, got " + std::to_string(numK));
    if (!(opt.tol_E > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol_E must be positive");
    CharPoly cp(model);
    auto pbc = pbc_spectrum(model, numK);
    IntersectionResult out;
    out.warnings = pbc.warnings;

    const double dk = kTwoPi / numK;
    const auto n = static_cast<std::size_t>(numK);
    std::vector<detail::Segment> segs;
    for (const auto& band : pbc.bands)
        for (std::size_t j = 0; j < n; ++j) {
            detail::Segment s;
            s.a = band.E[j];
            s.b = j + 1 < n ? band.E[j + 1] : pbc.bands[static_cast<std::size_t>(band.continues_into)].E[0];
            s.band = band.band;
            s.k0 = band.k[j];
            s.dk = dk;
            s.id = segs.size();
            s.next = j + 1 < n ? s.id + 1 : static_cast<std::size_t>(band.continues_into) * n;
            segs.push_back(s);
        }

    struct Candidate {
        double k1, k2;
        int band1, band2;
        cplx E;
    };
    std::vector<Candidate> candidates;
    std::vector<std::size_t> order(segs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return segs[a].xmin() < segs[b].xmin(); });
    for (std::size_t ii = 0; ii < order.size(); ++ii) {
        const auto& p = segs[order[ii]];
        for (std::size_t jj = ii + 1; jj < order.size() && segs[order[jj]].xmin() <= p.xmax(); ++jj) {
            const auto& q = segs[order[jj]];
            if (q.ymin() > p.ymax() || q.ymax() < p.ymin()) continue;
            if (p.next == q.id || q.next == p.id) continue;
            auto st = detail::segment_crossing(p, q);
            if (!st) continue;
            candidates.push_back({p.k0 + st->first * dk, q.k0 + st->second * dk, p.band, q.band,
                                  p.a + st->first * (p.b - p.a)});
        }
    }

    const double min_sep = 1e-3 * dk;
    std::vector<std::optional<detail::PairSolution>> refined(candidates.size());
    std::vector<int> diverged(candidates.size(), 0);
    parallel_for(candidates.size(), [&](std::size_t i) {
        const auto& c = candidates[i];
        auto sol = detail::refine_pair(cp, c.k1, c.k2, c.E, opt.newton);
        if (!sol) {
            diverged[i] = 1;
            return;
        }
        if (circular_distance(sol->k1, sol->k2) <= min_sep) return;
        cplx t1 = detail::branch_tangent(cp, sol->k1, sol->E), t2 = detail::branch_tangent(cp, sol->k2, sol->E);
        double cross = (std::conj(t1) * t2).imag();
        if (!std::isfinite(cross) || std::fabs(cross) <= opt.transversality_tol * std::abs(t1) * std::abs(t2)) return;
        refined[i] = sol;
    });
    if (auto dropped = std::count(diverged.begin(), diverged.end(), 1); dropped > 0)
        out.warnings.push_back({ErrorKind::NewtonDivergence,
                                std::to_string(dropped) + " of " + std::to_string(candidates.size()) +
                                    " crossing candidates dropped after refinement failed"});

    // band of a k solution: tracked band whose nearest sample is closest in E
    auto band_at = [&](double k, cplx E) {
        auto j = static_cast<std::size_t>(std::lround(wrap_2pi(k) / dk)) % n;
        int best = 0;
        for (int b = 1; b < static_cast<int>(pbc.bands.size()); ++b)
            if (std::abs(pbc.bands[static_cast<std::size_t>(b)].E[j] - E) <
                std::abs(pbc.bands[static_cast<std::size_t>(best)].E[j] - E))
                best = b;
        return best;
    };

    std::vector<detail::PairSolution> sols;
    for (const auto& r : refined)
        if (r) sols.push_back(*r);
    std::sort(sols.begin(), sols.end(), [](const auto& a, const auto& b) { return energy_less(a.E, b.E); });
    std::vector<int> cluster(sols.size(), -1);
    int nclusters = 0;
    for (std::size_t i = 0; i < sols.size(); ++i) {
        if (cluster[i] >= 0) continue;
        cluster[i] = nclusters;
        std::vector<std::size_t> stack{i};
        while (!stack.empty()) {
            std::size_t a = stack.back();
            stack.pop_back();
            for (std::size_t b = 0; b < sols.size(); ++b)
                if (cluster[b] < 0 && std::abs(sols[a].E - sols[b].E) <= opt.tol_E) {
                    cluster[b] = nclusters;
                    stack.push_back(b);
                }
        }
        ++nclusters;
    }
    for (int c = 0; c < nclusters; ++c) {
        SelfIntersection si;
        cplx sum = 0.0;
        int members = 0;
        for (std::size_t i = 0; i < sols.size(); ++i) {
            if (cluster[i] != c) continue;
            sum += sols[i].E;
            ++members;
            for (double k : {sols[i].k1, sols[i].k2}) {
                bool dup = false;
                for (const auto& s : si.solutions)
                    if (circular_distance(s.k, k) <= 1e-7) dup = true;
                if (!dup) si.solutions.push_back({k, 0});
            }
        }
        si.E0 = sum / static_cast<double>(members);
        for (auto& s : si.solutions) s.band = band_at(s.k, si.E0);
        std::sort(si.solutions.begin(), si.solutions.end(), [](const auto& a, const auto& b) { return a.k < b.k; });
        si.n = static_cast<int>(si.solutions.size());
        out.points.push_back(std::move(si));
    }
    std::sort(out.points.begin(), out.points.end(), [](const auto& a, const auto& b) { return energy_less(a.E0, b.E0); });
    for (std::size_t a = 0; a < out.points.size(); ++a)
        for (std::size_t b = a + 1; b < out.points.size(); ++b)
            if (std::abs(out.points[a].E0 - out.points[b].E0) <= 2 * opt.tol_E)
                out.warnings.push_back({ErrorKind::ClusterAmbiguous,
                                        "intersections at E = " + format_double(out.points[a].E0.real()) + "+" +
                                            format_double(out.points[a].E0.imag()) + "i lie within 2 tol_E of each other"});
    return out;
}

// ---------------------------------------------------------------------------
// Local structure
// ---------------------------------------------------------------------------

struct LocalEdge {
    double angle = 0.0;
    bool inward = false;
};

struct LocalStructure {
    double radius = 0.0;
    /// Sorted by angle in [0, 2π).
    std::vector<LocalEdge> edges;
    /// sector_windings[s] lies between edges[s] and edges[s+1] (cyclic).
    std::vector<int> sector_windings;
};

namespace detail {

/// Point where the branch through (k_s, E0) leaves the disk |E − E0| < r,
/// walking in direction `dir` (±1) of k. Nothing if the branch does not
/// leave monotonically within the allotted steps.
inline std::optional<std::pair<double, cplx>> branch_exit(const Model& model, const CharPoly& cp, double k_s, cplx E0,
                                                          double r, int dir) {
    double speed = std::abs(branch_tangent(cp, k_s, E0));
    if (!(speed > 0.0) || !std::isfinite(speed)) return std::nullopt;
    const double step = r / (8.0 * speed);
    double k_prev = k_s, d_prev = 0.0;
    cplx E_prev = E0;
    for (int i = 1; i <= 64; ++i) {
        double k = k_s + dir * step * i;
        cplx guess = E_prev + (E_prev - E0) / static_cast<double>(i > 1 ? i - 1 : 1);
        cplx E = branch_energy(model, k, i == 1 ? E0 + dir * step * branch_tangent(cp, k_s, E0) : guess);
        double d = std::abs(E - E0);
        if (d < d_prev) return std::nullopt;
        if (d >= r) {
            double lo = k_prev, hi = k;
            cplx E_lo = E_prev;
            for (int b = 0; b < 60; ++b) {
                double mid = 0.5 * (lo + hi);
                cplx Em = branch_energy(model, mid, E_lo);
                if (std::abs(Em - E0) < r) lo = mid, E_lo = Em;
                else hi = mid;
            }
            return std::pair{hi, branch_energy(model, hi, E_lo)};
        }
        k_prev = k, d_prev = d, E_prev = E;
    }
    return std::nullopt;
}

} // namespace detail

inline constexpr double kMinLocalRadius = 1e-8;

/// Edges where the 2n branch halves cross |E − E0| = r and the windings of
/// the sectors between them. The radius is halved until exactly these
/// branches meet the disk.
inline LocalStructure local_structure(const Model& model, const SelfIntersection& si, double radius = 1e-2,
                                      int numK = 4096) {
    CharPoly cp(model);
    auto pbc = pbc_spectrum(model, numK);
    const double dk = kTwoPi / numK;
    for (double r = radius; r >= kMinLocalRadius; r *= 0.5) {
        LocalStructure ls;
        ls.radius = r;
        bool ok = true;
        std::vector<double> window;
        for (const auto& s : si.solutions) {
            for (int dir : {-1, 1}) {
                auto exit = detail::branch_exit(model, cp, s.k, si.E0, r, dir);
                if (!exit) {
                    ok = false;
                    break;
                }
                ls.edges.push_back({phase_2pi(exit->second - si.E0), dir < 0});
            }
            if (!ok) break;
            window.push_back(2.0 * r / std::abs(detail::branch_tangent(cp, s.k, si.E0)) + 2 * dk);
        }
        if (!ok) continue;
        // nothing else of the spectrum may enter the disk
        for (const auto& band : pbc.bands) {
            for (std::size_t j = 0; j < band.E.size() && ok; ++j) {
                double d = std::abs(band.E[j] - si.E0);
                cplx next = j + 1 < band.E.size() ? band.E[j + 1]
                                                  : pbc.bands[static_cast<std::size_t>(band.continues_into)].E[0];
                double spacing = std::abs(next - band.E[j]);
                if (d > r + spacing) continue;
                bool near_solution = false;
                for (std::size_t s = 0; s < si.solutions.size(); ++s)
                    if (circular_distance(band.k[j], si.solutions[s].k) < window[s]) near_solution = true;
                if (!near_solution) ok = false;
            }
        }
        if (!ok) continue;
        std::sort(ls.edges.begin(), ls.edges.end(), [](const auto& a, const auto& b) { return a.angle < b.angle; });
        const std::size_t m = ls.edges.size();
        for (std::size_t e = 0; e < m && ok; ++e) {
            double a0 = ls.edges[e].angle;
            double a1 = e + 1 < m ? ls.edges[e + 1].angle : ls.edges[0].angle + kTwoPi;
            if (a1 - a0 <= 1e-9) {
                ok = false;
                break;
            }
            try {
                ls.sector_windings.push_back(winding_bz(cp, si.E0 + std::polar(r, 0.5 * (a0 + a1)), 1e-12));
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::OnSpectrum) throw;
                ok = false;
            }
        }
        if (ok) return ls;
    }
    throw Error(ErrorKind::RadiusUnderflow, "branches at E0 = " + format_double(si.E0.real()) + "+" +
                                                format_double(si.E0.imag()) + "i are inseparable above radius " +
                                                format_double(kMinLocalRadius));
}

/// Fills w_min, w_max, the inward count and the expected unit-modulus
/// indices. The inward count is taken over the n edges met when rotating
/// counterclockwise from a minimal-winding sector to the opposite one, which
/// must then have maximal winding.
inline void attach_local_structure(SelfIntersection& si, const LocalStructure& ls, int pole_order) {
    const auto& w = ls.sector_windings;
    const int m = static_cast<int>(w.size());
    si.w_min = *std::min_element(w.begin(), w.end());
    si.w_max = *std::max_element(w.begin(), w.end());
    int start = -1;
    for (int s = 0; s < m && start < 0; ++s)
        if (w[static_cast<std::size_t>(s)] == si.w_min && w[static_cast<std::size_t>((s + si.n) % m)] == si.w_max) start = s;
    if (start < 0) start = static_cast<int>(std::min_element(w.begin(), w.end()) - w.begin());
    si.inward_count = 0;
    for (int e = 1; e <= si.n; ++e)
        if (ls.edges[static_cast<std::size_t>((start + e) % m)].inward) ++si.inward_count;
    si.ordering_indices = {pole_order + si.w_min - si.inward_count + 1, pole_order + si.w_max + si.inward_count};
    si.has_local_structure = true;
}

struct NfoldReport {
    bool pass = false;
    IndexRange expected;
    IndexRange observed;
    /// Tie group containing the unit-modulus roots.
    IndexRange tie_group;
    std::string diagnostic;
};

inline NfoldReport verify_nfold_condition(const Model& model, const SelfIntersection& si, double unit_tol = 1e-6) {
    NfoldReport rep;
    rep.expected = si.ordering_indices;
    auto ord = ordered_roots(CharPoly(model), si.E0);
    rep.observed = ord.unit_modulus(unit_tol);
    if (!rep.observed.empty()) rep.tie_group = ord.group_of(rep.observed.low);
    rep.pass = si.has_local_structure && rep.observed == rep.expected && rep.tie_group == rep.observed &&
               rep.observed.size() == si.n;
    rep.diagnostic = "expected " + to_string(rep.expected) + ", observed unit-modulus " + to_string(rep.observed) +
                     ", tie group " + to_string(rep.tie_group) + ", n = " + std::to_string(si.n);
    return rep;
}

// ---------------------------------------------------------------------------
// aGBZ ∩ BZ
// ---------------------------------------------------------------------------

struct BzAgbzPoint {
    double phi = 0.0;
    cplx E;
};

struct BzScanOptions {
    int samples = 4096;
    detail::NewtonOptions newton;
};

/// Unit-circle points of the aGBZ. Candidates are sign changes and local
/// minima of the implicit curve along β = e^{iφ}; each is polished together
/// with its partner phase and kept only if the root ordering ties it.
inline std::vector<BzAgbzPoint> bz_agbz_intersections(const Model& model, const ImplicitCurve& curve,
                                                      const BzScanOptions& opt = {}) {
    CharPoly cp(model);
    const int N = opt.samples;
    std::vector<double> sv(static_cast<std::size_t>(N)), rv(static_cast<std::size_t>(N));
    parallel_for(static_cast<std::size_t>(N), [&](std::size_t j) {
        cplx b = std::polar(1.0, kTwoPi * static_cast<double>(j) / N);
        sv[j] = curve.signed_value(b);
        rv[j] = curve.relative_value(b);
    });
    std::vector<double> cand;
    for (int j = 0; j < N; ++j) {
        auto at = [&](int i) { return static_cast<std::size_t>(((i % N) + N) % N); };
        double phi = kTwoPi * j / N;
        if (rv[at(j)] == 0.0) cand.push_back(phi);
        if (sv[at(j)] * sv[at(j + 1)] < 0.0) {
            // bisection on the signed value
            double lo = phi, hi = kTwoPi * (j + 1) / N, flo = sv[at(j)];
            for (int it = 0; it < 50; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = curve.signed_value(std::polar(1.0, mid));
                if ((fm < 0) == (flo < 0)) lo = mid, flo = fm;
                else hi = mid;
            }
            cand.push_back(0.5 * (lo + hi));
        }
        if (rv[at(j)] < rv[at(j - 1)] && rv[at(j)] <= rv[at(j + 1)]) cand.push_back(phi);
    }

    std::vector<std::vector<BzAgbzPoint>> found(cand.size());
    parallel_for(cand.size(), [&](std::size_t c) {
        const double phi = cand[c];
        cplx beta = std::polar(1.0, phi);
        for (cplx E : detail::bloch_energies(model, beta)) {
            auto ord = ordered_roots(cp, E);
            int self = ord.nearest(beta);
            for (int i = 1; i <= ord.degree(); ++i) {
                if (i == self) continue;
                if (std::fabs(std::abs(ord.root(i)) - 1.0) > 0.05) continue;
                auto sol = detail::refine_pair(cp, phi, std::arg(ord.root(i)), E, opt.newton);
                if (!sol || circular_distance(sol->k1, sol->k2) <= 1e-6) continue;
                for (double k : {sol->k1, sol->k2}) {
                    if (agbz_label(cp, std::polar(1.0, k), sol->E)) found[c].push_back({k, sol->E});
                }
            }
        }
    });

    std::vector<BzAgbzPoint> out;
    for (const auto& f : found)
        for (const auto& p : f) {
            bool dup = false;
            for (const auto& q : out)
                if (circular_distance(p.phi, q.phi) <= 1e-8 && std::abs(p.E - q.E) <= 1e-6 * (1.0 + std::abs(p.E)))
                    dup = true;
            if (!dup) out.push_back(p);
        }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.phi != b.phi ? a.phi < b.phi : energy_less(a.E, b.E);
    });
    return out;
}

inline std::vector<BzAgbzPoint> bz_agbz_intersections(const Model& model, const BzScanOptions& opt = {}) {
    return bz_agbz_intersections(model, agbz_implicit(CharPoly(model)), opt);
}

struct CorrespondenceReport {
    bool pass = false;
    std::vector<SelfIntersection> intersections;
    std::vector<BzAgbzPoint> agbz_points;
    /// (intersection index, aGBZ point index)
    std::vector<std::pair<std::size_t, std::size_t>> matches;
    std::vector<std::string> violations;
    Warnings warnings;
};

/// Matches every self-intersection of multiplicity n with exactly n
/// aGBZ ∩ BZ points at its energy, and every such point with an intersection.
inline CorrespondenceReport verify_correspondence(const Model& model, int numK = 1024, const IntersectOptions& opt = {},
                                                  const BzScanOptions& scan = {}) {
    CorrespondenceReport rep;
    auto found = find_intersections(model, numK, opt);
    rep.intersections = std::move(found.points);
    rep.warnings = std::move(found.warnings);
    rep.agbz_points = bz_agbz_intersections(model, scan);
    std::vector<int> used(rep.agbz_points.size(), 0);
    for (std::size_t s = 0; s < rep.intersections.size(); ++s) {
        auto& si = rep.intersections[s];
        for (std::size_t a = 0; a < rep.agbz_points.size(); ++a)
            if (std::abs(rep.agbz_points[a].E - si.E0) <= opt.tol_E) {
                rep.matches.emplace_back(s, a);
                si.matched_agbz_phases.push_back(rep.agbz_points[a].phi);
                ++used[a];
            }
        if (static_cast<int>(si.matched_agbz_phases.size()) != si.n)
            rep.violations.push_back("E0 = " + format_double(si.E0.real()) + "+" + format_double(si.E0.imag()) + "i has n = " +
                                     std::to_string(si.n) + " but " + std::to_string(si.matched_agbz_phases.size()) +
                                     " aGBZ points");
    }
    for (std::size_t a = 0; a < rep.agbz_points.size(); ++a)
        if (used[a] != 1)
            rep.violations.push_back("aGBZ point φ = " + format_double(rep.agbz_points[a].phi) + " matches " +
                                     std::to_string(used[a]) + " intersections");
    rep.pass = rep.violations.empty();
    return rep;
}

} // namespace nhsi
