#pragma once

// Tight-binding chains: Laurent-polynomial Bloch Hamiltonians, pole-cleared
// characteristic polynomials, real-space matrices and model builders.

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nhsi/common.hpp"
#include "nhsi/error.hpp"
#include "nhsi/polyalg.hpp"

namespace nhsi {

/// Σ c_n β^n over a finite set of integer exponents.
class LaurentPoly {
public:
    LaurentPoly() = default;
    LaurentPoly(std::map<int, cplx> terms) : terms_(std::move(terms)) { trim(); }
    LaurentPoly(cplx constant) {
        if (constant != 0.0) terms_[0] = constant;
    }

    static LaurentPoly monomial(int exponent, cplx c) { return LaurentPoly(std::map<int, cplx>{{exponent, c}}); }

    const std::map<int, cplx>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int min_exponent() const { return terms_.empty() ? 0 : terms_.begin()->first; }
    int max_exponent() const { return terms_.empty() ? 0 : terms_.rbegin()->first; }
    cplx coefficient(int n) const {
        auto it = terms_.find(n);
        return it == terms_.end() ? cplx(0.0) : it->second;
    }

    cplx operator()(cplx beta) const {
        cplx acc = 0.0;
        for (const auto& [n, c] : terms_) acc += c * std::pow(beta, n);
        return acc;
    }

    LaurentPoly conjugate_coefficients() const {
        std::map<int, cplx> t;
        for (const auto& [n, c] : terms_) t[n] = std::conj(c);
        return LaurentPoly(std::move(t));
    }

    friend LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) {
        std::map<int, cplx> t = a.terms_;
        for (const auto& [n, c] : b.terms_) t[n] += c;
        return LaurentPoly(std::move(t));
    }
    friend LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) { return a + b * cplx(-1.0); }
    friend LaurentPoly operator*(const LaurentPoly& a, cplx s) {
        std::map<int, cplx> t;
        for (const auto& [n, c] : a.terms_) t[n] = c * s;
        return LaurentPoly(std::move(t));
    }
    friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
        std::map<int, cplx> t;
        for (const auto& [na, ca] : a.terms_)
            for (const auto& [nb, cb] : b.terms_) t[na + nb] += ca * cb;
        return LaurentPoly(std::move(t));
    }

private:
    void trim() {
        double big = 0.0;
        for (const auto& [n, c] : terms_) big = std::max(big, std::abs(c));
        std::erase_if(terms_, [&](const auto& kv) { return std::abs(kv.second) <= kCoeffZeroTol * big; });
    }

    std::map<int, cplx> terms_;
};

/// q×q matrix of Laurent polynomials, h(β) = Σ_n T_n β^n.
class Model {
public:
    Model() = default;

    explicit Model(std::vector<std::vector<LaurentPoly>> entries) : h_(std::move(entries)) {
        if (h_.empty()) throw Error(ErrorKind::InvalidArgument, "model needs at least one band");
        for (const auto& row : h_)
            if (row.size() != h_.size()) throw Error(ErrorKind::InvalidArgument, "model matrix must be square");
    }

    int bands() const { return static_cast<int>(h_.size()); }
    const LaurentPoly& entry(int i, int j) const {
        return h_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }

    /// Smallest / largest exponent across all entries, clamped to include 0.
    int min_exponent() const {
        int m = 0;
        for (const auto& row : h_)
            for (const auto& e : row)
                if (!e.is_zero()) m = std::min(m, e.min_exponent());
        return m;
    }
    int max_exponent() const {
        int m = 0;
        for (const auto& row : h_)
            for (const auto& e : row)
                if (!e.is_zero()) m = std::max(m, e.max_exponent());
        return m;
    }
    /// Hopping span in unit cells (M+N for a one-band chain).
    int span() const { return max_exponent() - min_exponent(); }

    Eigen::MatrixXcd bloch(cplx beta) const {
        const int q = bands();
        Eigen::MatrixXcd m(q, q);
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < q; ++j) m(i, j) = entry(i, j)(beta);
        return m;
    }

    /// Hopping block T_n.
    Eigen::MatrixXcd hopping(int n) const {
        const int q = bands();
        Eigen::MatrixXcd m(q, q);
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < q; ++j) m(i, j) = entry(i, j).coefficient(n);
        return m;
    }

private:
    std::vector<std::vector<LaurentPoly>> h_;
};

/// h(β) = Σ_{n=-M}^{N} t_n β^n with tight ranges.
class OneBandModel {
public:
    explicit OneBandModel(const std::map<int, cplx>& hops) : h_(hops) {
        if (h_.is_zero()) throw Error(ErrorKind::AllZeroHops, "every hopping amplitude is zero");
        M_ = std::max(0, -h_.min_exponent());
        N_ = std::max(0, h_.max_exponent());
        if (M_ + N_ < 1) throw Error(ErrorKind::DegenerateModel, "on-site term only; spectrum is a point");
    }

    int M() const { return M_; }
    int N() const { return N_; }
    const LaurentPoly& hamiltonian() const { return h_; }
    cplx hop(int n) const { return h_.coefficient(n); }
    std::map<int, cplx> hops() const { return h_.terms(); }

    operator Model() const { return Model({{h_}}); }

private:
    LaurentPoly h_;
    int M_ = 0, N_ = 0;
};

/// P(β, E) = β^p det(h(β) − E), stored as coefficients c[j][b] of E^j β^b.
class CharPoly {
public:
    explicit CharPoly(const Model& model) : q_(model.bands()) {
        // det(h − E) by Leibniz expansion over bivariate terms (β exponent, E power)
        using Terms = std::map<std::pair<int, int>, cplx>;
        auto entry_terms = [&](int i, int j) {
            Terms t;
            for (const auto& [n, c] : model.entry(i, j).terms()) t[{n, 0}] += c;
            if (i == j) t[{0, 1}] += -1.0;
            return t;
        };
        std::vector<int> perm(static_cast<std::size_t>(q_));
        std::iota(perm.begin(), perm.end(), 0);
        Terms det;
        do {
            int inversions = 0;
            for (int a = 0; a < q_; ++a)
                for (int b = a + 1; b < q_; ++b)
                    if (perm[static_cast<std::size_t>(a)] > perm[static_cast<std::size_t>(b)]) ++inversions;
            Terms prod{{{0, 0}, inversions % 2 == 0 ? 1.0 : -1.0}};
            for (int r = 0; r < q_ && !prod.empty(); ++r) {
                Terms next;
                for (const auto& [ea, ca] : prod)
                    for (const auto& [eb, cb] : entry_terms(r, perm[static_cast<std::size_t>(r)]))
                        next[{ea.first + eb.first, ea.second + eb.second}] += ca * cb;
                prod = std::move(next);
            }
            for (const auto& [e, c] : prod) det[e] += c;
        } while (std::next_permutation(perm.begin(), perm.end()));

        double big = 0.0;
        for (const auto& [e, c] : det) big = std::max(big, std::abs(c));
        std::erase_if(det, [&](const auto& kv) { return std::abs(kv.second) <= kCoeffZeroTol * big; });

        int lo = 0, hi = 0;
        for (const auto& [e, c] : det) {
            lo = std::min(lo, e.first);
            hi = std::max(hi, e.first);
        }
        p_ = -lo;
        D_ = hi - lo;
        if (D_ == 0) throw Error(ErrorKind::DegenerateModel, "det(h(β) − E) does not depend on β");
        c_.assign(static_cast<std::size_t>(q_) + 1, std::vector<cplx>(static_cast<std::size_t>(D_) + 1, 0.0));
        for (const auto& [e, c] : det)
            c_[static_cast<std::size_t>(e.second)][static_cast<std::size_t>(e.first + p_)] = c;
    }

    int bands() const { return q_; }
    int pole_order() const { return p_; }
    int beta_degree() const { return D_; }
    /// Coefficient of E^j β^b.
    cplx coefficient(int j, int b) const {
        if (j < 0 || j > q_ || b < 0 || b > D_) return 0.0;
        return c_[static_cast<std::size_t>(j)][static_cast<std::size_t>(b)];
    }

    cplx operator()(cplx beta, cplx E) const {
        cplx acc = 0.0;
        for (int j = q_; j >= 0; --j) acc = acc * E + beta_poly(j, beta);
        return acc;
    }

    cplx d_beta(cplx beta, cplx E) const {
        cplx acc = 0.0;
        for (int j = q_; j >= 0; --j) {
            cplx d = 0.0;
            for (int b = D_; b >= 1; --b) d = d * beta + static_cast<double>(b) * coefficient(j, b);
            acc = acc * E + d;
        }
        return acc;
    }

    cplx d_E(cplx beta, cplx E) const {
        cplx acc = 0.0;
        for (int j = q_; j >= 1; --j) acc = acc * E + static_cast<double>(j) * beta_poly(j, beta);
        return acc;
    }

    /// Σ |c_jb| |β|^b |E|^j, the scale against which residuals are judged.
    double magnitude(cplx beta, cplx E) const {
        double acc = 0.0, ab = std::abs(beta), ae = std::abs(E);
        for (int j = 0; j <= q_; ++j)
            for (int b = 0; b <= D_; ++b) acc += std::abs(coefficient(j, b)) * std::pow(ab, b) * std::pow(ae, j);
        return acc;
    }

    /// Formal β-coefficients (length D+1) at fixed E.
    std::vector<cplx> beta_coeffs(cplx E) const {
        std::vector<cplx> out(static_cast<std::size_t>(D_) + 1, 0.0);
        for (int b = 0; b <= D_; ++b) {
            cplx acc = 0.0;
            for (int j = q_; j >= 0; --j) acc = acc * E + coefficient(j, b);
            out[static_cast<std::size_t>(b)] = acc;
        }
        return out;
    }

    /// Formal E-coefficients (length q+1) at fixed β.
    std::vector<cplx> energy_coeffs(cplx beta) const {
        std::vector<cplx> out(static_cast<std::size_t>(q_) + 1);
        for (int j = 0; j <= q_; ++j) out[static_cast<std::size_t>(j)] = beta_poly(j, beta);
        return out;
    }

    UniPoly in_beta(cplx E) const { return UniPoly(beta_coeffs(E)); }

    /// Eigenvalues of h(β) as the q roots of P(β, ·).
    std::vector<cplx> energies(cplx beta) const {
        if (beta == 0.0) throw Error(ErrorKind::ZeroBeta, "energies need β ≠ 0");
        return poly_roots(UniPoly(energy_coeffs(beta), 0.0));
    }

    MultiPoly as_multipoly(const std::string& beta_name = "beta", const std::string& energy_name = "E") const {
        MultiPoly out({beta_name, energy_name});
        for (int j = 0; j <= q_; ++j)
            for (int b = 0; b <= D_; ++b)
                if (coefficient(j, b) != 0.0) out.add_term({b, j}, coefficient(j, b));
        return out;
    }

private:
    cplx beta_poly(int j, cplx beta) const {
        cplx acc = 0.0;
        for (int b = D_; b >= 0; --b) acc = acc * beta + coefficient(j, b);
        return acc;
    }

    int q_ = 1, p_ = 0, D_ = 0;
    std::vector<std::vector<cplx>> c_;
};

inline CharPoly char_poly(const Model& model) { return CharPoly(model); }

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

inline OneBandModel extended_hn(cplx t_m2, cplx t_m1, cplx t_p1, cplx t_p2) {
    if (t_m2 == 0.0 && t_m1 == 0.0) throw Error(ErrorKind::AllZeroHops, "left hoppings t_-2, t_-1 both zero");
    if (t_p1 == 0.0 && t_p2 == 0.0) throw Error(ErrorKind::AllZeroHops, "right hoppings t_1, t_2 both zero");
    return OneBandModel({{-2, t_m2}, {-1, t_m1}, {1, t_p1}, {2, t_p2}});
}

/// Extended Hatano-Nelson chain with t_{±1} = 1 ± γ1 and fixed t_2, t_-2.
inline OneBandModel extended_hn_gamma(double gamma1, double t_p2 = 1.5, double t_m2 = 0.5) {
    return extended_hn(t_m2, 1.0 - gamma1, 1.0 + gamma1, t_p2);
}

/// Two-band chain h = h_x σ_x + h_y σ_y with
/// h_AB = t1 + (t3+γ) β + t2 β⁻¹ and h_BA = t1 + t2 β + (t3−γ) β⁻¹.
inline Model nh_ssh(cplx t1, cplx t2, cplx t3, cplx gamma) {
    LaurentPoly ab(std::map<int, cplx>{{0, t1}, {1, t3 + gamma}, {-1, t2}});
    LaurentPoly ba(std::map<int, cplx>{{0, t1}, {1, t2}, {-1, t3 - gamma}});
    Model m({{LaurentPoly{}, ab}, {ba, LaurentPoly{}}});
    if (ab.is_zero() || ba.is_zero())
        throw Error(ErrorKind::DegenerateModel, "an off-diagonal block vanishes identically");
    (void)CharPoly(m);
    return m;
}

/// (h_x, h_y) components of the two-band chain at β.
inline std::pair<cplx, cplx> pauli_components(const Model& ssh, cplx beta) {
    cplx ab = ssh.entry(0, 1)(beta), ba = ssh.entry(1, 0)(beta);
    return {(ab + ba) / 2.0, cplx(0.0, 1.0) * (ab - ba) / 2.0};
}

/// h(β) = (1 − e^{iφ} β^n) q(β). Rejects q with a zero on |β| = 1.
inline OneBandModel nfold_construct(int n, double phi, const LaurentPoly& q) {
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "n-fold construction needs n >= 2");
    if (q.is_zero()) throw Error(ErrorKind::QVanishesOnCircle, "q is identically zero");
    constexpr int kSamples = 1024;
    auto modulus = [&](double k) { return std::abs(q(std::polar(1.0, k))); };
    double best_k = 0.0, best = INFINITY, biggest = 0.0;
    for (int s = 0; s < kSamples; ++s) {
        double k = kTwoPi * s / kSamples, v = modulus(k);
        biggest = std::max(biggest, v);
        if (v < best) best = v, best_k = k;
    }
    // golden-section refinement of the sampled minimum
    double a = best_k - kTwoPi / kSamples, b = best_k + kTwoPi / kSamples;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - g * (b - a), x2 = a + g * (b - a), f1 = modulus(x1), f2 = modulus(x2);
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) b = x2, x2 = x1, f2 = f1, x1 = b - g * (b - a), f1 = modulus(x1);
        else a = x1, x1 = x2, f1 = f2, x2 = a + g * (b - a), f2 = modulus(x2);
    }
    best = std::min({best, f1, f2});
    if (best < 1e-6 * biggest)
        throw Error(ErrorKind::QVanishesOnCircle, "min |q| on the unit circle is " + std::to_string(best) +
                                                       " near k = " + std::to_string(wrap_2pi(0.5 * (a + b))));
    LaurentPoly factor(std::map<int, cplx>{{0, 1.0}, {n, -std::polar(1.0, phi)}});
    return OneBandModel((factor * q).terms());
}

/// Bloch solutions at E = 0 of an n-fold construction: β = e^{i(2πm − φ)/n}.
inline std::vector<double> nfold_k_solutions(int n, double phi) {
    std::vector<double> ks;
    for (int m = 0; m < n; ++m) ks.push_back(wrap_2pi((kTwoPi * m - phi) / n));
    std::sort(ks.begin(), ks.end());
    return ks;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

inline Eigen::MatrixXcd bloch_eval(const Model& model, cplx beta) {
    if (beta == 0.0) throw Error(ErrorKind::ZeroBeta, "h(β) has poles at β = 0");
    return model.bloch(beta);
}

enum class Boundary { OBC, PBC };

/// qL × qL real-space matrix with block (i, j) = T_{j−i}; PBC wraps j − i mod L.
/// Requires L > max(M, N) so that every hop connects distinct sites.
inline Eigen::MatrixXcd real_space_hamiltonian(const Model& model, int L, Boundary boundary) {
    const int reach = std::max(-model.min_exponent(), model.max_exponent());
    if (L < reach + 1)
        throw Error(ErrorKind::TooSmallL,
                    "L = " + std::to_string(L) + " does not exceed hopping range " + std::to_string(reach));
    const int q = model.bands();
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(q * L, q * L);
    for (int n = model.min_exponent(); n <= model.max_exponent(); ++n) {
        Eigen::MatrixXcd T = model.hopping(n);
        if (T.isZero(0.0)) continue;
        for (int i = 0; i < L; ++i) {
            int j = i + n;
            if (j < 0 || j >= L) {
                if (boundary == Boundary::OBC) continue;
                j = ((j % L) + L) % L;
            }
            H.block(q * i, q * j, q, q) += T;
        }
    }
    return H;
}

} // namespace nhsi
