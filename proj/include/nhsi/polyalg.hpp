#pragma once

// Complex polynomial arithmetic, root finding, Sylvester matrices and
// resultants (scalar and with polynomial coefficients).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "nhsi/common.hpp"
#include "nhsi/error.hpp"
#include "nhsi/parallel.hpp"

namespace nhsi {

/// Dense univariate polynomial, coefficients in ascending degree. Trailing
/// coefficients below `zero_tol * max|c|` are trimmed on construction.
class UniPoly {
public:
    UniPoly() = default;

    explicit UniPoly(std::vector<cplx> coeffs, double zero_tol = kCoeffZeroTol)
        : c_(std::move(coeffs)) {
        double big = 0.0;
        for (cplx c : c_) big = std::max(big, std::abs(c));
        while (!c_.empty() && std::abs(c_.back()) <= zero_tol * big) c_.pop_back();
    }

    static UniPoly from_roots(std::span<const cplx> roots, cplx leading = 1.0) {
        std::vector<cplx> c{leading};
        for (cplx r : roots) {
            std::vector<cplx> next(c.size() + 1, 0.0);
            for (std::size_t i = 0; i < c.size(); ++i) {
                next[i + 1] += c[i];
                next[i] -= r * c[i];
            }
            c = std::move(next);
        }
        return UniPoly(std::move(c), 0.0);
    }

    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<cplx>& coeffs() const { return c_; }
    cplx operator[](int i) const {
        return i >= 0 && i < static_cast<int>(c_.size()) ? c_[static_cast<std::size_t>(i)] : 0.0;
    }
    cplx leading() const { return c_.empty() ? 0.0 : c_.back(); }

    /// max |coefficient|
    double scale() const {
        double s = 0.0;
        for (cplx c : c_) s = std::max(s, std::abs(c));
        return s;
    }

    cplx operator()(cplx x) const {
        cplx acc = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    cplx derivative_at(cplx x) const {
        cplx acc = 0.0;
        for (std::size_t i = c_.size(); i-- > 1;) acc = acc * x + static_cast<double>(i) * c_[i];
        return acc;
    }

    /// Σ |c_i| |x|^i, the natural magnitude against which p(x) is compared.
    double magnitude_at(cplx x) const {
        double ax = std::abs(x), acc = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * ax + std::abs(*it);
        return acc;
    }

    UniPoly derivative() const {
        if (c_.size() <= 1) return {};
        std::vector<cplx> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = static_cast<double>(i) * c_[i];
        return UniPoly(std::move(d), 0.0);
    }

    friend UniPoly operator+(const UniPoly& a, const UniPoly& b) {
        std::vector<cplx> c(std::max(a.c_.size(), b.c_.size()), 0.0);
        for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
        for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
        return UniPoly(std::move(c), 0.0);
    }
    friend UniPoly operator-(const UniPoly& a, const UniPoly& b) { return a + b * cplx(-1.0); }
    friend UniPoly operator*(const UniPoly& a, cplx s) {
        std::vector<cplx> c = a.c_;
        for (cplx& x : c) x *= s;
        return UniPoly(std::move(c), 0.0);
    }
    friend UniPoly operator*(const UniPoly& a, const UniPoly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<cplx> c(a.c_.size() + b.c_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        return UniPoly(std::move(c), 0.0);
    }

private:
    std::vector<cplx> c_;
};

struct RootOptions {
    /// Maximum accepted backward error |p(r)| / Σ|c_i||r|^i after polishing.
    double tol = 1e-10;
    int polish_iterations = 30;
    /// Roots closer than this (relative to max(1,|r|)) are merged into a
    /// multiple-root cluster centred at their mean.
    double cluster_tol = 1e-7;
};

namespace detail {

inline void aberth_polish(const UniPoly& p, std::vector<cplx>& z, int iterations) {
    const UniPoly dp = p.derivative();
    const double eps = std::numeric_limits<double>::epsilon();
    for (int it = 0; it < iterations; ++it) {
        double worst_step = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            cplx pv = p(z[i]);
            if (pv == 0.0) continue;
            cplx dv = dp(z[i]);
            if (dv == 0.0) continue;
            cplx ratio = pv / dv;
            cplx repulsion = 0.0;
            for (std::size_t j = 0; j < z.size(); ++j)
                if (j != i && z[j] != z[i]) repulsion += 1.0 / (z[i] - z[j]);
            cplx step = ratio / (1.0 - ratio * repulsion);
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) continue;
            cplx candidate = z[i] - step;
            if (std::abs(p(candidate)) <= std::abs(pv)) {
                z[i] = candidate;
                worst_step = std::max(worst_step, std::abs(step) / std::max(1.0, std::abs(z[i])));
            }
        }
        if (worst_step <= 4.0 * eps) break;
    }
}

inline void merge_clusters(std::vector<cplx>& z, double tol) {
    std::vector<std::size_t> parent(z.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    bool any = false;
    for (std::size_t i = 0; i < z.size(); ++i)
        for (std::size_t j = i + 1; j < z.size(); ++j)
            if (std::abs(z[i] - z[j]) <= tol * std::max(1.0, std::abs(z[i]))) {
                parent[find(i)] = find(j);
                any = true;
            }
    if (!any) return;
    std::map<std::size_t, std::pair<cplx, int>> sums;
    for (std::size_t i = 0; i < z.size(); ++i) {
        auto& s = sums[find(i)];
        s.first += z[i];
        s.second += 1;
    }
    for (std::size_t i = 0; i < z.size(); ++i) {
        const auto& s = sums[find(i)];
        z[i] = s.first / static_cast<double>(s.second);
    }
}

} // namespace detail

/// All roots of p with multiplicity, sorted by (modulus, phase). Companion
/// matrix eigenvalues followed by an Aberth polishing pass.
inline std::vector<cplx> poly_roots(const UniPoly& p, const RootOptions& opt = {}) {
    if (p.is_zero()) throw Error(ErrorKind::ZeroPolynomial, "all coefficients below tolerance");
    const int n = p.degree();
    if (n < 1) throw Error(ErrorKind::DegreeZero, "poly_roots needs degree >= 1");

    std::vector<cplx> z;
    if (n == 1) {
        z.push_back(-p[0] / p[1]);
    } else {
        Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
        const cplx lead = p.leading();
        for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
        for (int i = 0; i < n; ++i) companion(i, n - 1) = -p[i] / lead;
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
        if (solver.info() != Eigen::Success)
            throw Error(ErrorKind::NonConvergence, "companion eigenvalue solve failed");
        z.assign(solver.eigenvalues().begin(), solver.eigenvalues().end());
        detail::aberth_polish(p, z, opt.polish_iterations);
    }
    detail::merge_clusters(z, opt.cluster_tol);

    double worst = 0.0;
    cplx worst_root = 0.0;
    for (cplx r : z) {
        double mag = p.magnitude_at(r);
        double be = mag > 0.0 ? std::abs(p(r)) / mag : 0.0;
        if (!(be <= worst)) {
            worst = be;
            worst_root = r;
        }
    }
    if (!(worst <= opt.tol))
        throw Error(ErrorKind::NonConvergence,
                    "best iterate " + std::to_string(worst_root.real()) + "+" +
                        std::to_string(worst_root.imag()) + "i has relative residual " +
                        std::to_string(worst));
    sort_by_modulus_phase(z);
    return z;
}

// ---------------------------------------------------------------------------
// Multivariate polynomials
// ---------------------------------------------------------------------------

/// Sparse polynomial in named variables with complex coefficients.
/// Arithmetic drops exact zeros only; `pruned` applies a relative threshold.
class MultiPoly {
public:
    using Exponents = std::vector<int>;

    MultiPoly() = default;
    explicit MultiPoly(std::vector<std::string> variables) : vars_(std::move(variables)) {}

    static MultiPoly constant(std::vector<std::string> variables, cplx c) {
        MultiPoly p(std::move(variables));
        p.add_term(Exponents(p.arity(), 0), c);
        return p;
    }

    static MultiPoly variable(std::vector<std::string> variables, std::string_view name) {
        MultiPoly p(std::move(variables));
        Exponents e(p.arity(), 0);
        e[static_cast<std::size_t>(p.index_of(name))] = 1;
        p.add_term(std::move(e), 1.0);
        return p;
    }

    const std::vector<std::string>& variables() const { return vars_; }
    std::size_t arity() const { return vars_.size(); }
    const std::map<Exponents, cplx>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    int index_of(std::string_view name) const {
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (vars_[i] == name) return static_cast<int>(i);
        throw Error(ErrorKind::InvalidArgument, "unknown variable '" + std::string(name) + "'");
    }

    void add_term(Exponents e, cplx c) {
        if (e.size() != arity()) throw Error(ErrorKind::InvalidArgument, "exponent arity mismatch");
        for (int x : e)
            if (x < 0) throw Error(ErrorKind::InvalidArgument, "negative exponent");
        auto [it, inserted] = terms_.try_emplace(std::move(e), c);
        if (!inserted) it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }

    cplx coefficient(const Exponents& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? cplx(0.0) : it->second;
    }

    /// Highest exponent of variable `v`; -1 for the zero polynomial.
    int degree(int v) const {
        int d = -1;
        for (const auto& [e, c] : terms_) d = std::max(d, e[static_cast<std::size_t>(v)]);
        return d;
    }
    int degree(std::string_view name) const { return degree(index_of(name)); }

    int min_degree(int v) const {
        if (terms_.empty()) return 0;
        int d = terms_.begin()->first[static_cast<std::size_t>(v)];
        for (const auto& [e, c] : terms_) d = std::min(d, e[static_cast<std::size_t>(v)]);
        return d;
    }

    int total_degree() const {
        int d = -1;
        for (const auto& [e, c] : terms_) d = std::max(d, std::accumulate(e.begin(), e.end(), 0));
        return d;
    }

    double max_abs_coefficient() const {
        double m = 0.0;
        for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
        return m;
    }

    cplx evaluate(std::span<const cplx> point) const {
        if (point.size() != arity()) throw Error(ErrorKind::InvalidArgument, "point arity mismatch");
        std::vector<std::vector<cplx>> powers(arity());
        for (std::size_t v = 0; v < arity(); ++v) {
            int d = std::max(0, degree(static_cast<int>(v)));
            powers[v].resize(static_cast<std::size_t>(d) + 1);
            powers[v][0] = 1.0;
            for (int k = 1; k <= d; ++k)
                powers[v][static_cast<std::size_t>(k)] =
                    powers[v][static_cast<std::size_t>(k) - 1] * point[v];
        }
        cplx acc = 0.0;
        for (const auto& [e, c] : terms_) {
            cplx t = c;
            for (std::size_t v = 0; v < arity(); ++v) t *= powers[v][static_cast<std::size_t>(e[v])];
            acc += t;
        }
        return acc;
    }
    cplx operator()(std::initializer_list<cplx> point) const {
        return evaluate(std::span<const cplx>(point.begin(), point.size()));
    }

    /// Σ |c| Π |x_v|^{e_v}
    double magnitude_at(std::span<const cplx> point) const {
        double acc = 0.0;
        for (const auto& [e, c] : terms_) {
            double t = std::abs(c);
            for (std::size_t v = 0; v < arity(); ++v) t *= std::pow(std::abs(point[v]), e[v]);
            acc += t;
        }
        return acc;
    }

    /// Coefficients of var^0 .. var^deg as polynomials in the same variable
    /// list (with the `var` exponent zeroed).
    std::vector<MultiPoly> coefficients_in(int var) const {
        std::vector<MultiPoly> out(static_cast<std::size_t>(std::max(0, degree(var) + 1)),
                                   MultiPoly(vars_));
        for (const auto& [e, c] : terms_) {
            Exponents rest = e;
            rest[static_cast<std::size_t>(var)] = 0;
            out[static_cast<std::size_t>(e[static_cast<std::size_t>(var)])].add_term(std::move(rest), c);
        }
        return out;
    }

    /// Formal coefficient vector (ascending in `var`) after substituting the
    /// other variables from `point`. Length is degree(var)+1, not trimmed.
    std::vector<cplx> coefficients_at(int var, std::span<const cplx> point) const {
        std::vector<cplx> out(static_cast<std::size_t>(std::max(0, degree(var) + 1)), 0.0);
        std::vector<cplx> p(point.begin(), point.end());
        p[static_cast<std::size_t>(var)] = 1.0;
        for (const auto& [e, c] : terms_) {
            cplx t = c;
            for (std::size_t v = 0; v < arity(); ++v)
                if (static_cast<int>(v) != var && e[v] != 0) t *= std::pow(p[v], e[v]);
            out[static_cast<std::size_t>(e[static_cast<std::size_t>(var)])] += t;
        }
        return out;
    }

    /// Divides by var^power. Every term must carry at least that power.
    MultiPoly divided_by_power(int var, int power) const {
        MultiPoly out(vars_);
        for (const auto& [e, c] : terms_) {
            Exponents f = e;
            f[static_cast<std::size_t>(var)] -= power;
            out.add_term(std::move(f), c);
        }
        return out;
    }

    /// Drops terms with |c| <= rel_tol * max|c|.
    MultiPoly pruned(double rel_tol = kCoeffZeroTol) const {
        double cut = rel_tol * max_abs_coefficient();
        MultiPoly out(vars_);
        for (const auto& [e, c] : terms_)
            if (std::abs(c) > cut) out.terms_.emplace(e, c);
        return out;
    }

    MultiPoly map_coefficients(auto&& fn) const {
        MultiPoly out(vars_);
        for (const auto& [e, c] : terms_) out.add_term(e, fn(c));
        return out;
    }

    MultiPoly pow(int k) const {
        MultiPoly acc = constant(vars_, 1.0);
        for (int i = 0; i < k; ++i) acc = acc * *this;
        return acc;
    }

    friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
        check_same(a, b);
        MultiPoly out = a;
        for (const auto& [e, c] : b.terms_) out.add_term(e, c);
        return out;
    }
    friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) { return a + b * cplx(-1.0); }
    friend MultiPoly operator*(const MultiPoly& a, cplx s) {
        MultiPoly out(a.vars_);
        if (s == 0.0) return out;
        for (const auto& [e, c] : a.terms_) out.terms_.emplace(e, c * s);
        return out;
    }
    friend MultiPoly operator*(cplx s, const MultiPoly& a) { return a * s; }
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
        check_same(a, b);
        MultiPoly out(a.vars_);
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                Exponents e(ea.size());
                for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
                out.add_term(std::move(e), ca * cb);
            }
        return out;
    }

private:
    static void check_same(const MultiPoly& a, const MultiPoly& b) {
        if (a.vars_ != b.vars_) throw Error(ErrorKind::InvalidArgument, "variable lists differ");
    }

    std::vector<std::string> vars_;
    std::map<Exponents, cplx> terms_;
};

// ---------------------------------------------------------------------------
// Sylvester matrices and resultants
// ---------------------------------------------------------------------------

/// (n+m)×(n+m) Sylvester matrix of f (degree n) and g (degree m): m shifted
/// rows of f's coefficients (descending), then n shifted rows of g's.
template <class T>
class SylvesterMatrix {
public:
    SylvesterMatrix(std::span<const T> f_ascending, std::span<const T> g_ascending, const T& zero)
        : n_(static_cast<int>(f_ascending.size()) - 1), m_(static_cast<int>(g_ascending.size()) - 1),
          entries_(static_cast<std::size_t>((n_ + m_) * (n_ + m_)), zero) {
        for (int r = 0; r < m_; ++r)
            for (int i = 0; i <= n_; ++i) at(r, r + i) = f_ascending[static_cast<std::size_t>(n_ - i)];
        for (int r = 0; r < n_; ++r)
            for (int j = 0; j <= m_; ++j)
                at(m_ + r, r + j) = g_ascending[static_cast<std::size_t>(m_ - j)];
    }

    int size() const { return n_ + m_; }
    int degree_f() const { return n_; }
    int degree_g() const { return m_; }
    const T& operator()(int row, int col) const {
        return entries_[static_cast<std::size_t>(row * size() + col)];
    }

private:
    T& at(int row, int col) { return entries_[static_cast<std::size_t>(row * size() + col)]; }

    int n_, m_;
    std::vector<T> entries_;
};

inline SylvesterMatrix<cplx> sylvester(const UniPoly& f, const UniPoly& g) {
    if (f.degree() < 1 || g.degree() < 1)
        throw Error(ErrorKind::DegreeZero, "Sylvester matrix needs positive degrees");
    return SylvesterMatrix<cplx>(f.coeffs(), g.coeffs(), cplx(0.0));
}

/// Sylvester matrix with respect to `var`; entries are the polynomial
/// coefficients in the remaining variables.
inline SylvesterMatrix<MultiPoly> sylvester(const MultiPoly& f, const MultiPoly& g,
                                            std::string_view var) {
    int v = f.index_of(var);
    if (f.degree(v) < 1 || g.degree(v) < 1)
        throw Error(ErrorKind::DegreeZero, "Sylvester matrix needs positive degrees in " + std::string(var));
    auto fc = f.coefficients_in(v);
    auto gc = g.coefficients_in(v);
    return SylvesterMatrix<MultiPoly>(fc, gc, MultiPoly(f.variables()));
}

inline Eigen::MatrixXcd to_matrix(const SylvesterMatrix<cplx>& s) {
    Eigen::MatrixXcd m(s.size(), s.size());
    for (int r = 0; r < s.size(); ++r)
        for (int c = 0; c < s.size(); ++c) m(r, c) = s(r, c);
    return m;
}

/// det Syl(f, g) for formal coefficient vectors (leading entries may vanish).
inline cplx sylvester_determinant(std::span<const cplx> f_ascending, std::span<const cplx> g_ascending) {
    SylvesterMatrix<cplx> s(f_ascending, g_ascending, cplx(0.0));
    if (s.size() == 0) return 1.0;
    return to_matrix(s).partialPivLu().determinant();
}

/// Product of row 2-norms of Syl(f, g): Hadamard's bound on |det|.
inline double sylvester_hadamard_bound(std::span<const cplx> f_ascending,
                                       std::span<const cplx> g_ascending) {
    double nf = 0.0, ng = 0.0;
    for (cplx c : f_ascending) nf += std::norm(c);
    for (cplx c : g_ascending) ng += std::norm(c);
    const double m = static_cast<double>(g_ascending.size()) - 1.0;
    const double n = static_cast<double>(f_ascending.size()) - 1.0;
    return std::pow(std::sqrt(nf), m) * std::pow(std::sqrt(ng), n);
}

inline cplx resultant(const UniPoly& f, const UniPoly& g) {
    if (f.degree() < 1 || g.degree() < 1)
        throw Error(ErrorKind::DegreeZero, "resultant needs positive degrees");
    return sylvester_determinant(f.coeffs(), g.coeffs());
}

struct InterpolationOptions {
    /// Radius of the sampling torus per remaining variable (default 1).
    std::vector<double> radius;
    int max_degree = 512;
    std::size_t max_points = std::size_t{1} << 21;
    /// Relative threshold for discarding interpolated coefficients, measured
    /// in the torus-scaled basis.
    double prune_tol = 1e-13;
};

namespace detail {

/// In-place inverse DFT along every axis of a row-major tensor.
inline void inverse_dft_tensor(std::vector<cplx>& data, const std::vector<int>& dims) {
    std::size_t stride = 1;
    for (std::size_t axis = dims.size(); axis-- > 0;) {
        const int n = dims[axis];
        std::vector<cplx> twiddle(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) twiddle[static_cast<std::size_t>(k)] = std::polar(1.0, -kTwoPi * k / n);
        const std::size_t block = stride * static_cast<std::size_t>(n);
        std::vector<cplx> line(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
        for (std::size_t outer = 0; outer < data.size(); outer += block)
            for (std::size_t inner = 0; inner < stride; ++inner) {
                for (int b = 0; b < n; ++b)
                    line[static_cast<std::size_t>(b)] = data[outer + inner + static_cast<std::size_t>(b) * stride];
                for (int a = 0; a < n; ++a) {
                    cplx acc = 0.0;
                    for (int b = 0; b < n; ++b)
                        acc += line[static_cast<std::size_t>(b)] *
                               twiddle[static_cast<std::size_t>((static_cast<long>(a) * b) % n)];
                    out[static_cast<std::size_t>(a)] = acc / static_cast<double>(n);
                }
                for (int a = 0; a < n; ++a)
                    data[outer + inner + static_cast<std::size_t>(a) * stride] = out[static_cast<std::size_t>(a)];
            }
        stride = block;
    }
}

} // namespace detail

/// Resultant of f and g with respect to `eliminate`, as a polynomial in the
/// remaining variables. Computed by evaluating the scalar Sylvester
/// determinant on a torus grid sized from a priori degree bounds and
/// interpolating with an inverse DFT.
inline MultiPoly resultant(const MultiPoly& f, const MultiPoly& g, std::string_view eliminate,
                           const InterpolationOptions& opt = {}) {
    if (f.variables() != g.variables())
        throw Error(ErrorKind::InvalidArgument, "resultant operands use different variables");
    const int var = f.index_of(eliminate);
    const int n = f.degree(var), m = g.degree(var);
    if (n < 1 || m < 1)
        throw Error(ErrorKind::DegreeZero, "resultant needs positive degree in " + std::string(eliminate));

    std::vector<int> rest;
    std::vector<std::string> rest_names;
    for (std::size_t v = 0; v < f.arity(); ++v)
        if (static_cast<int>(v) != var) {
            rest.push_back(static_cast<int>(v));
            rest_names.push_back(f.variables()[v]);
        }

    std::vector<int> dims;
    std::size_t total = 1;
    for (int v : rest) {
        int bound = m * std::max(0, f.degree(v)) + n * std::max(0, g.degree(v));
        if (bound > opt.max_degree)
            throw Error(ErrorKind::DegreeBudgetExceeded,
                        "degree bound " + std::to_string(bound) + " in " + f.variables()[static_cast<std::size_t>(v)]);
        dims.push_back(bound + 1);
        total *= static_cast<std::size_t>(bound + 1);
        if (total > opt.max_points)
            throw Error(ErrorKind::DegreeBudgetExceeded, "interpolation grid exceeds point budget");
    }
    std::vector<double> radius(rest.size(), 1.0);
    for (std::size_t i = 0; i < rest.size() && i < opt.radius.size(); ++i) radius[i] = opt.radius[i];

    std::vector<cplx> values(total);
    parallel_for(total, [&](std::size_t flat) {
        std::vector<cplx> point(f.arity(), 0.0);
        std::size_t rem = flat;
        for (std::size_t i = rest.size(); i-- > 0;) {
            int a = static_cast<int>(rem % static_cast<std::size_t>(dims[i]));
            rem /= static_cast<std::size_t>(dims[i]);
            point[static_cast<std::size_t>(rest[i])] = std::polar(radius[i], kTwoPi * a / dims[i]);
        }
        auto fc = f.coefficients_at(var, point);
        auto gc = g.coefficients_at(var, point);
        values[flat] = sylvester_determinant(fc, gc);
    });
    detail::inverse_dft_tensor(values, dims);

    double biggest = 0.0;
    for (cplx c : values) biggest = std::max(biggest, std::abs(c));
    MultiPoly out(rest_names);
    if (biggest == 0.0) return out;
    for (std::size_t flat = 0; flat < total; ++flat) {
        if (std::abs(values[flat]) <= opt.prune_tol * biggest) continue;
        MultiPoly::Exponents e(rest.size());
        std::size_t rem = flat;
        double unscale = 1.0;
        for (std::size_t i = rest.size(); i-- > 0;) {
            e[i] = static_cast<int>(rem % static_cast<std::size_t>(dims[i]));
            rem /= static_cast<std::size_t>(dims[i]);
            unscale *= std::pow(radius[i], -e[i]);
        }
        out.add_term(std::move(e), values[flat] * unscale);
    }
    return out;
}

} // namespace nhsi
