#pragma once

// Quadrature oracle for c_kn = ((M_r + N_r) e_n, e_k) computed straight from
// the integral-operator definitions
//
//   (M_r f)(t) = (1/rho) e^{-r t/rho} f(t/rho)
//   (N_r f)(t) = (1/rho) e^{(1-r) t/rho} \int_0^inf K(s t/rho) f(s) dm(s)
//
// with K(u) = J1(2 sqrt u)/sqrt u and dm(t) = t e^{-t} dt. Nothing here uses
// the closed-form entries or any table integral, so agreement checks the
// closed form end to end.
//
// For the N part, substituting t = rho u turns the outer weight
// t e^{(1-r)t/rho} e^{-t} = t e^{-t/rho} into rho^2 u e^{-u}, so both
// integrals use the same Gauss-Laguerre rule and the kernel matrix
// K(x_i x_j) does not depend on r.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "maps.hpp"
#include "matrix.hpp"
#include "operator_matrix.hpp"
#include "precision.hpp"
#include "special_fn.hpp"

namespace tentfarey {

/// One closed-form versus quadrature comparison of a_kn = c_kn / (k+1).
struct OracleReport {
    int k = 0;
    int n = 0;
    double r = 0.0;
    double closed_form = 0.0;
    double oracle_value = 0.0;
    double abs_err = 0.0;
    double rel_err = 0.0;
    int quadrature_order = 0;
    /// |oracle at Q - oracle at Q/2|, or -1 when the self-check is off.
    double refinement_delta = -1.0;
    bool flagged = false;
};

template <class Real>
class QuadratureOracle {
public:
    /// Precomputes K(x_i x_j) and e_n(x_i) for n <= degree_max.
    QuadratureOracle(QuadratureRule<Real> rule, int degree_max)
        : rule_(std::move(rule)), degree_max_(degree_max) {
        if (degree_max < 0) throw DomainError("QuadratureOracle: degree_max must be >= 0");
        const std::size_t q = rule_.nodes.size();
        kernel_ = Matrix<Real>(q, q);
        for (std::size_t i = 0; i < q; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                kernel_(i, j) = bessel_j1_kernel<Real>(rule_.nodes[i] * rule_.nodes[j]);
                kernel_(j, i) = kernel_(i, j);
            }
        // inner_(n, j) = sum_i w_i K(x_i x_j) e_n(x_i)
        const std::size_t d = static_cast<std::size_t>(degree_max) + 1;
        Matrix<Real> basis(d, q);
        for (std::size_t i = 0; i < q; ++i) {
            const auto e = laguerre_table<Real>(degree_max, rule_.nodes[i]);
            for (std::size_t nn = 0; nn < d; ++nn) basis(nn, i) = rule_.weights[i] * e[nn];
        }
        inner_ = Matrix<Real>(d, q);
        for (std::size_t nn = 0; nn < d; ++nn)
            for (std::size_t j = 0; j < q; ++j) {
                Real s(0);
                for (std::size_t i = 0; i < q; ++i) s += basis(nn, i) * kernel_(i, j);
                inner_(nn, j) = s;
            }
    }

    const QuadratureRule<Real>& rule() const { return rule_; }
    int degree_max() const { return degree_max_; }

    /// M-part of c_kn: int (1/rho) e^{-r t/rho} e_n(t/rho) e_k(t) dm(t).
    Real m_part(int k, int n, const Real& r) const {
        using std::exp;
        check(k, n);
        const Real rho = Real(2) - r;
        Real s(0);
        for (std::size_t i = 0; i < rule_.nodes.size(); ++i) {
            const Real& x = rule_.nodes[i];
            s += rule_.weights[i] * exp(-r * x / rho) * laguerre_eval(n, Real(x / rho)) * laguerre_eval(k, x);
        }
        return s / rho;
    }

    /// N-part of c_kn: rho sum_j w_j e_k(rho x_j) sum_i w_i K(x_i x_j) e_n(x_i).
    Real n_part(int k, int n, const Real& r) const {
        check(k, n);
        const Real rho = Real(2) - r;
        Real s(0);
        for (std::size_t j = 0; j < rule_.nodes.size(); ++j)
            s += rule_.weights[j] * laguerre_eval(k, Real(rho * rule_.nodes[j])) *
                 inner_(static_cast<std::size_t>(n), j);
        return rho * s;
    }

    /// a_kn = (M-part + N-part) / (k+1).
    Real entry(int k, int n, const Real& r) const { return (m_part(k, n, r) + n_part(k, n, r)) / Real(k + 1); }

private:
    void check(int k, int n) const {
        if (k < 0 || n < 0 || k > degree_max_ || n > degree_max_)
            throw DomainError("QuadratureOracle: index (" + std::to_string(k) + ", " + std::to_string(n) +
                              ") beyond precomputed degree " + std::to_string(degree_max_));
        if (rule_.order < k + n + 8)
            throw DomainError("QuadratureOracle: rule order " + std::to_string(rule_.order) +
                              " below k + n + 8 = " + std::to_string(k + n + 8));
    }

    QuadratureRule<Real> rule_;
    int degree_max_;
    Matrix<Real> kernel_;
    Matrix<Real> inner_;
};

namespace detail {

inline void require_oracle_r(const MapParams& p) {
    if (!(p.r >= 0.0 && p.r < 1.0))
        throw DomainError("oracle requires r in [0, 1), got " + std::to_string(p.r));
}

inline void require_rule_order(int order, int k, int n) {
    if (k < 0 || n < 0) throw DomainError("oracle indices must be nonnegative");
    if (order < k + n + 8)
        throw DomainError("oracle rule order " + std::to_string(order) + " below k + n + 8 = " +
                          std::to_string(k + n + 8));
}

}  // namespace detail

/// M-part of c_kn by direct quadrature with `rule`.
template <class Real>
Real oracle_entry_m(int k, int n, const MapParams& params, const QuadratureRule<Real>& rule) {
    using std::exp;
    detail::require_oracle_r(params);
    detail::require_rule_order(rule.order, k, n);
    const Real r(params.r);
    const Real rho = Real(2) - r;
    Real s(0);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const Real& x = rule.nodes[i];
        s += rule.weights[i] * exp(-r * x / rho) * laguerre_eval(n, Real(x / rho)) * laguerre_eval(k, x);
    }
    return s / rho;
}

/// N-part of c_kn by double quadrature with `rule`. Evaluates the full
/// kernel matrix; use QuadratureOracle for many entries.
template <class Real>
Real oracle_entry_n(int k, int n, const MapParams& params, const QuadratureRule<Real>& rule) {
    detail::require_oracle_r(params);
    detail::require_rule_order(rule.order, k, n);
    QuadratureOracle<Real> oracle(rule, std::max(k, n));
    return oracle.n_part(k, n, Real(params.r));
}

struct ValidationOptions {
    int quadrature_order = 128;
    Precision precision = Precision::high();
    /// Also evaluate the oracle at Q/2 and report the difference.
    bool self_check = true;
};

/// Compares closed-form a_kn with the quadrature oracle for k <= kmax,
/// n <= nmax and every r in r_grid. Entries with rel_err > tol are flagged;
/// failures are data, not exceptions.
inline std::vector<OracleReport> validate_matrix(int kmax, int nmax, const std::vector<double>& r_grid,
                                                 double tol, const ValidationOptions& opts = {}) {
    if (!(tol > 0)) throw DomainError("validate_matrix: tolerance must be positive");
    if (kmax < 0 || nmax < 0) throw DomainError("validate_matrix: kmax and nmax must be >= 0");
    std::vector<OracleReport> reports;
    if (r_grid.empty()) return reports;
    for (double r : r_grid) detail::require_oracle_r(MapParams::make(r));
    detail::require_rule_order(opts.quadrature_order, kmax, nmax);
    if (opts.self_check) detail::require_rule_order(opts.quadrature_order / 2, kmax, nmax);

    PrecisionScope scope(opts.precision);
    const int degree = std::max(kmax, nmax);
    QuadratureOracle<HighReal> oracle(gauss_laguerre_rule<HighReal>(opts.quadrature_order), degree);
    std::optional<QuadratureOracle<HighReal>> coarse;
    if (opts.self_check) coarse.emplace(gauss_laguerre_rule<HighReal>(opts.quadrature_order / 2), degree);

    for (double r : r_grid) {
        const HighReal rr(r);
        EntryAssembler<HighReal> closed(rr, degree + 1);
        for (int k = 0; k <= kmax; ++k)
            for (int n = 0; n <= nmax; ++n) {
                using std::abs;
                const HighReal cf = closed.entry(k, n).value;
                const HighReal ov = oracle.entry(k, n, rr);
                const HighReal diff = abs(cf - ov);
                OracleReport rep;
                rep.k = k;
                rep.n = n;
                rep.r = r;
                rep.closed_form = to_double(cf);
                rep.oracle_value = to_double(ov);
                rep.abs_err = to_double(diff);
                rep.rel_err = to_double(diff / std::max(HighReal(1), HighReal(abs(ov))));
                rep.quadrature_order = opts.quadrature_order;
                if (coarse) rep.refinement_delta = to_double(abs(ov - coarse->entry(k, n, rr)));
                rep.flagged = rep.rel_err > tol;
                reports.push_back(rep);
            }
    }
    return reports;
}

}  // namespace tentfarey
