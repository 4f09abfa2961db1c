#pragma once

// Combinatorial and special-function kernels behind the operator matrices:
// exact binomials, the Laguerre basis e_n (generalized Laguerre with
// parameter 1, orthogonal for dm(t) = t e^{-t} dt), terminating Gauss sums
// 2F1(-k, -n; -k-n-1; z), the entire Bessel kernel J1(2 sqrt u)/sqrt u and
// Gauss-Laguerre rules for dm.
//
// Templates evaluate at the precision carried by Real (for HighReal, the
// default precision in effect at the call). Overloads taking a Precision set
// that scope themselves.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "precision.hpp"

namespace tentfarey {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// num/den for any nonzero den; cpp_rational wants a positive denominator.
inline Rational ratio(BigInt num, BigInt den) {
    if (den < 0) {
        num = -num;
        den = -den;
    }
    return Rational(num, den);
}

inline BigInt binomial(std::int64_t a, std::int64_t b) {
    if (b < 0 || b > a)
        throw DomainError("binomial(" + std::to_string(a) + ", " + std::to_string(b) +
                          ") requires 0 <= b <= a");
    b = std::min(b, a - b);
    BigInt c = 1;
    for (std::int64_t i = 1; i <= b; ++i) {
        c *= a - b + i;
        c /= i;
    }
    return c;
}

// ---------------------------------------------------------------------------
// Laguerre basis

/// e_n(t) = sum_{m=0}^{n} C(n+1, n-m) (-t)^m / m!, summed term by term.
template <class Real>
Real laguerre_eval(int n, const Real& t) {
    if (n < 0) throw DomainError("laguerre_eval: degree must be nonnegative");
    Real term(n + 1);
    Real sum = term;
    for (int m = 0; m < n; ++m) {
        term *= -t * Real(n - m) / Real((m + 2) * (m + 1));
        sum += term;
    }
    return sum;
}

inline HighReal laguerre_eval(int n, const HighReal& t, Precision p) {
    PrecisionScope scope(p);
    return laguerre_eval<HighReal>(n, at_working_precision(t));
}

/// Values e_0(t), ..., e_{nmax}(t).
template <class Real>
std::vector<Real> laguerre_table(int nmax, const Real& t) {
    std::vector<Real> out;
    out.reserve(static_cast<std::size_t>(nmax) + 1);
    for (int n = 0; n <= nmax; ++n) out.push_back(laguerre_eval(n, t));
    return out;
}

/// (e_n, e_n) in L^2(m) = Gamma(n+2)/n! = n + 1.
inline BigInt laguerre_norm(int n) {
    if (n < 0) throw DomainError("laguerre_norm: degree must be nonnegative");
    return BigInt(n) + 1;
}

/// L_n^{(1)}(x) and L_{n-1}^{(1)}(x) by the three-term recurrence.
template <class Real>
std::pair<Real, Real> laguerre_alpha1_pair(int n, const Real& x) {
    Real prev(0);
    Real cur(1);
    for (int j = 0; j < n; ++j) {
        Real next = ((Real(2 * j + 2) - x) * cur - Real(j + 1) * prev) / Real(j + 1);
        prev = std::move(cur);
        cur = std::move(next);
    }
    return {cur, prev};
}

// ---------------------------------------------------------------------------
// Terminating hypergeometric sums

/// 2F1(-k, -n; -k-n-1; z) as the finite sum over m <= min(k, n).
/// The lower parameter -k-n-1 first hits zero at m = k+n+1, past the
/// last nonzero term, so every denominator is nonzero.
template <class Real>
Real hyp2f1_terminating(int k, int n, const Real& z) {
    if (k < 0 || n < 0) throw DomainError("hyp2f1_terminating: k and n must be nonnegative");
    const int top = std::min(k, n);
    Real term(1);
    Real sum(1);
    for (int m = 0; m < top; ++m) {
        const std::int64_t num = static_cast<std::int64_t>(m - k) * (m - n);
        const std::int64_t den = static_cast<std::int64_t>(m - k - n - 1) * (m + 1);
        term *= Real(num) / Real(den) * z;
        sum += term;
    }
    return sum;
}

inline HighReal hyp2f1_terminating(int k, int n, const HighReal& z, Precision p) {
    PrecisionScope scope(p);
    return hyp2f1_terminating<HighReal>(k, n, at_working_precision(z));
}

inline Rational hyp2f1_terminating_exact(int k, int n, const Rational& z) {
    if (k < 0 || n < 0) throw DomainError("hyp2f1_terminating: k and n must be nonnegative");
    const int top = std::min(k, n);
    Rational term(1);
    Rational sum(1);
    for (int m = 0; m < top; ++m) {
        term *= ratio(BigInt(m - k) * (m - n), BigInt(m - k - n - 1) * (m + 1)) * z;
        sum += term;
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Bessel kernel

namespace detail {

inline void round_to_bits(HighReal& x, unsigned bits) {
    mpfr_prec_round(x.backend().data(), static_cast<mpfr_prec_t>(bits), MPFR_RNDN);
}

// Bits lost to cancellation when summing the kernel series at u: the largest
// term is about e^{2 sqrt u}.
inline unsigned kernel_cancellation_bits(double u) {
    return static_cast<unsigned>(std::ceil(2.0 * std::sqrt(u) * 1.4426950408889634)) + 16;
}

// Alternating series sum_j (-x)^j / (j! (j+1)!). Once the term ratio
// x/((j+1)(j+2)) is below one the omitted tail is bounded by the first
// omitted term.
template <class Real>
Real kernel_series(const Real& x, const Real& abs_tol) {
    using std::abs;
    Real term(1);
    Real sum(1);
    for (long j = 0;; ++j) {
        const Real jj(static_cast<double>((j + 1) * (j + 2)));
        term *= -x / jj;
        sum += term;
        if (x < jj && abs(term) <= abs_tol) break;
    }
    return sum;
}

}  // namespace detail

/// K(u) = J1(2 sqrt u)/sqrt u = sum_{j>=0} (-1)^j u^j / (j! (j+1)!).
///
/// The series is summed with enough guard bits to absorb its cancellation,
/// so the result is accurate to the absolute precision of Real for every u.
template <class Real>
Real bessel_j1_kernel(const Real& u) {
    if (u < 0) throw DomainError("bessel_j1_kernel: argument must be nonnegative");
    if (u == 0) return Real(1);
    const double ud = to_double(u);
    const unsigned guard = detail::kernel_cancellation_bits(ud);
    if constexpr (std::is_same_v<Real, double>) {
        if (guard <= 24) return detail::kernel_series<double>(u, std::ldexp(1.0, -60));
        PrecisionScope scope(Precision{53 + guard});
        const HighReal x(u);
        return to_double(detail::kernel_series<HighReal>(x, HighReal(std::ldexp(1.0, -64))));
    } else {
        const unsigned base = working_bits<Real>();
        Real result;
        {
            auto scope = PrecisionScope::raised_by(guard);
            const Real x = at_working_precision(u);
            using std::ldexp;
            result = detail::kernel_series<Real>(x, ldexp(Real(1), -static_cast<int>(base) - 8));
        }
        detail::round_to_bits(result, base);
        return result;
    }
}

inline HighReal bessel_j1_kernel(const HighReal& u, Precision p) {
    PrecisionScope scope(p);
    return bessel_j1_kernel<HighReal>(at_working_precision(u));
}

// ---------------------------------------------------------------------------
// Gauss-Laguerre quadrature for dm(t) = t e^{-t} dt

template <class Real>
struct QuadratureRule {
    std::vector<Real> nodes;
    std::vector<Real> weights;
    int order = 0;
    int alpha = 1;

    template <class F>
    Real integrate(F&& f) const {
        Real s(0);
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
        return s;
    }
};

namespace detail {

// Eigenvalues of the symmetric tridiagonal matrix with diagonal d and
// off-diagonal e (e[i] couples rows i and i+1), by implicit QL.
template <class Real>
std::vector<Real> tridiagonal_eigenvalues(std::vector<Real> d, std::vector<Real> e) {
    using std::abs;
    using std::sqrt;
    const int n = static_cast<int>(d.size());
    e.resize(d.size(), Real(0));
    const int max_iter = 60;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const Real dd = abs(d[m]) + abs(d[m + 1]);
                if (abs(e[m]) + dd == dd) break;
            }
            if (m == l) break;
            if (iter++ == max_iter)
                throw ComputationError("gauss_laguerre_rule: tridiagonal QL did not converge at row " +
                                       std::to_string(l) + " of " + std::to_string(n));
            Real g = (d[l + 1] - d[l]) / (Real(2) * e[l]);
            Real r = sqrt(g * g + Real(1));
            g = d[m] - d[l] + e[l] / (g + (g >= 0 ? abs(r) : -abs(r)));
            Real s(1), c(1), p(0);
            int i;
            bool underflow = false;
            for (i = m - 1; i >= l; --i) {
                const Real f = s * e[i];
                const Real b = c * e[i];
                r = sqrt(f * f + g * g);
                e[i + 1] = r;
                if (r == 0) {
                    d[i + 1] -= p;
                    e[m] = 0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + Real(2) * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if (underflow) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0;
        } while (true);
    }
    std::sort(d.begin(), d.end());
    return d;
}

}  // namespace detail

/// Q-point generalized Gauss-Laguerre rule (weight exponent 1), exact for
/// polynomials of degree <= 2Q-1 against dm.
///
/// Nodes start from the eigenvalues of the Jacobi matrix of the monic
/// recurrence and are polished by Newton on L_Q^{(1)}; weights use
/// w_i = x_i / ((Q+1) L_{Q+1}^{(1)}(x_i)^2), which keeps full relative
/// accuracy for the tiny weights of the largest nodes.
template <class Real>
QuadratureRule<Real> gauss_laguerre_rule(int order) {
    using std::abs;
    using std::sqrt;
    if (order < 1) throw DomainError("gauss_laguerre_rule: order must be >= 1");
    const std::size_t q = static_cast<std::size_t>(order);
    std::vector<Real> diag(q), off(q - 1);
    for (std::size_t i = 0; i < q; ++i) diag[i] = Real(static_cast<int>(2 * i + 2));
    for (std::size_t i = 0; i + 1 < q; ++i) off[i] = sqrt(Real(static_cast<int>((i + 1) * (i + 2))));

    QuadratureRule<Real> rule;
    rule.order = order;
    rule.nodes = detail::tridiagonal_eigenvalues(std::move(diag), std::move(off));

    const Real eps = machine_epsilon<Real>();
    for (std::size_t i = 0; i < q; ++i) {
        Real& x = rule.nodes[i];
        // Stop at a relative step of a few ulps, or once the steps stop
        // shrinking (the roundoff floor of the recurrence) provided they are
        // already below half the working digits.
        bool converged = false;
        Real previous(0);
        for (int it = 0; it < 100; ++it) {
            auto [lq, lq1] = laguerre_alpha1_pair(order, x);
            const Real deriv = (Real(order) * lq - Real(order + 1) * lq1) / x;
            const Real dx = lq / deriv;
            x -= dx;
            const Real step = abs(dx);
            if (step <= Real(4) * eps * x) {
                converged = true;
                break;
            }
            if (it > 2 && step >= previous && step <= sqrt(eps) * x) {
                converged = true;
                break;
            }
            previous = step;
        }
        if (!converged || !(x > 0))
            throw ComputationError("gauss_laguerre_rule: Newton polish failed for node " +
                                   std::to_string(i) + " of Q = " + std::to_string(order) +
                                   " (x = " + std::to_string(to_double(x)) + ")");
        const Real lnext = laguerre_alpha1_pair(order + 1, x).first;
        rule.weights.push_back(x / (Real(order + 1) * lnext * lnext));
    }

    Real total(0);
    for (std::size_t i = 0; i < q; ++i) {
        if (i > 0 && !(rule.nodes[i] > rule.nodes[i - 1]))
            throw ComputationError("gauss_laguerre_rule: nodes not strictly increasing at index " +
                                   std::to_string(i) + " (Q = " + std::to_string(order) + ")");
        if (!(rule.weights[i] > 0))
            throw ComputationError("gauss_laguerre_rule: nonpositive weight at index " +
                                   std::to_string(i));
        total += rule.weights[i];
    }
    if (abs(total - Real(1)) > Real(64 * order) * eps)
        throw ComputationError("gauss_laguerre_rule: weights sum to " + std::to_string(to_double(total)) +
                               ", expected 1 (Q = " + std::to_string(order) + ")");
    return rule;
}

inline QuadratureRule<HighReal> gauss_laguerre_rule(int order, Precision p) {
    PrecisionScope scope(p);
    return gauss_laguerre_rule<HighReal>(order);
}

}  // namespace tentfarey
