#pragma once

// Matrix entries of the transfer operator P_r = M_r + N_r in the Laguerre
// basis {e_n} of L^2(t e^{-t} dt):
//
//   a_kn = c_kn / (k+1),   c_kn = ((M_r + N_r) e_n, e_k),
//
// with the closed form
//
//   a_kn = G(k, n) + sum_{l=0}^{n} (-1)^l C(n+1, n-l) G(k, l),
//   G(k, l) = C(l+k+1, l) (2-r) / 2^{l+k+2} * r^k 2F1(-k, -l; -k-l-1; 2(r-1)/r).
//
// The first term is the M_r part, the l-sum the N_r part. r^k 2F1(...) is
// expanded as sum_m h_m r^{k-m} (2(r-1))^m, a polynomial in r, so r = 0 is an
// ordinary evaluation and never divides by r.
//
// Rows are indexed by k (test function e_k), columns by n (argument e_n).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <type_traits>
#include <utility>
#include <string>
#include <vector>

#include "errors.hpp"
#include "maps.hpp"
#include "matrix.hpp"
#include "precision.hpp"
#include "special_fn.hpp"

namespace tentfarey {

struct EntryOptions {
    Precision precision = Precision::high();
    /// Reject entries whose running error bound exceeds
    /// max_error * max(1, |a_kn|).
    bool check_precision = true;
    double max_error = 1e-12;
};

template <class Real>
struct EntryEstimate {
    Real value;
    Real error_bound;
};

template <class Real>
struct EntryParts {
    Real m_part;  // first line of the closed form
    Real n_part;  // the alternating l-sum
};

namespace detail {

template <class Real>
Real big_to_real(const BigInt& b) {
    if constexpr (std::is_same_v<Real, double>)
        return b.template convert_to<double>();
    else
        return Real(b.str());
}

}  // namespace detail

/// Evaluates a_kn for one r with shared tables of powers, binomials and the
/// blocks G(k, l). Blocks are built on first use.
template <class Real>
class EntryAssembler {
public:
    EntryAssembler(const Real& r, int size) : r_(r), size_(size) {
        if (size < 1) throw DomainError("EntryAssembler: size must be >= 1");
        if (!(r >= 0 && r < 1))
            throw DomainError("operator matrices require r in [0, 1), got " + std::to_string(to_double(r)));
        const std::size_t n = static_cast<std::size_t>(size);
        r_pow_.resize(n);
        w_pow_.resize(n);
        r_pow_[0] = Real(1);
        w_pow_[0] = Real(1);
        const Real w = Real(2) * (r - Real(1));
        for (std::size_t j = 1; j < n; ++j) {
            r_pow_[j] = r_pow_[j - 1] * r;
            w_pow_[j] = w_pow_[j - 1] * w;
        }
        // C(n+1, n-l) for 0 <= l <= n < size
        outer_binom_ = Matrix<Real>(n, n);
        for (int row = 0; row < size; ++row)
            for (int l = 0; l <= row; ++l)
                outer_binom_(row, l) = detail::big_to_real<Real>(binomial(row + 1, row - l));
        block_ = Matrix<Real>(n, n);
        block_mag_ = Matrix<Real>(n, n);
        have_block_.assign(n * n, false);
    }

    int size() const { return size_; }

    /// a_kn with an a-priori bound on its accumulated rounding error.
    EntryEstimate<Real> entry(int k, int n) {
        check_index(k, n);
        const std::size_t kk = static_cast<std::size_t>(k);
        const std::size_t nn = static_cast<std::size_t>(n);
        ensure_block(k, n);
        Real sum = block_(kk, nn);
        Real mag = block_mag_(kk, nn);
        for (int l = 0; l <= n; ++l) {
            ensure_block(k, l);
            const std::size_t ll = static_cast<std::size_t>(l);
            const Real term = outer_binom_(nn, ll) * block_(kk, ll);
            if (l % 2 == 0)
                sum += term;
            else
                sum -= term;
            mag += outer_binom_(nn, ll) * block_mag_(kk, ll);
        }
        const Real gamma(static_cast<double>(2 * (k + n) + 16));
        return {sum, gamma * machine_epsilon<Real>() * mag};
    }

    EntryParts<Real> parts(int k, int n) {
        check_index(k, n);
        const std::size_t kk = static_cast<std::size_t>(k);
        ensure_block(k, n);
        Real nsum(0);
        for (int l = 0; l <= n; ++l) {
            ensure_block(k, l);
            const Real term = outer_binom_(static_cast<std::size_t>(n), static_cast<std::size_t>(l)) *
                              block_(kk, static_cast<std::size_t>(l));
            if (l % 2 == 0)
                nsum += term;
            else
                nsum -= term;
        }
        return {block_(kk, static_cast<std::size_t>(n)), nsum};
    }

private:
    void check_index(int k, int n) const {
        if (k < 0 || n < 0 || k >= size_ || n >= size_)
            throw DomainError("matrix index (" + std::to_string(k) + ", " + std::to_string(n) +
                              ") outside assembler of size " + std::to_string(size_));
    }

    // G(k, l) and the same sum with every term replaced by its magnitude.
    void ensure_block(int k, int l) {
        using std::abs;
        using std::ldexp;
        const std::size_t idx = static_cast<std::size_t>(k) * static_cast<std::size_t>(size_) +
                                static_cast<std::size_t>(l);
        if (have_block_[idx]) return;
        const int top = std::min(k, l);
        Real h(1);
        Real poly(0);
        Real poly_mag(0);
        for (int m = 0; m <= top; ++m) {
            if (m > 0) {
                const std::int64_t num = static_cast<std::int64_t>(m - 1 - k) * (m - 1 - l);
                const std::int64_t den = static_cast<std::int64_t>(m - 2 - k - l) * m;
                h *= Real(num) / Real(den);
            }
            const Real term = h * r_pow_[static_cast<std::size_t>(k - m)] * w_pow_[static_cast<std::size_t>(m)];
            poly += term;
            poly_mag += abs(term);
        }
        const Real prefactor =
            ldexp(detail::big_to_real<Real>(binomial(l + k + 1, l)) * (Real(2) - r_), -(l + k + 2));
        const std::size_t kk = static_cast<std::size_t>(k);
        const std::size_t ll = static_cast<std::size_t>(l);
        block_(kk, ll) = prefactor * poly;
        block_mag_(kk, ll) = prefactor * poly_mag;
        have_block_[idx] = true;
    }

    Real r_;
    int size_;
    std::vector<Real> r_pow_;
    std::vector<Real> w_pow_;
    Matrix<Real> outer_binom_;
    Matrix<Real> block_;
    Matrix<Real> block_mag_;
    std::vector<bool> have_block_;
};

namespace detail {

template <class Real>
void enforce_precision(const EntryEstimate<Real>& e, int k, int n, const EntryOptions& opts) {
    using std::abs;
    if (!opts.check_precision) return;
    const double bound = to_double(e.error_bound);
    const double scale = std::max(1.0, std::abs(to_double(e.value)));
    if (bound > opts.max_error * scale)
        throw PrecisionError("matrix entry (" + std::to_string(k) + ", " + std::to_string(n) +
                                 "): error bound " + detail::sci(bound) + " exceeds " +
                                 detail::sci(opts.max_error * scale) + " at " +
                                 std::to_string(working_bits<Real>()) +
                                 " bits; increase the precision",
                             bound, working_bits<Real>());
}

}  // namespace detail

/// a_kn at the precision carried by Real.
template <class Real>
EntryEstimate<Real> entry_value(int k, int n, const Real& r) {
    if (k < 0 || n < 0) throw DomainError("matrix_entry: indices must be nonnegative");
    EntryAssembler<Real> assembler(r, std::max(k, n) + 1);
    return assembler.entry(k, n);
}

template <class Real>
EntryParts<Real> entry_parts(int k, int n, const Real& r) {
    if (k < 0 || n < 0) throw DomainError("entry_parts: indices must be nonnegative");
    EntryAssembler<Real> assembler(r, std::max(k, n) + 1);
    return assembler.parts(k, n);
}

/// a_kn at the requested precision, kept in HighReal.
inline HighReal matrix_entry_high(int k, int n, const MapParams& params, const EntryOptions& opts = {}) {
    if (!(params.r >= 0.0 && params.r < 1.0))
        throw DomainError("matrix_entry requires r in [0, 1), got " + std::to_string(params.r));
    PrecisionScope scope(opts.precision);
    const auto e = entry_value<HighReal>(k, n, HighReal(params.r));
    detail::enforce_precision(e, k, n, opts);
    return e.value;
}

/// a_kn rounded to double. Native precision (53 bits) runs in double.
inline double matrix_entry(int k, int n, const MapParams& params, const EntryOptions& opts = {}) {
    opts.precision.validate();
    if (!(params.r >= 0.0 && params.r < 1.0))
        throw DomainError("matrix_entry requires r in [0, 1), got " + std::to_string(params.r));
    if (opts.precision.is_native()) {
        const auto e = entry_value<double>(k, n, params.r);
        detail::enforce_precision(e, k, n, opts);
        return e.value;
    }
    return to_double(matrix_entry_high(k, n, params, opts));
}

/// Exact a_kn for rational r, used as cancellation-free ground truth.
inline Rational matrix_entry_exact(int k, int n, const Rational& r) {
    if (k < 0 || n < 0) throw DomainError("matrix_entry_exact: indices must be nonnegative");
    if (r < 0 || r >= 1) throw DomainError("matrix_entry_exact requires r in [0, 1)");
    auto block = [&](int kk, int l) {
        Rational h(1), poly(0);
        const Rational w = 2 * (r - 1);
        for (int m = 0; m <= std::min(kk, l); ++m) {
            if (m > 0) h *= ratio(BigInt(m - 1 - kk) * (m - 1 - l), BigInt(m - 2 - kk - l) * m);
            Rational term = h;
            for (int j = 0; j < kk - m; ++j) term *= r;
            for (int j = 0; j < m; ++j) term *= w;
            poly += term;
        }
        return Rational(binomial(l + kk + 1, l)) * (2 - r) * poly / Rational(BigInt(1) << (l + kk + 2));
    };
    Rational sum = block(k, n);
    for (int l = 0; l <= n; ++l) {
        const Rational term = Rational(binomial(n + 1, n - l)) * block(k, l);
        if (l % 2 == 0)
            sum += term;
        else
            sum -= term;
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Truncations

/// North-west N x N corner A_{r,N}, entries rounded to double after
/// assembly at `precision_bits`.
struct TruncatedOperator {
    double r = 0.0;
    int N = 0;
    unsigned precision_bits = 0;
    Matrix<double> entries;
    /// Sum of the diagonal accumulated at working precision, then rounded.
    double trace = 0.0;
    /// Largest a-priori rounding bound over all entries.
    double max_error_bound = 0.0;
};

/// A_{r,N} at the precision carried by Real, with the largest entry error
/// bound.
template <class Real>
std::pair<Matrix<Real>, Real> build_matrix(int N, const Real& r, const EntryOptions& opts = {}) {
    if (N < 1) throw DomainError("build_truncation: N must be >= 1");
    EntryAssembler<Real> assembler(r, N);
    Matrix<Real> a(static_cast<std::size_t>(N), static_cast<std::size_t>(N));
    Real worst(0);
    for (int k = 0; k < N; ++k)
        for (int n = 0; n < N; ++n) {
            auto e = assembler.entry(k, n);
            detail::enforce_precision(e, k, n, opts);
            if (e.error_bound > worst) worst = e.error_bound;
            a(static_cast<std::size_t>(k), static_cast<std::size_t>(n)) = std::move(e.value);
        }
    return {std::move(a), worst};
}

/// Entries stay in HighReal; for extended-precision eigensolves.
inline Matrix<HighReal> build_truncation_high(int N, const MapParams& params, const EntryOptions& opts = {}) {
    PrecisionScope scope(opts.precision);
    return build_matrix<HighReal>(N, HighReal(params.r), opts).first;
}

inline TruncatedOperator build_truncation(int N, const MapParams& params, const EntryOptions& opts = {}) {
    opts.precision.validate();
    if (!(params.r >= 0.0 && params.r < 1.0))
        throw DomainError("build_truncation requires r in [0, 1), got " + std::to_string(params.r));
    TruncatedOperator op;
    op.r = params.r;
    op.N = N;
    op.precision_bits = opts.precision.mantissa_bits;
    if (opts.precision.is_native()) {
        auto [a, worst] = build_matrix<double>(N, params.r, opts);
        op.trace = trace(a);
        op.max_error_bound = worst;
        op.entries = std::move(a);
    } else {
        PrecisionScope scope(opts.precision);
        auto [a, worst] = build_matrix<HighReal>(N, HighReal(params.r), opts);
        op.trace = to_double(trace(a));
        op.max_error_bound = to_double(worst);
        op.entries = a.cast<double>();
    }
    return op;
}

/// a_00, ..., a_{N-1,N-1} at working precision; cheaper than a full build.
template <class Real>
std::vector<Real> diagonal_entries(int N, const Real& r, const EntryOptions& opts = {}) {
    if (N < 1) throw DomainError("diagonal_entries: N must be >= 1");
    EntryAssembler<Real> assembler(r, N);
    std::vector<Real> d;
    d.reserve(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) {
        auto e = assembler.entry(k, k);
        detail::enforce_precision(e, k, k, opts);
        d.push_back(std::move(e.value));
    }
    return d;
}

/// trace(A_{r,N}) for every N in 1..nmax, accumulated at the requested
/// precision. Element N-1 is the trace of the N x N truncation.
inline std::vector<double> truncated_traces(int nmax, const MapParams& params, const EntryOptions& opts = {}) {
    opts.precision.validate();
    if (!(params.r >= 0.0 && params.r < 1.0))
        throw DomainError("truncated_traces requires r in [0, 1), got " + std::to_string(params.r));
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(nmax));
    if (opts.precision.is_native()) {
        double s = 0.0;
        for (double d : diagonal_entries<double>(nmax, params.r, opts)) out.push_back(s += d);
    } else {
        PrecisionScope scope(opts.precision);
        HighReal s(0);
        for (const HighReal& d : diagonal_entries<HighReal>(nmax, HighReal(params.r), opts)) {
            s += d;
            out.push_back(to_double(s));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Analytic spectral data

namespace detail {

inline void require_below_one(const MapParams& p, const char* what) {
    if (!(p.r >= 0.0 && p.r < 1.0))
        throw DomainError(std::string(what) + " requires r in [0, 1), got " + std::to_string(p.r));
}

}  // namespace detail

/// trace(P_r) = 1/(1-r) + (sqrt(1+4 rho) - 1)/(2 sqrt(1+4 rho)).
inline double analytic_trace(const MapParams& p) {
    detail::require_below_one(p, "analytic_trace");
    const double s = std::sqrt(1.0 + 4.0 * p.rho);
    return 1.0 / (1.0 - p.r) + (s - 1.0) / (2.0 * s);
}

/// 4 rho / (1 + sqrt(1 + 4 rho))^2, the ratio of the N_r eigenvalues.
inline double n_spectrum_base(const MapParams& p) {
    const double d = 1.0 + std::sqrt(1.0 + 4.0 * p.rho);
    return 4.0 * p.rho / (d * d);
}

/// Nonzero eigenvalues rho^{-1}, ..., rho^{-kmax} of M_r.
inline std::vector<double> m_spectrum(int kmax, const MapParams& p) {
    detail::require_below_one(p, "m_spectrum");
    if (kmax < 1) throw DomainError("m_spectrum: kmax must be >= 1");
    std::vector<double> out;
    for (int k = 1; k <= kmax; ++k) out.push_back(std::pow(p.rho, -k));
    return out;
}

/// Nonzero eigenvalues (-1)^{k-1} b^k, k = 1..kmax, of N_r.
inline std::vector<double> n_spectrum(int kmax, const MapParams& p) {
    detail::require_below_one(p, "n_spectrum");
    if (kmax < 1) throw DomainError("n_spectrum: kmax must be >= 1");
    const double b = n_spectrum_base(p);
    std::vector<double> out;
    for (int k = 1; k <= kmax; ++k) out.push_back((k % 2 == 1 ? 1.0 : -1.0) * std::pow(b, k));
    return out;
}

/// rho^{-k} + (-1)^{k-1} b^k for odd k: the k-th eigenvalues of M_r and N_r
/// added together.
inline double sum_curve(int k, const MapParams& p) {
    detail::require_below_one(p, "sum_curve");
    if (k < 1 || k % 2 == 0) throw DomainError("sum_curve: k must be a positive odd integer");
    return std::pow(p.rho, -k) + std::pow(n_spectrum_base(p), k);
}

}  // namespace tentfarey
