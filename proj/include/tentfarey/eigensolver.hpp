#pragma once

// Dense real nonsymmetric eigensolver with residual certification.
//
// Pipeline: Parlett-Reinsch balancing, Householder reduction to upper
// Hessenberg form, Francis double-shift QR with deflation, then one right
// eigenvector per eigenvalue by inverse iteration on the original matrix.
// Templated on the scalar so the same code runs in double or HighReal.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "operator_matrix.hpp"
#include "precision.hpp"

namespace tentfarey {

struct EigenOptions {
    /// Certificate: ||A v - lambda v||_2 <= tol * ||A||_F for every pair.
    double tol = 1e-10;
    /// QR sweep budget is sweeps_per_dimension * N.
    int sweeps_per_dimension = 40;
    bool certify = true;
};

/// Eigen-decomposition of one matrix, sorted by descending real part and
/// then descending imaginary part.
struct Spectrum {
    std::vector<std::complex<double>> eigenvalues;
    std::vector<double> residuals;
    /// Unit-norm right eigenvectors, same order as eigenvalues.
    std::vector<std::vector<std::complex<double>>> eigenvectors;
    double r = 0.0;
    int N = 0;
    double frobenius_norm = 0.0;
    unsigned precision_bits = 53;
    int sweeps = 0;
};

namespace detail {

// Parlett-Reinsch balancing by powers of two; similarity, so exact.
template <class Real>
void balance(Matrix<Real>& a) {
    using std::abs;
    const std::size_t n = a.rows();
    const Real radix(2);
    const Real sqrdx(4);
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            Real c(0), r(0);
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) {
                    c += abs(a(j, i));
                    r += abs(a(i, j));
                }
            if (c == 0 || r == 0) continue;
            Real g = r / radix;
            Real f(1);
            const Real s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < Real(0.95) * s) {
                done = false;
                const Real inv = Real(1) / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= inv;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

// Householder reduction to upper Hessenberg form, in place.
template <class Real>
void reduce_to_hessenberg(Matrix<Real>& a) {
    using std::abs;
    using std::sqrt;
    const std::size_t n = a.rows();
    if (n < 3) return;
    std::vector<Real> v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        Real scale(0);
        for (std::size_t i = k + 1; i < n; ++i) scale += abs(a(i, k));
        if (scale == 0) continue;
        Real h(0);
        for (std::size_t i = k + 1; i < n; ++i) {
            v[i] = a(i, k) / scale;
            h += v[i] * v[i];
        }
        Real g = sqrt(h);
        if (v[k + 1] > 0) g = -g;
        h -= v[k + 1] * g;
        v[k + 1] -= g;
        for (std::size_t j = k + 1; j < n; ++j) {
            Real f(0);
            for (std::size_t i = k + 1; i < n; ++i) f += v[i] * a(i, j);
            f /= h;
            for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= f * v[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            Real f(0);
            for (std::size_t j = k + 1; j < n; ++j) f += a(i, j) * v[j];
            f /= h;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * v[j];
        }
        a(k + 1, k) = scale * g;
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = Real(0);
    }
}

template <class Real>
Real signed_like(const Real& magnitude, const Real& sign_of) {
    using std::abs;
    return sign_of >= 0 ? abs(magnitude) : -abs(magnitude);
}

template <class Real>
struct RawEigen {
    std::vector<Real> re;
    std::vector<Real> im;
    int sweeps = 0;
};

// Francis double-shift QR on an upper Hessenberg matrix (destroyed).
// Eigenvalues come out in deflation order.
template <class Real>
RawEigen<Real> hessenberg_qr(Matrix<Real>& a, int budget) {
    using std::abs;
    using std::sqrt;
    const int n = static_cast<int>(a.rows());
    RawEigen<Real> out;
    out.re.assign(static_cast<std::size_t>(n), Real(0));
    out.im.assign(static_cast<std::size_t>(n), Real(0));
    std::vector<bool> found(static_cast<std::size_t>(n), false);
    auto A = [&a](int i, int j) -> Real& {
        return a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    };

    Real anorm(0);
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += abs(A(i, j));

    int nn = n - 1;
    Real t(0);
    int its = 0;
    while (nn >= 0) {
        int l;
        for (l = nn; l >= 1; --l) {
            Real s = abs(A(l - 1, l - 1)) + abs(A(l, l));
            if (s == 0) s = anorm;
            if (abs(A(l, l - 1)) + s == s) {
                A(l, l - 1) = Real(0);
                break;
            }
        }
        Real x = A(nn, nn);
        if (l == nn) {
            out.re[static_cast<std::size_t>(nn)] = x + t;
            found[static_cast<std::size_t>(nn)] = true;
            --nn;
            its = 0;
            continue;
        }
        Real y = A(nn - 1, nn - 1);
        Real w = A(nn, nn - 1) * A(nn - 1, nn);
        if (l == nn - 1) {
            const Real p = Real(0.5) * (y - x);
            const Real q = p * p + w;
            Real z = sqrt(abs(q));
            x += t;
            const std::size_t i0 = static_cast<std::size_t>(nn - 1), i1 = static_cast<std::size_t>(nn);
            if (q >= 0) {
                z = p + signed_like(z, p);
                out.re[i0] = out.re[i1] = x + z;
                if (z != 0) out.re[i1] = x - w / z;
                out.im[i0] = out.im[i1] = Real(0);
            } else {
                out.re[i0] = out.re[i1] = x + p;
                out.im[i0] = z;
                out.im[i1] = -z;
            }
            found[i0] = found[i1] = true;
            nn -= 2;
            its = 0;
            continue;
        }

        if (out.sweeps >= budget) {
            std::vector<std::complex<double>> partial;
            for (std::size_t i = 0; i < found.size(); ++i)
                if (found[i]) partial.emplace_back(to_double(out.re[i]), to_double(out.im[i]));
            throw ConvergenceError("QR iteration exceeded its budget of " + std::to_string(budget) +
                                       " sweeps with " + std::to_string(nn + 1) + " eigenvalues unresolved",
                                   std::move(partial));
        }
        if (its > 0 && its % 10 == 0) {
            // exceptional shift
            t += x;
            for (int i = 0; i <= nn; ++i) A(i, i) -= x;
            const Real s = abs(A(nn, nn - 1)) + abs(A(nn - 1, nn - 2));
            x = Real(0.75) * s;
            y = x;
            w = Real(-0.4375) * s * s;
        }
        ++its;
        ++out.sweeps;

        int m;
        Real p(0), q(0), r(0), z(0);
        for (m = nn - 2; m >= l; --m) {
            z = A(m, m);
            r = x - z;
            Real s = y - z;
            p = (r * s - w) / A(m + 1, m) + A(m, m + 1);
            q = A(m + 1, m + 1) - z - r - s;
            r = A(m + 2, m + 1);
            s = abs(p) + abs(q) + abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const Real u = abs(A(m, m - 1)) * (abs(q) + abs(r));
            const Real v = abs(p) * (abs(A(m - 1, m - 1)) + abs(z) + abs(A(m + 1, m + 1)));
            if (u + v == v) break;
        }
        for (int i = m + 2; i <= nn; ++i) {
            A(i, i - 2) = Real(0);
            if (i != m + 2) A(i, i - 3) = Real(0);
        }
        for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
                p = A(k, k - 1);
                q = A(k + 1, k - 1);
                r = Real(0);
                if (k != nn - 1) r = A(k + 2, k - 1);
                x = abs(p) + abs(q) + abs(r);
                if (x != 0) {
                    p /= x;
                    q /= x;
                    r /= x;
                }
            }
            const Real s = signed_like(Real(sqrt(p * p + q * q + r * r)), p);
            if (s == 0) continue;
            if (k == m) {
                if (l != m) A(k, k - 1) = -A(k, k - 1);
            } else {
                A(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {
                p = A(k, j) + q * A(k + 1, j);
                if (k != nn - 1) {
                    p += r * A(k + 2, j);
                    A(k + 2, j) -= p * z;
                }
                A(k + 1, j) -= p * y;
                A(k, j) -= p * x;
            }
            const int mmin = nn < k + 3 ? nn : k + 3;
            for (int i = l; i <= mmin; ++i) {
                p = x * A(i, k) + y * A(i, k + 1);
                if (k != nn - 1) {
                    p += z * A(i, k + 2);
                    A(i, k + 2) -= p * r;
                }
                A(i, k + 1) -= p * q;
                A(i, k) -= p;
            }
        }
    }
    return out;
}

// Solves M x = b in place by LU with partial pivoting. Pivots below
// `floor` are replaced by `floor`, which is what inverse iteration wants
// for a (nearly) singular shifted matrix.
template <class Real>
void solve_in_place(Matrix<Real> m, std::vector<Real>& b, const Real& floor) {
    using std::abs;
    const std::size_t n = m.rows();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (abs(m(i, k)) > abs(m(piv, k))) piv = i;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
            std::swap(b[k], b[piv]);
        }
        if (abs(m(k, k)) < floor) m(k, k) = m(k, k) < 0 ? -floor : floor;
        for (std::size_t i = k + 1; i < n; ++i) {
            const Real f = m(i, k) / m(k, k);
            if (f == 0) continue;
            for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
            b[i] -= f * b[k];
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        Real s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= m(k, j) * b[j];
        b[k] = s / m(k, k);
    }
}

// ||A x - lambda x||_2 for x = xr + i xi, lambda = lr + i li.
template <class Real>
Real residual_norm(const Matrix<Real>& a, const Real& lr, const Real& li, const std::vector<Real>& xr,
                   const std::vector<Real>& xi) {
    using std::sqrt;
    const std::size_t n = a.rows();
    Real total(0);
    for (std::size_t i = 0; i < n; ++i) {
        Real re(0), im(0);
        for (std::size_t j = 0; j < n; ++j) {
            re += a(i, j) * xr[j];
            im += a(i, j) * xi[j];
        }
        re -= lr * xr[i] - li * xi[i];
        im -= lr * xi[i] + li * xr[i];
        total += re * re + im * im;
    }
    return sqrt(total);
}

template <class Real>
struct EigenVector {
    std::vector<Real> re;
    std::vector<Real> im;
    Real residual;
};

template <class Real>
void normalize(std::vector<Real>& xr, std::vector<Real>& xi) {
    using std::sqrt;
    Real s(0);
    for (std::size_t i = 0; i < xr.size(); ++i) s += xr[i] * xr[i] + xi[i] * xi[i];
    s = sqrt(s);
    if (s == 0) return;
    for (std::size_t i = 0; i < xr.size(); ++i) {
        xr[i] /= s;
        xi[i] /= s;
    }
}

// Inverse iteration for the eigenvalue lr + i li. A complex shift is
// handled through the real 2N system [[A - lr, li], [-li, A - lr]].
template <class Real>
EigenVector<Real> inverse_iteration(const Matrix<Real>& a, const Real& lr, const Real& li,
                                    const Real& anorm, const Real& target) {
    const std::size_t n = a.rows();
    const Real eps = machine_epsilon<Real>();
    const Real floor = eps * (anorm > 0 ? anorm : Real(1));
    const bool is_complex = li != 0;
    const std::size_t dim = is_complex ? 2 * n : n;

    Matrix<Real> shifted(dim, dim);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            shifted(i, j) = a(i, j);
            if (is_complex) shifted(i + n, j + n) = a(i, j);
        }
    for (std::size_t i = 0; i < n; ++i) {
        shifted(i, i) -= lr;
        if (is_complex) {
            shifted(i + n, i + n) -= lr;
            shifted(i, i + n) = li;
            shifted(i + n, i) = -li;
        }
    }

    std::vector<Real> b(dim);
    for (std::size_t i = 0; i < dim; ++i) b[i] = Real(static_cast<int>((i * 7919) % 17 + 1)) / Real(17);

    EigenVector<Real> best;
    bool have = false;
    for (int it = 0; it < 4; ++it) {
        solve_in_place(shifted, b, floor);
        std::vector<Real> xr(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(n));
        std::vector<Real> xi(n, Real(0));
        if (is_complex) std::copy(b.begin() + static_cast<std::ptrdiff_t>(n), b.end(), xi.begin());
        normalize(xr, xi);
        Real res = residual_norm(a, lr, li, xr, xi);
        if (!have || res < best.residual) {
            best = EigenVector<Real>{xr, xi, res};
            have = true;
        }
        if (best.residual <= target) break;
        for (std::size_t i = 0; i < n; ++i) {
            b[i] = xr[i];
            if (is_complex) b[i + n] = xi[i];
        }
    }
    return best;
}

}  // namespace detail

/// Eigenvalues and certified eigenvectors of a square matrix.
template <class Real>
Spectrum eigenvalues(const Matrix<Real>& a, const EigenOptions& opts = {}) {
    if (!a.square() || a.rows() == 0) throw DomainError("eigenvalues: matrix must be square and nonempty");
    if (!(opts.tol > 0)) throw DomainError("eigenvalues: tolerance must be positive");
    const std::size_t n = a.rows();
    const Real anorm = frobenius_norm(a);

    Matrix<Real> h = a;
    detail::balance(h);
    detail::reduce_to_hessenberg(h);
    auto raw = detail::hessenberg_qr(h, opts.sweeps_per_dimension * static_cast<int>(n));

    struct Item {
        std::complex<double> value;
        std::size_t index;
    };
    std::vector<Item> order;
    for (std::size_t i = 0; i < n; ++i)
        order.push_back({{to_double(raw.re[i]), to_double(raw.im[i])}, i});
    std::stable_sort(order.begin(), order.end(), [](const Item& x, const Item& y) {
        if (x.value.real() != y.value.real()) return x.value.real() > y.value.real();
        return x.value.imag() > y.value.imag();
    });

    Spectrum out;
    out.N = static_cast<int>(n);
    out.frobenius_norm = to_double(anorm);
    out.precision_bits = working_bits<Real>();
    out.sweeps = raw.sweeps;
    const Real target = Real(opts.tol) * anorm * Real(0.01);
    for (const Item& item : order) {
        const Real& lr = raw.re[item.index];
        const Real& li = raw.im[item.index];
        auto vec = detail::inverse_iteration(a, lr, li, anorm, target);
        const double res = to_double(vec.residual);
        if (opts.certify && res > opts.tol * out.frobenius_norm)
            throw CertificationError("eigenpair (" + std::to_string(item.value.real()) + ", " +
                                     std::to_string(item.value.imag()) + ") has residual " +
                                     detail::sci(res) + " > " +
                                     detail::sci(opts.tol * out.frobenius_norm));
        std::vector<std::complex<double>> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = {to_double(vec.re[i]), to_double(vec.im[i])};
        out.eigenvalues.push_back(item.value);
        out.residuals.push_back(res);
        out.eigenvectors.push_back(std::move(v));
    }
    return out;
}

inline Spectrum eigenvalues(const TruncatedOperator& op, const EigenOptions& opts = {}) {
    Spectrum s = eigenvalues(op.entries, opts);
    s.r = op.r;
    return s;
}

/// Eigenvalues of A_{r,N} with both the entries and the QR iteration in
/// HighReal at `precision`.
inline Spectrum eigenvalues_extended(int N, const MapParams& params, const EntryOptions& entry_opts,
                                     const EigenOptions& opts = {}) {
    PrecisionScope scope(entry_opts.precision);
    const auto a = build_matrix<HighReal>(N, HighReal(params.r), entry_opts).first;
    Spectrum s = eigenvalues(a, opts);
    s.r = params.r;
    return s;
}

/// ||A v - lambda v||_2 for a unit vector v.
inline double residual(const Matrix<double>& a, std::complex<double> lambda,
                       std::span<const std::complex<double>> v) {
    if (v.size() != a.cols()) throw DomainError("residual: vector length does not match the matrix");
    double norm2 = 0.0;
    for (const auto& x : v) norm2 += std::norm(x);
    if (norm2 == 0.0) throw DomainError("residual: zero vector");
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-8) throw DomainError("residual: vector must have unit norm");
    double total = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        std::complex<double> s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
        s -= lambda * v[i];
        total += std::norm(s);
    }
    return std::sqrt(total);
}

inline double residual(const TruncatedOperator& op, std::complex<double> lambda,
                       std::span<const std::complex<double>> v) {
    return residual(op.entries, lambda, v);
}

}  // namespace tentfarey
