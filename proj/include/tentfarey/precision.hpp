#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <string>
#include <type_traits>

#include "errors.hpp"

namespace tentfarey {

/// Arbitrary-precision real used for entry assembly and the quadrature
/// oracle. Expression templates are off so that `auto` behaves.
using HighReal = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                               boost::multiprecision::et_off>;

/// Working precision in mantissa bits. 53 selects native `double`.
struct Precision {
    unsigned mantissa_bits = 256;

    constexpr Precision() = default;
    constexpr explicit Precision(unsigned bits) : mantissa_bits(bits) {}

    static constexpr Precision native() { return Precision{53}; }
    static constexpr Precision high() { return Precision{256}; }

    constexpr bool is_native() const { return mantissa_bits == 53; }

    void validate() const {
        if (mantissa_bits < 53)
            throw DomainError("precision must be at least 53 mantissa bits, got " +
                              std::to_string(mantissa_bits));
    }

    friend constexpr bool operator==(Precision, Precision) = default;
};

namespace detail {

inline unsigned digits10_for_bits(unsigned bits) {
    return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

}  // namespace detail

/// Sets the default precision of newly created HighReal values for the
/// lifetime of the guard. The MPFR default is process-global in this Boost
/// release, so concurrent scopes with different precisions must not overlap.
class PrecisionScope {
public:
    explicit PrecisionScope(Precision p) : saved_(HighReal::default_precision()) {
        p.validate();
        HighReal::default_precision(detail::digits10_for_bits(p.mantissa_bits));
    }
    /// Raise the current precision by `extra_bits`.
    static PrecisionScope raised_by(unsigned extra_bits);

    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;
    ~PrecisionScope() { HighReal::default_precision(saved_); }

private:
    struct RawDigits {
        unsigned digits10;
    };
    explicit PrecisionScope(RawDigits d) : saved_(HighReal::default_precision()) {
        HighReal::default_precision(d.digits10);
    }

    unsigned saved_;
};

/// Mantissa bits actually carried by values of type Real created now.
template <class Real>
unsigned working_bits() {
    if constexpr (std::is_same_v<Real, double>) {
        return 53;
    } else {
        Real probe(0);
        return static_cast<unsigned>(mpfr_get_prec(probe.backend().data()));
    }
}

inline PrecisionScope PrecisionScope::raised_by(unsigned extra_bits) {
    const unsigned bits = working_bits<HighReal>() + extra_bits;
    return PrecisionScope(RawDigits{detail::digits10_for_bits(bits)});
}

/// 2^{1-bits}: spacing of Real just above 1.
template <class Real>
Real machine_epsilon() {
    using std::ldexp;
    return ldexp(Real(1), 1 - static_cast<int>(working_bits<Real>()));
}

/// Copy of x carried at the current default precision. HighReal arithmetic
/// runs at the largest precision among its operands, so inputs entering a
/// PrecisionScope are re-rounded with this.
template <class Real>
Real at_working_precision(const Real& x) {
    if constexpr (std::is_same_v<Real, double>)
        return x;
    else
        return Real(x, Real::default_precision());
}

template <class Real>
double to_double(const Real& x) {
    return static_cast<double>(x);
}

}  // namespace tentfarey
