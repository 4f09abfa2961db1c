#pragma once

// The tent-Farey family F_r on [0, 1]:
//   F_r(x) = (2-r) x / (1 - r x)              for 0 <= x <= 1/2
//   F_r(x) = (2-r)(1-x) / (1 - r + r x)       for 1/2 <= x <= 1
// F_0 is the tent map, F_1 the Farey map. Double precision throughout.

#include <cmath>
#include <string>
#include <utility>

#include "errors.hpp"

namespace tentfarey {

struct MapParams {
    double r = 0.0;
    double rho = 2.0;

    /// Throws DomainError unless 0 <= r <= 1.
    static MapParams make(double r) {
        if (!(r >= 0.0 && r <= 1.0))
            throw DomainError("map parameter r must lie in [0, 1], got " + std::to_string(r));
        return MapParams{r, 2.0 - r};
    }

    /// As make(), additionally rejecting r = 1 where the operator matrices
    /// do not exist.
    static MapParams make_below_one(double r) {
        MapParams p = make(r);
        if (r >= 1.0) throw DomainError("operator matrices require r < 1");
        return p;
    }
};

namespace detail {

inline void check_unit_interval(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0))
        throw DomainError(std::string(what) + ": x must lie in [0, 1], got " + std::to_string(x));
}

}  // namespace detail

/// F_r(x). The junction x = 1/2 belongs to the left branch.
inline double f_r_eval(double x, const MapParams& p) {
    detail::check_unit_interval(x, "f_r_eval");
    if (x <= 0.5) return p.rho * x / (1.0 - p.r * x);
    return p.rho * (1.0 - x) / (1.0 - p.r + p.r * x);
}

/// The two preimages (left, right) of x under F_r.
inline std::pair<double, double> inverse_branches(double x, const MapParams& p) {
    detail::check_unit_interval(x, "inverse_branches");
    const double y0 = x / (p.rho + p.r * x);
    return {y0, 1.0 - y0};
}

/// (P_r f)(x) = rho/(rho + r x)^2 [f(x/(rho + r x)) + f(1 - x/(rho + r x))].
template <class F>
double apply_transfer_pointwise(F&& f, double x, const MapParams& p) {
    const double denom = p.rho + p.r * x;
    const double y0 = x / denom;
    return p.rho / (denom * denom) * (f(y0) + f(1.0 - y0));
}

/// g_r(x) = 1/(1 - r + r x), the fixed point of P_r.
inline double invariant_density(double x, const MapParams& p) {
    detail::check_unit_interval(x, "invariant_density");
    if (p.r == 1.0 && x == 0.0)
        throw DomainError("invariant_density: pole at x = 0 for the Farey map (r = 1)");
    return 1.0 / (1.0 - p.r + p.r * x);
}

}  // namespace tentfarey
