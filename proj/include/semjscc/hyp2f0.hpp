#pragma once

#include <cmath>

#include "semjscc/core.hpp"
#include "semjscc/quadrature.hpp"

namespace semjscc {

// Generalized hypergeometric 2F0(a, b; x) for a > 0, b >= 0, x <= 0,
// evaluated exactly through the Tricomi confluent function:
//
//   2F0(a, b; x) = z^a U(a, a - b + 1, z),   z = -1/x,
//   U(a, c, z)   = Gamma(a)^{-1} int_0^inf e^{-z t} t^{a-1} (1+t)^{c-a-1} dt.
//
// After the substitution s = z t the two combine into the moment integral
//
//   2F0(a, b; -1/z) = Gamma(a)^{-1} int_0^inf e^{-s} s^{a-1} (1 + s/z)^{-b} ds,
//
// which is what we integrate: a smooth, exponentially decaying integrand for
// every parameter combination this library needs (a >= 1 integer-ish,
// b = N_c * rho >= 0).

namespace detail {

// int_0^inf e^{-s} s^{a-1} (1 + c s)^{-b} ds  with a > 0, b >= 0, c > 0.
// Optional weight: an extra factor ln(1 + c s) (for d/db) or
// s / (1 + c s) (for d/dc, up to the -b factor applied by the caller).
enum class MomentWeight { none, log1p, ratio };

inline double gamma_moment(double a, double b, double c, MomentWeight w = MomentWeight::none) {
    auto f = [=](double s) {
        double v = std::exp(-s + (a - 1.0) * std::log(s) - b * std::log1p(c * s));
        switch (w) {
            case MomentWeight::log1p: return v * std::log1p(c * s);
            case MomentWeight::ratio: return v * s / (1.0 + c * s);
            default: return v;
        }
    };
    // The integrand peaks near s ~ a-1 and decays like e^{-s}; a cut at
    // a + 60 + 12*sqrt(a) keeps the adaptive tail extension short.
    double cut = a + 60.0 + 12.0 * std::sqrt(a);
    return integrate_semiinf(f, cut, 1e-14);
}

}  // namespace detail

inline double hyp2f0(double a, double b, double x) {
    detail::require(a >= 0.0, "hyp2f0: requires a >= 0");
    detail::require(b >= 0.0, "hyp2f0: requires b >= 0");
    detail::require(x <= 0.0, "hyp2f0: requires x <= 0 (divergent regime not supported)");
    if (a == 0.0 || b == 0.0 || x == 0.0) return 1.0;
    double c = -x;
    return detail::gamma_moment(a, b, c) / std::tgamma(a);
}

// d/dx 2F0(a, b; x) = a b 2F0(a+1, b+1; x)  (termwise in the defining series).
inline double hyp2f0_dx(double a, double b, double x) {
    return a * b * hyp2f0(a + 1.0, b + 1.0, x);
}

// d/db 2F0(a, b; x): differentiate (1 + c s)^{-b} under the integral sign.
inline double hyp2f0_db(double a, double b, double x) {
    detail::require(a > 0.0 && b >= 0.0 && x <= 0.0, "hyp2f0_db: domain");
    if (x == 0.0 || a == 0.0) return 0.0;
    double c = -x;
    return -detail::gamma_moment(a, b, c, detail::MomentWeight::log1p) / std::tgamma(a);
}

// Tricomi U(a, c, z) for a > 0, z > 0, via the same integral representation.
inline double tricomi_u(double a, double c, double z) {
    detail::require(a > 0.0 && z > 0.0, "tricomi_u: requires a > 0, z > 0");
    double b = a - c + 1.0;
    detail::require(b >= 0.0, "tricomi_u: only c <= a + 1 supported");
    return std::pow(z, -a) * (b == 0.0 ? 1.0 : detail::gamma_moment(a, b, 1.0 / z) / std::tgamma(a));
}

}  // namespace semjscc
