#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "semjscc/core.hpp"

namespace semjscc {

// Adaptive Gauss-Kronrod (7,15) quadrature on finite intervals, with a
// convenience driver for decaying integrands on [0, inf).

namespace detail {

// Nodes/weights for the Kronrod 15-point rule and embedded Gauss 7-point rule
// on [-1, 1] (symmetric; positive half listed).
struct GK15 {
    static constexpr std::array<double, 8> xk = {
        0.0,
        0.2077849550078985, 0.4058451513773972, 0.5860872354676911,
        0.7415311855993945, 0.8648644233597691, 0.9491079123427585,
        0.9914553711208126};
    static constexpr std::array<double, 8> wk = {
        0.2094821410847278,
        0.2044329400752989, 0.1903505780647854, 0.1690047266392679,
        0.1406532597155259, 0.1047900103222502, 0.0630920926299786,
        0.0229353220105292};
    // Gauss-7 weights matched to xk[0], xk[2], xk[4], xk[6].
    static constexpr std::array<double, 4> wg = {
        0.4179591836734694, 0.3818300505051189, 0.2797053914892767,
        0.1294849661688697};
};

template <typename F>
void gk15(F&& f, double a, double b, double& kronrod, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double resk = 0.0, resg = 0.0;
    for (std::size_t i = 0; i < GK15::xk.size(); ++i) {
        double fv;
        if (i == 0) {
            fv = f(c);
            resk += GK15::wk[0] * fv;
            resg += GK15::wg[0] * fv;
        } else {
            double f1 = f(c - h * GK15::xk[i]);
            double f2 = f(c + h * GK15::xk[i]);
            resk += GK15::wk[i] * (f1 + f2);
            if (i % 2 == 0) resg += GK15::wg[i / 2] * (f1 + f2);
        }
    }
    kronrod = resk * h;
    err = std::abs((resk - resg) * h);
}

}  // namespace detail

// Integrates f over [a, b] by bisection-adaptive GK15 until the summed error
// estimate is below max(abs_tol, rel_tol * |integral|).
template <typename F>
double integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-13,
                          double abs_tol = 1e-300, int max_depth = 48) {
    struct Seg {
        double a, b, val, err;
        int depth;
    };
    double v0, e0;
    detail::gk15(f, a, b, v0, e0);
    std::vector<Seg> stack{{a, b, v0, e0, 0}};
    double total = v0, total_err = e0;
    // Refine the worst segment until the global error target is met.
    for (int iter = 0; iter < 20000; ++iter) {
        if (total_err <= std::max(abs_tol, rel_tol * std::abs(total))) break;
        std::size_t worst = 0;
        for (std::size_t i = 1; i < stack.size(); ++i)
            if (stack[i].err > stack[worst].err) worst = i;
        Seg s = stack[worst];
        if (s.depth >= max_depth) break;
        double m = 0.5 * (s.a + s.b);
        Seg l{s.a, m, 0, 0, s.depth + 1}, r{m, s.b, 0, 0, s.depth + 1};
        detail::gk15(f, l.a, l.b, l.val, l.err);
        detail::gk15(f, r.a, r.b, r.val, r.err);
        total += l.val + r.val - s.val;
        total_err += l.err + r.err - s.err;
        stack[worst] = l;
        stack.push_back(r);
    }
    return total;
}

// Integral of a nonnegative integrand decaying at least exponentially beyond
// some point: integrate [0, cut] adaptively and extend the tail by doubling
// panels until a panel contributes less than rel_tol of the running total.
template <typename F>
double integrate_semiinf(F&& f, double cut, double rel_tol = 1e-13) {
    double total = integrate_adaptive(f, 0.0, cut, rel_tol);
    double lo = cut;
    for (int k = 0; k < 64; ++k) {
        double hi = lo * 2.0;
        double piece = integrate_adaptive(f, lo, hi, rel_tol);
        total += piece;
        if (std::abs(piece) <= rel_tol * std::abs(total) || !std::isfinite(piece)) break;
        lo = hi;
    }
    return total;
}

}  // namespace semjscc
