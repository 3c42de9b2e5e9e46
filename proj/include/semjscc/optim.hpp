#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "semjscc/core.hpp"

namespace semjscc {
namespace detail {

// Euclidean projection onto the probability simplex [Michelot / sorted
// threshold variant].
inline void project_simplex(std::vector<double>& v) {
    std::vector<double> u(v);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, theta = 0.0;
    int k = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        css += u[i];
        double t = (css - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) {
            theta = t;
            k = static_cast<int>(i) + 1;
        }
    }
    (void)k;
    for (auto& x : v) x = std::max(0.0, x - theta);
}

// Derivative-free Nelder-Mead on R^n. Small-dimension workhorse for the
// nonconvex outer problems; callers multistart it.
inline std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                       std::vector<double> x0, double step, double ftol,
                                       int max_iter, double* fbest_out = nullptr) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> xs(n + 1, x0);
    std::vector<double> fs(n + 1);
    for (std::size_t i = 0; i < n; ++i) xs[i + 1][i] += step;
    for (std::size_t i = 0; i <= n; ++i) fs[i] = f(xs[i]);

    auto order = [&]() {
        for (std::size_t i = 1; i <= n; ++i) {
            auto xi = xs[i];
            double fi = fs[i];
            std::size_t j = i;
            while (j > 0 && fs[j - 1] > fi) {
                xs[j] = xs[j - 1];
                fs[j] = fs[j - 1];
                --j;
            }
            xs[j] = xi;
            fs[j] = fi;
        }
    };
    order();

    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(fs[n] - fs[0]) <= ftol * (std::abs(fs[0]) + ftol)) break;
        std::vector<double> c(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) c[k] += xs[i][k] / static_cast<double>(n);

        auto blend = [&](double t) {
            std::vector<double> x(n);
            for (std::size_t k = 0; k < n; ++k) x[k] = c[k] + t * (c[k] - xs[n][k]);
            return x;
        };
        auto xr = blend(1.0);
        double fr = f(xr);
        if (fr < fs[0]) {
            auto xe = blend(2.0);
            double fe = f(xe);
            if (fe < fr) { xs[n] = xe; fs[n] = fe; }
            else { xs[n] = xr; fs[n] = fr; }
        } else if (fr < fs[n - 1]) {
            xs[n] = xr; fs[n] = fr;
        } else {
            auto xc = blend(fr < fs[n] ? 0.5 : -0.5);
            double fc = f(xc);
            if (fc < std::min(fr, fs[n])) {
                xs[n] = xc; fs[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t k = 0; k < n; ++k) xs[i][k] = 0.5 * (xs[i][k] + xs[0][k]);
                    fs[i] = f(xs[i]);
                }
            }
        }
        order();
    }
    if (fbest_out) *fbest_out = fs[0];
    return xs[0];
}

// Expands [0, hi] until g stops improving at the right end, then golden-max.
// For concave g on [0, inf) this finds the global maximizer.
template <typename G>
double maximize_ray(G&& g, double hi0, double xtol, double cap = 1e8) {
    double hi = hi0;
    double gprev = g(hi * 0.5), gcur = g(hi);
    while (gcur > gprev + 1e-13 * (1.0 + std::abs(gcur)) && hi < cap) {
        hi *= 2.0;
        gprev = gcur;
        gcur = g(hi);
    }
    return golden_max(g, 0.0, hi, xtol);
}

}  // namespace detail
}  // namespace semjscc
