// Test-only reference implementations. Everything here recomputes spec'd
// quantities through routes independent of the library's production path:
// closed forms, exhaustive/refined grids, and textbook single-constraint
// iterations written from scratch.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "semjscc/prob.hpp"

namespace oracles {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log(p) - (1 - p) * std::log(1 - p);
}

// Binary source with Hamming distortion: R(D) = H(p) - H(D) for D < min(p,1-p).
inline double binary_hamming_rd(double p1, double d) {
    double pm = std::min(p1, 1.0 - p1);
    if (d >= pm) return 0.0;
    return binary_entropy(p1) - binary_entropy(d);
}

// Classic single-constraint rate-distortion by a from-scratch alternating
// iteration with an outer golden search on the multiplier. Used as the
// degenerate-path comparator for the two-constraint solver.
inline double classic_rd(const std::vector<double>& px, const std::vector<std::vector<double>>& dist,
                         double dmax, double tol = 1e-11) {
    const std::size_t nx = px.size(), nv = dist[0].size();
    double dmin = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
        double b = kInf;
        for (std::size_t v = 0; v < nv; ++v) b = std::min(b, dist[x][v]);
        dmin += px[x] * b;
    }
    if (dmax < dmin - 1e-12) throw std::invalid_argument("classic_rd: infeasible distortion");

    auto dual = [&](double lam) {
        std::vector<double> q(nv, 1.0 / nv);
        double value = 0.0;
        for (int it = 0; it < 400000; ++it) {
            std::vector<double> qn(nv, 0.0), t(nv, 0.0);
            double val = 0.0;
            for (std::size_t x = 0; x < nx; ++x) {
                double z = 0.0;
                for (std::size_t v = 0; v < nv; ++v) z += q[v] * std::exp(-lam * dist[x][v]);
                val -= px[x] * std::log(z);
                for (std::size_t v = 0; v < nv; ++v) {
                    double e = q[v] * std::exp(-lam * dist[x][v]) / z;
                    qn[v] += px[x] * e;
                    t[v] += px[x] * std::exp(-lam * dist[x][v]) / z;
                }
            }
            value = val;
            // optimality certificate: max_v T(v) <= 1 at the minimizing q
            if (*std::max_element(t.begin(), t.end()) - 1.0 < tol * 0.25 + 1e-13 * std::abs(val)) break;
            q.swap(qn);
        }
        return value - lam * dmax;
    };

    // expanding bracket + golden section on the concave dual
    double hi = 1.0, gl = dual(hi * 0.5), gh = dual(hi);
    while (gh > gl && hi < 1e8) {
        hi *= 2;
        gl = gh;
        gh = dual(hi);
    }
    double a = 0.0, b = hi;
    const double phi = 0.6180339887498949;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = dual(x1), f2 = dual(x2);
    for (int it = 0; it < 120; ++it) {
        if (f1 >= f2) {
            b = x2; x2 = x1; f2 = f1; x1 = b - phi * (b - a); f1 = dual(x1);
        } else {
            a = x1; x1 = x2; f1 = f2; x2 = a + phi * (b - a); f2 = dual(x2);
        }
    }
    return std::max(0.0, std::max(f1, f2));
}

// Exhaustive grid over test channels W : X -> V (rows on the V-simplex at the
// given resolution) followed by shrinking-step mass-move refinement. The
// problem is convex, so local refinement of the grid argmin reaches the
// global minimum; the refinement floor is far below the comparison tolerance.
struct GridRdResult {
    double rate = kInf;
    std::vector<double> w;
};

inline GridRdResult grid_semantic_rd(const std::vector<double>& px,
                                     const std::vector<std::vector<double>>& e1,
                                     const std::vector<std::vector<double>>& e2, double ds_max,
                                     double dx_max, int coarse_steps) {
    const std::size_t nx = px.size(), nv = e1[0].size();

    // enumerate compositions of `coarse_steps` into nv bins
    std::vector<std::vector<double>> rows;
    std::vector<int> comp(nv, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int left) {
        if (pos == nv - 1) {
            comp[pos] = left;
            std::vector<double> r(nv);
            for (std::size_t v = 0; v < nv; ++v) r[v] = static_cast<double>(comp[v]) / coarse_steps;
            rows.push_back(r);
            return;
        }
        for (int k = 0; k <= left; ++k) {
            comp[pos] = k;
            rec(pos + 1, left - k);
        }
    };
    rec(0, coarse_steps);

    auto eval = [&](const std::vector<const std::vector<double>*>& wsel, double& i_out,
                    double& d1_out, double& d2_out) {
        std::vector<double> q(nv, 0.0);
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t v = 0; v < nv; ++v) q[v] += px[x] * (*wsel[x])[v];
        double mi = 0.0, d1 = 0.0, d2 = 0.0;
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t v = 0; v < nv; ++v) {
                double e = (*wsel[x])[v];
                if (e > 0.0) mi += px[x] * e * std::log(e / q[v]);
                d1 += px[x] * e * e1[x][v];
                d2 += px[x] * e * e2[x][v];
            }
        i_out = mi;
        d1_out = d1;
        d2_out = d2;
    };

    GridRdResult best;
    // full product grid over rows (test instances keep nx small)
    std::vector<std::size_t> sel(nx, 0);
    std::vector<const std::vector<double>*> wsel(nx);
    while (true) {
        for (std::size_t x = 0; x < nx; ++x) wsel[x] = &rows[sel[x]];
        double mi, d1, d2;
        eval(wsel, mi, d1, d2);
        if (d1 <= ds_max + 1e-12 && d2 <= dx_max + 1e-12 && mi < best.rate) {
            best.rate = mi;
            best.w.clear();
            for (std::size_t x = 0; x < nx; ++x)
                best.w.insert(best.w.end(), wsel[x]->begin(), wsel[x]->end());
        }
        std::size_t x = 0;
        while (x < nx && ++sel[x] == rows.size()) sel[x++] = 0;
        if (x == nx) break;
    }
    if (!std::isfinite(best.rate)) return best;

    // mass-move refinement with shrinking step
    auto eval_flat = [&](const std::vector<double>& w, double& mi, double& d1, double& d2) {
        std::vector<const std::vector<double>*> rs;
        std::vector<std::vector<double>> tmp(nx);
        for (std::size_t x = 0; x < nx; ++x) {
            tmp[x].assign(w.begin() + x * nv, w.begin() + (x + 1) * nv);
            rs.push_back(&tmp[x]);
        }
        eval(rs, mi, d1, d2);
    };
    double mi, d1, d2;
    eval_flat(best.w, mi, d1, d2);
    for (double step = 1.0 / (2.0 * coarse_steps); step > 1e-5; step *= 0.5) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (std::size_t x = 0; x < nx; ++x)
                for (std::size_t a = 0; a < nv; ++a)
                    for (std::size_t b = 0; b < nv; ++b) {
                        if (a == b || best.w[x * nv + a] < step) continue;
                        auto trial = best.w;
                        trial[x * nv + a] -= step;
                        trial[x * nv + b] += step;
                        double tm, t1, t2;
                        eval_flat(trial, tm, t1, t2);
                        if (t1 <= ds_max + 1e-12 && t2 <= dx_max + 1e-12 && tm < best.rate - 1e-14) {
                            best.rate = tm;
                            best.w = trial;
                            improved = true;
                        }
                    }
        }
    }
    return best;
}

}  // namespace oracles
