#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "semjscc/optim.hpp"
#include "semjscc/prob.hpp"

namespace semjscc {

// Finite-alphabet source pair with the two distortion measures. The
// reconstruction alphabets are the column dimensions of the tables.
struct DiscreteSemanticSource {
    DiscreteDistribution p_x;
    StochasticMatrix p_s_given_x;
    DistortionTable d_s;
    DistortionTable d_x;

    DiscreteSemanticSource(DiscreteDistribution px, StochasticMatrix psx, DistortionTable ds,
                           DistortionTable dx)
        : p_x(std::move(px)), p_s_given_x(std::move(psx)), d_s(std::move(ds)), d_x(std::move(dx)) {
        detail::require(p_x.size() == p_s_given_x.input_size(),
                        "DiscreteSemanticSource: |X| mismatch between p_x and p_s_given_x");
        detail::require(d_s.rows() == p_s_given_x.output_size(),
                        "DiscreteSemanticSource: |S| mismatch between p_s_given_x and d_s");
        detail::require(d_x.rows() == p_x.size(),
                        "DiscreteSemanticSource: |X| mismatch between p_x and d_x");
    }

    std::size_t nx() const { return p_x.size(); }
    std::size_t ns() const { return p_s_given_x.output_size(); }
    std::size_t n_shat() const { return d_s.cols(); }
    std::size_t n_xhat() const { return d_x.cols(); }
};

struct DistortionPair {
    double d_s_max;
    double d_x_max;

    DistortionPair(double ds, double dx) : d_s_max(ds), d_x_max(dx) {
        detail::require(ds >= 0.0 && dx >= 0.0, "DistortionPair: distortions must be >= 0");
        detail::require(!std::isnan(ds) && !std::isnan(dx), "DistortionPair: NaN distortion");
    }
    bool s_relaxed() const { return is_inf(d_s_max); }
    bool x_relaxed() const { return is_inf(d_x_max); }
};

// d_hat_S(x, shat) = E[ d_S(S, shat) | X = x ].
inline DistortionTable lift_semantic_distortion(const DiscreteSemanticSource& src) {
    std::vector<double> t(src.nx() * src.n_shat(), 0.0);
    for (std::size_t x = 0; x < src.nx(); ++x)
        for (std::size_t sh = 0; sh < src.n_shat(); ++sh) {
            double v = 0.0;
            for (std::size_t s = 0; s < src.ns(); ++s) v += src.p_s_given_x(x, s) * src.d_s(s, sh);
            t[x * src.n_shat() + sh] = v;
        }
    return DistortionTable(src.nx(), src.n_shat(), std::move(t));
}

struct SemanticRdResult {
    double rate = 0.0;               // nats per source symbol
    StochasticMatrix test_channel;   // X -> (Shat x Xhat), column index v = shat * |Xhat| + xhat
    double d_s_achieved = 0.0;
    double d_x_achieved = 0.0;
    double lambda_s = 0.0;           // multipliers at the dual optimum
    double lambda_x = 0.0;
};

namespace detail {

// One Blahut-Arimoto solve of the Lagrangian  min_W I(p; W) + sum_x p(x) W(v|x) c(x,v),
// certified by the primal/dual gap. Returns the dual value (a lower bound
// within gap_tol of the minimum) and the achieving channel.
struct BaLagrangian {
    double value;
    std::vector<double> w;  // nx * nv conditional
    double gap;             // certified bound on the value's optimality error
};

// Internal state for one Lagrangian solve over a (possibly deduplicated)
// reproduction alphabet.
struct BaCore {
    const std::vector<double>& px;
    const std::vector<double>& cost;  // nx * nv
    std::size_t nx, nv;

    // Fills T(v) = sum_x p(x) e^{-c(x,v)} / Z(x) and returns G(q); Z uses a
    // per-row max shift so large multipliers cannot underflow everything.
    double pass(const std::vector<double>& q, std::vector<double>& t) const {
        std::fill(t.begin(), t.end(), 0.0);
        double value = 0.0;
        for (std::size_t x = 0; x < nx; ++x) {
            double m = -kInf;
            for (std::size_t v = 0; v < nv; ++v)
                if (q[v] > 0.0) m = std::max(m, std::log(q[v]) - cost[x * nv + v]);
            double z = 0.0;
            for (std::size_t v = 0; v < nv; ++v)
                if (q[v] > 0.0) z += std::exp(std::log(q[v]) - cost[x * nv + v] - m);
            double lz = std::log(z);
            for (std::size_t v = 0; v < nv; ++v) {
                // capped log-space accumulation: T can be astronomically large
                // for letters whose mass underflowed, and must stay finite
                double e = -cost[x * nv + v] - m - lz;
                t[v] += px[x] * std::exp(std::min(e, 700.0));
            }
            value -= px[x] * (lz + m);
        }
        return value;
    }

    void channel(const std::vector<double>& q, std::vector<double>& w) const {
        w.assign(nx * nv, 0.0);
        for (std::size_t x = 0; x < nx; ++x) {
            double m = -kInf;
            for (std::size_t v = 0; v < nv; ++v)
                if (q[v] > 0.0) m = std::max(m, std::log(q[v]) - cost[x * nv + v]);
            double z = 0.0;
            for (std::size_t v = 0; v < nv; ++v) {
                double e = q[v] > 0.0 ? std::exp(std::log(q[v]) - cost[x * nv + v] - m) : 0.0;
                w[x * nv + v] = e;
                z += e;
            }
            for (std::size_t v = 0; v < nv; ++v) w[x * nv + v] /= z;
        }
    }
};

// Blahut-Arimoto with support-drop acceleration. Plain BA identifies the
// optimal support but its Frank-Wolfe gap (max_v T(v) - 1, an upper bound on
// G(q) - min G) closes only at O(1/k) while near-boundary letters drain, so
// letters whose T sits well below 1 are dropped outright; the final KKT check
// over the full alphabet referees every drop and restores a letter if needed.
inline BaLagrangian ba_lagrangian(const std::vector<double>& px, const std::vector<double>& cost0,
                                  std::size_t nx, std::size_t nv0, double gap_tol,
                                  bool best_effort = false) {
    // merge duplicate reproduction columns (a relaxed constraint makes whole
    // blocks identical; any mass split among them is equivalent)
    std::vector<std::size_t> rep;
    std::vector<std::size_t> group(nv0);
    for (std::size_t v = 0; v < nv0; ++v) {
        bool found = false;
        for (std::size_t g = 0; g < rep.size() && !found; ++g) {
            bool same = true;
            for (std::size_t x = 0; x < nx && same; ++x)
                same = std::abs(cost0[x * nv0 + v] - cost0[x * nv0 + rep[g]]) <= 1e-14;
            if (same) {
                group[v] = g;
                found = true;
            }
        }
        if (!found) {
            group[v] = rep.size();
            rep.push_back(v);
        }
    }
    const std::size_t nv = rep.size();
    std::vector<double> cost(nx * nv);
    std::vector<std::size_t> gsize(nv, 0);
    for (std::size_t v = 0; v < nv0; ++v) gsize[group[v]]++;
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t g = 0; g < nv; ++g) cost[x * nv + g] = cost0[x * nv0 + rep[g]];

    BaCore core{px, cost, nx, nv};
    std::vector<double> q(nv, 1.0 / static_cast<double>(nv)), t(nv);
    double value = 0.0, gap = kInf;
    bool certified = false;

    if (nx == 2) {
        // Exact geometric solve. z(x) = sum_v q_v e^{-c(x,v)} is linear in q,
        // so minimizing G = -sum_x p_x ln z(x) over the simplex is a 2-D
        // convex problem over the polytope conv{a_v}, a_v = (e^{-c(0,v)},
        // e^{-c(1,v)}) (row-shifted). The optimum lies on the Pareto-maximal
        // boundary; each edge minimizer has a closed form.
        double c0 = cost[0], c1 = cost[nv];
        for (std::size_t v = 0; v < nv; ++v) {
            c0 = std::min(c0, cost[v]);
            c1 = std::min(c1, cost[nv + v]);
        }
        std::vector<double> a0(nv), a1(nv);
        for (std::size_t v = 0; v < nv; ++v) {
            a0[v] = std::exp(-(cost[v] - c0));
            a1[v] = std::exp(-(cost[nv + v] - c1));
        }
        const double p0 = px[0], p1 = px[1];
        auto fval = [&](double z0, double z1) {
            return -(p0 * std::log(z0) + p1 * std::log(z1));
        };
        double best = kInf;
        std::size_t bu = 0, bv = 0;
        double btheta = 1.0;
        for (std::size_t v = 0; v < nv; ++v) {
            double f = fval(a0[v], a1[v]);
            if (f < best) {
                best = f;
                bu = bv = v;
                btheta = 1.0;
            }
        }
        for (std::size_t u = 0; u < nv; ++u)
            for (std::size_t v = u + 1; v < nv; ++v) {
                double d0 = a0[u] - a0[v], d1 = a1[u] - a1[v];
                if (d0 * d1 >= 0.0) continue;  // one point dominates on this edge
                double th = -(p0 * d0 * a1[v] + p1 * d1 * a0[v]) / (d0 * d1);
                if (!(th > 0.0 && th < 1.0)) continue;
                double f = fval(a0[v] + th * d0, a1[v] + th * d1);
                if (f < best) {
                    best = f;
                    bu = u;
                    bv = v;
                    btheta = th;
                }
            }
        std::fill(q.begin(), q.end(), 0.0);
        q[bu] += btheta;
        q[bv] += 1.0 - btheta;
        value = core.pass(q, t);
        gap = *std::max_element(t.begin(), t.end()) - 1.0;
        certified = gap <= gap_tol + 1e-12 * (1.0 + std::abs(value));
    }

    for (int round = 0; round < 4 && !certified; ++round) {
        for (int it = 0; it < 8000; ++it) {
            value = core.pass(q, t);
            gap = *std::max_element(t.begin(), t.end()) - 1.0;
            if (gap <= gap_tol + 1e-13 * std::abs(value)) {
                certified = true;
                break;
            }
            // multiplicative update; zero letters stay zero
            double norm = 0.0;
            for (std::size_t v = 0; v < nv; ++v) {
                q[v] *= t[v];
                norm += q[v];
            }
            for (auto& e : q) e /= norm;
            // letters far below the optimality surface are leaving the
            // support; removing them restores geometric convergence
            if (it % 250 == 249) {
                for (std::size_t v = 0; v < nv; ++v)
                    if (q[v] > 0.0 && q[v] < 0.2 && t[v] - 1.0 < -5.0 * gap) q[v] = 0.0;
                double s = std::accumulate(q.begin(), q.end(), 0.0);
                for (auto& e : q) e /= s;
            }
        }
        if (certified) break;

        // a dropped letter turned out to be needed: give it mass and resume
        std::size_t worst =
            static_cast<std::size_t>(std::max_element(t.begin(), t.end()) - t.begin());
        for (auto& e : q) e *= (1.0 - 1e-3);
        q[worst] += 1e-3;
    }
    if (!certified && !best_effort)
        throw ConvergenceError("ba_lagrangian: no certified optimum", gap);

    // expand back to the original alphabet, splitting group mass uniformly
    std::vector<double> qx(nv0, 0.0);
    for (std::size_t v = 0; v < nv0; ++v)
        qx[v] = q[group[v]] / static_cast<double>(gsize[group[v]]);
    BaCore full{px, cost0, nx, nv0};
    std::vector<double> w;
    full.channel(qx, w);
    return {value, w, std::max(gap, 0.0)};
}

}  // namespace detail

// Semantic rate-distortion function with the two fidelity constraints,
// solved through the Lagrangian dual: R(D_s, D_x) = max_{l_s, l_x >= 0}
// [ min_W I + l_s (E d_hat_S - D_s) + l_x (E d_X - D_x) ]. The inner minimum
// is a standard Blahut-Arimoto run over the product reconstruction alphabet;
// the outer concave maximization uses coordinate golden-section sweeps with a
// Nelder-Mead polish. A relaxed (+inf) constraint pins its multiplier to 0.
inline SemanticRdResult semantic_rd_discrete(const DiscreteSemanticSource& src,
                                             const DistortionPair& d, double tol = 1e-9) {
    detail::require(tol > 0.0, "semantic_rd_discrete: tol must be > 0");
    const std::size_t nx = src.nx(), nsh = src.n_shat(), nxh = src.n_xhat();
    const std::size_t nv = nsh * nxh;
    const auto lifted = lift_semantic_distortion(src);
    const auto& px = src.p_x.probs();

    // per-(x, v) distortions for the two constraints
    std::vector<double> e1(nx * nv), e2(nx * nv);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t sh = 0; sh < nsh; ++sh)
            for (std::size_t xh = 0; xh < nxh; ++xh) {
                e1[x * nv + sh * nxh + xh] = lifted(x, sh);
                e2[x * nv + sh * nxh + xh] = src.d_x(x, xh);
            }

    // feasibility: the deterministic channel x -> (argmin shat, argmin xhat)
    // minimizes both expected distortions simultaneously
    double min_ds = 0.0, min_dx = 0.0;
    std::vector<std::size_t> vmin(nx);
    for (std::size_t x = 0; x < nx; ++x) {
        double b1 = kInf, b2 = kInf;
        std::size_t s_best = 0, x_best = 0;
        for (std::size_t sh = 0; sh < nsh; ++sh)
            if (lifted(x, sh) < b1) { b1 = lifted(x, sh); s_best = sh; }
        for (std::size_t xh = 0; xh < nxh; ++xh)
            if (src.d_x(x, xh) < b2) { b2 = src.d_x(x, xh); x_best = xh; }
        min_ds += px[x] * b1;
        min_dx += px[x] * b2;
        vmin[x] = s_best * nxh + x_best;
    }
    if (!d.s_relaxed() && d.d_s_max < min_ds - 1e-12)
        throw InfeasibleError("semantic", "semantic_rd_discrete: D_s below the minimum achievable "
                                          "expected semantic distortion");
    if (!d.x_relaxed() && d.d_x_max < min_dx - 1e-12)
        throw InfeasibleError("observed", "semantic_rd_discrete: D_x below the minimum achievable "
                                          "expected observed distortion");

    auto expected = [&](const std::vector<double>& w, const std::vector<double>& e) {
        double s = 0.0;
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t v = 0; v < nv; ++v) s += px[x] * w[x * nv + v] * e[x * nv + v];
        return s;
    };

    // zero-rate check: a rank-one channel W(v|x) = q(v) has distortion pair in
    // the convex hull of {(E_p e1(.,v), E_p e2(.,v))}; two-point supports
    // suffice to test hull-vs-box intersection in 2-D
    {
        std::vector<double> a1(nv, 0.0), a2(nv, 0.0);
        for (std::size_t v = 0; v < nv; ++v)
            for (std::size_t x = 0; x < nx; ++x) {
                a1[v] += px[x] * e1[x * nv + v];
                a2[v] += px[x] * e2[x * nv + v];
            }
        auto ok = [&](double u1, double u2) {
            return (d.s_relaxed() || u1 <= d.d_s_max + 1e-12) &&
                   (d.x_relaxed() || u2 <= d.d_x_max + 1e-12);
        };
        int hit_v = -1;
        double hit_theta = 0.0;
        int hit_w = -1;
        for (std::size_t v = 0; v < nv && hit_v < 0; ++v)
            if (ok(a1[v], a2[v])) hit_v = static_cast<int>(v);
        for (std::size_t v = 0; v < nv && hit_v < 0; ++v)
            for (std::size_t u = v + 1; u < nv && hit_v < 0; ++u) {
                // best mixture of v and u for constraint 1, then check 2 (and
                // symmetrically), plus the crossing point
                double lo = 0.0, hi = 1.0;
                for (double th : {0.0, 1.0, (d.s_relaxed() || a1[v] == a1[u])
                                                ? 0.5
                                                : std::clamp((d.d_s_max - a1[u]) / (a1[v] - a1[u]), lo, hi),
                                  (d.x_relaxed() || a2[v] == a2[u])
                                      ? 0.5
                                      : std::clamp((d.d_x_max - a2[u]) / (a2[v] - a2[u]), lo, hi)}) {
                    double u1 = th * a1[v] + (1 - th) * a1[u];
                    double u2 = th * a2[v] + (1 - th) * a2[u];
                    if (ok(u1, u2)) {
                        hit_v = static_cast<int>(v);
                        hit_w = static_cast<int>(u);
                        hit_theta = th;
                        break;
                    }
                }
            }
        if (hit_v >= 0) {
            std::vector<double> w(nx * nv, 0.0);
            for (std::size_t x = 0; x < nx; ++x) {
                if (hit_w < 0) {
                    w[x * nv + static_cast<std::size_t>(hit_v)] = 1.0;
                } else {
                    w[x * nv + static_cast<std::size_t>(hit_v)] = hit_theta;
                    w[x * nv + static_cast<std::size_t>(hit_w)] = 1.0 - hit_theta;
                }
            }
            SemanticRdResult r{0.0, StochasticMatrix(nx, nv, w), expected(w, e1), expected(w, e2),
                               0.0, 0.0};
            return r;
        }
    }

    const double ba_tol = std::min(tol, 1e-9) * 0.25;
    const bool use_s = !d.s_relaxed(), use_x = !d.x_relaxed();

    std::vector<double> cost(nx * nv);
    double final_gap = 0.0;
    auto dual_value = [&](double ls, double lx, std::vector<double>* w_out = nullptr) {
        for (std::size_t i = 0; i < cost.size(); ++i)
            cost[i] = (use_s ? ls * e1[i] : 0.0) + (use_x ? lx * e2[i] : 0.0);
        auto sol = detail::ba_lagrangian(px, cost, nx, nv, ba_tol, /*best_effort=*/true);
        if (w_out) {
            *w_out = std::move(sol.w);
            final_gap = sol.gap;
        }
        double g = sol.value;
        if (use_s) g -= ls * d.d_s_max;
        if (use_x) g -= lx * d.d_x_max;
        return g;
    };

    // concave dual maximization: coordinate sweeps with expanding brackets
    double ls = 0.0, lx = 0.0, g = dual_value(ls, lx);
    const double xtol = 1e-7;
    for (int sweep = 0; sweep < 8; ++sweep) {
        double g_prev = g;
        if (use_s) {
            ls = detail::maximize_ray([&](double t) { return dual_value(t, lx); },
                                      std::max(1.0, 2 * ls), xtol);
            g = dual_value(ls, lx);
        }
        if (use_x) {
            lx = detail::maximize_ray([&](double t) { return dual_value(ls, t); },
                                      std::max(1.0, 2 * lx), xtol);
            g = dual_value(ls, lx);
        }
        if (g - g_prev <= tol * 0.01) break;
    }
    if (use_s && use_x) {
        // Nelder-Mead polish on the (log-shifted) multiplier pair; coordinate
        // ascent alone can stall on the kinks of the nonsmooth dual.
        auto neg = [&](const std::vector<double>& u) {
            return -dual_value(std::max(0.0, u[0]), std::max(0.0, u[1]));
        };
        double fb = 0.0;
        auto best = detail::nelder_mead(neg, {ls, lx}, std::max(0.25, 0.25 * (ls + lx)), 1e-12, 400, &fb);
        if (-fb > g) {
            ls = std::max(0.0, best[0]);
            lx = std::max(0.0, best[1]);
            g = -fb;
        }
    }

    std::vector<double> w;
    g = dual_value(ls, lx, &w);
    if (final_gap > std::max(40.0 * ba_tol, 1e-8))
        throw ConvergenceError("semantic_rd_discrete: inner solver left a residual gap at the "
                               "dual optimum", final_gap);
    double ds_ach = expected(w, e1), dx_ach = expected(w, e2);

    // Letters with identical Lagrangian cost (ties, e.g. a zero multiplier)
    // admit any within-group mass split without changing the rate or the
    // dual objective; pick the split that restores a violated constraint,
    // breaking ties toward feasibility.
    if ((use_s && ds_ach > d.d_s_max + 1e-12) || (use_x && dx_ach > d.d_x_max + 1e-12)) {
        std::vector<int> grp(nv, -1);
        int ng = 0;
        for (std::size_t v = 0; v < nv; ++v) {
            if (grp[v] >= 0) continue;
            grp[v] = ng;
            for (std::size_t u = v + 1; u < nv; ++u) {
                bool same = true;
                for (std::size_t x = 0; x < nx && same; ++x)
                    same = std::abs(cost[x * nv + v] - cost[x * nv + u]) <= 1e-13;
                if (same) grp[u] = ng;
            }
            ++ng;
        }
        for (int pass = 0; pass < 2; ++pass) {
            bool viol_s = use_s && ds_ach > d.d_s_max + 1e-12;
            bool viol_x = use_x && dx_ach > d.d_x_max + 1e-12;
            if (!viol_s && !viol_x) break;
            const std::vector<double>& ek = viol_s ? e1 : e2;
            for (int gid = 0; gid < ng; ++gid) {
                std::vector<std::size_t> mem;
                for (std::size_t v = 0; v < nv; ++v)
                    if (grp[v] == gid) mem.push_back(v);
                if (mem.size() < 2) continue;
                // group conditional mass per x, then concentrate on the member
                // minimizing the violated expectation
                std::vector<double> mg(nx, 0.0);
                for (std::size_t x = 0; x < nx; ++x)
                    for (std::size_t v : mem) mg[x] += w[x * nv + v];
                double bestv = kInf;
                std::size_t vstar = mem[0];
                for (std::size_t v : mem) {
                    double c = 0.0;
                    for (std::size_t x = 0; x < nx; ++x) c += px[x] * mg[x] * ek[x * nv + v];
                    if (c < bestv) {
                        bestv = c;
                        vstar = v;
                    }
                }
                for (std::size_t x = 0; x < nx; ++x) {
                    for (std::size_t v : mem) w[x * nv + v] = 0.0;
                    w[x * nv + vstar] = mg[x];
                }
            }
            ds_ach = expected(w, e1);
            dx_ach = expected(w, e2);
        }
    }

    // Feasibility safeguard: nudge toward the deterministic min-distortion
    // channel until both constraints hold. Dual optimality puts the active
    // distortions on the boundary; the blend repairs last-digit overshoot.
    double need = 1.0;
    if (use_s && ds_ach > d.d_s_max && ds_ach > min_ds)
        need = std::min(need, 1.0 - 1e-12 - (ds_ach - d.d_s_max) / (ds_ach - min_ds));
    if (use_x && dx_ach > d.d_x_max && dx_ach > min_dx)
        need = std::min(need, 1.0 - 1e-12 - (dx_ach - d.d_x_max) / (dx_ach - min_dx));
    if (need < 1.0) {
        need = std::max(0.0, need);
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t v = 0; v < nv; ++v) {
                double base = w[x * nv + v] * need;
                if (v == vmin[x]) base += (1.0 - need);
                w[x * nv + v] = base;
            }
        ds_ach = expected(w, e1);
        dx_ach = expected(w, e2);
    }

    SemanticRdResult r{std::max(g, 0.0), StochasticMatrix(nx, nv, w), ds_ach, dx_ach,
                       use_s ? ls : 0.0, use_x ? lx : 0.0};
    return r;
}

// ---------------------------------------------------------------------------
// Gaussian vector source.

struct GaussianSourceSpec {
    Eigen::MatrixXd sigma_x;  // q x q, positive semidefinite
    Eigen::MatrixXd h;        // l x q
    Eigen::MatrixXd sigma_n;  // l x l, positive definite

    GaussianSourceSpec(Eigen::MatrixXd sx, Eigen::MatrixXd hmat, Eigen::MatrixXd sn)
        : sigma_x(std::move(sx)), h(std::move(hmat)), sigma_n(std::move(sn)) {
        detail::require(sigma_x.rows() == sigma_x.cols(), "GaussianSourceSpec: sigma_x not square");
        detail::require(sigma_n.rows() == sigma_n.cols(), "GaussianSourceSpec: sigma_n not square");
        detail::require(h.cols() == sigma_x.rows() && h.rows() == sigma_n.rows(),
                        "GaussianSourceSpec: h dimensions inconsistent");
        detail::require((sigma_x - sigma_x.transpose()).cwiseAbs().maxCoeff() <= 1e-10,
                        "GaussianSourceSpec: sigma_x not symmetric");
        detail::require((sigma_n - sigma_n.transpose()).cwiseAbs().maxCoeff() <= 1e-10,
                        "GaussianSourceSpec: sigma_n not symmetric");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_x);
        detail::require(es.eigenvalues().minCoeff() >= -1e-10,
                        "GaussianSourceSpec: sigma_x not positive semidefinite");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> en(sigma_n);
        detail::require(en.eigenvalues().minCoeff() > 0.0,
                        "GaussianSourceSpec: sigma_n must be positive definite");
    }

    std::size_t q_dim() const { return static_cast<std::size_t>(sigma_x.rows()); }
    std::size_t l_dim() const { return static_cast<std::size_t>(sigma_n.rows()); }
};

struct GaussianRdResult {
    double rate = 0.0;       // nats per source vector
    Eigen::MatrixXd delta;   // achieving error covariance
    Eigen::MatrixXd a_mat;   // test-source covariance (sigma_x for the plain RD value)
    Eigen::MatrixXd b_mat;   // test-conditional covariance (sigma_n likewise)
};

namespace detail {

// Reverse water-filling over eigencoordinates: maximize sum_i log d_i subject
// to 0 < d_i <= lam_i, sum d_i <= cap_tr, sum g_i d_i <= cap_g.
// d_i(mu, nu) = min(lam_i, 1/(mu + nu g_i)) with both multipliers bisected.
inline std::vector<double> waterfill_two(const std::vector<double>& lam,
                                         const std::vector<double>& g, double cap_tr,
                                         double cap_g) {
    const std::size_t n = lam.size();
    auto fill = [&](double mu, double nu) {
        std::vector<double> d(n);
        for (std::size_t i = 0; i < n; ++i) {
            double denom = mu + nu * g[i];
            d[i] = denom > 0.0 ? std::min(lam[i], 1.0 / denom) : lam[i];
        }
        return d;
    };
    auto tr = [](const std::vector<double>& d) {
        double s = 0.0;
        for (double v : d) s += v;
        return s;
    };
    auto trg = [&](const std::vector<double>& d) {
        double s = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) s += g[i] * d[i];
        return s;
    };
    auto solve_mu = [&](double nu) {
        // smallest mu >= 0 with trace constraint met
        if (tr(fill(0.0, nu)) <= cap_tr) return 0.0;
        double lo = 0.0, hi = 1.0;
        while (tr(fill(hi, nu)) > cap_tr) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            (tr(fill(mid, nu)) > cap_tr ? lo : hi) = mid;
        }
        return hi;
    };
    if (!std::isfinite(cap_g)) {
        double mu = solve_mu(0.0);
        return fill(mu, 0.0);
    }
    // nu = 0 first; raise nu until the weighted constraint holds
    double nu = 0.0, mu = solve_mu(0.0);
    if (trg(fill(mu, 0.0)) <= cap_g) return fill(mu, 0.0);
    double lo = 0.0, hi = 1.0;
    while (trg(fill(solve_mu(hi), hi)) > cap_g) {
        hi *= 2.0;
        if (hi > 1e18) break;
    }
    for (int it = 0; it < 200; ++it) {
        nu = 0.5 * (lo + hi);
        mu = solve_mu(nu);
        (trg(fill(mu, nu)) > cap_g ? lo : hi) = nu;
    }
    mu = solve_mu(hi);
    return fill(mu, hi);
}

// Simultaneous eigenbasis of sigma_x and h^T h when they commute; returns
// false when the pair is genuinely non-commuting.
inline bool joint_eigenbasis(const Eigen::MatrixXd& sx, const Eigen::MatrixXd& gram,
                             Eigen::MatrixXd& basis, std::vector<double>& lam,
                             std::vector<double>& g) {
    const double comm_tol = 1e-9 * (1.0 + sx.norm()) * (1.0 + gram.norm());
    if (((sx * gram) - (gram * sx)).cwiseAbs().maxCoeff() > comm_tol) return false;
    // A generic combination of two commuting symmetric matrices has simple
    // spectrum, so its eigenvectors diagonalize both.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sx + 0.7182818284590452 * gram);
    basis = es.eigenvectors();
    Eigen::MatrixXd dx = basis.transpose() * sx * basis;
    Eigen::MatrixXd dg = basis.transpose() * gram * basis;
    const std::size_t n = static_cast<std::size_t>(sx.rows());
    lam.resize(n);
    g.resize(n);
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        lam[i] = dx(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
        g[i] = std::max(0.0, dg(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
        for (std::size_t j = 0; j < n; ++j)
            if (i != j)
                off = std::max(off, std::abs(dx(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) +
                                        std::abs(dg(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
    }
    return off <= comm_tol * 10;
}

}  // namespace detail

// Gaussian semantic rate-distortion value: maximize log det(Delta) subject to
// 0 < Delta <= Sigma_X, tr(Delta) <= D_x, tr(h Delta h^T) <= D_s - tr(Sigma_N),
// then R = (1/2) [ log det Sigma_X - log det Delta ]. Solved exactly by
// two-multiplier reverse water-filling when Sigma_X and h^T h commute.
inline GaussianRdResult semantic_rd_gaussian(const GaussianSourceSpec& spec,
                                             const DistortionPair& d) {
    const double tr_n = spec.sigma_n.trace();
    if (!d.s_relaxed() && d.d_s_max <= tr_n + 1e-12)
        throw InfeasibleError("semantic",
                              "semantic_rd_gaussian: D_s at or below the semantic noise floor tr(Sigma_N)");
    if (d.d_x_max <= 0.0)
        throw InfeasibleError("observed", "semantic_rd_gaussian: D_x must be positive");

    Eigen::MatrixXd gram = spec.h.transpose() * spec.h;
    Eigen::MatrixXd basis;
    std::vector<double> lam, g;
    if (!detail::joint_eigenbasis(spec.sigma_x, gram, basis, lam, g))
        throw CapabilityError("semantic_rd_gaussian: sigma_x and h^T h do not commute; "
                              "the general-structure case is not supported");

    const double cap_g = d.s_relaxed() ? kInf : d.d_s_max - tr_n;
    const double cap_tr = d.d_x_max;
    // drop null directions of sigma_x (they carry no rate and no distortion)
    std::vector<double> lam_pos, g_pos;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < lam.size(); ++i)
        if (lam[i] > 1e-14) {
            lam_pos.push_back(lam[i]);
            g_pos.push_back(g[i]);
            idx.push_back(i);
        }
    auto dvec = detail::waterfill_two(lam_pos, g_pos, cap_tr, cap_g);

    double rate = 0.0;
    Eigen::VectorXd dfull = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lam.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
        rate += 0.5 * std::log(lam_pos[k] / dvec[k]);
        dfull(static_cast<Eigen::Index>(idx[k])) = dvec[k];
    }
    GaussianRdResult r;
    r.rate = std::max(rate, 0.0);
    r.delta = basis * dfull.asDiagonal() * basis.transpose();
    r.a_mat = spec.sigma_x;
    r.b_mat = spec.sigma_n;
    return r;
}

}  // namespace semjscc
