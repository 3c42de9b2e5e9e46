#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

#include "semjscc/core.hpp"

namespace semjscc {

inline constexpr double kProbSumTol = 1e-12;

// Probability mass function over a finite alphabet. Entries are validated at
// construction: nonnegative, summing to one within kProbSumTol.
class DiscreteDistribution {
public:
    explicit DiscreteDistribution(std::vector<double> probs) : p_(std::move(probs)) {
        detail::require(!p_.empty(), "DiscreteDistribution: empty support");
        double s = 0.0;
        for (double v : p_) {
            detail::require(v >= 0.0 && std::isfinite(v),
                            "DiscreteDistribution: entries must be finite and >= 0");
            s += v;
        }
        detail::require(std::abs(s - 1.0) <= kProbSumTol,
                        "DiscreteDistribution: entries must sum to 1");
    }

    static DiscreteDistribution uniform(std::size_t n) {
        return DiscreteDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
    }

    static DiscreteDistribution point_mass(std::size_t n, std::size_t at) {
        std::vector<double> p(n, 0.0);
        p.at(at) = 1.0;
        return DiscreteDistribution(std::move(p));
    }

    // Normalizes an arbitrary nonnegative weight vector.
    static DiscreteDistribution normalized(std::vector<double> w) {
        double s = std::accumulate(w.begin(), w.end(), 0.0);
        detail::require(s > 0.0, "DiscreteDistribution::normalized: zero mass");
        for (double& v : w) v /= s;
        return DiscreteDistribution(std::move(w));
    }

    std::size_t size() const { return p_.size(); }
    double operator[](std::size_t i) const { return p_[i]; }
    const std::vector<double>& probs() const { return p_; }

private:
    std::vector<double> p_;
};

// Row-stochastic matrix: row y is the conditional distribution given input y.
class StochasticMatrix {
public:
    StochasticMatrix(std::size_t input_size, std::size_t output_size, std::vector<double> rows)
        : in_(input_size), out_(output_size), a_(std::move(rows)) {
        detail::require(in_ > 0 && out_ > 0, "StochasticMatrix: empty alphabet");
        detail::require(a_.size() == in_ * out_, "StochasticMatrix: wrong element count");
        for (std::size_t y = 0; y < in_; ++y) {
            double s = 0.0;
            for (std::size_t z = 0; z < out_; ++z) {
                double v = (*this)(y, z);
                detail::require(v >= 0.0 && std::isfinite(v),
                                "StochasticMatrix: entries must be finite and >= 0");
                s += v;
            }
            detail::require(std::abs(s - 1.0) <= kProbSumTol,
                            "StochasticMatrix: each row must sum to 1");
        }
    }

    static StochasticMatrix from_rows(const std::vector<std::vector<double>>& rows) {
        detail::require(!rows.empty() && !rows[0].empty(), "StochasticMatrix: empty rows");
        std::vector<double> flat;
        flat.reserve(rows.size() * rows[0].size());
        for (const auto& r : rows) {
            detail::require(r.size() == rows[0].size(), "StochasticMatrix: ragged rows");
            flat.insert(flat.end(), r.begin(), r.end());
        }
        return StochasticMatrix(rows.size(), rows[0].size(), std::move(flat));
    }

    static StochasticMatrix identity(std::size_t n) {
        std::vector<double> a(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) a[i * n + i] = 1.0;
        return StochasticMatrix(n, n, std::move(a));
    }

    // Binary symmetric channel with the given flip probability.
    static StochasticMatrix bsc(double flip) {
        detail::require(flip >= 0.0 && flip <= 1.0, "bsc: flip must be in [0,1]");
        return StochasticMatrix(2, 2, {1.0 - flip, flip, flip, 1.0 - flip});
    }

    std::size_t input_size() const { return in_; }
    std::size_t output_size() const { return out_; }
    double operator()(std::size_t y, std::size_t z) const { return a_[y * out_ + z]; }

    DiscreteDistribution row(std::size_t y) const {
        return DiscreteDistribution(
            std::vector<double>(a_.begin() + static_cast<std::ptrdiff_t>(y * out_),
                                a_.begin() + static_cast<std::ptrdiff_t>((y + 1) * out_)));
    }

    const std::vector<double>& data() const { return a_; }

private:
    std::size_t in_, out_;
    std::vector<double> a_;
};

// Joint pmf over a product alphabet.
class JointDistribution {
public:
    JointDistribution(std::size_t rows, std::size_t cols, std::vector<double> probs)
        : rows_(rows), cols_(cols), p_(std::move(probs)) {
        detail::require(rows_ > 0 && cols_ > 0, "JointDistribution: empty alphabet");
        detail::require(p_.size() == rows_ * cols_, "JointDistribution: wrong element count");
        double s = 0.0;
        for (double v : p_) {
            detail::require(v >= 0.0 && std::isfinite(v),
                            "JointDistribution: entries must be finite and >= 0");
            s += v;
        }
        detail::require(std::abs(s - 1.0) <= kProbSumTol, "JointDistribution: total mass must be 1");
    }

    static JointDistribution product(const DiscreteDistribution& p, const StochasticMatrix& ch) {
        detail::require(p.size() == ch.input_size(), "product: size mismatch");
        std::vector<double> j(p.size() * ch.output_size());
        for (std::size_t x = 0; x < p.size(); ++x)
            for (std::size_t y = 0; y < ch.output_size(); ++y) j[x * ch.output_size() + y] = p[x] * ch(x, y);
        return JointDistribution(p.size(), ch.output_size(), std::move(j));
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double operator()(std::size_t i, std::size_t j) const { return p_[i * cols_ + j]; }
    const std::vector<double>& data() const { return p_; }

private:
    std::size_t rows_, cols_;
    std::vector<double> p_;
};

// Nonnegative per-letter distortion table, rows = source letters, cols =
// reconstruction letters.
class DistortionTable {
public:
    DistortionTable(std::size_t rows, std::size_t cols, std::vector<double> values)
        : rows_(rows), cols_(cols), d_(std::move(values)) {
        detail::require(rows_ > 0 && cols_ > 0, "DistortionTable: empty alphabet");
        detail::require(d_.size() == rows_ * cols_, "DistortionTable: wrong element count");
        for (double v : d_)
            detail::require(v >= 0.0 && std::isfinite(v),
                            "DistortionTable: entries must be finite and >= 0");
    }

    static DistortionTable hamming(std::size_t n) {
        std::vector<double> d(n * n, 1.0);
        for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0.0;
        return DistortionTable(n, n, std::move(d));
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double operator()(std::size_t i, std::size_t j) const { return d_[i * cols_ + j]; }
    const std::vector<double>& data() const { return d_; }

private:
    std::size_t rows_, cols_;
    std::vector<double> d_;
};

// ---------------------------------------------------------------------------
// Information quantities. All values are in nats.

inline double entropy(const DiscreteDistribution& p) {
    double h = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0.0) h -= p[i] * std::log(p[i]);
    return h;
}

// D(p || q). Returns +inf when p is not absolutely continuous wrt q.
inline double kl_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    detail::require(p.size() == q.size(), "kl_divergence: size mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0) return kInf;
        d += p[i] * std::log(p[i] / q[i]);
    }
    return std::max(d, 0.0);
}

// D(v || w | p) = sum_y p(y) D(v(.|y) || w(.|y)).
inline double conditional_kl(const StochasticMatrix& v, const StochasticMatrix& w,
                             const DiscreteDistribution& p) {
    detail::require(v.input_size() == w.input_size() && v.output_size() == w.output_size(),
                    "conditional_kl: shape mismatch");
    detail::require(p.size() == v.input_size(), "conditional_kl: prior size mismatch");
    double d = 0.0;
    for (std::size_t y = 0; y < v.input_size(); ++y) {
        if (p[y] == 0.0) continue;
        for (std::size_t z = 0; z < v.output_size(); ++z) {
            if (v(y, z) == 0.0) continue;
            if (w(y, z) == 0.0) return kInf;
            d += p[y] * v(y, z) * std::log(v(y, z) / w(y, z));
        }
    }
    return std::max(d, 0.0);
}

inline double mutual_information(const DiscreteDistribution& p, const StochasticMatrix& ch) {
    detail::require(p.size() == ch.input_size(), "mutual_information: size mismatch");
    std::vector<double> q(ch.output_size(), 0.0);
    for (std::size_t x = 0; x < p.size(); ++x)
        for (std::size_t z = 0; z < ch.output_size(); ++z) q[z] += p[x] * ch(x, z);
    double mi = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x) {
        if (p[x] == 0.0) continue;
        for (std::size_t z = 0; z < ch.output_size(); ++z) {
            if (ch(x, z) == 0.0) continue;
            mi += p[x] * ch(x, z) * std::log(ch(x, z) / q[z]);
        }
    }
    return std::max(mi, 0.0);
}

// Bhattacharyya distance d_W(y, y') = -ln sum_z sqrt(w(z|y) w(z|y')).
inline double bhattacharyya(const StochasticMatrix& w, std::size_t y, std::size_t yp) {
    detail::require(y < w.input_size() && yp < w.input_size(), "bhattacharyya: index out of range");
    double s = 0.0;
    for (std::size_t z = 0; z < w.output_size(); ++z) s += std::sqrt(w(y, z) * w(yp, z));
    if (s <= 0.0) return kInf;
    return std::max(-std::log(std::min(s, 1.0)), 0.0);
}

inline constexpr int kBlahutArimotoMaxIter = 10000;

// Channel capacity by Blahut-Arimoto. The stopping rule is the standard
// duality gap max_y D(w(.|y)||q) - I(p), which upper-bounds C - I(p); we stop
// once it falls below tol.
inline double dmc_capacity(const StochasticMatrix& w, double tol = 1e-10) {
    detail::require(tol > 0.0, "dmc_capacity: tol must be > 0");
    const std::size_t ny = w.input_size(), nz = w.output_size();
    std::vector<double> p(ny, 1.0 / static_cast<double>(ny));
    std::vector<double> q(nz), dkl(ny);
    double gap = kInf;
    for (int it = 0; it < kBlahutArimotoMaxIter; ++it) {
        std::fill(q.begin(), q.end(), 0.0);
        for (std::size_t y = 0; y < ny; ++y)
            for (std::size_t z = 0; z < nz; ++z) q[z] += p[y] * w(y, z);
        double i_cur = 0.0, dmax = -kInf;
        for (std::size_t y = 0; y < ny; ++y) {
            double d = 0.0;
            for (std::size_t z = 0; z < nz; ++z)
                if (w(y, z) > 0.0) d += w(y, z) * std::log(w(y, z) / q[z]);
            dkl[y] = d;
            i_cur += p[y] * d;
            dmax = std::max(dmax, d);
        }
        gap = dmax - i_cur;
        if (gap <= tol) return std::max(i_cur, 0.0);
        double norm = 0.0;
        for (std::size_t y = 0; y < ny; ++y) {
            p[y] *= std::exp(dkl[y] - dmax);  // max-shifted for stability
            norm += p[y];
        }
        for (std::size_t y = 0; y < ny; ++y) p[y] /= norm;
    }
    throw ConvergenceError("dmc_capacity: no convergence within iteration cap", gap);
}

}  // namespace semjscc
