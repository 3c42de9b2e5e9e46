#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace semjscc {

// Extended-real sentinel. Divergences and exponents legitimately take the
// value +inf; IEEE infinity propagates through sums and comparisons, which is
// exactly the semantics we need.
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_inf(double x) { return std::isinf(x) && x > 0; }

inline constexpr double kNatsPerBit = 0.6931471805599453094172321214581766;

// A required distortion (or rate) cannot be met by any admissible choice.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(std::string constraint, const std::string& what)
        : std::runtime_error(what), constraint_(std::move(constraint)) {}
    const std::string& constraint() const { return constraint_; }

private:
    std::string constraint_;
};

// An iterative solver ran out of its iteration budget.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double last_gap)
        : std::runtime_error(what), last_gap_(last_gap) {}
    double last_gap() const { return last_gap_; }

private:
    double last_gap_;
};

// The requested method cannot handle this problem structure.
class CapabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parameters left the domain where a formula or estimator is defined.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// Golden-section search for the minimum of f on [a, b]. f must be unimodal on
// the bracket; the caller supplies the bracket, typically from a coarse grid.
template <typename F>
double golden_min(F&& f, double a, double b, double xtol, int max_iter = 200) {
    static const double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
        if (f1 <= f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? x1 : x2;
}

template <typename F>
double golden_max(F&& f, double a, double b, double xtol, int max_iter = 200) {
    return golden_min([&](double x) { return -f(x); }, a, b, xtol, max_iter);
}

}  // namespace detail

}  // namespace semjscc
