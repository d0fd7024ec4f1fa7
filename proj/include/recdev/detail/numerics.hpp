#pragma once

#include <cmath>
#include <cstddef>

namespace recdev::detail {

/// Neumaier's variant of compensated summation.
class CompensatedSum {
public:
    void add(double x) noexcept {
        double const t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            carry_ += (sum_ - t) + x;
        } else {
            carry_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const noexcept { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

// Binomial remainders of (1-v)^m for integer m >= 0 and v in [0,1]. The
// direct forms cancel badly for small m*v, so short series are used there.

/// 1 - (1-v)^m
inline double binom_drop(double m, double v) noexcept {
    if (m == 0.0 || v == 0.0) return 0.0;
    return -std::expm1(m * std::log1p(-v));
}

/// (1-v)^m - 1 + m v
inline double binom_second(double m, double v) noexcept {
    if (m <= 1.0 || v == 0.0) return 0.0;
    if (m * v < 0.1) {
        double term = 0.5 * m * (m - 1.0) * v * v;
        double sum = term;
        for (int k = 2; k < 200; ++k) {
            if (static_cast<double>(k) >= m) break;
            term *= -(m - k) * v / (k + 1);
            sum += term;
            if (std::fabs(term) <= 1e-18 * sum) break;
        }
        return sum;
    }
    return std::expm1(m * std::log1p(-v)) + m * v;
}

/// 1 - (1-v)^m (1 + m v)
inline double binom_excess(double m, double v) noexcept {
    if (m == 0.0 || v == 0.0) return 0.0;
    if (m * v < 0.1) {
        // term_k = a_{k-1} v (m - (m-k+1)/k) with a_j = C(m,j)(-v)^j.
        double a_prev = -m * v;  // a_1
        double sum = 0.0;
        for (int k = 2; k < 200; ++k) {
            double const term = a_prev * v * (m - (m - k + 1) / k);
            sum -= term;
            if (static_cast<double>(k) > m || std::fabs(term) <= 1e-18 * std::fabs(sum)) break;
            a_prev *= -(m - k + 1) * v / k;
        }
        return sum;
    }
    return 1.0 - std::exp(m * std::log1p(-v)) * (1.0 + m * v);
}

}  // namespace recdev::detail
