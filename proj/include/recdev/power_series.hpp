#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace recdev {

/// A nonnegative-or-signed real stored as mantissa * 2^exponent2 with
/// |mantissa| in [0.5, 1) (or mantissa = 0, exponent2 = 0). Carries
/// probabilities far below the double underflow threshold.
struct ScaledValue {
    double mantissa = 0.0;
    std::int64_t exponent2 = 0;

    static ScaledValue from_double(double x) noexcept;
    /// Value 2^log2_value for an arbitrary finite exponent.
    static ScaledValue from_log2(double log2_value) noexcept;
    static ScaledValue from_parts(double mantissa, std::int64_t exponent2) noexcept;

    [[nodiscard]] bool is_zero() const noexcept { return mantissa == 0.0; }
    /// May underflow to 0 or overflow to inf.
    [[nodiscard]] double to_double() const noexcept;
    /// log2 of the value; -inf for zero.
    [[nodiscard]] double log2() const noexcept;
    /// Natural log of the value; -inf for zero.
    [[nodiscard]] double log() const noexcept;

    friend ScaledValue operator+(ScaledValue a, ScaledValue b) noexcept;
    friend ScaledValue operator-(ScaledValue a, ScaledValue b) noexcept;
    friend ScaledValue operator*(ScaledValue a, ScaledValue b) noexcept;
    friend bool operator<(ScaledValue a, ScaledValue b) noexcept;
    friend bool operator<=(ScaledValue a, ScaledValue b) noexcept { return !(b < a); }
    friend bool operator==(ScaledValue a, ScaledValue b) noexcept = default;
};

/// Decimal rendering with 17 significant digits; exact digits are produced
/// for values inside the double range, exponent arithmetic below it.
std::string to_decimal_string(ScaledValue value);

/// Truncated power series sum_i coeff(i) s^i, i = 0..degree(), whose
/// coefficients share one binary exponent: coeff(i) = mantissas()[i] * 2^exponent2().
/// After normalization the largest |mantissa| lies in [0.5, 1); the zero
/// series has exponent2 = 0.
class ScaledSeries {
public:
    ScaledSeries() : mantissas_(1, 0.0) {}
    /// From semantic coefficient values.
    explicit ScaledSeries(std::vector<double> coefficients);
    static ScaledSeries from_mantissas(std::vector<double> mantissas, std::int64_t exponent2);
    static ScaledSeries zero(std::size_t degree);

    [[nodiscard]] std::size_t degree() const noexcept { return mantissas_.size() - 1; }
    [[nodiscard]] std::span<double const> mantissas() const noexcept { return mantissas_; }
    [[nodiscard]] std::int64_t exponent2() const noexcept { return exponent2_; }
    [[nodiscard]] bool is_zero() const noexcept;

    /// Semantic coefficient as a double (may underflow); 0 past degree().
    [[nodiscard]] double coeff(std::size_t i) const noexcept;
    [[nodiscard]] ScaledValue scaled_coeff(std::size_t i) const noexcept;
    [[nodiscard]] std::vector<double> to_doubles() const;

    /// Compensated sum of coefficients 0..last (clamped to degree()).
    [[nodiscard]] ScaledValue partial_sum(std::size_t last) const;
    [[nodiscard]] ScaledValue sum() const { return partial_sum(degree()); }

    /// Horner evaluation of the semantic series at s.
    [[nodiscard]] double evaluate(double s) const;

    [[nodiscard]] ScaledSeries truncated(std::size_t degree) const;

    /// Rescales mantissas so the largest magnitude lies in [0.5, 1).
    void renormalize();

private:
    std::vector<double> mantissas_;
    std::int64_t exponent2_ = 0;
};

/// c_k = sum_{j<=k} a_j b_{k-j}, k <= degree, compensated summation.
/// `shards` > 1 splits the output-coefficient range over threads; the
/// result is identical for every shard count.
ScaledSeries conv_multiply(ScaledSeries const& a, ScaledSeries const& b, std::size_t degree,
                           unsigned shards = 1);

/// 1 / (1 - g) truncated at `degree`; BadConstantTerm unless g_0 = 0.
ScaledSeries reciprocal_one_minus(ScaledSeries const& g, std::size_t degree);

/// 1 / g truncated at `degree`; BadConstantTerm if g_0 = 0.
ScaledSeries reciprocal(ScaledSeries const& g, std::size_t degree);

/// sum_j outer[j] inner^j truncated at `degree` (Horner); BadConstantTerm
/// unless inner_0 = 0.
ScaledSeries poly_apply(std::span<double const> outer, ScaledSeries const& inner, std::size_t degree);

}  // namespace recdev
