#include "recdev/power_series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include <fmt/format.h>

#include "recdev/detail/numerics.hpp"
#include "recdev/error.hpp"

namespace recdev {

using detail::CompensatedSum;

namespace {

double ldexp64(double m, std::int64_t e) noexcept {
    constexpr std::int64_t kClamp = 1 << 20;
    return std::ldexp(m, static_cast<int>(std::clamp<std::int64_t>(e, -kClamp, kClamp)));
}

}  // namespace

//---------------------------------------------------------------------------//
// ScaledValue
//---------------------------------------------------------------------------//

ScaledValue ScaledValue::from_double(double x) noexcept {
    if (x == 0.0 || !std::isfinite(x)) return {x == 0.0 ? 0.0 : x, 0};
    int e = 0;
    double const m = std::frexp(x, &e);
    return {m, e};
}

ScaledValue ScaledValue::from_log2(double log2_value) noexcept {
    if (log2_value == -std::numeric_limits<double>::infinity()) return {};
    double const whole = std::floor(log2_value) + 1.0;
    double m = std::exp2(log2_value - whole);
    auto e = static_cast<std::int64_t>(whole);
    if (m >= 1.0) {
        m *= 0.5;
        ++e;
    }
    return {m, e};
}

ScaledValue ScaledValue::from_parts(double mantissa, std::int64_t exponent2) noexcept {
    if (mantissa == 0.0) return {};
    int e = 0;
    double const m = std::frexp(mantissa, &e);
    return {m, exponent2 + e};
}

double ScaledValue::to_double() const noexcept { return ldexp64(mantissa, exponent2); }

double ScaledValue::log2() const noexcept {
    if (mantissa == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log2(std::fabs(mantissa)) + static_cast<double>(exponent2);
}

double ScaledValue::log() const noexcept { return log2() * std::numbers::ln2; }

ScaledValue operator+(ScaledValue a, ScaledValue b) noexcept {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    std::int64_t const e = std::max(a.exponent2, b.exponent2);
    double const m = ldexp64(a.mantissa, a.exponent2 - e) + ldexp64(b.mantissa, b.exponent2 - e);
    return ScaledValue::from_parts(m, e);
}

ScaledValue operator-(ScaledValue a, ScaledValue b) noexcept {
    b.mantissa = -b.mantissa;
    return a + b;
}

ScaledValue operator*(ScaledValue a, ScaledValue b) noexcept {
    return ScaledValue::from_parts(a.mantissa * b.mantissa, a.exponent2 + b.exponent2);
}

bool operator<(ScaledValue a, ScaledValue b) noexcept { return (a - b).mantissa < 0.0; }

std::string to_decimal_string(ScaledValue value) {
    if (value.is_zero()) return "0";
    if (value.exponent2 > -1000 && value.exponent2 < 1000) return fmt::format("{:.17g}", value.to_double());
    long double const l10 = std::log10(static_cast<long double>(std::fabs(value.mantissa))) +
                            static_cast<long double>(value.exponent2) * std::log10(2.0L);
    auto e10 = static_cast<std::int64_t>(std::floor(l10));
    long double digits = std::pow(10.0L, l10 - static_cast<long double>(e10));
    std::string body = fmt::format("{:.16f}", static_cast<double>(digits));
    if (body.starts_with("10")) {
        ++e10;
        body = fmt::format("{:.16f}", static_cast<double>(digits / 10.0L));
    }
    return fmt::format("{}{}e{}", value.mantissa < 0.0 ? "-" : "", body, e10);
}

//---------------------------------------------------------------------------//
// ScaledSeries
//---------------------------------------------------------------------------//

ScaledSeries::ScaledSeries(std::vector<double> coefficients) : mantissas_(std::move(coefficients)) {
    if (mantissas_.empty()) mantissas_.push_back(0.0);
    renormalize();
}

ScaledSeries ScaledSeries::from_mantissas(std::vector<double> mantissas, std::int64_t exponent2) {
    ScaledSeries out(std::move(mantissas));
    if (!out.is_zero()) out.exponent2_ += exponent2;
    return out;
}

ScaledSeries ScaledSeries::zero(std::size_t degree) { return ScaledSeries(std::vector<double>(degree + 1, 0.0)); }

bool ScaledSeries::is_zero() const noexcept {
    return std::all_of(mantissas_.begin(), mantissas_.end(), [](double m) { return m == 0.0; });
}

double ScaledSeries::coeff(std::size_t i) const noexcept {
    return i < mantissas_.size() ? ldexp64(mantissas_[i], exponent2_) : 0.0;
}

ScaledValue ScaledSeries::scaled_coeff(std::size_t i) const noexcept {
    if (i >= mantissas_.size()) return {};
    return ScaledValue::from_parts(mantissas_[i], exponent2_);
}

std::vector<double> ScaledSeries::to_doubles() const {
    std::vector<double> out(mantissas_.size());
    std::transform(mantissas_.begin(), mantissas_.end(), out.begin(),
                   [this](double m) { return ldexp64(m, exponent2_); });
    return out;
}

ScaledValue ScaledSeries::partial_sum(std::size_t last) const {
    CompensatedSum sum;
    std::size_t const stop = std::min(last, degree());
    for (std::size_t i = 0; i <= stop; ++i) sum.add(mantissas_[i]);
    return ScaledValue::from_parts(sum.value(), exponent2_);
}

double ScaledSeries::evaluate(double s) const {
    double acc = 0.0;
    for (std::size_t i = mantissas_.size(); i-- > 0;) acc = acc * s + mantissas_[i];
    return ldexp64(acc, exponent2_);
}

ScaledSeries ScaledSeries::truncated(std::size_t degree) const {
    std::vector<double> m(degree + 1, 0.0);
    std::copy_n(mantissas_.begin(), std::min(m.size(), mantissas_.size()), m.begin());
    return from_mantissas(std::move(m), exponent2_);
}

void ScaledSeries::renormalize() {
    double peak = 0.0;
    for (double m : mantissas_) peak = std::max(peak, std::fabs(m));
    if (peak == 0.0) {
        exponent2_ = 0;
        return;
    }
    int shift = 0;
    std::frexp(peak, &shift);
    if (shift == 0) return;
    for (double& m : mantissas_) m = std::ldexp(m, -shift);
    exponent2_ += shift;
}

//---------------------------------------------------------------------------//
// Arithmetic
//---------------------------------------------------------------------------//

namespace {

struct Support {
    std::size_t first = 0;
    std::size_t last = 0;
    bool empty = true;
};

Support support_of(std::span<double const> m) {
    Support s;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i] != 0.0) {
            if (s.empty) s.first = i;
            s.last = i;
            s.empty = false;
        }
    }
    return s;
}

void require_zero_constant(ScaledSeries const& g, char const* what) {
    if (g.mantissas()[0] != 0.0) {
        throw Error(Errc::BadConstantTerm, fmt::format("{} requires a zero constant term", what));
    }
}

}  // namespace

ScaledSeries conv_multiply(ScaledSeries const& a, ScaledSeries const& b, std::size_t degree, unsigned shards) {
    std::vector<double> out(degree + 1, 0.0);
    auto const am = a.mantissas();
    auto const bm = b.mantissas();
    Support const sa = support_of(am);
    Support const sb = support_of(bm);
    if (sa.empty || sb.empty || sa.first + sb.first > degree) return ScaledSeries::zero(degree);

    std::size_t const lo = sa.first + sb.first;
    std::size_t const hi = std::min(degree, sa.last + sb.last);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            // j ranges where both a_j and b_{k-j} lie inside their supports.
            std::size_t const jlo = std::max(sa.first, k > sb.last ? k - sb.last : 0);
            std::size_t const jhi = std::min(sa.last, k - sb.first);
            CompensatedSum sum;
            for (std::size_t j = jlo; j <= jhi; ++j) sum.add(am[j] * bm[k - j]);
            out[k] = sum.value();
        }
    };

    shards = std::max(1u, shards);
    std::size_t const count = hi - lo + 1;
    if (shards == 1 || count < 2 * shards) {
        work(lo, hi + 1);
    } else {
        // Later coefficients cost more; split by cumulative work would balance
        // better, but any split gives identical output.
        std::vector<std::thread> pool;
        std::size_t const step = (count + shards - 1) / shards;
        for (std::size_t begin = lo; begin <= hi; begin += step) {
            pool.emplace_back(work, begin, std::min(hi + 1, begin + step));
        }
        for (auto& t : pool) t.join();
    }
    return ScaledSeries::from_mantissas(std::move(out), a.exponent2() + b.exponent2());
}

ScaledSeries reciprocal_one_minus(ScaledSeries const& g, std::size_t degree) {
    require_zero_constant(g, "reciprocal_one_minus");
    std::vector<double> const gs = g.to_doubles();
    std::size_t const top = std::min(degree, g.degree());
    std::vector<double> a(degree + 1, 0.0);
    a[0] = 1.0;
    for (std::size_t n = 1; n <= degree; ++n) {
        CompensatedSum sum;
        for (std::size_t j = 1; j <= std::min(n, top); ++j) sum.add(gs[j] * a[n - j]);
        a[n] = sum.value();
    }
    return ScaledSeries(std::move(a));
}

ScaledSeries reciprocal(ScaledSeries const& g, std::size_t degree) {
    auto const gm = g.mantissas();
    if (gm[0] == 0.0) throw Error(Errc::BadConstantTerm, "reciprocal requires a nonzero constant term");
    std::size_t const top = std::min(degree, g.degree());
    double const inv0 = 1.0 / gm[0];
    std::vector<double> w(degree + 1, 0.0);
    w[0] = inv0;
    for (std::size_t n = 1; n <= degree; ++n) {
        CompensatedSum sum;
        for (std::size_t j = 1; j <= std::min(n, top); ++j) sum.add(gm[j] * w[n - j]);
        w[n] = -inv0 * sum.value();
    }
    return ScaledSeries::from_mantissas(std::move(w), -g.exponent2());
}

ScaledSeries poly_apply(std::span<double const> outer, ScaledSeries const& inner, std::size_t degree) {
    require_zero_constant(inner, "poly_apply");
    if (outer.empty()) return ScaledSeries::zero(degree);
    // inner^j vanishes below s^j, so powers past `degree` never contribute.
    std::size_t const top = std::min(outer.size() - 1, degree);
    std::vector<double> const in = inner.to_doubles();
    std::size_t const in_top = std::min(degree, inner.degree());
    std::vector<double> acc(degree + 1, 0.0);
    std::vector<double> next(degree + 1, 0.0);
    acc[0] = outer[top];
    for (std::size_t j = top; j-- > 0;) {
        for (std::size_t k = 0; k <= degree; ++k) {
            CompensatedSum sum;
            for (std::size_t i = 1; i <= std::min(k, in_top); ++i) sum.add(in[i] * acc[k - i]);
            next[k] = sum.value();
        }
        next[0] += outer[j];
        std::swap(acc, next);
    }
    return ScaledSeries(std::move(acc));
}

}  // namespace recdev
