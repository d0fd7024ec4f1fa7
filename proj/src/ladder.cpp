#include "recdev/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "recdev/detail/numerics.hpp"
#include "recdev/error.hpp"

namespace recdev {

using detail::CompensatedSum;

namespace {

constexpr int kFixedPointIterations = 32;
constexpr int kRefineIterations = 400;
constexpr double kEps = std::numeric_limits<double>::epsilon();

/// Root of x = s phi(x) by monotone fixed-point iteration from 0, refined in
/// the complement v = 1 - x. In v the equation reads
///   F(v) = t (1 - v) - s gap(v) = 0,
/// with F concave and decreasing, so Newton from the right of the root is
/// monotone; a bracket and bisection guard the step anyway.
LadderPoint solve(StepLaw const& law, double s, double t) {
    LadderPoint pt;
    pt.s = s;
    pt.one_minus_s = t;
    if (s == 0.0) return pt;

    double x = 0.0;
    for (int i = 0; i < kFixedPointIterations; ++i) {
        double const next = s * law.pgf(x, 0);
        double const step = next - x;
        x = next;
        if (step < 1e-15) break;
    }

    auto F = [&](double v) { return t * (1.0 - v) - s * law.gap(v); };
    double lo = 0.0;               // F(lo) > 0
    double hi = 1.0;               // F(hi) < 0 (F(1) = -s q)
    double v = std::min(1.0, 1.0 - x);
    double fv = F(v);
    if (fv > 0.0) {
        lo = v;
        v = hi;
        fv = F(v);
    } else {
        hi = v;
    }
    for (int i = 0; i < kRefineIterations && fv != 0.0; ++i) {
        double const slope = -t - s * law.gap_slope(v);
        double next = v - fv / slope;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        double const fn = F(next);
        if (fn > 0.0) {
            lo = next;
        } else {
            hi = next;
        }
        bool const converged = std::fabs(next - v) <= 4.0 * kEps * next || hi - lo <= 2.0 * kEps * hi;
        v = next;
        fv = fn;
        if (converged) break;
    }
    pt.one_minus_h = v;
    pt.h = 1.0 - v;
    // x carries full relative precision when h is small.
    if (pt.h < 0.5) {
        double const refined = s * law.pgf(pt.h, 0);
        if (std::isfinite(refined)) pt.h = refined;
    }
    pt.slope_defect = t + s * law.gap_slope(v);
    return pt;
}

void check_argument(double s) {
    if (!(s >= 0.0 && s <= kMaxLadderArgument)) {
        throw Error(Errc::DomainError, fmt::format("ladder argument s={} outside [0, 1-1e-12]", s));
    }
}

}  // namespace

LadderPoint ladder_point(StepLaw const& law, double s) {
    check_argument(s);
    return solve(law, s, 1.0 - s);
}

LadderPoint ladder_point_from_complement(StepLaw const& law, double one_minus_s) {
    if (!(one_minus_s >= 1.0 - kMaxLadderArgument && one_minus_s <= 1.0)) {
        throw Error(Errc::DomainError, fmt::format("ladder complement 1-s={} outside [1e-12, 1]", one_minus_s));
    }
    return solve(law, 1.0 - one_minus_s, one_minus_s);
}

LadderPoint ladder_point(StepLaw const& law, double s, double one_minus_s) {
    check_argument(s);
    if (!(one_minus_s >= 0.0 && one_minus_s <= 1.0) || std::fabs((s + one_minus_s) - 1.0) > 4.0 * kEps) {
        throw Error(Errc::DomainError, fmt::format("s={} and 1-s={} are inconsistent", s, one_minus_s));
    }
    return solve(law, s, one_minus_s);
}

double h_point(StepLaw const& law, double s) { return ladder_point(law, s).h; }

LadderEpochValue f0_at(StepLaw const& law, LadderPoint const& pt) {
    if (pt.s == 0.0) return {0.0, 1.0};
    double const v = pt.one_minus_h;
    if (law.side() == Side::Right) {
        // f0 = s (q + (phi(h) - q) / h),  1 - f0 = q s (1 - h) / h.
        return {pt.s * (law.q() + law.reduced_pgf(pt.h)), law.q() * pt.s * v / pt.h};
    }
    // f0 = s (1 - phi(h)) / (1 - h),  1 - f0 = (1 - s) / (1 - h).
    return {pt.s * law.one_minus_pgf(v) / v, pt.one_minus_s / v};
}

double f0_point(StepLaw const& law, double s) {
    if (!(s > 0.0 && s <= kMaxLadderArgument)) {
        throw Error(Errc::DomainError, fmt::format("f0 argument s={} outside (0, 1-1e-12]", s));
    }
    return f0_at(law, ladder_point(law, s)).value;
}

namespace {

/// h_m = [s^{m-1}] phi(h), with the powers h^j accumulated online.
std::vector<double> h_coefficients_finite(StepLaw const& law, std::size_t degree) {
    std::vector<double> const c = law.coefficients(std::max<std::size_t>(law.p().size(), 1));
    std::size_t const top = std::min(c.size() - 1, degree);
    std::vector<double> h(degree + 1, 0.0);
    // powers[j][n] = [s^n] h^j, j = 1..top.
    std::vector<std::vector<double>> powers(top + 1, std::vector<double>(degree + 1, 0.0));
    for (std::size_t m = 1; m <= degree; ++m) {
        std::size_t const n = m - 1;
        powers[1][n] = h[n];
        for (std::size_t j = 2; j <= top && j <= n; ++j) {
            CompensatedSum sum;
            for (std::size_t i = 1; i + (j - 1) <= n; ++i) sum.add(h[i] * powers[j - 1][n - i]);
            powers[j][n] = sum.value();
        }
        CompensatedSum hm;
        if (m == 1) hm.add(c[0]);
        for (std::size_t j = 1; j <= top; ++j) {
            if (c[j] != 0.0) hm.add(c[j] * powers[j][n]);
        }
        h[m] = hm.value();
    }
    return h;
}

/// phi(x) = x + q (1-x)^{1+beta}: h_m = h_{m-1} + q [s^{m-1}] (1-h)^{1+beta},
/// with the power series of (1-h)^a from n B_n = sum_k ((a+1)k - n) A_k B_{n-k}.
std::vector<double> h_coefficients_stable(StepLaw const& law, std::size_t degree) {
    double const a = 1.0 + law.beta();
    double const q = law.q();
    std::vector<double> h(degree + 1, 0.0);
    std::vector<double> power(degree + 1, 0.0);  // (1-h)^a
    power[0] = 1.0;
    if (degree >= 1) h[1] = q;
    for (std::size_t m = 2; m <= degree; ++m) {
        std::size_t const n = m - 1;
        CompensatedSum sum;
        for (std::size_t k = 1; k <= n; ++k) {
            double const weight = (a + 1.0) * static_cast<double>(k) - static_cast<double>(n);
            sum.add(weight * (-h[k]) * power[n - k]);
        }
        power[n] = sum.value() / static_cast<double>(n);
        h[m] = h[m - 1] + q * power[n];
    }
    return h;
}

}  // namespace

ScaledSeries h_series(StepLaw const& law, std::size_t degree) {
    if (degree < 1) throw Error(Errc::DomainError, "series degree must be >= 1");
    return ScaledSeries(law.kind() == LawKind::Finite ? h_coefficients_finite(law, degree)
                                                      : h_coefficients_stable(law, degree));
}

ScaledSeries f0_series(StepLaw const& law, std::size_t degree) {
    if (degree < 1) throw Error(Errc::DomainError, "series degree must be >= 1");
    std::vector<double> f(degree + 1, 0.0);
    if (law.side() == Side::Right) {
        // f0 = 1 + q s - q / u with u = h / s (u_0 = q).
        std::vector<double> const h = h_series(law, degree + 1).to_doubles();
        std::vector<double> u(h.begin() + 1, h.end());
        std::vector<double> const w = reciprocal(ScaledSeries(std::move(u)), degree).to_doubles();
        double const q = law.q();
        f[1] = q - q * w[1];
        for (std::size_t n = 2; n <= degree; ++n) f[n] = -q * w[n];
    } else {
        // f0 = 1 - (1 - s) / (1 - h).
        std::vector<double> const r = reciprocal_one_minus(h_series(law, degree), degree).to_doubles();
        for (std::size_t n = 1; n <= degree; ++n) f[n] = r[n - 1] - r[n];
    }
    return ScaledSeries(std::move(f));
}

ScaledSeries return_prob_series(StepLaw const& law, std::size_t degree) {
    return reciprocal_one_minus(f0_series(law, degree), degree);
}

LadderGF LadderGF::build(StepLaw const& law, std::size_t degree) {
    ScaledSeries f0 = f0_series(law, degree);
    ScaledSeries returns = reciprocal_one_minus(f0, degree);
    return LadderGF{law, h_series(law, degree), std::move(f0), std::move(returns)};
}

}  // namespace recdev
