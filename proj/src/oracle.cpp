#include "recdev/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "recdev/detail/numerics.hpp"
#include "recdev/error.hpp"
#include "recdev/ladder.hpp"
#include "recdev/rates.hpp"

namespace recdev {

using detail::CompensatedSum;

//---------------------------------------------------------------------------//
// ReflectedChain
//---------------------------------------------------------------------------//

ReflectedChain::ReflectedChain(StepLaw const& law, std::size_t cap)
    : ReflectedChain(law, cap, law.side() == Side::Right) {}

ReflectedChain::ReflectedChain(StepLaw const& law, std::size_t cap, bool right_form)
    : right_form_(right_form), cap_(cap), c_(law.coefficients(cap + 2)), tail_(law.coefficient_tails(cap + 2)) {}

ChainState ReflectedChain::start(std::size_t level) const {
    ChainState st;
    st.level.assign(cap_ + 1, 0.0);
    if (level <= cap_) {
        st.level[level] = 1.0;
    } else {
        st.overflow = 1.0;
    }
    return st;
}

double ReflectedChain::transition(std::size_t i, std::size_t j) const {
    if (right_form_) {
        if (i == 0) return j == 0 ? c_[0] + c_[1] : c_[j + 1];
        return j + 1 >= i ? c_[j + 1 - i] : 0.0;
    }
    if (j == i + 1) return c_[0];
    if (j == 0) return tail_[i];
    return j <= i ? c_[i - j + 1] : 0.0;
}

ChainState ReflectedChain::step(ChainState const& from) const {
    ChainState to;
    to.level.assign(cap_ + 1, 0.0);
    to.overflow = from.overflow;
    for (std::size_t i = 0; i <= cap_; ++i) {
        double const m = from.level[i];
        if (m == 0.0) continue;
        if (right_form_) {
            if (i == 0) {
                to.level[0] += m * (c_[0] + c_[1]);
                for (std::size_t j = 1; j <= cap_; ++j) to.level[j] += m * c_[j + 1];
                to.overflow += m * tail_[cap_ + 1];
            } else {
                to.level[i - 1] += m * c_[0];
                for (std::size_t j = i; j <= cap_; ++j) to.level[j] += m * c_[j - i + 1];
                to.overflow += m * tail_[cap_ - i + 1];
            }
        } else {
            to.level[0] += m * tail_[i];
            for (std::size_t j = 1; j <= i; ++j) to.level[j] += m * c_[i - j + 1];
            if (i + 1 <= cap_) {
                to.level[i + 1] += m * c_[0];
            } else {
                to.overflow += m * c_[0];
            }
        }
    }
    return to;
}

//---------------------------------------------------------------------------//
// Ladder-epoch law
//---------------------------------------------------------------------------//

namespace {

/// Taboo DP: pmf of the first hitting time of level 0 from `level`.
std::vector<double> hitting_pmf(ReflectedChain const& chain, std::size_t level, std::size_t degree) {
    std::vector<double> pmf(degree + 1, 0.0);
    ChainState st = chain.start(level);
    for (std::size_t m = 1; m <= degree; ++m) {
        st = chain.step(st);
        pmf[m] = st.level[0];
        st.level[0] = 0.0;
    }
    return pmf;
}

void check_horizon(std::size_t n, std::size_t cap, char const* what) {
    if (n > cap) throw Error(Errc::HorizonTooLarge, fmt::format("{}: horizon {} exceeds {}", what, n, cap));
}

}  // namespace

std::vector<double> first_return_dp(StepLaw const& law, std::size_t degree) {
    // Levels above `degree` cannot come back to 0 in time, so the cap is exact.
    return hitting_pmf(ReflectedChain(law, degree), 0, degree);
}

std::vector<double> first_passage_dp(StepLaw const& law, std::size_t degree) {
    return hitting_pmf(ReflectedChain(law, degree + 1, true), 1, degree);
}

std::vector<double> y_pmf(StepLaw const& law, std::size_t degree) {
    if (degree < 1) throw Error(Errc::DomainError, "y_pmf degree must be >= 1");
    std::vector<double> pmf = f0_series(law, degree).to_doubles();
    pmf[0] = 0.0;
    std::size_t const check = std::min(degree, kMaxDpHorizon);
    std::vector<double> const dp = first_return_dp(law, check);
    for (std::size_t m = 1; m <= check; ++m) {
        if (std::fabs(dp[m] - pmf[m]) > 1e-12) {
            throw std::logic_error(
                fmt::format("P(Y={}) series {} disagrees with first-return DP {}", m, pmf[m], dp[m]));
        }
    }
    return pmf;
}

//---------------------------------------------------------------------------//
// Record-count tails
//---------------------------------------------------------------------------//

TailTable record_tail_exact(StepLaw const& law, std::size_t n, std::size_t kmax, unsigned shards) {
    if (n < 1) throw Error(Errc::DomainError, "record_tail_exact needs n >= 1");
    check_horizon(n, kMaxOracleHorizon, "record_tail_exact");
    kmax = std::min(kmax, n);

    std::vector<double> const ypmf = y_pmf(law, n);
    // P(Y > r) for r = 0..n.
    std::vector<double> ysurvival(n + 1, 0.0);
    {
        CompensatedSum cdf;
        for (std::size_t r = 0; r <= n; ++r) {
            cdf.add(ypmf[r]);
            ysurvival[r] = std::max(0.0, 1.0 - cdf.value());
        }
    }
    ScaledSeries const y(ypmf);

    TailTable table;
    table.n = n;
    table.tail.assign(kmax + 1, ScaledValue{});
    table.tail[0] = ScaledValue::from_double(1.0);

    std::vector<double> delta(n + 1, 0.0);
    delta[0] = 1.0;
    ScaledSeries t(std::move(delta));
    double overflow = 0.0;
    for (std::size_t k = 1; k <= kmax; ++k) {
        // Mass of T_{k-1} + Y landing past n.
        CompensatedSum escaped;
        for (std::size_t m = 0; m <= n; ++m) escaped.add(t.coeff(m) * ysurvival[n - m]);
        overflow += escaped.value();
        t = conv_multiply(t, y, n, shards);
        table.tail[k] = t.partial_sum(n);
        double const total = table.tail[k].to_double() + overflow;
        table.mass_defect = std::max(table.mass_defect, std::fabs(total - 1.0));
        if (t.is_zero()) break;
    }

    std::size_t const filled = kmax == n ? kmax + 1 : kmax;
    table.pmf.assign(filled, ScaledValue{});
    for (std::size_t k = 0; k < filled; ++k) {
        ScaledValue const next = k + 1 <= kmax ? table.tail[k + 1] : ScaledValue{};
        table.pmf[k] = table.tail[k] - next;
    }
    return table;
}

std::vector<std::vector<ScaledValue>> renewal_cdf_grid(StepLaw const& law, std::size_t nmax) {
    if (nmax < 1) throw Error(Errc::DomainError, "renewal_cdf_grid needs nmax >= 1");
    check_horizon(nmax, kMaxOracleHorizon, "renewal_cdf_grid");
    ScaledSeries const y(y_pmf(law, nmax));
    std::vector<std::vector<ScaledValue>> cdf(nmax + 1, std::vector<ScaledValue>(nmax + 1));
    std::vector<double> delta(nmax + 1, 0.0);
    delta[0] = 1.0;
    ScaledSeries t(std::move(delta));
    for (std::size_t k = 0; k <= nmax; ++k) {
        if (k > 0) t = conv_multiply(t, y, nmax);
        auto const tm = t.mantissas();
        CompensatedSum running;
        for (std::size_t m = 0; m <= nmax; ++m) {
            running.add(tm[m]);
            cdf[k][m] = ScaledValue::from_parts(running.value(), t.exponent2());
        }
    }
    return cdf;
}

OccupationJoint occupation_dp(StepLaw const& law, std::size_t n) {
    check_horizon(n, kMaxDpHorizon, "occupation_dp");
    ReflectedChain const chain(law, n);
    // by_count[k] holds the sub-distribution of levels with k visits to 0.
    std::vector<ChainState> by_count(n + 1);
    for (auto& st : by_count) st = ChainState{std::vector<double>(n + 1, 0.0), 0.0};
    by_count[0].level[0] = 1.0;
    for (std::size_t step = 1; step <= n; ++step) {
        std::vector<ChainState> next(n + 1);
        for (auto& st : next) st = ChainState{std::vector<double>(n + 1, 0.0), 0.0};
        for (std::size_t k = 0; k < step; ++k) {
            ChainState moved = chain.step(by_count[k]);
            next[k + 1].level[0] += moved.level[0];
            moved.level[0] = 0.0;
            for (std::size_t j = 1; j <= n; ++j) next[k].level[j] += moved.level[j];
            next[k].overflow += moved.overflow;
        }
        by_count = std::move(next);
    }
    OccupationJoint out;
    out.n = n;
    out.joint.assign(n + 1, std::vector<double>(n + 1, 0.0));
    out.count_pmf.assign(n + 1, 0.0);
    for (std::size_t k = 0; k <= n; ++k) {
        CompensatedSum total;
        for (std::size_t j = 0; j <= n; ++j) {
            out.joint[k][j] = by_count[k].level[j];
            total.add(by_count[k].level[j]);
        }
        total.add(by_count[k].overflow);
        out.count_pmf[k] = total.value();
    }
    return out;
}

ScaledValue chernoff_bound(StepLaw const& law, std::size_t n, std::size_t k) {
    if (k < 1 || k > n) throw Error(Errc::DomainError, fmt::format("chernoff_bound needs 1 <= k={} <= n={}", k, n));
    double const rate = legendre(law, static_cast<double>(n) / static_cast<double>(k));
    return ScaledValue::from_log2(-static_cast<double>(k) * rate / std::numbers::ln2);
}

std::size_t record_threshold(double x, std::size_t n) {
    double const target = x * static_cast<double>(n);
    double const nearest = std::round(target);
    if (std::fabs(target - nearest) <= 1e-9 * std::max(1.0, std::fabs(target))) {
        return static_cast<std::size_t>(nearest);
    }
    return static_cast<std::size_t>(std::ceil(target));
}

std::vector<ConvergenceRow> convergence_table(StepLaw const& law, double x, std::vector<std::size_t> const& n_list) {
    if (!(x > 0.0 && x <= 1.0)) throw Error(Errc::DomainError, fmt::format("x={} outside (0, 1]", x));
    double const rate = ldp_rate(law, x).value;
    std::vector<ConvergenceRow> rows;
    for (std::size_t n : n_list) {
        ConvergenceRow row;
        row.n = n;
        row.k = std::max<std::size_t>(1, record_threshold(x, n));
        TailTable const table = record_tail_exact(law, n, row.k);
        row.probability = table.tail[row.k];
        row.neg_log_rate = -row.probability.log() / static_cast<double>(n);
        row.ldp_rate = rate;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace recdev
