#include "recdev/walk_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "recdev/detail/numerics.hpp"
#include "recdev/error.hpp"

namespace recdev {

using detail::binom_drop;
using detail::binom_excess;
using detail::binom_second;
using detail::CompensatedSum;

std::string_view to_string(Side side) noexcept {
    return side == Side::Right ? "right" : "left";
}

std::string_view to_string(LawKind kind) noexcept {
    return kind == LawKind::Finite ? "finite" : "stable";
}

namespace {

void check_unit_interval(double s) {
    if (!(s >= 0.0 && s <= 1.0)) {
        throw Error(Errc::DomainError, fmt::format("argument {} outside [0, 1]", s));
    }
}

}  // namespace

double StepLaw::p0() const noexcept {
    if (kind_ == LawKind::Stable) return 1.0 - gamma_;
    return p_.empty() ? 0.0 : p_.front();
}

double StepLaw::pgf(double s, int order) const {
    check_unit_interval(s);
    if (order < 0 || order > 2) {
        throw Error(Errc::DomainError, fmt::format("derivative order {} not in {{0,1,2}}", order));
    }
    if (kind_ == LawKind::Stable) {
        double const u = 1.0 - s;
        switch (order) {
            case 0: return s + q_ * std::pow(u, 1.0 + beta_);
            case 1: return 1.0 - gamma_ * std::pow(u, beta_);
            default:
                if (u == 0.0) {
                    throw Error(Errc::SingularDerivative, "phi'' is infinite at s = 1 for the stable kind");
                }
                return gamma_ * beta_ * std::pow(u, beta_ - 1.0);
        }
    }
    // Horner over phi^(order).
    double acc = 0.0;
    for (std::size_t j = dense_.size(); j-- > static_cast<std::size_t>(order);) {
        double falling = 1.0;
        for (int r = 0; r < order; ++r) falling *= static_cast<double>(j - r);
        acc = acc * s + dense_[j] * falling;
    }
    return acc;
}

std::vector<double> StepLaw::coefficients(std::size_t degree) const {
    std::vector<double> c(degree + 1, 0.0);
    if (kind_ == LawKind::Finite) {
        for (auto const& [j, cj] : terms_) {
            if (j <= degree) c[j] = cj;
        }
        return c;
    }
    // (1-s)^{1+beta} = sum_j m_j s^j with m_{j+1} = m_j (j - 1 - beta) / (j + 1).
    c[0] = q_;
    if (degree >= 1) c[1] = 1.0 - gamma_;
    double m = 0.5 * (1.0 + beta_) * beta_;  // m_2
    for (std::size_t j = 2; j <= degree; ++j) {
        double cj = q_ * m;
        if (cj < 0.0 && cj > -1e-15) cj = 0.0;
        c[j] = cj;
        m *= (static_cast<double>(j) - 1.0 - beta_) / static_cast<double>(j + 1);
    }
    return c;
}

std::vector<double> StepLaw::coefficient_tails(std::size_t degree) const {
    std::vector<double> tails(degree + 1, 0.0);
    if (kind_ == LawKind::Stable) {
        // S(0) = 1 - q, S(1) = q beta, S(j) = S(j-1) (j - 1 - beta) / j.
        tails[0] = 1.0 - q_;
        double tail = q_ * beta_;
        for (std::size_t j = 1; j <= degree; ++j) {
            tails[j] = tail;
            tail *= (static_cast<double>(j) - beta_) / static_cast<double>(j + 1);
        }
        return tails;
    }
    CompensatedSum suffix;
    for (std::size_t j = dense_.size(); j-- > 0;) {
        if (j <= degree) tails[j] = suffix.value();
        suffix.add(dense_[j]);
    }
    return tails;
}

double StepLaw::coefficient_tail(std::size_t j) const {
    if (kind_ == LawKind::Finite) {
        CompensatedSum suffix;
        for (std::size_t m = j + 1; m < dense_.size(); ++m) suffix.add(dense_[m]);
        return suffix.value();
    }
    if (j == 0) return 1.0 - q_;
    // q beta Gamma(j - beta) / (Gamma(1 - beta) Gamma(j + 1))
    auto const x = static_cast<double>(j);
    return q_ * beta_ * std::exp(std::lgamma(x - beta_) - std::lgamma(1.0 - beta_) - std::lgamma(x + 1.0));
}

double StepLaw::mean_step() const {
    if (kind_ == LawKind::Stable) return 0.0;
    CompensatedSum sum;
    for (std::size_t n = 1; n < p_.size(); ++n) sum.add(static_cast<double>(n) * p_[n]);
    double const toward = q_;
    double const away = sum.value();
    return side_ == Side::Right ? toward - away : away - toward;
}

std::optional<double> StepLaw::phi_second_at_one() const {
    if (kind_ == LawKind::Stable) return std::nullopt;
    CompensatedSum sum;
    for (auto const& [j, cj] : terms_) {
        sum.add(static_cast<double>(j) * static_cast<double>(j - (j > 0 ? 1 : 0)) * cj);
    }
    return sum.value();
}

double StepLaw::gap(double v) const {
    if (kind_ == LawKind::Stable) return q_ * std::pow(v, 1.0 + beta_);
    CompensatedSum sum;
    for (auto const& [j, cj] : terms_) sum.add(cj * binom_second(static_cast<double>(j), v));
    sum.add(mass_residue_);
    sum.add(-v * slope_residue_);
    return sum.value();
}

double StepLaw::gap_slope(double v) const {
    if (kind_ == LawKind::Stable) return gamma_ * std::pow(v, beta_);
    CompensatedSum sum;
    for (auto const& [j, cj] : terms_) {
        if (j == 0) continue;
        sum.add(static_cast<double>(j) * cj * binom_drop(static_cast<double>(j - 1), v));
    }
    sum.add(-slope_residue_);
    return sum.value();
}

double StepLaw::gap_excess(double v) const {
    if (kind_ == LawKind::Stable) return beta_ * gap(v);
    CompensatedSum sum;
    for (auto const& [j, cj] : terms_) {
        if (j == 0) continue;
        sum.add(cj * binom_excess(static_cast<double>(j - 1), v));
    }
    sum.add(-mass_residue_);
    return sum.value();
}

double StepLaw::one_minus_pgf(double v) const {
    if (kind_ == LawKind::Stable || v <= 0.5) return v - gap(v);
    return 1.0 - pgf(1.0 - v, 0);
}

double StepLaw::reduced_pgf(double x) const {
    check_unit_interval(x);
    if (kind_ == LawKind::Stable) {
        if (x == 0.0) return 1.0 - gamma_;
        return 1.0 - q_ * binom_drop(1.0 + beta_, x) / x;
    }
    double acc = 0.0;
    for (std::size_t j = dense_.size(); j-- > 1;) acc = acc * x + dense_[j];
    return acc;
}

std::string StepLaw::describe() const {
    if (kind_ == LawKind::Stable) {
        return fmt::format("stable {} law gamma={} beta={} (q={})", to_string(side_), gamma_, beta_, q_);
    }
    std::ostringstream os;
    os << "finite " << to_string(side_) << " law q=" << fmt::format("{}", q_) << " p=[";
    for (std::size_t i = 0; i < p_.size(); ++i) os << (i ? "," : "") << fmt::format("{}", p_[i]);
    os << "]";
    return os.str();
}

StepLaw validate_law(RawLaw const& raw) {
    StepLaw law;
    law.side_ = raw.side;
    law.kind_ = raw.kind;

    if (raw.kind == LawKind::Stable) {
        if (!raw.gamma || !raw.beta) {
            throw Error(Errc::BadStableParams, "stable kind requires gamma and beta");
        }
        double const g = *raw.gamma;
        double const b = *raw.beta;
        if (!(g > 0.0 && g < 1.0) || !(b > 0.0 && b < 1.0)) {
            throw Error(Errc::BadStableParams, fmt::format("gamma={} beta={} must lie in (0,1)", g, b));
        }
        if (!raw.p.empty()) {
            throw Error(Errc::BadStableParams, "stable kind takes no explicit p list");
        }
        law.gamma_ = g;
        law.beta_ = b;
        law.q_ = g / (1.0 + b);
        if (raw.q && std::fabs(*raw.q - law.q_) > kNormalizationTolerance) {
            throw Error(Errc::BadStableParams,
                        fmt::format("q={} inconsistent with gamma/(1+beta)={}", *raw.q, law.q_));
        }
        return law;
    }

    if (raw.gamma || raw.beta) {
        throw Error(Errc::BadLawFile, "gamma/beta only apply to the stable kind");
    }
    if (!raw.q) throw Error(Errc::BadLawFile, "finite kind requires q");
    double const q = *raw.q;
    if (raw.p.size() > kMaxFiniteSupport) {
        throw Error(Errc::SupportTooLarge, fmt::format("support {} exceeds {}", raw.p.size(), kMaxFiniteSupport));
    }
    if (!std::isfinite(q) || q < 0.0 || q > 1.0) {
        throw Error(Errc::NotNormalized, fmt::format("q={} is not a probability", q));
    }
    for (double pn : raw.p) {
        if (!std::isfinite(pn) || pn < 0.0) {
            throw Error(Errc::NotNormalized, fmt::format("p_n={} is not a probability", pn));
        }
    }
    if (!raw.p.empty() && raw.p.front() >= 1.0) {
        throw Error(Errc::DegenerateP0, "p_0 = 1 gives a constant walk");
    }
    if (q == 0.0) throw Error(Errc::ZeroQ, "q must be positive");

    CompensatedSum mass;
    CompensatedSum slope;
    mass.add(q);
    for (std::size_t n = 0; n < raw.p.size(); ++n) {
        mass.add(raw.p[n]);
        slope.add(static_cast<double>(n + 1) * raw.p[n]);
    }
    if (std::fabs(mass.value() - 1.0) > kNormalizationTolerance) {
        throw Error(Errc::NotNormalized, fmt::format("q + sum p_n = {:.17g}", mass.value()));
    }
    if (std::fabs(slope.value() - 1.0) > kCriticalityTolerance) {
        throw Error(Errc::NotCritical, fmt::format("phi'(1) = {:.17g}", slope.value()));
    }

    law.q_ = q;
    law.p_ = raw.p;
    law.terms_.emplace_back(0, q);
    for (std::size_t n = 0; n < raw.p.size(); ++n) {
        if (raw.p[n] > 0.0) law.terms_.emplace_back(n + 1, raw.p[n]);
    }
    law.dense_.assign(raw.p.size() + 1, 0.0);
    law.dense_[0] = q;
    std::copy(raw.p.begin(), raw.p.end(), law.dense_.begin() + 1);
    law.mass_residue_ = mass.value() - 1.0;
    law.slope_residue_ = slope.value() - 1.0;
    return law;
}

double pgf_eval(StepLaw const& law, double s, int order) { return law.pgf(s, order); }

std::vector<double> pgf_coefficients(StepLaw const& law, std::size_t degree) {
    if (degree < 1) throw Error(Errc::DomainError, "coefficient degree must be >= 1");
    return law.coefficients(degree);
}

namespace {

double parse_number(std::string_view text, std::string_view name) {
    double value = 0.0;
    auto const* first = text.data();
    auto const* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw Error(Errc::UnknownName, fmt::format("cannot parse '{}' in law name '{}'", text, name));
    }
    return value;
}

Side parse_side(std::string_view text, std::string_view name) {
    if (text == "right") return Side::Right;
    if (text == "left") return Side::Left;
    throw Error(Errc::UnknownName, fmt::format("unknown side '{}' in '{}'", text, name));
}

StepLaw stable_law(double gamma, double beta, Side side) {
    RawLaw raw;
    raw.side = side;
    raw.kind = LawKind::Stable;
    raw.gamma = gamma;
    raw.beta = beta;
    return validate_law(raw);
}

}  // namespace

StepLaw builtin_law(std::string_view name) {
    auto finite = [](Side side, std::vector<double> p) {
        RawLaw raw;
        raw.side = side;
        raw.q = 0.5;
        raw.p = std::move(p);
        return validate_law(raw);
    };
    if (name == "ssrw_right") return finite(Side::Right, {0.0, 0.5});
    if (name == "ssrw_left") return finite(Side::Left, {0.0, 0.5});
    if (name == "skewed_right") return finite(Side::Right, {0.25, 0.0, 0.25});
    if (name == "skewed_left") return finite(Side::Left, {0.25, 0.0, 0.25});

    // stable:<gamma>:<beta>:<side>
    if (name.starts_with("stable:")) {
        std::string_view rest = name.substr(7);
        auto const a = rest.find(':');
        auto const b = a == std::string_view::npos ? a : rest.find(':', a + 1);
        if (b == std::string_view::npos) {
            throw Error(Errc::UnknownName, fmt::format("expected stable:<gamma>:<beta>:<side>, got '{}'", name));
        }
        return stable_law(parse_number(rest.substr(0, a), name), parse_number(rest.substr(a + 1, b - a - 1), name),
                          parse_side(rest.substr(b + 1), name));
    }
    // stable(<gamma>,<beta>)-<side>
    if (name.starts_with("stable(")) {
        auto const comma = name.find(',');
        auto const close = name.find(")-");
        if (comma == std::string_view::npos || close == std::string_view::npos || comma > close) {
            throw Error(Errc::UnknownName, fmt::format("expected stable(<gamma>,<beta>)-<side>, got '{}'", name));
        }
        return stable_law(parse_number(name.substr(7, comma - 7), name),
                          parse_number(name.substr(comma + 1, close - comma - 1), name),
                          parse_side(name.substr(close + 2), name));
    }
    throw Error(Errc::UnknownName, fmt::format("no builtin law named '{}'", name));
}

std::vector<std::string> builtin_law_names() {
    return {"ssrw_right", "ssrw_left", "skewed_right", "skewed_left", "stable:<gamma>:<beta>:<right|left>"};
}

std::vector<std::pair<std::string, StepLaw>> builtin_fixture_laws() {
    std::vector<std::pair<std::string, StepLaw>> out;
    for (char const* name : {"ssrw_right", "ssrw_left", "skewed_right", "skewed_left", "stable:0.6:0.5:right",
                             "stable:0.6:0.5:left"}) {
        out.emplace_back(name, builtin_law(name));
    }
    return out;
}

}  // namespace recdev
