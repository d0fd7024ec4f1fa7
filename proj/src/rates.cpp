#include "recdev/rates.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "recdev/error.hpp"
#include "recdev/ladder.hpp"

namespace recdev {

std::string_view to_string(Regime regime) noexcept { return regime == Regime::LDP ? "LDP" : "MDP"; }

std::string_view to_string(HSource source) noexcept {
    switch (source) {
        case HSource::FiniteVariance: return "FiniteVariance";
        case HSource::StableFamily: return "StableFamily";
        case HSource::Fitted: return "Fitted";
    }
    return "Unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LadderPoint point_at_lambda(StepLaw const& law, double lambda) {
    if (!(lambda <= kMaxLambda)) {
        throw Error(Errc::DomainError, fmt::format("lambda={} must be <= -1e-12", lambda));
    }
    return ladder_point(law, std::exp(lambda), -std::expm1(lambda));
}

double log_f0(LadderEpochValue const& f) {
    return f.value < 0.5 ? std::log(f.value) : std::log1p(-f.complement);
}

double derivative_at(StepLaw const& law, LadderPoint const& pt) {
    double const h = pt.h;
    double const v = pt.one_minus_h;
    double const d = pt.slope_defect;
    if (law.side() == Side::Right) {
        // q [h D + s phi'(h)] / (D h (q + (phi(h) - q) / h)), with s phi'(h) = 1 - D.
        double const numer = h < 0.5 ? h * d + pt.s * law.pgf(h, 1) : 1.0 - d * v;
        return law.q() * numer / (d * h * (law.q() + law.reduced_pgf(h)));
    }
    // 1 + (h / D) [1/(1-h) - phi'(h)/(1-phi(h))]
    //   = 1 + (h / D) (v gap'(v) - gap(v)) / (v (1 - phi(h))).
    return 1.0 + (h / d) * law.gap_excess(v) / (v * law.one_minus_pgf(v));
}

double excess_at(StepLaw const& law, LadderPoint const& pt) {
    // lambda - Lambda = -ln(f0 / s).
    if (law.side() == Side::Right) return -std::log(law.q() + law.reduced_pgf(pt.h));
    return -std::log(law.one_minus_pgf(pt.one_minus_h) / pt.one_minus_h);
}

}  // namespace

double lambda_eval(StepLaw const& law, double lambda, int order) {
    if (order != 0 && order != 1) throw Error(Errc::DomainError, fmt::format("order {} not in {{0,1}}", order));
    LadderPoint const pt = point_at_lambda(law, lambda);
    if (order == 0) return log_f0(f0_at(law, pt));
    return derivative_at(law, pt);
}

double lambda_excess(StepLaw const& law, double lambda) { return excess_at(law, point_at_lambda(law, lambda)); }

double g_inverse(StepLaw const& law, double x) {
    if (!(x > 1.0)) throw Error(Errc::DomainError, fmt::format("G(x) needs x > 1, got {}", x));
    double hi = kMaxLambda;
    if (!(lambda_eval(law, hi, 1) > x)) {
        throw Error(Errc::BracketFailed,
                    fmt::format("Lambda'(-1e-12) = {} does not exceed x = {}", lambda_eval(law, hi, 1), x));
    }
    double lo = -1.0;
    while (lambda_eval(law, lo, 1) >= x) {
        lo *= 2.0;
        if (lo < -700.0) {
            throw Error(Errc::BracketFailed,
                        fmt::format("Lambda'(lambda) >= x = {} down to lambda = {}; x is too close to 1", x, lo));
        }
    }
    // Bisection; geometric midpoints while the bracket spans many scales.
    double mid = lo;
    for (int i = 0; i < 400; ++i) {
        mid = lo / hi > 4.0 ? -std::sqrt(lo * hi) : 0.5 * (lo + hi);
        double const value = lambda_eval(law, mid, 1);
        if (std::fabs(value - x) <= 1e-10 * x) break;
        if (value > x) {
            hi = mid;
        } else {
            lo = mid;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(lo)) break;
    }
    return mid;
}

double boundary_constant(StepLaw const& law) {
    if (law.side() == Side::Right) return -std::log(law.q() + law.p0());
    return -std::log1p(-law.q());
}

double legendre(StepLaw const& law, double x) {
    if (x < 1.0) return kInf;
    if (x == 1.0) return boundary_constant(law);
    double const lambda = g_inverse(law, x);
    // x lambda - Lambda(lambda) = (x - 1) lambda + (lambda - Lambda(lambda)).
    return (x - 1.0) * lambda + lambda_excess(law, lambda);
}

RateResult ldp_rate(StepLaw const& law, double x) {
    if (!(x > 0.0)) throw Error(Errc::DomainError, fmt::format("LDP level x={} must be positive", x));
    RateResult r;
    r.regime = Regime::LDP;
    r.side = law.side();
    r.threshold_exponents = {1.0, 0.0};
    r.value = x > 1.0 ? kInf : x * legendre(law, 1.0 / x);
    return r;
}

RateResult mdp_rate(Side side, double q, double x, HParams const& hp) {
    double const a = hp.alpha;
    RateResult r;
    r.regime = Regime::MDP;
    r.side = side;
    if (side == Side::Right) {
        r.value = a / (1.0 - a) * std::pow(q / hp.c, 1.0 / a) * std::pow(x, 1.0 / a);
        r.threshold_exponents = {1.0 - a, a};
    } else {
        r.value = std::pow(hp.c * std::pow(1.0 - a, 2.0 - a) * std::pow(a, a), 1.0 / (1.0 - a)) *
                  std::pow(x, 1.0 / (1.0 - a));
        r.threshold_exponents = {a, 1.0 - a};
    }
    return r;
}

RateResult mdp_rate(StepLaw const& law, double x, HParams const& hp) {
    if (!(x > 0.0)) throw Error(Errc::DomainError, fmt::format("MDP level x={} must be positive", x));
    return mdp_rate(law.side(), law.q(), x, hp);
}

HParams assumption_h_exact(StepLaw const& law) {
    HParams hp;
    if (law.kind() == LawKind::Stable) {
        double const b = law.beta();
        hp.alpha = b / (1.0 + b);
        hp.c = std::pow(law.gamma(), 1.0 / (1.0 + b)) * std::pow(1.0 + b, b / (1.0 + b));
        hp.source = HSource::StableFamily;
        return hp;
    }
    auto const second = law.phi_second_at_one();
    if (!second || !(*second > 0.0) || !std::isfinite(*second)) {
        throw Error(Errc::NoClosedForm, "no closed-form (alpha, c) for this law");
    }
    hp.alpha = 0.5;
    hp.c = std::sqrt(2.0 * *second);
    hp.source = HSource::FiniteVariance;
    return hp;
}

HParams assumption_h_fit(StepLaw const& law) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (int j = 10; j <= 38; ++j) {
        double const t = std::ldexp(1.0, -j);
        LadderPoint const pt = ladder_point_from_complement(law, t);
        xs.push_back(std::log(t));
        ys.push_back(std::log(pt.slope_defect));
    }
    auto const n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    HParams hp;
    hp.alpha = sxy / sxx;
    hp.c = std::exp(my - hp.alpha * mx);
    hp.source = HSource::Fitted;
    hp.fit_r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    if (!(*hp.fit_r2 >= 0.999) || !(hp.alpha > 0.0 && hp.alpha < 1.0)) {
        throw Error(Errc::FitFailed,
                    fmt::format("fit alpha={} c={} R^2={} rejected", hp.alpha, hp.c, *hp.fit_r2));
    }
    return hp;
}

double return_count_exponent(Side side, HParams const& hp) {
    return side == Side::Right ? 1.0 - hp.alpha : hp.alpha;
}

double tauberian_constant(StepLaw const& law, HParams const& hp) {
    double const a = hp.alpha;
    if (law.side() == Side::Right) return (1.0 - a) * hp.c / (law.q() * std::tgamma(2.0 - a));
    return 1.0 / ((1.0 - a) * hp.c * std::tgamma(1.0 + a));
}

double finite_variance_mdp_constant(Side side, double q, double sigma, double x) {
    if (side == Side::Right) return q * q * x * x / (2.0 * sigma * sigma);
    return sigma * sigma * x * x / 8.0;
}

double stable_mdp_constant(Side side, double gamma, double beta, double x) {
    if (side == Side::Right) {
        return beta * gamma / std::pow(1.0 + beta, 2.0 + 1.0 / beta) * std::pow(x, 1.0 + 1.0 / beta);
    }
    return gamma * std::pow(beta, beta) / std::pow(1.0 + beta, 2.0 + beta) * std::pow(x, 1.0 + beta);
}

MdpEmergence mdp_emergence(StepLaw const& law, HParams const& hp, double x, double n, double cn) {
    auto const [a, b] = mdp_rate(law, x, hp).threshold_exponents;
    MdpEmergence out;
    out.k = std::ceil(x * std::pow(n, a) * std::pow(cn, b));
    out.value = out.k * legendre(law, n / out.k) / cn;
    return out;
}

}  // namespace recdev
