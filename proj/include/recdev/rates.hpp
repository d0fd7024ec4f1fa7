#pragma once

#include <optional>
#include <string_view>
#include <utility>

#include "recdev/walk_model.hpp"

namespace recdev {

enum class Regime { LDP, MDP };
enum class HSource { FiniteVariance, StableFamily, Fitted };

std::string_view to_string(Regime regime) noexcept;
std::string_view to_string(HSource source) noexcept;

/// Constants (alpha, c) with (1 - s phi'(h(s))) ~ c (1 - s)^alpha as s -> 1.
struct HParams {
    double alpha = 0.5;
    double c = 1.0;
    HSource source = HSource::FiniteVariance;
    std::optional<double> fit_r2;
};

/// A rate constant together with the threshold scale x n^a c_n^b it applies
/// to; `threshold_exponents` = (a, b).
struct RateResult {
    double value = 0.0;
    Regime regime = Regime::LDP;
    Side side = Side::Right;
    std::pair<double, double> threshold_exponents{1.0, 0.0};
};

/// Largest lambda accepted by lambda_eval.
inline constexpr double kMaxLambda = -1e-12;

/// Lambda(lambda) = ln f0(e^lambda) (order 0) or its derivative (order 1).
/// DomainError for lambda > -1e-12.
double lambda_eval(StepLaw const& law, double lambda, int order);

/// lambda - Lambda(lambda), evaluated without cancellation for lambda -> -inf.
double lambda_excess(StepLaw const& law, double lambda);

/// G(x): the lambda < 0 with Lambda'(lambda) = x, for x > 1. DomainError
/// for x <= 1; BracketFailed if x lies outside the resolvable range.
double g_inverse(StepLaw const& law, double x);

/// The x = 1 branch of the Legendre transform: -ln(q + p_0) (right),
/// -ln(1 - q) (left).
double boundary_constant(StepLaw const& law);

/// Lambda*(x) = sup_{lambda <= 0} {x lambda - Lambda(lambda)}; +inf for x < 1.
double legendre(StepLaw const& law, double x);

/// x Lambda*(1/x) for 0 < x <= 1; +inf for x > 1.
RateResult ldp_rate(StepLaw const& law, double x);

/// Moderate-deviation constant for thresholds x n^{1-alpha} c_n^alpha (right)
/// or x n^alpha c_n^{1-alpha} (left).
RateResult mdp_rate(StepLaw const& law, double x, HParams const& hp);
RateResult mdp_rate(Side side, double q, double x, HParams const& hp);

/// Closed forms for the two covered families; NoClosedForm otherwise.
HParams assumption_h_exact(StepLaw const& law);

/// Least-squares fit of ln(1 - s phi'(h(s))) on ln(1 - s) over
/// 1 - s = 2^-j, j = 10..38. FitFailed if R^2 < 0.999.
HParams assumption_h_fit(StepLaw const& law);

/// K with sum_{k<=n} P(reflected walk at 0 at time k) ~ K n^{1-alpha} (right)
/// or K n^alpha (left).
double tauberian_constant(StepLaw const& law, HParams const& hp);

/// Exponent of n in the return-count asymptotics used by tauberian_constant.
double return_count_exponent(Side side, HParams const& hp);

/// Finite-variance moderate-deviation constants: q^2 x^2 / (2 sigma^2)
/// (right), sigma^2 x^2 / 8 (left).
double finite_variance_mdp_constant(Side side, double q, double sigma, double x);

/// Stable-family moderate-deviation constants:
/// beta gamma / (1+beta)^{2+1/beta} x^{1+1/beta} (right),
/// gamma beta^beta / (1+beta)^{2+beta} x^{1+beta} (left).
double stable_mdp_constant(Side side, double gamma, double beta, double x);

/// k Lambda*(n/k) / c_n with k = ceil(x n^a c_n^b) for the side's MDP
/// threshold exponents. Tends to mdp_rate as n -> infinity.
struct MdpEmergence {
    double k = 0.0;
    double value = 0.0;
};
MdpEmergence mdp_emergence(StepLaw const& law, HParams const& hp, double x, double n, double cn);

}  // namespace recdev
