#pragma once

#include <cstddef>

#include "recdev/power_series.hpp"
#include "recdev/walk_model.hpp"

namespace recdev {

/// Largest s accepted by the pointwise ladder functions.
inline constexpr double kMaxLadderArgument = 1.0 - 1e-12;

/// Minimal root h(s) of x = s phi(x), with the complements that stay
/// accurate as s -> 1.
struct LadderPoint {
    double s = 0.0;
    double one_minus_s = 1.0;
    double h = 0.0;
    double one_minus_h = 1.0;
    /// 1 - s phi'(h(s)); vanishes as s -> 1 for critical laws.
    double slope_defect = 1.0;
};

/// Solves for h at s in [0, 1 - 1e-12]. DomainError otherwise.
LadderPoint ladder_point(StepLaw const& law, double s);

/// Same root, parametrized by t = 1 - s in [1e-12, 1] so that t is exact
/// (used for lambda -> 0 and for the Assumption (H) fit grid).
LadderPoint ladder_point_from_complement(StepLaw const& law, double one_minus_s);

/// Both s and t = 1 - s given, for callers that hold each to full precision
/// (e.g. s = e^lambda, t = -expm1(lambda)).
LadderPoint ladder_point(StepLaw const& law, double s, double one_minus_s);

/// h(s).
double h_point(StepLaw const& law, double s);

/// f0(s) together with 1 - f0(s); both are computed without cancellation.
struct LadderEpochValue {
    double value = 0.0;
    double complement = 1.0;
};

/// f0 at an already-solved ladder point, using the side's closed form
/// (right: 1 + q s - q s / h, left: s (1 - phi(h)) / (1 - h)).
LadderEpochValue f0_at(StepLaw const& law, LadderPoint const& point);

/// f0(s) for s in (0, 1 - 1e-12].
double f0_point(StepLaw const& law, double s);

/// Power series of h to `degree`, from the coefficient recurrence of
/// h = s phi(h) (coefficient m depends only on coefficients < m).
ScaledSeries h_series(StepLaw const& law, std::size_t degree);

/// Series of f0, i.e. the pmf of the first weak-ladder epoch.
ScaledSeries f0_series(StepLaw const& law, std::size_t degree);

/// 1 / (1 - f0): coefficient n is P(reflected walk at 0 at time n | start at 0).
ScaledSeries return_prob_series(StepLaw const& law, std::size_t degree);

/// Series forms of the ladder generating functions for one law.
struct LadderGF {
    StepLaw law;
    ScaledSeries h;
    ScaledSeries f0;
    ScaledSeries returns;

    static LadderGF build(StepLaw const& law, std::size_t degree);
};

}  // namespace recdev
