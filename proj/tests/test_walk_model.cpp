#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "recdev/error.hpp"
#include "recdev/law_io.hpp"
#include "recdev/power_series.hpp"
#include "recdev/walk_model.hpp"

using namespace recdev;

namespace {

RawLaw finite(Side side, double q, std::vector<double> p) {
    RawLaw raw;
    raw.side = side;
    raw.q = q;
    raw.p = std::move(p);
    return raw;
}

RawLaw stable(double gamma, double beta, Side side = Side::Right) {
    RawLaw raw;
    raw.side = side;
    raw.kind = LawKind::Stable;
    raw.gamma = gamma;
    raw.beta = beta;
    return raw;
}

Errc code_of(RawLaw const& raw) {
    try {
        (void)validate_law(raw);
    } catch (Error const& e) {
        return e.code();
    }
    ADD_FAILURE() << "law validated unexpectedly";
    return Errc::DomainError;
}

}  // namespace

TEST(ValidateLaw, SimpleSymmetricWalkIsValid) {
    StepLaw const law = validate_law(finite(Side::Right, 0.5, {0.0, 0.5}));
    EXPECT_EQ(law.side(), Side::Right);
    EXPECT_DOUBLE_EQ(law.q(), 0.5);
    EXPECT_DOUBLE_EQ(law.pgf(1.0, 1), 1.0);
}

TEST(ValidateLaw, SkewedLeftIsCritical) {
    StepLaw const law = validate_law(finite(Side::Left, 0.5, {0.25, 0.0, 0.25}));
    EXPECT_NEAR(law.pgf(1.0, 1), 1.0, 1e-15);
}

TEST(ValidateLaw, DriftIsRejected) {
    EXPECT_EQ(code_of(finite(Side::Left, 0.5, {0.25, 0.25})), Errc::NotCritical);
}

TEST(ValidateLaw, StableDerivesQ) {
    StepLaw const law = validate_law(stable(0.6, 0.5));
    EXPECT_NEAR(law.q(), 0.4, 1e-15);
}

TEST(ValidateLaw, ErrorCodes) {
    EXPECT_EQ(code_of(finite(Side::Right, 0.5, {0.0, 0.4})), Errc::NotNormalized);
    EXPECT_EQ(code_of(finite(Side::Right, 0.5, {0.0, 0.6, -0.1})), Errc::NotNormalized);
    EXPECT_EQ(code_of(finite(Side::Right, 0.0, {1.0})), Errc::DegenerateP0);
    EXPECT_EQ(code_of(finite(Side::Right, 0.0, {0.0, 1.0})), Errc::ZeroQ);
    EXPECT_EQ(code_of(stable(1.2, 0.5)), Errc::BadStableParams);
    EXPECT_EQ(code_of(stable(0.6, 0.0)), Errc::BadStableParams);
    EXPECT_EQ(code_of(finite(Side::Right, 0.5, std::vector<double>(kMaxFiniteSupport + 2, 0.0))),
              Errc::SupportTooLarge);
    RawLaw inconsistent = stable(0.6, 0.5);
    inconsistent.q = 0.3;
    EXPECT_EQ(code_of(inconsistent), Errc::BadStableParams);
}

TEST(ValidateLaw, CriticalityTolerance) {
    // phi'(1) = 1 + 5e-10 is inside the tolerance, 1 + 5e-9 is not.
    double const d = 5e-10;
    EXPECT_NO_THROW(validate_law(finite(Side::Right, 0.5 - d / 2, {0.0, 0.5 + d / 2})));
    double const e = 5e-9;
    EXPECT_EQ(code_of(finite(Side::Right, 0.5 - e / 2, {0.0, 0.5 + e / 2})), Errc::NotCritical);
}

TEST(PgfEval, Examples) {
    StepLaw const ssrw = builtin_law("ssrw_right");
    EXPECT_DOUBLE_EQ(pgf_eval(ssrw, 0.5, 0), 0.625);
    EXPECT_DOUBLE_EQ(pgf_eval(ssrw, 1.0, 1), 1.0);
    StepLaw const st = builtin_law("stable:0.6:0.5:right");
    EXPECT_NEAR(pgf_eval(st, 0.0, 0), 0.4, 1e-15);
}

TEST(PgfEval, Errors) {
    StepLaw const ssrw = builtin_law("ssrw_right");
    EXPECT_THROW(pgf_eval(ssrw, 1.5, 0), Error);
    EXPECT_THROW(pgf_eval(ssrw, -0.1, 0), Error);
    StepLaw const st = builtin_law("stable:0.6:0.5:right");
    try {
        pgf_eval(st, 1.0, 2);
        FAIL();
    } catch (Error const& e) {
        EXPECT_EQ(e.code(), Errc::SingularDerivative);
    }
    EXPECT_GT(pgf_eval(st, 0.999, 2), 0.0);
}

TEST(PgfCoefficients, Examples) {
    auto const st = pgf_coefficients(builtin_law("stable:0.6:0.5:right"), 3);
    std::vector<double> const expected{0.4, 0.4, 0.15, 0.025};
    ASSERT_EQ(st.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(st[i], expected[i], 1e-15);
    auto const ssrw = pgf_coefficients(builtin_law("ssrw_right"), 2);
    EXPECT_EQ(ssrw, (std::vector<double>{0.5, 0.0, 0.5}));
    EXPECT_THROW(pgf_coefficients(builtin_law("ssrw_right"), 0), Error);
}

TEST(PgfCoefficients, SumToOne) {
    for (auto const& [name, law] : builtin_fixture_laws()) {
        std::size_t const degree = law.kind() == LawKind::Stable ? 2'000'000 : 10;
        auto const c = pgf_coefficients(law, degree);
        double sum = 0.0;
        for (double v : c) {
            EXPECT_GE(v, 0.0);
            sum += v;
        }
        EXPECT_NEAR(sum, 1.0, 1e-10) << name;
    }
}

TEST(PgfCoefficients, StableMatchesGeneralizedBinomial) {
    // c_j = q (-1)^j C(1+beta, j) for j >= 2, checked through lgamma.
    double const g = 0.3;
    double const b = 0.75;
    StepLaw const law = validate_law(stable(g, b));
    auto const c = pgf_coefficients(law, 400);
    double const q = g / (1.0 + b);
    for (std::size_t j = 2; j <= 400; j += 37) {
        double const jj = static_cast<double>(j);
        // |C(a, j)| = Gamma(j - a) / (|Gamma(-a)| Gamma(j + 1)) for a = 1 + b in (1, 2).
        double const a = 1.0 + b;
        double const mag =
            std::exp(std::lgamma(jj - a) - std::lgamma(jj + 1.0)) / std::fabs(std::tgamma(-a));
        EXPECT_NEAR(c[j] / (q * mag), 1.0, 1e-10) << j;
    }
}

TEST(CoefficientTails, MatchSuffixSumsAndClosedForm) {
    for (auto const& [name, law] : builtin_fixture_laws()) {
        auto const c = law.coefficients(3000);
        auto const tails = law.coefficient_tails(50);
        double cumulative = 0.0;
        for (std::size_t j = 0; j <= 50; ++j) {
            cumulative += c[j];
            EXPECT_NEAR(tails[j], 1.0 - cumulative, 1e-12) << name << " j=" << j;
            EXPECT_NEAR(law.coefficient_tail(j), tails[j], 1e-13 + 1e-11 * tails[j]) << name << " j=" << j;
        }
    }
}

TEST(PgfProperties, MonotoneConvexNormalized) {
    for (auto const& [name, law] : builtin_fixture_laws()) {
        for (int i = 0; i < 100; ++i) {
            double const s = 0.01 * i;
            EXPECT_GE(law.pgf(s, 1), 0.0) << name;
            EXPECT_GE(law.pgf(s, 2), 0.0) << name;
        }
        EXPECT_NEAR(law.pgf(1.0, 0), 1.0, 1e-12) << name;
        EXPECT_NEAR(law.pgf(0.0, 0), law.q(), 1e-15) << name;
        EXPECT_GT(law.pgf(0.0, 0), 0.0);
    }
}

TEST(PgfProperties, ClosedFormMatchesHorner) {
    for (auto const& [name, law] : builtin_fixture_laws()) {
        ScaledSeries const poly(law.coefficients(2000));
        for (int i = 0; i <= 99; ++i) {
            double const s = 0.01 * i;
            EXPECT_NEAR(law.pgf(s, 0), poly.evaluate(s), 1e-9) << name << " s=" << s;
        }
    }
}

TEST(PgfProperties, ComplementFormsMatchDirectEvaluation) {
    for (auto const& [name, law] : builtin_fixture_laws()) {
        for (double v : {0.9, 0.5, 0.1, 0.01}) {
            double const x = 1.0 - v;
            EXPECT_NEAR(law.gap(v), law.pgf(x, 0) - x, 1e-14) << name;
            EXPECT_NEAR(law.gap_slope(v), 1.0 - law.pgf(x, 1), 1e-14) << name;
            EXPECT_NEAR(law.gap_excess(v), v * law.gap_slope(v) - law.gap(v), 1e-14) << name;
            EXPECT_NEAR(law.one_minus_pgf(v), 1.0 - law.pgf(x, 0), 1e-14) << name;
            EXPECT_NEAR(law.reduced_pgf(x), (law.pgf(x, 0) - law.q()) / x, 1e-14) << name;
        }
        // Relative accuracy deep in the v -> 0 regime, against the leading term.
        double const v = 1e-9;
        if (law.kind() == LawKind::Finite) {
            double const var = *law.phi_second_at_one();
            EXPECT_NEAR(law.gap(v) / (0.5 * var * v * v), 1.0, 1e-6) << name;
            EXPECT_NEAR(law.gap_slope(v) / (var * v), 1.0, 1e-6) << name;
        } else {
            EXPECT_NEAR(law.gap(v) / (law.q() * std::pow(v, 1.0 + law.beta())), 1.0, 1e-12) << name;
        }
    }
}

TEST(PgfProperties, ZeroDriftEquivalence) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        // A single rescaled atom would be p_0 = 1.
        std::vector<double> p(1 + trial % 5 + (trial % 3 == 0 ? 1 : 0));
        for (auto& v : p) v = unit(gen) / static_cast<double>(p.size() + 1);
        if (trial % 3 == 0) {
            double weight = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) weight += static_cast<double>(i + 1) * p[i];
            for (auto& v : p) v /= weight;
        }
        double mass = 0.0;
        for (double v : p) mass += v;
        RawLaw raw = finite(trial % 2 ? Side::Left : Side::Right, 1.0 - mass, p);
        double slope = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) slope += static_cast<double>(i + 1) * p[i];
        // E[X] = q - sum n p_n (right) = 1 - phi'(1).
        double mean = 1.0 - mass;
        for (std::size_t i = 0; i < p.size(); ++i) mean -= static_cast<double>(i) * p[i];
        if (raw.side == Side::Left) mean = -mean;
        bool const critical = std::fabs(slope - 1.0) <= kCriticalityTolerance;
        EXPECT_EQ(critical, std::fabs(mean) <= kCriticalityTolerance);
        if (critical) {
            EXPECT_NEAR(validate_law(raw).mean_step(), mean, 1e-12);
        } else {
            EXPECT_EQ(code_of(raw), Errc::NotCritical);
        }
    }
    for (auto const& [name, law] : builtin_fixture_laws()) EXPECT_NEAR(law.mean_step(), 0.0, 1e-12) << name;
}

TEST(BuiltinLaw, Names) {
    StepLaw const ssrw = builtin_law("ssrw_right");
    EXPECT_EQ(ssrw.p(), (std::vector<double>{0.0, 0.5}));
    StepLaw const skewed = builtin_law("skewed_left");
    EXPECT_EQ(skewed.side(), Side::Left);
    EXPECT_EQ(skewed.p(), (std::vector<double>{0.25, 0.0, 0.25}));
    StepLaw const a = builtin_law("stable:0.6:0.5:right");
    StepLaw const b = builtin_law("stable(0.6,0.5)-right");
    EXPECT_EQ(a, b);
    EXPECT_NEAR(a.q(), 0.4, 1e-15);
    try {
        builtin_law("gaussian");
        FAIL();
    } catch (Error const& e) {
        EXPECT_EQ(e.code(), Errc::UnknownName);
    }
    EXPECT_THROW(builtin_law("stable:0.6:0.5:up"), Error);
    EXPECT_EQ(builtin_fixture_laws().size(), 6u);
}

TEST(LawIo, RoundTrip) {
    for (auto const& [name, law] : builtin_fixture_laws()) {
        std::string const text = law_to_json(law);
        StepLaw const back = validate_law(parse_law_json(text));
        EXPECT_EQ(back, law) << name;
        EXPECT_EQ(law_to_json(back), text);
    }
}

TEST(LawIo, RejectsBadDocuments) {
    auto code = [](std::string const& text) {
        try {
            (void)validate_law(parse_law_json(text));
        } catch (Error const& e) {
            return e.code();
        }
        return Errc::DomainError;
    };
    EXPECT_EQ(code(R"({"side":"right","q":0.5,"p":[0,0.5],"color":"red"})"), Errc::BadLawFile);
    EXPECT_EQ(code(R"({"q":0.5,"p":[0,0.5]})"), Errc::BadLawFile);
    EXPECT_EQ(code(R"({"side":"up","q":0.5,"p":[0,0.5]})"), Errc::BadLawFile);
    EXPECT_EQ(code(R"({"side":"right","q":"half","p":[0,0.5]})"), Errc::BadLawFile);
    EXPECT_EQ(code(R"({"side":"right","q":0.5,"p":[0,0.5])"), Errc::BadLawFile);
    EXPECT_EQ(code(R"({"side":"right","kind":"finite","p":[0,0.5]})"), Errc::BadLawFile);
    EXPECT_EQ(code(R"({"side":"left","q":0.5,"p":[0.25,0.25]})"), Errc::NotCritical);
    EXPECT_EQ(code(R"({"side":"left","kind":"stable","gamma":0.6,"beta":1.5})"), Errc::BadStableParams);
}

TEST(LawIo, LoadsBuiltinsAndFiles) {
    EXPECT_EQ(load_law("ssrw_left"), builtin_law("ssrw_left"));
    auto const path = std::filesystem::temp_directory_path() / "recdev_law_test.json";
    {
        std::ofstream out(path);
        out << R"({"side":"left","kind":"finite","q":0.5,"p":[0.25,0,0.25]})";
    }
    EXPECT_EQ(load_law(path.string()), builtin_law("skewed_left"));
    std::filesystem::remove(path);
    try {
        load_law("/nonexistent/law.json");
        FAIL();
    } catch (Error const& e) {
        EXPECT_EQ(e.code(), Errc::UnknownName);
        EXPECT_TRUE(e.is_validation());
    }
}
