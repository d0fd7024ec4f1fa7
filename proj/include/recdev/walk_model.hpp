#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace recdev {

/// Which unit jump is skip-free. Right: P(X=+1)=q, P(X=-n)=p_n.
/// Left: P(X=-1)=q, P(X=n)=p_n.
enum class Side { Right, Left };
enum class LawKind { Finite, Stable };

std::string_view to_string(Side side) noexcept;
std::string_view to_string(LawKind kind) noexcept;

/// Unvalidated description of a step law, as read from a file or flags.
struct RawLaw {
    Side side = Side::Right;
    LawKind kind = LawKind::Finite;
    std::optional<double> q;
    std::vector<double> p;
    std::optional<double> gamma;
    std::optional<double> beta;
};

inline constexpr double kCriticalityTolerance = 1e-9;
inline constexpr double kNormalizationTolerance = 1e-12;
inline constexpr std::size_t kMaxFiniteSupport = 1'000'000;

/// A validated, critical, skip-free step law with generating function
///   phi(s) = q + sum_n p_n s^{n+1}
/// (Finite kind) or phi(s) = s + gamma (1-s)^{1+beta} / (1+beta) (Stable kind).
///
/// Besides plain evaluation of phi, the law exposes "complement" forms
/// evaluated at x = 1 - v. Near x = 1 these avoid the cancellation in
/// phi(x) - x and 1 - phi'(x), which is what the ladder root and every
/// rate computation close to lambda = 0 depend on.
class StepLaw {
public:
    [[nodiscard]] Side side() const noexcept { return side_; }
    [[nodiscard]] LawKind kind() const noexcept { return kind_; }
    [[nodiscard]] double q() const noexcept { return q_; }
    /// Probability of a zero step (p_0).
    [[nodiscard]] double p0() const noexcept;
    /// Finite kind: p_0..p_K as given. Stable kind: empty (see coefficients()).
    [[nodiscard]] std::vector<double> const& p() const noexcept { return p_; }
    [[nodiscard]] double gamma() const noexcept { return gamma_; }
    [[nodiscard]] double beta() const noexcept { return beta_; }

    /// phi, phi' or phi'' at s in [0, 1].
    [[nodiscard]] double pgf(double s, int order) const;

    /// Coefficients c_0..c_N of phi (c_0 = q, c_{n+1} = p_n).
    [[nodiscard]] std::vector<double> coefficients(std::size_t degree) const;

    /// Tail masses sum_{m > j} c_m for j = 0..degree.
    [[nodiscard]] std::vector<double> coefficient_tails(std::size_t degree) const;
    /// sum_{m > j} c_m for a single (possibly huge) j; closed form for the
    /// Stable kind.
    [[nodiscard]] double coefficient_tail(std::size_t j) const;

    /// E[X] summed directly over the step probabilities (Finite kind);
    /// zero by construction for the Stable kind.
    [[nodiscard]] double mean_step() const;
    /// phi''(1) = Var X for Finite kind; nullopt for Stable (infinite).
    [[nodiscard]] std::optional<double> phi_second_at_one() const;

    /// phi(1-v) - (1-v), nonnegative on [0,1].
    [[nodiscard]] double gap(double v) const;
    /// 1 - phi'(1-v).
    [[nodiscard]] double gap_slope(double v) const;
    /// v * gap_slope(v) - gap(v).
    [[nodiscard]] double gap_excess(double v) const;
    /// 1 - phi(1-v).
    [[nodiscard]] double one_minus_pgf(double v) const;
    /// (phi(x) - q) / x, continuous at x = 0 where it equals p_0.
    [[nodiscard]] double reduced_pgf(double x) const;

    [[nodiscard]] std::string describe() const;

    friend StepLaw validate_law(RawLaw const& raw);
    friend bool operator==(StepLaw const&, StepLaw const&) = default;

private:
    StepLaw() = default;

    Side side_ = Side::Right;
    LawKind kind_ = LawKind::Finite;
    double q_ = 0.0;
    std::vector<double> p_;
    double gamma_ = 0.0;
    double beta_ = 0.0;
    // Finite kind: nonzero (power, coefficient) pairs of phi plus the
    // rounding residues of sum c_j - 1 and sum j c_j - 1.
    std::vector<std::pair<std::size_t, double>> terms_;
    std::vector<double> dense_;
    double mass_residue_ = 0.0;
    double slope_residue_ = 0.0;
};

/// Validates a raw description. Throws recdev::Error with one of NotNormalized,
/// NotCritical, DegenerateP0, ZeroQ, BadStableParams, SupportTooLarge.
StepLaw validate_law(RawLaw const& raw);

/// `order` is 0, 1 or 2. DomainError outside [0,1]; SingularDerivative for
/// the Stable kind at order 2 and s = 1.
double pgf_eval(StepLaw const& law, double s, int order);

std::vector<double> pgf_coefficients(StepLaw const& law, std::size_t degree);

/// ssrw_right, ssrw_left, skewed_right, skewed_left, stable:<gamma>:<beta>:<right|left>.
StepLaw builtin_law(std::string_view name);

std::vector<std::string> builtin_law_names();

/// Laws exercised by the invariant suites: the four finite fixtures plus the
/// stable(0.6, 0.5) family on both sides.
std::vector<std::pair<std::string, StepLaw>> builtin_fixture_laws();

}  // namespace recdev
