#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "recdev/power_series.hpp"
#include "recdev/walk_model.hpp"

namespace recdev {

/// Desk-scale cap on exact horizons.
inline constexpr std::size_t kMaxOracleHorizon = 10'000;
/// Cap for the dynamic-programming cross-checks (O(n^3) and worse).
inline constexpr std::size_t kMaxDpHorizon = 60;

/// Exact law of the weak record count A_n: tail[k] = P(A_n >= k) = P(T_k <= n)
/// for k = 0..kmax, where T_k is the k-th weak ladder epoch.
struct TailTable {
    std::size_t n = 0;
    std::vector<ScaledValue> tail;
    /// pmf[k] = P(A_n = k); only entries with tail[k+1] known are filled.
    std::vector<ScaledValue> pmf;
    /// max_k |P(T_k <= n) + P(T_k > n) - 1| with P(T_k > n) tracked separately.
    double mass_defect = 0.0;

    [[nodiscard]] std::size_t kmax() const noexcept { return tail.size() - 1; }
};

/// Levels 0..cap of the reflected walk (running maximum minus walk) plus the
/// mass that left the tracked range.
struct ChainState {
    std::vector<double> level;
    double overflow = 0.0;
};

/// One-step transition of the reflected walk for a law's coefficient
/// sequence. `right_form` selects the right-continuous transition
/// structure regardless of the law's declared side (used for the
/// first-passage identity, which holds on that chain for any phi).
class ReflectedChain {
public:
    ReflectedChain(StepLaw const& law, std::size_t cap);
    ReflectedChain(StepLaw const& law, std::size_t cap, bool right_form);

    [[nodiscard]] std::size_t cap() const noexcept { return cap_; }
    [[nodiscard]] ChainState start(std::size_t level) const;
    [[nodiscard]] ChainState step(ChainState const& from) const;

    /// Probability of the transition i -> j (j <= cap).
    [[nodiscard]] double transition(std::size_t i, std::size_t j) const;

private:
    bool right_form_ = true;
    std::size_t cap_ = 0;
    std::vector<double> c_;    // c_0..c_{cap+1}
    std::vector<double> tail_;  // tail_[j] = c_{j+1} + c_{j+2} + ...
};

/// P(Y = m), m = 0..degree (index 0 is 0), Y the first weak-ladder epoch.
/// Coefficients of f0; cross-checked against first_return_dp up to degree 60
/// (std::logic_error on disagreement beyond 1e-12).
std::vector<double> y_pmf(StepLaw const& law, std::size_t degree);

/// First-return pmf of the reflected walk to 0, by taboo dynamic programming.
std::vector<double> first_return_dp(StepLaw const& law, std::size_t degree);

/// First-passage pmf from level 1 to 0 on the right-continuous chain built
/// from the law's coefficients; its generating function is h.
std::vector<double> first_passage_dp(StepLaw const& law, std::size_t degree);

/// Iterates T_k = T_{k-1} * Y truncated at n. HorizonTooLarge above 10^4.
/// `shards` splits each convolution across threads with identical output.
TailTable record_tail_exact(StepLaw const& law, std::size_t n,
                            std::size_t kmax = std::numeric_limits<std::size_t>::max(), unsigned shards = 1);

/// cdf[k][m] = P(T_k <= m) for k, m <= nmax: every horizon at once.
std::vector<std::vector<ScaledValue>> renewal_cdf_grid(StepLaw const& law, std::size_t nmax);

/// joint[k][j] = P(S-bar_n = j, L_n^0 = k) by forward DP; n <= 60.
struct OccupationJoint {
    std::size_t n = 0;
    std::vector<std::vector<double>> joint;
    /// P(L_n^0 = k) summed over levels including overflow.
    std::vector<double> count_pmf;
};
OccupationJoint occupation_dp(StepLaw const& law, std::size_t n);

/// exp(-k Lambda*(n/k)), an upper bound for P(T_k <= n).
ScaledValue chernoff_bound(StepLaw const& law, std::size_t n, std::size_t k);

/// ceil(x n), treating x n within 1e-9 relative of an integer as that integer.
std::size_t record_threshold(double x, std::size_t n);

struct ConvergenceRow {
    std::size_t n = 0;
    std::size_t k = 0;
    ScaledValue probability;
    double neg_log_rate = 0.0;
    double ldp_rate = 0.0;
};

/// Exact P(A_n >= ceil(x n)) and -ln P / n against the LDP rate x Lambda*(1/x).
std::vector<ConvergenceRow> convergence_table(StepLaw const& law, double x, std::vector<std::size_t> const& n_list);

}  // namespace recdev
