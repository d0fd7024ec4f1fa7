#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "recdev/walk_model.hpp"

namespace recdev {

/// Counter-based stream: path i of seed s always sees the same sequence,
/// whichever worker runs it.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t stream) noexcept;

    std::uint64_t next() noexcept;
    /// Uniform on (0, 1], 53-bit resolution.
    double open_unit() noexcept;

private:
    std::uint64_t state_;
};

/// Exact inverse-CDF sampling of the coefficient index j (P(j) = c_j), mapped
/// to the step X = 1 - j (Right) or X = j - 1 (Left).
class StepSampler {
public:
    explicit StepSampler(StepLaw const& law);

    [[nodiscard]] std::uint64_t sample_index(PathRng& rng) const;
    [[nodiscard]] std::int64_t sample_step(PathRng& rng) const;
    [[nodiscard]] std::int64_t step_of_index(std::uint64_t j) const noexcept;

private:
    /// Smallest j with sum_{m > j} c_m < w beyond the tabulated range.
    [[nodiscard]] std::uint64_t far_index(double w) const;

    StepLaw law_;
    std::vector<double> tails_;  // tails_[j] = sum_{m > j} c_m, decreasing
};

/// Weak-record count computed two ways over one path.
struct RecordCount {
    std::size_t records = 0;        // m with S_m >= M_{m-1}
    std::size_t reflected_zeros = 0;  // m with M_m - S_m = 0
    [[nodiscard]] bool agree() const noexcept { return records == reflected_zeros; }
};

RecordCount count_records(std::span<std::int64_t const> steps);

/// One path of length n drawn from `rng`.
RecordCount simulate_path(StepSampler const& sampler, std::size_t n, PathRng& rng);

struct SimConfig {
    StepLaw law;
    std::size_t n = 100;
    std::uint64_t paths = 1;
    std::uint64_t seed = 0;
    /// 0 selects the hardware concurrency; RD_THREADS caps either way.
    unsigned workers = 1;
};

struct TailEstimate {
    std::size_t k = 0;
    double estimate = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

struct SimResult {
    std::uint64_t paths = 0;
    /// histogram[k] = number of paths with A_n = k, k = 0..n.
    std::vector<std::uint64_t> histogram;
    std::uint64_t violations = 0;

    /// Fraction of paths with A_n >= k and its Wilson 95% interval.
    [[nodiscard]] TailEstimate tail(std::size_t k) const;
    [[nodiscard]] std::vector<double> empirical_pmf() const;
};

/// Wilson score interval for `successes` out of `trials` at z = 1.959964.
TailEstimate wilson_interval(std::uint64_t successes, std::uint64_t trials);

/// Worker count actually used for `requested` after the RD_THREADS cap.
unsigned effective_workers(unsigned requested);

SimResult empirical_pmf(SimConfig const& cfg);
TailEstimate estimate_tail(SimConfig const& cfg, std::size_t k);

/// (1/2) sum_k |empirical(k) - reference(k)|, entries missing on either side
/// counting as 0.
double total_variation(std::span<double const> empirical, std::span<double const> reference);

}  // namespace recdev
