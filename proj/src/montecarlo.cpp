#include "recdev/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include <fmt/format.h>

#include "recdev/error.hpp"

namespace recdev {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr std::size_t kStableTable = 4096;

std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

//---------------------------------------------------------------------------//
// PathRng
//---------------------------------------------------------------------------//

PathRng::PathRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : state_(mix64(seed + kGolden) ^ mix64(stream * kGolden + 0x632be59bd9b4e019ULL)) {}

std::uint64_t PathRng::next() noexcept {
    state_ += kGolden;
    return mix64(state_);
}

double PathRng::open_unit() noexcept { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

//---------------------------------------------------------------------------//
// StepSampler
//---------------------------------------------------------------------------//

StepSampler::StepSampler(StepLaw const& law) : law_(law) {
    if (law.kind() == LawKind::Finite) {
        std::size_t const top = law.p().size();
        tails_ = law.coefficient_tails(top);
        // The last index carries the remaining mass exactly.
        tails_.back() = 0.0;
    } else {
        tails_ = law.coefficient_tails(kStableTable);
    }
}

std::uint64_t StepSampler::far_index(double w) const {
    // The closed-form tail is decreasing; bracket by doubling, then bisect.
    std::uint64_t lo = tails_.size() - 1;  // tail(lo) >= w
    std::uint64_t hi = 2 * lo;
    while (!(law_.coefficient_tail(hi) < w)) {
        lo = hi;
        hi *= 2;
    }
    while (hi - lo > 1) {
        std::uint64_t const mid = lo + (hi - lo) / 2;
        if (law_.coefficient_tail(mid) < w) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

std::uint64_t StepSampler::sample_index(PathRng& rng) const {
    // Index j with sum_{m > j} c_m < w <= sum_{m >= j} c_m, w uniform on (0, 1].
    double const w = rng.open_unit();
    if (!(tails_.back() < w)) return far_index(w);
    auto const it = std::upper_bound(tails_.begin(), tails_.end(), w, [](double value, double tail) {
        return tail < value;
    });
    return static_cast<std::uint64_t>(it - tails_.begin());
}

std::int64_t StepSampler::step_of_index(std::uint64_t j) const noexcept {
    auto const signed_j = static_cast<std::int64_t>(j);
    return law_.side() == Side::Right ? 1 - signed_j : signed_j - 1;
}

std::int64_t StepSampler::sample_step(PathRng& rng) const { return step_of_index(sample_index(rng)); }

//---------------------------------------------------------------------------//
// Paths
//---------------------------------------------------------------------------//

RecordCount count_records(std::span<std::int64_t const> steps) {
    RecordCount out;
    std::int64_t position = 0;
    std::int64_t maximum = 0;
    for (std::int64_t x : steps) {
        std::int64_t const previous_max = maximum;
        position += x;
        if (position >= previous_max) ++out.records;
        maximum = std::max(maximum, position);
        if (maximum - position == 0) ++out.reflected_zeros;
    }
    return out;
}

RecordCount simulate_path(StepSampler const& sampler, std::size_t n, PathRng& rng) {
    std::vector<std::int64_t> steps(n);
    for (auto& x : steps) x = sampler.sample_step(rng);
    return count_records(steps);
}

//---------------------------------------------------------------------------//
// Estimates
//---------------------------------------------------------------------------//

TailEstimate wilson_interval(std::uint64_t successes, std::uint64_t trials) {
    TailEstimate est;
    if (trials == 0) return est;
    constexpr double z = 1.959963984540054;
    auto const n = static_cast<double>(trials);
    double const p = static_cast<double>(successes) / n;
    double const denom = 1.0 + z * z / n;
    double const centre = (p + z * z / (2.0 * n)) / denom;
    double const half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
    est.estimate = p;
    est.lower = successes == 0 ? 0.0 : std::max(0.0, centre - half);
    est.upper = successes == trials ? 1.0 : std::min(1.0, centre + half);
    return est;
}

TailEstimate SimResult::tail(std::size_t k) const {
    std::uint64_t hits = 0;
    for (std::size_t j = k; j < histogram.size(); ++j) hits += histogram[j];
    TailEstimate est = wilson_interval(hits, paths);
    est.k = k;
    return est;
}

std::vector<double> SimResult::empirical_pmf() const {
    std::vector<double> pmf(histogram.size(), 0.0);
    for (std::size_t k = 0; k < histogram.size(); ++k) {
        pmf[k] = static_cast<double>(histogram[k]) / static_cast<double>(paths);
    }
    return pmf;
}

unsigned effective_workers(unsigned requested) {
    unsigned workers = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    if (char const* env = std::getenv("RD_THREADS"); env != nullptr && *env != '\0') {
        try {
            long const cap = std::stol(env);
            if (cap >= 1) workers = std::min(workers, static_cast<unsigned>(cap));
        } catch (std::exception const&) {
            // An unparsable cap is ignored.
        }
    }
    return std::max(1u, workers);
}

SimResult empirical_pmf(SimConfig const& cfg) {
    if (cfg.paths < 1) throw Error(Errc::DomainError, "simulation needs paths >= 1");
    StepSampler const sampler(cfg.law);
    unsigned const workers =
        static_cast<unsigned>(std::min<std::uint64_t>(effective_workers(cfg.workers), cfg.paths));

    struct Partial {
        std::vector<std::uint64_t> histogram;
        std::uint64_t violations = 0;
    };
    std::vector<Partial> partials(workers, Partial{std::vector<std::uint64_t>(cfg.n + 1, 0), 0});
    auto work = [&](unsigned w) {
        Partial& part = partials[w];
        std::vector<std::int64_t> steps(cfg.n);
        for (std::uint64_t i = w; i < cfg.paths; i += workers) {
            PathRng rng(cfg.seed, i);
            for (auto& x : steps) x = sampler.sample_step(rng);
            RecordCount const count = count_records(steps);
            ++part.histogram[count.records];
            if (!count.agree()) ++part.violations;
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }

    SimResult result;
    result.paths = cfg.paths;
    result.histogram.assign(cfg.n + 1, 0);
    for (auto const& part : partials) {
        for (std::size_t k = 0; k <= cfg.n; ++k) result.histogram[k] += part.histogram[k];
        result.violations += part.violations;
    }
    return result;
}

TailEstimate estimate_tail(SimConfig const& cfg, std::size_t k) {
    if (k > cfg.n + 1) throw Error(Errc::DomainError, fmt::format("k={} exceeds n+1={}", k, cfg.n + 1));
    return empirical_pmf(cfg).tail(k);
}

double total_variation(std::span<double const> empirical, std::span<double const> reference) {
    std::size_t const size = std::max(empirical.size(), reference.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < size; ++k) {
        double const a = k < empirical.size() ? empirical[k] : 0.0;
        double const b = k < reference.size() ? reference[k] : 0.0;
        sum += std::fabs(a - b);
    }
    return 0.5 * sum;
}

}  // namespace recdev
