#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "walkbounds/chain.hpp"

namespace walkbounds {

/// Fraction of truncated paths above which an estimate is unreliable.
inline constexpr double kTruncationThreshold = 1e-3;

/// Monte Carlo point estimate with a symmetric confidence interval.
/// Estimates from identical (inputs, seed, n_paths, cap) are bit-identical:
/// path i draws from its own substream derived from (seed, i) and paths are
/// aggregated in index order.
struct SimulationEstimate {
    double mean = 0.0;
    double ci_half_width = 0.0;
    std::int64_t n_paths = 0;
    std::int64_t n_truncated = 0;  // paths that hit the step cap
    std::uint64_t seed = 0;
    double confidence_level = 0.99;

    double truncation_fraction() const;
    bool reliable() const { return truncation_fraction() <= kTruncationThreshold; }
};

struct Trajectory {
    enum class Stop { hit_target, truncated };
    std::vector<int> states;  // starts at the start state
    Stop stop_reason = Stop::hit_target;
};

struct SimOptions {
    std::int64_t n_paths = 100000;
    std::uint64_t seed = 0;
    std::int64_t cap = 1000000;  // max transitions per path
    double confidence_level = 0.99;
};

/// One sampled path from `start` until the stop set is hit or `cap`
/// transitions have been taken. Steps use inverse-CDF sampling over the
/// fixed state order; a start inside the stop set yields a length-0 path.
Trajectory sample_path(const Chain& chain, int start, const StoppingSpec& stop,
                       std::uint64_t seed, std::int64_t cap);

/// Sample mean of the visit count to y before first leaving the domain.
/// y outside the domain is 0 by definition (no paths are run).
SimulationEstimate estimate_green(const Chain& chain, const std::vector<int>& domain,
                                  int x, int y, const SimOptions& options);

/// Empirical first-landing frequencies with per-state Wilson intervals,
/// one entry per target state in sorted order.
std::vector<std::pair<int, SimulationEstimate>> estimate_hitting_distribution(
    const Chain& chain, const StoppingSpec& target, int x, const SimOptions& options);

/// Sample mean of T_target; truncated paths contribute the cap and are
/// counted in n_truncated.
SimulationEstimate estimate_hitting_time(const Chain& chain, const StoppingSpec& target,
                                         int x, const SimOptions& options);

/// Frequencies of the excursion events from a state of A (or B, mirrored):
/// `cross` is {reach the opposite class before C}, `cross_return` is
/// {reach it and come back before C}. The only place where the return
/// times T*_A, T*_B are realized operationally.
struct ExcursionEventEstimates {
    SimulationEstimate cross;
    SimulationEstimate cross_return;
};

ExcursionEventEstimates estimate_excursion_events(const Chain& chain, const Partition& partition,
                                                  int state, const SimOptions& options);

enum class Verdict { consistent, inconsistent, unreliable };

const char* to_string(Verdict v);

/// Consistency of an exact value with an estimate: reconstructs the
/// per-sample scale from the interval (half-width divided by the z of the
/// estimate's confidence level) and accepts |exact - mean| up to z of those.
/// Estimates over the truncation threshold are unreliable regardless.
Verdict compare(double exact, const SimulationEstimate& estimate, double z);

}  // namespace walkbounds
