#include "walkbounds/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "walkbounds/rng.hpp"

namespace walkbounds {

namespace {

void check_options(const SimOptions& options) {
    if (options.n_paths < 1) throw InvalidArgumentError("n_paths must be >= 1");
    if (options.cap < 1) throw InvalidArgumentError("cap must be >= 1");
    if (!(options.confidence_level > 0.0 && options.confidence_level < 1.0)) {
        throw InvalidArgumentError("confidence level must lie in (0,1)");
    }
}

void check_state(const Chain& chain, int state) {
    if (state < 0 || state >= chain.size()) throw InvalidArgumentError("state index out of range");
}

/// One transition by inverse-CDF over the fixed state order.
int step(const Chain& chain, int from, rng::Xoshiro256& gen) {
    const auto& p = chain.transition();
    const double u = gen.uniform01();
    const int n = chain.size();
    double acc = 0.0;
    int last_positive = -1;
    for (int j = 0; j < n; ++j) {
        const double pj = p(from, j);
        if (pj <= 0.0) continue;
        last_positive = j;
        acc += pj;
        if (u < acc) return j;
    }
    return last_positive;  // u fell into the row-sum float shortfall
}

/// Mean/CI from integer-valued per-path statistics accumulated in index
/// order; sums of integers in doubles are exact, so aggregation is
/// bit-stable by construction.
SimulationEstimate estimate_from_sums(double sum, double sum_sq, std::int64_t n_paths,
                                      std::int64_t n_truncated, const SimOptions& options) {
    SimulationEstimate est;
    est.n_paths = n_paths;
    est.n_truncated = n_truncated;
    est.seed = options.seed;
    est.confidence_level = options.confidence_level;
    const double n = static_cast<double>(n_paths);
    est.mean = sum / n;
    if (n_paths > 1) {
        const double var = std::max(0.0, (sum_sq - n * est.mean * est.mean) / (n - 1.0));
        est.ci_half_width = rng::z_for_confidence(options.confidence_level) * std::sqrt(var / n);
    }
    return est;
}

SimulationEstimate proportion_estimate(std::int64_t successes, std::int64_t n_truncated,
                                       const SimOptions& options) {
    SimulationEstimate est;
    est.n_paths = options.n_paths;
    est.n_truncated = n_truncated;
    est.seed = options.seed;
    est.confidence_level = options.confidence_level;
    est.mean = static_cast<double>(successes) / static_cast<double>(options.n_paths);
    est.ci_half_width = rng::wilson_half_width(successes, options.n_paths,
                                               rng::z_for_confidence(options.confidence_level));
    return est;
}

}  // namespace

double SimulationEstimate::truncation_fraction() const {
    if (n_paths <= 0) return 0.0;
    return static_cast<double>(n_truncated) / static_cast<double>(n_paths);
}

Trajectory sample_path(const Chain& chain, int start, const StoppingSpec& stop,
                       std::uint64_t seed, std::int64_t cap) {
    check_state(chain, start);
    if (cap < 1) throw InvalidArgumentError("cap must be >= 1");

    Trajectory trajectory;
    trajectory.states.push_back(start);
    if (stop.contains(start)) {
        trajectory.stop_reason = Trajectory::Stop::hit_target;
        return trajectory;
    }

    rng::Xoshiro256 gen(rng::derive_stream(seed, 0));
    int current = start;
    for (std::int64_t k = 0; k < cap; ++k) {
        current = step(chain, current, gen);
        trajectory.states.push_back(current);
        if (stop.contains(current)) {
            trajectory.stop_reason = Trajectory::Stop::hit_target;
            return trajectory;
        }
    }
    trajectory.stop_reason = Trajectory::Stop::truncated;
    return trajectory;
}

SimulationEstimate estimate_green(const Chain& chain, const std::vector<int>& domain,
                                  int x, int y, const SimOptions& options) {
    check_options(options);
    check_state(chain, x);
    check_state(chain, y);

    std::vector<char> in_domain(static_cast<std::size_t>(chain.size()), 0);
    for (int s : domain) {
        check_state(chain, s);
        in_domain[static_cast<std::size_t>(s)] = 1;
    }
    if (!in_domain[static_cast<std::size_t>(x)]) {
        throw InvalidArgumentError("estimate_green needs the start inside the domain");
    }

    SimulationEstimate zero;
    zero.n_paths = options.n_paths;
    zero.seed = options.seed;
    zero.confidence_level = options.confidence_level;
    if (!in_domain[static_cast<std::size_t>(y)]) return zero;  // 0 by definition, no sampling

    double sum = 0.0;
    double sum_sq = 0.0;
    std::int64_t truncated = 0;
    for (std::int64_t i = 0; i < options.n_paths; ++i) {
        rng::Xoshiro256 gen(rng::derive_stream(options.seed, static_cast<std::uint64_t>(i)));
        int current = x;
        std::int64_t visits = (x == y) ? 1 : 0;  // time 0 counts
        bool exited = false;
        for (std::int64_t k = 0; k < options.cap; ++k) {
            current = step(chain, current, gen);
            if (!in_domain[static_cast<std::size_t>(current)]) {
                exited = true;
                break;
            }
            if (current == y) ++visits;
        }
        if (!exited) ++truncated;
        const double v = static_cast<double>(visits);
        sum += v;
        sum_sq += v * v;
    }
    return estimate_from_sums(sum, sum_sq, options.n_paths, truncated, options);
}

std::vector<std::pair<int, SimulationEstimate>> estimate_hitting_distribution(
    const Chain& chain, const StoppingSpec& target, int x, const SimOptions& options) {
    check_options(options);
    check_state(chain, x);

    std::vector<std::pair<int, SimulationEstimate>> out;
    out.reserve(target.target().size());

    if (target.contains(x)) {  // point mass, zero-width intervals
        for (int y : target.target()) {
            SimulationEstimate est;
            est.mean = (y == x) ? 1.0 : 0.0;
            est.n_paths = options.n_paths;
            est.seed = options.seed;
            est.confidence_level = options.confidence_level;
            out.emplace_back(y, est);
        }
        return out;
    }

    std::vector<std::int64_t> landings(target.target().size(), 0);
    std::int64_t truncated = 0;
    for (std::int64_t i = 0; i < options.n_paths; ++i) {
        rng::Xoshiro256 gen(rng::derive_stream(options.seed, static_cast<std::uint64_t>(i)));
        int current = x;
        bool hit = false;
        for (std::int64_t k = 0; k < options.cap; ++k) {
            current = step(chain, current, gen);
            if (target.contains(current)) {
                hit = true;
                break;
            }
        }
        if (!hit) {
            ++truncated;
            continue;
        }
        const auto& targets = target.target();
        const auto it = std::lower_bound(targets.begin(), targets.end(), current);
        ++landings[static_cast<std::size_t>(it - targets.begin())];
    }

    for (std::size_t yi = 0; yi < target.target().size(); ++yi) {
        out.emplace_back(target.target()[yi], proportion_estimate(landings[yi], truncated, options));
    }
    return out;
}

SimulationEstimate estimate_hitting_time(const Chain& chain, const StoppingSpec& target,
                                         int x, const SimOptions& options) {
    check_options(options);
    check_state(chain, x);

    if (target.contains(x)) {  // hit at time 0 for every path
        SimulationEstimate est;
        est.n_paths = options.n_paths;
        est.seed = options.seed;
        est.confidence_level = options.confidence_level;
        return est;
    }

    double sum = 0.0;
    double sum_sq = 0.0;
    std::int64_t truncated = 0;
    for (std::int64_t i = 0; i < options.n_paths; ++i) {
        rng::Xoshiro256 gen(rng::derive_stream(options.seed, static_cast<std::uint64_t>(i)));
        int current = x;
        std::int64_t steps = 0;
        bool hit = false;
        while (steps < options.cap) {
            current = step(chain, current, gen);
            ++steps;
            if (target.contains(current)) {
                hit = true;
                break;
            }
        }
        if (!hit) ++truncated;  // contributes the cap; flagged via n_truncated
        const double v = static_cast<double>(steps);
        sum += v;
        sum_sq += v * v;
    }
    return estimate_from_sums(sum, sum_sq, options.n_paths, truncated, options);
}

ExcursionEventEstimates estimate_excursion_events(const Chain& chain, const Partition& partition,
                                                  int state, const SimOptions& options) {
    check_options(options);
    check_state(chain, state);
    if (partition.size() != chain.size()) {
        throw InvalidArgumentError("partition size does not match the chain");
    }
    const StateClass home = partition.label(state);
    if (home == StateClass::C) {
        throw PartitionClassError("excursion events start from A or B, not C");
    }
    const StateClass opposite = home == StateClass::A ? StateClass::B : StateClass::A;

    std::int64_t crossings = 0;
    std::int64_t round_trips = 0;
    std::int64_t truncated = 0;
    for (std::int64_t i = 0; i < options.n_paths; ++i) {
        rng::Xoshiro256 gen(rng::derive_stream(options.seed, static_cast<std::uint64_t>(i)));
        int current = state;
        bool crossed = false;
        bool returned = false;
        bool decided = false;
        for (std::int64_t k = 0; k < options.cap; ++k) {
            current = step(chain, current, gen);
            const StateClass cls = partition.label(current);
            if (cls == StateClass::C) {
                decided = true;
                break;
            }
            if (!crossed) {
                if (cls == opposite) crossed = true;
            } else if (cls == home) {
                returned = true;
                decided = true;
                break;
            }
        }
        if (!decided) ++truncated;
        if (crossed) ++crossings;
        if (returned) ++round_trips;
    }

    ExcursionEventEstimates events;
    events.cross = proportion_estimate(crossings, truncated, options);
    events.cross_return = proportion_estimate(round_trips, truncated, options);
    return events;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::consistent: return "consistent";
        case Verdict::inconsistent: return "inconsistent";
        case Verdict::unreliable: return "unreliable";
    }
    return "?";
}

Verdict compare(double exact, const SimulationEstimate& estimate, double z) {
    if (!(z > 0.0)) throw InvalidArgumentError("compare needs z > 0");
    if (estimate.n_paths < 1) return Verdict::unreliable;
    if (estimate.truncation_fraction() > kTruncationThreshold) return Verdict::unreliable;
    const double z_level = rng::z_for_confidence(estimate.confidence_level);
    const double sample_scale = estimate.ci_half_width / z_level;
    const bool ok = std::abs(exact - estimate.mean) <= z * sample_scale + 1e-12;
    return ok ? Verdict::consistent : Verdict::inconsistent;
}

}  // namespace walkbounds
