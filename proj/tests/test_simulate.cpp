#include <doctest.h>

#include <cmath>
#include <cstring>

#include "support.hpp"
#include "walkbounds/exact.hpp"
#include "walkbounds/generators.hpp"
#include "walkbounds/simulate.hpp"

namespace wb = walkbounds;
using testsupport::make_corpus;

namespace {

wb::SimOptions options(std::int64_t n_paths, std::uint64_t seed, std::int64_t cap = 1000000) {
    wb::SimOptions opt;
    opt.n_paths = n_paths;
    opt.seed = seed;
    opt.cap = cap;
    return opt;
}

bool identical(const wb::SimulationEstimate& lhs, const wb::SimulationEstimate& rhs) {
    return std::memcmp(&lhs.mean, &rhs.mean, sizeof lhs.mean) == 0 &&
           std::memcmp(&lhs.ci_half_width, &rhs.ci_half_width, sizeof lhs.ci_half_width) == 0 &&
           lhs.n_paths == rhs.n_paths && lhs.n_truncated == rhs.n_truncated;
}

}  // namespace

TEST_CASE("sample_path: start inside the stop set, caps, and forced moves") {
    const auto [chain, partition] = wb::triad();
    const auto stop_c = wb::StoppingSpec::of(chain, std::vector<int>{2});

    const wb::Trajectory at_stop = wb::sample_path(chain, 2, stop_c, 1, 10);
    CHECK(at_stop.states == std::vector<int>{2});
    CHECK(at_stop.stop_reason == wb::Trajectory::Stop::hit_target);

    // Deterministic two-hop chain truncates at cap 1 for every seed.
    Eigen::MatrixXd m(3, 3);
    m << 0.0, 1.0, 0.0,
         0.0, 0.0, 1.0,
         0.0, 0.0, 1.0;
    const wb::Chain hops = wb::build_chain({"a", "b", "c"}, m);
    const auto hop_stop = wb::StoppingSpec::of(hops, std::vector<int>{2});
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const wb::Trajectory capped = wb::sample_path(hops, 0, hop_stop, seed, 1);
        CHECK(capped.states == std::vector<int>{0, 1});
        CHECK(capped.stop_reason == wb::Trajectory::Stop::truncated);

        const wb::Trajectory full = wb::sample_path(hops, 0, hop_stop, seed, 5);
        CHECK(full.states == std::vector<int>{0, 1, 2});
        CHECK(full.stop_reason == wb::Trajectory::Stop::hit_target);
    }

    // A triad seed whose first draw picks b, then cap 1 truncates before c.
    bool found = false;
    for (std::uint64_t seed = 0; seed < 64 && !found; ++seed) {
        const wb::Trajectory t = wb::sample_path(chain, 0, stop_c, seed, 1);
        if (t.states == std::vector<int>{0, 1}) {
            CHECK(t.stop_reason == wb::Trajectory::Stop::truncated);
            found = true;
        }
    }
    CHECK(found);

    CHECK_THROWS_AS(wb::sample_path(chain, 0, stop_c, 1, 0), wb::InvalidArgumentError);
}

TEST_CASE("estimate_green: definitional zeros, deterministic escapes, and the triad value") {
    const auto [chain, partition] = wb::triad();

    const auto outside = wb::estimate_green(chain, {0, 1}, 0, 2, options(100, 3));
    CHECK(outside.mean == 0.0);
    CHECK(outside.ci_half_width == 0.0);

    // From a, the domain {a} is left in one step: exactly one visit, no spread.
    const auto single = wb::estimate_green(chain, {0}, 0, 0, options(500, 4));
    CHECK(single.mean == 1.0);
    CHECK(single.ci_half_width == 0.0);
    CHECK(single.n_truncated == 0);

    const auto diag = wb::estimate_green(chain, {0, 1}, 0, 0, options(100000, 5));
    CHECK(std::abs(diag.mean - 4.0 / 3.0) <= diag.ci_half_width);

    CHECK_THROWS_AS(wb::estimate_green(chain, {0, 1}, 2, 0, options(10, 1)), wb::InvalidArgumentError);
}

TEST_CASE("estimate_hitting_distribution: triad frequencies and diagnostics") {
    const auto [chain, partition] = wb::triad();

    const auto to_ac = wb::StoppingSpec::of(chain, std::vector<int>{0, 2});
    const auto rows = wb::estimate_hitting_distribution(chain, to_ac, 1, options(100000, 6));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].first == 0);
    CHECK(std::abs(rows[0].second.mean - 0.5) <= rows[0].second.ci_half_width);
    CHECK(std::abs(rows[1].second.mean - 0.5) <= rows[1].second.ci_half_width);

    const auto point = wb::estimate_hitting_distribution(chain, to_ac, 0, options(100, 7));
    CHECK(point[0].second.mean == 1.0);
    CHECK(point[0].second.ci_half_width == 0.0);
    CHECK(point[1].second.mean == 0.0);

    // Unreachable target: every path truncates and the estimate says so.
    const auto to_b = wb::StoppingSpec::of(chain, std::vector<int>{1});
    const auto stuck = wb::estimate_hitting_distribution(chain, to_b, 2, options(50, 8, 100));
    CHECK(stuck[0].second.n_truncated == 50);
    CHECK(!stuck[0].second.reliable());
}

TEST_CASE("estimate_hitting_time: triad and degenerate cases") {
    const auto [chain, partition] = wb::triad();
    const auto to_c = wb::StoppingSpec::of(chain, std::vector<int>{2});

    const auto from_a = wb::estimate_hitting_time(chain, to_c, 0, options(100000, 9));
    CHECK(std::abs(from_a.mean - 2.0) <= from_a.ci_half_width);

    const auto at_target = wb::estimate_hitting_time(chain, to_c, 2, options(100, 10));
    CHECK(at_target.mean == 0.0);
    CHECK(at_target.ci_half_width == 0.0);

    // From a, {b,c} is reached in exactly one step.
    const auto to_bc = wb::StoppingSpec::of(chain, std::vector<int>{1, 2});
    const auto one_step = wb::estimate_hitting_time(chain, to_bc, 0, options(1000, 11));
    CHECK(one_step.mean == 1.0);
    CHECK(one_step.ci_half_width == 0.0);
}

TEST_CASE("estimate_excursion_events: triad, empty B, and nested event counts") {
    const auto [chain, partition] = wb::triad();

    const auto events = wb::estimate_excursion_events(chain, partition, 0, options(100000, 12));
    CHECK(std::abs(events.cross.mean - 0.5) <= events.cross.ci_half_width);
    CHECK(std::abs(events.cross_return.mean - 0.25) <= events.cross_return.ci_half_width);
    CHECK(events.cross.mean >= events.cross_return.mean);  // per-path implication

    CHECK_THROWS_AS(wb::estimate_excursion_events(chain, partition, 2, options(10, 1)),
                    wb::PartitionClassError);

    const wb::Partition no_b =
        wb::build_partition(chain, {wb::StateClass::A, wb::StateClass::A, wb::StateClass::C});
    const auto none = wb::estimate_excursion_events(chain, no_b, 0, options(2000, 13));
    CHECK(none.cross.mean == 0.0);
    CHECK(none.cross_return.mean == 0.0);

    // Exact inequality survives sampling on a random chain: the round trip
    // implies the crossing path by path.
    const wb::Generated g = wb::random_chain(10, 99, 0.5, {0.4, 0.3, 0.3});
    for (int a : g.partition.a_states()) {
        const auto e = wb::estimate_excursion_events(g.chain, g.partition, a, options(20000, 14));
        CHECK(e.cross.mean >= e.cross_return.mean);
    }
}

TEST_CASE("event frequencies cohere with the exact hitting-mass compositions") {
    // The directly simulated cross-and-return frequency must agree with the
    // composition sum_b H_{B∪C}(a,b)·cross_b computed by the solvers.
    std::uint64_t seed = 40;
    for (const auto& g : make_corpus(8, 41)) {
        if (g.partition.b_states().empty()) continue;
        const auto stats = wb::excursion_stats(g.chain, g.partition);
        const int a = g.partition.a_states().front();
        const auto events = wb::estimate_excursion_events(g.chain, g.partition, a,
                                                          options(50000, seed++));
        CHECK(wb::compare(stats.cross_a(a), events.cross, 4.0) == wb::Verdict::consistent);
        CHECK(wb::compare(stats.round_trip_a(a), events.cross_return, 4.0) ==
              wb::Verdict::consistent);
    }
}

TEST_CASE("sampled trajectories only use support edges and stop correctly") {
    const wb::Generated g = wb::random_chain(9, 55, 0.4, {0.4, 0.3, 0.3});
    const auto stop = wb::StoppingSpec::of(g.chain, g.partition.c_states());
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const wb::Trajectory t = wb::sample_path(g.chain, g.partition.a_states().front(), stop,
                                                 seed, 10000);
        for (std::size_t k = 0; k + 1 < t.states.size(); ++k) {
            CHECK(g.chain.prob(t.states[k], t.states[k + 1]) > 0.0);
        }
        const bool ends_inside = stop.contains(t.states.back());
        CHECK(ends_inside == (t.stop_reason == wb::Trajectory::Stop::hit_target));
    }
}

TEST_CASE("compare: verdicts from width, distance, and truncation") {
    wb::SimulationEstimate est;
    est.mean = 1.3329;
    est.ci_half_width = 0.004;
    est.n_paths = 100000;
    est.confidence_level = 0.99;
    CHECK(wb::compare(4.0 / 3.0, est, 3.0) == wb::Verdict::consistent);

    est.mean = 2.5;
    est.ci_half_width = 0.01;
    CHECK(wb::compare(2.0, est, 3.0) == wb::Verdict::inconsistent);

    est.n_truncated = 5000;  // 5% truncated
    CHECK(wb::compare(2.5, est, 3.0) == wb::Verdict::unreliable);

    CHECK_THROWS_AS(wb::compare(1.0, est, 0.0), wb::InvalidArgumentError);
}

TEST_CASE("estimates are bit-identical for identical inputs and differ across seeds") {
    const auto [chain, partition] = wb::triad();
    const auto to_c = wb::StoppingSpec::of(chain, std::vector<int>{2});

    const auto first = wb::estimate_hitting_time(chain, to_c, 0, options(20000, 21));
    const auto second = wb::estimate_hitting_time(chain, to_c, 0, options(20000, 21));
    CHECK(identical(first, second));

    const auto other_seed = wb::estimate_hitting_time(chain, to_c, 0, options(20000, 22));
    CHECK(first.mean != other_seed.mean);

    const auto ev1 = wb::estimate_excursion_events(chain, partition, 0, options(20000, 23));
    const auto ev2 = wb::estimate_excursion_events(chain, partition, 0, options(20000, 23));
    CHECK(identical(ev1.cross, ev2.cross));
    CHECK(identical(ev1.cross_return, ev2.cross_return));
}

TEST_CASE("quick calibration sanity: exact values sit inside 99% intervals") {
    int hits = 0;
    int cases = 0;
    for (const auto& g : make_corpus(10, 31)) {
        const auto to_c = wb::StoppingSpec::of(g.chain, g.partition.c_states());
        const auto exact = wb::expected_hitting_time(g.chain, to_c);
        const int x = g.partition.a_states().front();
        const auto est = wb::estimate_hitting_time(g.chain, to_c, x,
                                                   options(20000, 1000 + static_cast<std::uint64_t>(cases)));
        if (std::abs(est.mean - exact.at(x)) <= est.ci_half_width) ++hits;
        ++cases;
    }
    CHECK(hits >= 8);
}
