#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "walkbounds/exact.hpp"
#include "walkbounds/generators.hpp"

namespace wb = walkbounds;
using testsupport::make_corpus;
using testsupport::oracle_green;
using testsupport::oracle_hitting_mass;
using testsupport::oracle_hitting_time;

namespace {

std::vector<int> ab_states(const wb::Partition& p) {
    std::vector<int> ab = p.a_states();
    ab.insert(ab.end(), p.b_states().begin(), p.b_states().end());
    std::sort(ab.begin(), ab.end());
    return ab;
}

std::vector<int> join(std::vector<int> lhs, const std::vector<int>& rhs) {
    lhs.insert(lhs.end(), rhs.begin(), rhs.end());
    std::sort(lhs.begin(), lhs.end());
    return lhs;
}

}  // namespace

TEST_CASE("greens_function: triad values match the path-sum oracle and the closed forms") {
    const auto [chain, partition] = wb::triad();

    // D = {a}: one visit at time 0, escape in one step.
    const auto g_a = oracle_green(chain, {0}, 0, 0);
    CHECK(g_a.value + g_a.tail >= 1.0 - 1e-12);
    CHECK(wb::greens_function(chain, {0}, 0, 0) == doctest::Approx(1.0).epsilon(1e-12));

    // D = {a,b}: return probability 1/4 gives 4/3 on the diagonal, 2/3 across.
    const auto g_aa = oracle_green(chain, {0, 1}, 0, 0);
    const auto g_ab = oracle_green(chain, {0, 1}, 0, 1);
    CHECK(std::abs(g_aa.value - 4.0 / 3.0) <= g_aa.tail + 1e-12);
    CHECK(std::abs(g_ab.value - 2.0 / 3.0) <= g_ab.tail + 1e-12);
    CHECK(std::abs(wb::greens_function(chain, {0, 1}, 0, 0) - 4.0 / 3.0) < 1e-12);
    CHECK(std::abs(wb::greens_function(chain, {0, 1}, 0, 1) - 2.0 / 3.0) < 1e-12);

    // Outside the domain the value is 0 by definition.
    CHECK(wb::greens_function(chain, {0, 1}, 0, 2) == 0.0);
    CHECK(wb::greens_function(chain, {0}, 1, 0) == 0.0);
}

TEST_CASE("greens_matrix: triad block and the geometric self-loop") {
    const auto [chain, partition] = wb::triad();
    const wb::GreensMatrix g = wb::greens_matrix(chain, {0, 1});
    CHECK(std::abs(g.at(0, 0) - 4.0 / 3.0) < 1e-12);
    CHECK(std::abs(g.at(1, 1) - 4.0 / 3.0) < 1e-12);
    CHECK(std::abs(g.at(0, 1) - 2.0 / 3.0) < 1e-12);
    CHECK(std::abs(g.at(1, 0) - 2.0 / 3.0) < 1e-12);
    CHECK(g.at(0, 2) == 0.0);

    const double q = 0.3;
    Eigen::MatrixXd m(2, 2);
    m << q, 1.0 - q,
         0.0, 1.0;
    const wb::Chain loop = wb::build_chain({"s", "t"}, m);
    const wb::GreensMatrix gl = wb::greens_matrix(loop, {0});
    CHECK(gl.at(0, 0) == doctest::Approx(1.0 / (1.0 - q)).epsilon(1e-12));
}

TEST_CASE("greens_matrix: random 8-state chain matches the certified path-sum oracle") {
    const wb::Generated g = wb::random_chain(8, 77, 0.6, {0.4, 0.4, 0.2});
    const auto ab = ab_states(g.partition);
    REQUIRE(ab.size() >= 5);
    const std::vector<int> domain(ab.begin(), ab.begin() + 5);

    const wb::GreensMatrix gm = wb::greens_matrix(g.chain, domain);
    for (int x : domain) {
        for (int y : domain) {
            const auto oracle = oracle_green(g.chain, domain, x, y, 1e-11);
            CHECK(std::abs(gm.at(x, y) - oracle.value) <= oracle.tail + 1e-10);
        }
    }
}

TEST_CASE("greens solvers reject divergent domains") {
    Eigen::MatrixXd m(3, 3);
    m << 0.0, 1.0, 0.0,
         1.0, 0.0, 0.0,
         0.0, 0.0, 1.0;
    const wb::Chain chain = wb::build_chain({"a", "b", "c"}, m);
    CHECK_THROWS_AS(wb::greens_matrix(chain, {0, 1}), wb::DivergentDomainError);      // closed 2-cycle
    CHECK_THROWS_AS(wb::greens_matrix(chain, {0, 1, 2}), wb::DivergentDomainError);   // whole space
    CHECK_NOTHROW(wb::greens_matrix(chain, {0}));
}

TEST_CASE("hitting_distribution: triad examples") {
    const auto [chain, partition] = wb::triad();

    const auto to_c = wb::StoppingSpec::of(chain, std::vector<int>{2});
    const wb::HittingDist from_b = wb::hitting_distribution(chain, to_c, 1);
    CHECK(from_b.at(2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(from_b.defect == doctest::Approx(0.0));

    const auto to_ac = wb::StoppingSpec::of(chain, std::vector<int>{0, 2});
    const wb::HittingDist mixed = wb::hitting_distribution(chain, to_ac, 1);
    const auto oracle_a = oracle_hitting_mass(chain, {0, 2}, 1, 0);
    const auto oracle_c = oracle_hitting_mass(chain, {0, 2}, 1, 2);
    CHECK(std::abs(oracle_a.value - 0.5) <= oracle_a.tail + 1e-12);
    CHECK(std::abs(oracle_c.value - 0.5) <= oracle_c.tail + 1e-12);
    CHECK(mixed.at(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mixed.at(2) == doctest::Approx(0.5).epsilon(1e-12));

    // Start inside the target: point mass, k >= 0 semantics.
    const wb::HittingDist at_target = wb::hitting_distribution(chain, to_ac, 0);
    CHECK(at_target.at(0) == 1.0);
    CHECK(at_target.at(2) == 0.0);
    CHECK(at_target.defect == 0.0);
}

TEST_CASE("hitting_distribution: sub-probability mass when the target can be missed") {
    // Two absorbing sinks; the target is only one of them.
    Eigen::MatrixXd m(3, 3);
    m << 0.0, 0.3, 0.7,
         0.0, 1.0, 0.0,
         0.0, 0.0, 1.0;
    const wb::Chain chain = wb::build_chain({"s", "left", "right"}, m);
    const auto spec = wb::StoppingSpec::of(chain, std::vector<int>{1});
    const wb::HittingDist dist = wb::hitting_distribution(chain, spec, 0);
    CHECK(dist.at(1) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(dist.defect == doctest::Approx(0.7).epsilon(1e-12));

    // The unreached sink itself carries full defect.
    const wb::HittingDist stuck = wb::hitting_distribution(chain, spec, 2);
    CHECK(stuck.at(1) == 0.0);
    CHECK(stuck.defect == 1.0);

    // The last-exit route requires almost-sure reachability instead.
    CHECK_THROWS_AS(wb::hitting_distribution_last_exit(chain, spec, 0), wb::DivergentDomainError);
}

TEST_CASE("hitting_distribution_last_exit agrees with the direct route") {
    const auto [chain, partition] = wb::triad();

    const auto to_ac = wb::StoppingSpec::of(chain, std::vector<int>{0, 2});
    const wb::HittingDist direct = wb::hitting_distribution(chain, to_ac, 1);
    const wb::HittingDist last_exit = wb::hitting_distribution_last_exit(chain, to_ac, 1);
    CHECK(std::abs(direct.at(0) - last_exit.at(0)) < 1e-12);
    CHECK(std::abs(direct.at(2) - last_exit.at(2)) < 1e-12);

    const auto to_c = wb::StoppingSpec::of(chain, std::vector<int>{2});
    const wb::HittingDist le_c = wb::hitting_distribution_last_exit(chain, to_c, 0);
    CHECK(le_c.at(2) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(wb::hitting_distribution_last_exit(chain, to_c, 2), wb::InvalidArgumentError);
}

TEST_CASE("last-exit agreement on random chains, every start and random targets") {
    int checked = 0;
    for (const auto& g : make_corpus(30, 4004)) {
        // Use C as the target core so reachability holds, then widen it.
        wb::rng::Xoshiro256 gen(wb::rng::derive_stream(5005, static_cast<std::uint64_t>(checked)));
        std::vector<int> target = g.partition.c_states();
        for (int s = 0; s < g.chain.size(); ++s) {
            if (g.partition.label(s) != wb::StateClass::C && gen.uniform01() < 0.3) target.push_back(s);
        }
        const auto spec = wb::StoppingSpec::of(g.chain, target);
        for (int x = 0; x < g.chain.size(); ++x) {
            if (spec.contains(x)) continue;
            const wb::HittingDist direct = wb::hitting_distribution(g.chain, spec, x);
            const wb::HittingDist last_exit = wb::hitting_distribution_last_exit(g.chain, spec, x);
            for (int y : spec.target()) {
                CHECK(std::abs(direct.at(y) - last_exit.at(y)) < 1e-10);
            }
            // Defect law: these targets are almost surely reached.
            CHECK(std::abs(direct.total_mass() - 1.0) < 1e-12);
            ++checked;
        }
    }
    CHECK(checked > 50);
}

TEST_CASE("expected_hitting_time: triad examples and divergence") {
    const auto [chain, partition] = wb::triad();

    const auto t_c = wb::expected_hitting_time(chain, wb::StoppingSpec::of(chain, std::vector<int>{2}));
    const auto oracle_a = oracle_hitting_time(chain, {2}, 0);
    CHECK(std::abs(oracle_a.value - 2.0) <= oracle_a.tail + 1e-12);
    CHECK(t_c.at(0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(t_c.at(1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(t_c.at(2) == 0.0);  // k >= 0: already there

    const auto t_bc = wb::expected_hitting_time(chain, wb::StoppingSpec::of(chain, std::vector<int>{1, 2}));
    CHECK(t_bc.at(0) == doctest::Approx(1.0).epsilon(1e-12));

    Eigen::MatrixXd m(3, 3);
    m << 0.0, 1.0, 0.0,
         1.0, 0.0, 0.0,
         0.0, 0.0, 1.0;
    const wb::Chain flip = wb::build_chain({"a", "b", "c"}, m);
    CHECK_THROWS_AS(wb::expected_hitting_time(flip, wb::StoppingSpec::of(flip, std::vector<int>{2})),
                    wb::DivergentDomainError);
}

TEST_CASE("excursion_stats: triad fixture and empty B") {
    const auto [chain, partition] = wb::triad();
    const wb::ExcursionStats st = wb::excursion_stats(chain, partition);
    CHECK(st.cross_a(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(st.cross_b(1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(st.round_trip_a(0) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(st.round_trip_b(1) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(st.exit_time_sup_a == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(st.exit_time_sup_b == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(st.cross_sup_a == doctest::Approx(0.5).epsilon(1e-12));

    const wb::Partition no_b =
        wb::build_partition(chain, {wb::StateClass::A, wb::StateClass::A, wb::StateClass::C});
    const wb::ExcursionStats empty_b = wb::excursion_stats(chain, no_b);
    CHECK(empty_b.cross_a.maxCoeff() == 0.0);
    CHECK(empty_b.round_trip_a.maxCoeff() == 0.0);
    CHECK(empty_b.cross_sup_b == 0.0);
    CHECK(empty_b.exit_time_sup_b == 0.0);
}

TEST_CASE("excursion_stats: crossing dominates the round trip, and both compose from hitting masses") {
    for (const auto& g : make_corpus(30, 6006)) {
        const wb::ExcursionStats st = wb::excursion_stats(g.chain, g.partition);
        const auto& class_a = g.partition.a_states();
        const auto& class_b = g.partition.b_states();

        for (int a : class_a) CHECK(st.cross_a(a) >= st.round_trip_a(a) - 1e-12);
        for (int b : class_b) CHECK(st.cross_b(b) >= st.round_trip_b(b) - 1e-12);

        if (class_b.empty()) continue;
        wb::HittingSolver to_bc(g.chain, wb::StoppingSpec::of(g.chain, join(g.partition.b_states(),
                                                                            g.partition.c_states())));
        wb::HittingSolver to_ac(g.chain, wb::StoppingSpec::of(g.chain, join(g.partition.a_states(),
                                                                            g.partition.c_states())));
        for (int a : class_a) {
            double cross = 0.0;
            double round_trip = 0.0;
            for (int b : class_b) {
                const double h = to_bc.mass(a, b);
                cross += h;
                round_trip += h * st.cross_b(b);
            }
            CHECK(std::abs(cross - st.cross_a(a)) < 1e-10);
            CHECK(std::abs(round_trip - st.round_trip_a(a)) < 1e-10);
        }
        for (int b : class_b) {
            double round_trip = 0.0;
            for (int a : class_a) round_trip += to_ac.mass(b, a) * st.cross_a(a);
            CHECK(std::abs(round_trip - st.round_trip_b(b)) < 1e-10);
        }
    }
}

TEST_CASE("first_passage_prob: base cases and the ratio identity") {
    const auto [chain, partition] = wb::triad();
    CHECK(wb::first_passage_prob(chain, 0, {0, 1}, 0) == 1.0);
    CHECK(wb::first_passage_prob(chain, 1, {0, 1}, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(wb::first_passage_prob(chain, 2, {0, 1}, 0), wb::InvalidArgumentError);

    for (const auto& g : make_corpus(20, 7007)) {
        const auto ab = ab_states(g.partition);
        if (ab.size() < 2) continue;
        wb::GreensSolver solver(g.chain, ab);
        for (int x : ab) {
            for (int y : ab) {
                const double ratio = wb::first_passage_prob(g.chain, y, ab, x);
                CHECK(std::abs(solver.entry(x, y) - ratio * solver.entry(y, y)) < 1e-10);
            }
        }
    }
}

TEST_CASE("visit-count floor: G_D(x,x) >= 1 on the domain") {
    for (const auto& g : make_corpus(20, 8008)) {
        const auto ab = ab_states(g.partition);
        const wb::GreensMatrix gm = wb::greens_matrix(g.chain, ab);
        for (int x : ab) CHECK(gm.at(x, x) >= 1.0 - 1e-10);
    }
}

TEST_CASE("strong-Markov recurrence identities across A and B") {
    for (const auto& g : make_corpus(25, 9009)) {
        const auto& class_a = g.partition.a_states();
        const auto& class_b = g.partition.b_states();
        const auto ab = ab_states(g.partition);

        wb::GreensSolver g_ab(g.chain, ab);
        wb::GreensSolver g_a(g.chain, class_a);
        wb::HittingSolver to_bc(g.chain,
                                wb::StoppingSpec::of(g.chain, join(class_b, g.partition.c_states())));
        wb::HittingSolver to_ac(g.chain,
                                wb::StoppingSpec::of(g.chain, join(class_a, g.partition.c_states())));

        // Split at the first entrance into B:
        //   G_{A∪B}(a,a') = G_A(a,a') + sum_b H_{B∪C}(a,b) G_{A∪B}(b,a').
        for (int a : class_a) {
            for (int a2 : class_a) {
                double crossing = 0.0;
                for (int b : class_b) crossing += to_bc.mass(a, b) * g_ab.entry(b, a2);
                CHECK(std::abs(g_ab.entry(a, a2) - (g_a.entry(a, a2) + crossing)) < 1e-10);
            }
        }
        // Decompose over the first entrance into A:
        //   G_{A∪B}(b,a') = sum_{a''} H_{A∪C}(b,a'') G_{A∪B}(a'',a').
        for (int b : class_b) {
            for (int a2 : class_a) {
                double entry = 0.0;
                for (int a3 : class_a) entry += to_ac.mass(b, a3) * g_ab.entry(a3, a2);
                CHECK(std::abs(g_ab.entry(b, a2) - entry) < 1e-10);
            }
        }
    }
}
