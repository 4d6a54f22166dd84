#include "walkbounds/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_set>

#include "walkbounds/numfmt.hpp"

namespace walkbounds {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void finalize(BoundReport& r) {
    r.vacuous = std::isinf(r.upper);
    r.slack_lower = r.exact - r.lower;
    r.slack_upper = r.vacuous ? kInf : r.upper - r.exact;
    if (r.slack_lower < 0.0 && r.slack_lower >= -kSlackNoiseTolerance) {
        r.slack_lower = 0.0;
        r.noise_clamped = true;
    }
    if (r.slack_upper < 0.0 && r.slack_upper >= -kSlackNoiseTolerance) {
        r.slack_upper = 0.0;
        r.noise_clamped = true;
    }
    r.tight = !r.vacuous && r.slack_upper <= kTightTolerance;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

bool BoundReport::holds() const {
    if (slack_lower < -kSlackNoiseTolerance) return false;
    if (!vacuous && slack_upper < -kSlackNoiseTolerance) return false;
    return true;
}

bool SeparationReport::holds() const {
    return defect_p >= -1e-12 && defect_p <= bound + kSlackNoiseTolerance;
}

bool FullReport::all_hold() const {
    for (const auto& r : greens) {
        if (!r.holds()) return false;
    }
    for (const auto& r : hitting_times) {
        if (!r.holds()) return false;
    }
    for (const auto& r : separations) {
        if (!r.holds()) return false;
    }
    return true;
}

std::size_t FullReport::total_rows() const {
    return greens.size() + hitting_times.size() + separations.size();
}

// ---------------------------------------------------------------------------

struct BoundEvaluator::Impl {
    const Chain* chain = nullptr;
    const Partition* partition = nullptr;

    bool stats_ready = false;
    ExcursionStats stats;

    std::unique_ptr<GreensSolver> ga, gb, gab;
    std::unique_ptr<HittingSolver> hit_c, hit_ca;

    bool times_ready = false;
    HitTimeVector time_c, time_bc, time_ac;

    const ExcursionStats& get_stats() {
        if (!stats_ready) {
            stats = excursion_stats(*chain, *partition);
            stats_ready = true;
        }
        return stats;
    }

    GreensSolver& solver_a() {
        if (!ga) ga = std::make_unique<GreensSolver>(*chain, partition->a_states());
        return *ga;
    }
    GreensSolver& solver_b() {
        if (!gb) gb = std::make_unique<GreensSolver>(*chain, partition->b_states());
        return *gb;
    }
    GreensSolver& solver_ab() {
        if (!gab) {
            std::vector<int> ab = partition->a_states();
            ab.insert(ab.end(), partition->b_states().begin(), partition->b_states().end());
            gab = std::make_unique<GreensSolver>(*chain, std::move(ab));
        }
        return *gab;
    }
    HittingSolver& solver_hit_c() {
        if (!hit_c) {
            hit_c = std::make_unique<HittingSolver>(*chain, StoppingSpec::of(*chain, partition->c_states()));
        }
        return *hit_c;
    }
    HittingSolver& solver_hit_ca() {
        if (!hit_ca) {
            std::vector<int> ca = partition->c_states();
            ca.insert(ca.end(), partition->a_states().begin(), partition->a_states().end());
            hit_ca = std::make_unique<HittingSolver>(*chain, StoppingSpec::of(*chain, std::move(ca)));
        }
        return *hit_ca;
    }

    void ensure_times() {
        if (times_ready) return;
        time_c = expected_hitting_time(*chain, StoppingSpec::of(*chain, partition->c_states()));
        std::vector<int> bc = partition->b_states();
        bc.insert(bc.end(), partition->c_states().begin(), partition->c_states().end());
        time_bc = expected_hitting_time(*chain, StoppingSpec::of(*chain, std::move(bc)));
        if (!partition->b_states().empty()) {
            std::vector<int> ac = partition->a_states();
            ac.insert(ac.end(), partition->c_states().begin(), partition->c_states().end());
            time_ac = expected_hitting_time(*chain, StoppingSpec::of(*chain, std::move(ac)));
        }
        times_ready = true;
    }

    StateClass class_of(int s) const {
        if (s < 0 || s >= partition->size()) throw InvalidArgumentError("state index out of range");
        return partition->label(s);
    }
};

BoundEvaluator::BoundEvaluator(const Chain& chain, const Partition& partition)
    : impl_(std::make_unique<Impl>()) {
    if (partition.size() != chain.size()) {
        throw InvalidArgumentError("partition size does not match the chain");
    }
    const auto reach = validate_absorption(chain, partition);
    if (!reach.ok) {
        std::string states;
        for (std::size_t i = 0; i < reach.offending_states.size() && i < 8; ++i) {
            if (i) states += ", ";
            states += chain.label(reach.offending_states[i]);
        }
        throw DivergentDomainError("absorption fails: no support path to C from " + states);
    }
    impl_->chain = &chain;
    impl_->partition = &partition;
}

BoundEvaluator::~BoundEvaluator() = default;
BoundEvaluator::BoundEvaluator(BoundEvaluator&&) noexcept = default;
BoundEvaluator& BoundEvaluator::operator=(BoundEvaluator&&) noexcept = default;

const ExcursionStats& BoundEvaluator::stats() { return impl_->get_stats(); }

BoundReport BoundEvaluator::greens_bound(int x, int y) {
    auto& im = *impl_;
    const StateClass cx = im.class_of(x);
    const StateClass cy = im.class_of(y);
    if (cx == StateClass::C || cy == StateClass::C) {
        throw PartitionClassError("greens_bound arguments must lie in A or B");
    }
    const auto& st = im.get_stats();

    BoundReport r;
    r.quantity = "green";
    r.x = x;
    r.y = y;
    r.x_label = im.chain->label(x);
    r.y_label = im.chain->label(y);
    r.class_pair = std::string(to_string(cx)) + to_string(cy);
    r.exact = im.solver_ab().entry(x, y);

    if (cx == StateClass::A && cy == StateClass::A) {
        r.lower = im.solver_a().entry(x, y);
        const double denom = 1.0 - st.round_trip_a(y);
        r.upper = denom <= kVacuityThreshold
                      ? kInf
                      : r.lower + st.round_trip_a(x) / denom * im.solver_a().entry(y, y);
    } else if (cx == StateClass::B && cy == StateClass::B) {
        r.lower = im.solver_b().entry(x, y);
        const double denom = 1.0 - st.round_trip_b(y);
        r.upper = denom <= kVacuityThreshold
                      ? kInf
                      : r.lower + st.round_trip_b(x) / denom * im.solver_b().entry(y, y);
    } else if (cx == StateClass::A) {
        // Cross-class, starting in A: decompose over the first entrance into
        // B, dominate by the diagonal at the target, then apply the diagonal
        // corollary. Only this direction's branch is valid for a general
        // (non-reversible) kernel.
        r.lower = 0.0;
        const double denom = 1.0 - st.round_trip_b(y);
        r.upper = denom <= kVacuityThreshold
                      ? kInf
                      : st.cross_a(x) / denom * im.solver_b().entry(y, y);
    } else {
        // Mirrored statement for a start in B.
        r.lower = 0.0;
        const double denom = 1.0 - st.round_trip_a(y);
        r.upper = denom <= kVacuityThreshold
                      ? kInf
                      : st.cross_b(x) / denom * im.solver_a().entry(y, y);
    }

    finalize(r);
    return r;
}

BoundReport BoundEvaluator::hitting_time_bound(int x) {
    auto& im = *impl_;
    const StateClass cx = im.class_of(x);
    if (cx == StateClass::C) {
        throw PartitionClassError("hitting_time_bound argument must lie in A or B");
    }
    const auto& st = im.get_stats();
    im.ensure_times();

    BoundReport r;
    r.quantity = "hitting_time";
    r.class_pair = to_string(cx);
    r.x = x;
    r.x_label = im.chain->label(x);
    r.exact = im.time_c.at(x);

    const double product = st.cross_sup_a * st.cross_sup_b;
    if (cx == StateClass::A) {
        r.lower = im.time_bc.at(x);
        r.upper = product >= 1.0 - kVacuityThreshold
                      ? kInf
                      : r.lower + st.cross_a(x) * (st.exit_time_sup_b + st.cross_sup_b * st.exit_time_sup_a) /
                                      (1.0 - product);
    } else {
        r.lower = im.time_ac.at(x);
        r.upper = product >= 1.0 - kVacuityThreshold
                      ? kInf
                      : r.lower + st.cross_b(x) * (st.exit_time_sup_a + st.cross_sup_a * st.exit_time_sup_b) /
                                      (1.0 - product);
    }

    finalize(r);
    return r;
}

SeparationReport BoundEvaluator::separation(int b, int c) {
    auto& im = *impl_;
    if (im.class_of(b) != StateClass::B || im.class_of(c) != StateClass::C) {
        throw PartitionClassError("separation arguments must be (b in B, c in C)");
    }
    SeparationReport r;
    r.b = b;
    r.c = c;
    r.b_label = im.chain->label(b);
    r.c_label = im.chain->label(c);
    r.h_c = im.solver_hit_c().mass(b, c);
    r.h_ca = im.solver_hit_ca().mass(b, c);
    r.defect_p = r.h_c - r.h_ca;
    r.bound = im.get_stats().cross_b(b);
    return r;
}

FullReport BoundEvaluator::full(const ReportOptions& options) {
    auto& im = *impl_;
    const auto& class_a = im.partition->a_states();
    const auto& class_b = im.partition->b_states();
    const auto& class_c = im.partition->c_states();
    const auto na = static_cast<std::uint64_t>(class_a.size());
    const auto nb = static_cast<std::uint64_t>(class_b.size());
    const auto nc = static_cast<std::uint64_t>(class_c.size());

    FullReport report;

    if (options.sample <= 0) {
        if (na + nb > static_cast<std::uint64_t>(options.cap)) {
            throw CapExceededError("|A| + |B| = " + std::to_string(na + nb) + " exceeds the report cap " +
                                   std::to_string(options.cap) + "; raise the cap or sample rows");
        }
        for (int x : class_a)
            for (int y : class_a) report.greens.push_back(greens_bound(x, y));
        for (int x : class_b)
            for (int y : class_b) report.greens.push_back(greens_bound(x, y));
        for (int x : class_a)
            for (int y : class_b) report.greens.push_back(greens_bound(x, y));
        for (int x : class_b)
            for (int y : class_a) report.greens.push_back(greens_bound(x, y));
        for (int x : class_a) report.hitting_times.push_back(hitting_time_bound(x));
        for (int x : class_b) report.hitting_times.push_back(hitting_time_bound(x));
        for (int b : class_b)
            for (int c : class_c) report.separations.push_back(separation(b, c));
        return report;
    }

    // Uniform sample of rows from the full report space, emitted in the
    // deterministic full-report order.
    const std::uint64_t n_aa = na * na;
    const std::uint64_t n_bb = nb * nb;
    const std::uint64_t n_ab = na * nb;
    const std::uint64_t n_hit = na + nb;
    const std::uint64_t n_sep = nb * nc;
    const std::uint64_t total = n_aa + n_bb + 2 * n_ab + n_hit + n_sep;
    const std::uint64_t want = std::min<std::uint64_t>(static_cast<std::uint64_t>(options.sample), total);

    std::mt19937_64 engine(options.sample_seed);
    std::unordered_set<std::uint64_t> chosen;
    for (std::uint64_t j = total - want; j < total; ++j) {
        const std::uint64_t pick = engine() % (j + 1);
        if (!chosen.insert(pick).second) chosen.insert(j);
    }
    std::vector<std::uint64_t> rows(chosen.begin(), chosen.end());
    std::sort(rows.begin(), rows.end());

    for (std::uint64_t idx : rows) {
        if (idx < n_aa) {
            report.greens.push_back(greens_bound(class_a[idx / na], class_a[idx % na]));
            continue;
        }
        idx -= n_aa;
        if (idx < n_bb) {
            report.greens.push_back(greens_bound(class_b[idx / nb], class_b[idx % nb]));
            continue;
        }
        idx -= n_bb;
        if (idx < n_ab) {
            report.greens.push_back(greens_bound(class_a[idx / nb], class_b[idx % nb]));
            continue;
        }
        idx -= n_ab;
        if (idx < n_ab) {
            report.greens.push_back(greens_bound(class_b[idx / na], class_a[idx % na]));
            continue;
        }
        idx -= n_ab;
        if (idx < n_hit) {
            report.hitting_times.push_back(
                hitting_time_bound(idx < na ? class_a[idx] : class_b[idx - na]));
            continue;
        }
        idx -= n_hit;
        report.separations.push_back(separation(class_b[idx / nc], class_c[idx % nc]));
    }
    return report;
}

BoundReport greens_bounds(const Chain& chain, const Partition& partition, int x, int y) {
    BoundEvaluator eval(chain, partition);
    return eval.greens_bound(x, y);
}

BoundReport hitting_time_bounds(const Chain& chain, const Partition& partition, int x) {
    BoundEvaluator eval(chain, partition);
    return eval.hitting_time_bound(x);
}

SeparationReport separation_defect(const Chain& chain, const Partition& partition, int b, int c) {
    BoundEvaluator eval(chain, partition);
    return eval.separation(b, c);
}

FullReport full_report(const Chain& chain, const Partition& partition, const ReportOptions& options) {
    BoundEvaluator eval(chain, partition);
    return eval.full(options);
}

MonotonicityReport monotonicity_check(const Chain& chain,
                                      const std::vector<int>& inner,
                                      const std::vector<int>& outer,
                                      int x, int y) {
    std::vector<int> in_sorted = inner;
    std::vector<int> out_sorted = outer;
    std::sort(in_sorted.begin(), in_sorted.end());
    in_sorted.erase(std::unique(in_sorted.begin(), in_sorted.end()), in_sorted.end());
    std::sort(out_sorted.begin(), out_sorted.end());
    out_sorted.erase(std::unique(out_sorted.begin(), out_sorted.end()), out_sorted.end());
    if (!std::includes(out_sorted.begin(), out_sorted.end(), in_sorted.begin(), in_sorted.end())) {
        throw SubsetError("the inner set must be contained in the outer set");
    }

    const auto in_inner = [&](int s) { return std::binary_search(in_sorted.begin(), in_sorted.end(), s); };
    const auto in_outer = [&](int s) { return std::binary_search(out_sorted.begin(), out_sorted.end(), s); };

    MonotonicityReport report;
    if (in_inner(x) && in_inner(y)) {
        report.kind = MonotonicityReport::Kind::green;
        report.inner_value = greens_function(chain, in_sorted, x, y);
        report.outer_value = greens_function(chain, out_sorted, x, y);
        report.ordered = report.inner_value <= report.outer_value + kSolveTolerance;
        return report;
    }
    if (in_inner(y) && !in_outer(x)) {
        report.kind = MonotonicityReport::Kind::hitting;
        HittingDist hd_inner = hitting_distribution(chain, StoppingSpec::of(chain, in_sorted), x);
        HittingDist hd_outer = hitting_distribution(chain, StoppingSpec::of(chain, out_sorted), x);
        report.inner_value = hd_inner.at(y);
        report.outer_value = hd_outer.at(y);
        report.ordered = report.inner_value >= report.outer_value - kSolveTolerance;
        double equal_mass = 0.0;
        double differ_mass = 0.0;
        for (std::size_t i = 0; i < hd_outer.target.size(); ++i) {
            if (in_inner(hd_outer.target[i])) {
                equal_mass += hd_outer.mass[i];
            } else {
                differ_mass += hd_outer.mass[i];
            }
        }
        report.prob_equal = equal_mass;
        report.prob_differ = differ_mass;
        report.transience_defect = hd_outer.defect;
        return report;
    }
    throw InvalidArgumentError(
        "monotonicity_check needs either x,y inside the inner set (Green case) "
        "or y inside the inner set and x outside the outer set (hitting case)");
}

std::string to_csv(const FullReport& report) {
    std::string out = "quantity,class_pair,x,y,lower,exact,upper,slack_lower,slack_upper,tight,vacuous\n";
    auto bound_row = [&out](const BoundReport& r) {
        out += csv_field(r.quantity);
        out += ',';
        out += r.class_pair;
        out += ',';
        out += csv_field(r.x_label);
        out += ',';
        out += csv_field(r.y_label);
        out += ',';
        out += format_g17(r.lower);
        out += ',';
        out += format_g17(r.exact);
        out += ',';
        out += format_g17(r.upper);
        out += ',';
        out += format_g17(r.slack_lower);
        out += ',';
        out += format_g17(r.slack_upper);
        out += ',';
        out += r.tight ? "true" : "false";
        out += ',';
        out += r.vacuous ? "true" : "false";
        out += '\n';
    };
    for (const auto& r : report.greens) bound_row(r);
    for (const auto& r : report.hitting_times) bound_row(r);
    for (const auto& r : report.separations) {
        const double slack_upper = r.bound - r.defect_p;
        out += "separation,BC,";
        out += csv_field(r.b_label);
        out += ',';
        out += csv_field(r.c_label);
        out += ",0,";
        out += format_g17(r.defect_p);
        out += ',';
        out += format_g17(r.bound);
        out += ',';
        out += format_g17(r.defect_p);
        out += ',';
        out += format_g17(slack_upper);
        out += ',';
        out += (slack_upper <= kTightTolerance ? "true" : "false");
        out += ",false\n";
    }
    return out;
}

}  // namespace walkbounds
