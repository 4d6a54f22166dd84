#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "walkbounds/chain.hpp"
#include "walkbounds/exact.hpp"

namespace walkbounds {

/// Absolute slack below which an upper bound counts as tight.
inline constexpr double kTightTolerance = 1e-9;
/// Negative slack within this magnitude is clamped to 0 as float noise;
/// anything beyond is a genuine violation.
inline constexpr double kSlackNoiseTolerance = 1e-9;
/// Denominators at or below this vanish: the bound is reported as +inf.
inline constexpr double kVacuityThreshold = 1e-12;

/// One evaluated inequality: lower <= exact <= upper, with slack
/// bookkeeping. `upper` may be +inf (vacuous bound: the excursion
/// denominator vanished and the inequality carries no information).
struct BoundReport {
    std::string quantity;    // "green" | "hitting_time"
    std::string class_pair;  // "AA","BB","AB","BA" for green; "A","B" for hitting
    int x = -1;
    int y = -1;              // -1 for hitting-time rows
    std::string x_label, y_label;

    double lower = 0.0;
    double exact = 0.0;
    double upper = 0.0;      // +inf allowed
    double slack_lower = 0.0;
    double slack_upper = 0.0;
    bool tight = false;
    bool vacuous = false;
    bool noise_clamped = false;  // some slack was in [-1e-9, 0)

    /// True when the inequality holds within the noise tolerance.
    bool holds() const;
};

/// Hitting-distribution defect of one (b,c) pair:
///   H_C(b,c) = H_{C∪A}(b,c) + p,   0 <= p <= cross_b[b].
struct SeparationReport {
    int b = -1;
    int c = -1;
    std::string b_label, c_label;
    double h_c = 0.0;       // H_C(b,c)
    double h_ca = 0.0;      // H_{C∪A}(b,c)
    double defect_p = 0.0;  // h_c - h_ca
    double bound = 0.0;     // cross_b[b]

    bool holds() const;
};

struct FullReport {
    std::vector<BoundReport> greens;        // AA, BB, AB, BA blocks, lexicographic
    std::vector<BoundReport> hitting_times; // A states then B states
    std::vector<SeparationReport> separations;  // (b,c) lexicographic

    bool all_hold() const;
    std::size_t total_rows() const;
};

struct ReportOptions {
    int cap = 500;               // max |A| + |B| for the full quadratic report
    int sample = 0;              // >0: evaluate a uniform row sample instead
    std::uint64_t sample_seed = 0;
};

/// Shared factorizations for evaluating many bounds on one chain+partition.
/// Construction validates absorption and throws DivergentDomainError when
/// some A/B state cannot reach C.
class BoundEvaluator {
public:
    BoundEvaluator(const Chain& chain, const Partition& partition);
    ~BoundEvaluator();
    BoundEvaluator(BoundEvaluator&&) noexcept;
    BoundEvaluator& operator=(BoundEvaluator&&) noexcept;
    BoundEvaluator(const BoundEvaluator&) = delete;
    BoundEvaluator& operator=(const BoundEvaluator&) = delete;

    const ExcursionStats& stats();

    /// G_{A∪B}(x,y) bracketed by the within-class Green's function plus the
    /// excursion round-trip terms. Throws PartitionClassError when x or y
    /// lies in C.
    BoundReport greens_bound(int x, int y);
    /// E^x(T_C) bracketed by the class-exit time plus the excursion series.
    BoundReport hitting_time_bound(int x);
    /// Defect between hitting C and hitting C ∪ A from b, landing at c.
    SeparationReport separation(int b, int c);

    FullReport full(const ReportOptions& options = {});

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

BoundReport greens_bounds(const Chain& chain, const Partition& partition, int x, int y);
BoundReport hitting_time_bounds(const Chain& chain, const Partition& partition, int x);
SeparationReport separation_defect(const Chain& chain, const Partition& partition, int b, int c);
FullReport full_report(const Chain& chain, const Partition& partition,
                       const ReportOptions& options = {});

/// Domain-monotonicity check for nested sets A0 ⊆ D. Dispatches on the
/// arguments: x,y ∈ A0 compares Green's functions (G_{A0} <= G_D); y ∈ A0
/// with x outside D compares hitting distributions (H_{A0} >= H_D) and
/// additionally reports how H_D(x,·) splits between A0 and D \ A0, with the
/// leftover transience defect.
struct MonotonicityReport {
    enum class Kind { green, hitting } kind = Kind::green;
    double inner_value = 0.0;
    double outer_value = 0.0;
    bool ordered = false;
    // hitting case only:
    double prob_equal = 0.0;       // P^x(T_{A0} = T_D)  = sum_{z in A0} H_D(x,z)
    double prob_differ = 0.0;      // P^x(T_{A0} != T_D) = sum_{z in D\A0} H_D(x,z)
    double transience_defect = 0.0;
};

MonotonicityReport monotonicity_check(const Chain& chain,
                                      const std::vector<int>& inner,
                                      const std::vector<int>& outer,
                                      int x, int y);

/// CSV serialization with header
/// quantity,class_pair,x,y,lower,exact,upper,slack_lower,slack_upper,tight,vacuous
/// Numbers use 17 significant digits; infinite uppers print as "inf".
std::string to_csv(const FullReport& report);

}  // namespace walkbounds
