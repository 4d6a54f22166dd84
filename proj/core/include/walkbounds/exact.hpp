#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "walkbounds/chain.hpp"

namespace walkbounds {

/// Relative accuracy target of the linear solvers on well-conditioned
/// systems. One step of iterative refinement backs this up.
inline constexpr double kSolveTolerance = 1e-10;

/// Truncated Green's function on a domain D: values[(x,y)] is the expected
/// number of visits to y strictly before first leaving D, starting at x and
/// counting time 0. Entries involving states outside D are 0 by definition.
struct GreensMatrix {
    std::vector<int> domain;  // sorted global state indices
    Eigen::MatrixXd values;   // |D| x |D|, indexed by position in `domain`

    int pos(int state) const;           // -1 when state is outside the domain
    double at(int x, int y) const;      // 0 outside the domain
};

/// Factorization of (I - P|_D) for one domain D, with cached column solves.
/// Construction validates that every state of D can leave D through the
/// support graph; otherwise the visit-count series diverges.
///
/// Backend is chosen by size and fill: dense LU for small or dense
/// restrictions, sparse LU for large sparse ones. Every solve applies one
/// step of iterative refinement and checks the residual.
class GreensSolver {
public:
    GreensSolver(const Chain& chain, std::vector<int> domain);
    ~GreensSolver();
    GreensSolver(GreensSolver&&) noexcept;
    GreensSolver& operator=(GreensSolver&&) noexcept;
    GreensSolver(const GreensSolver&) = delete;
    GreensSolver& operator=(const GreensSolver&) = delete;

    const std::vector<int>& domain() const;
    int pos(int state) const;

    /// G_D(x,y); 0 when x or y lies outside the domain.
    double entry(int x, int y);
    /// Column G_D(., y) over domain positions. Cached.
    const Eigen::VectorXd& column(int y);
    /// Row G_D(x, .) over domain positions, via the transposed factorization.
    Eigen::VectorXd row(int x);
    /// (I - P|_D)^{-1} rhs, rhs indexed by domain position.
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs);
    Eigen::VectorXd solve_transposed(const Eigen::VectorXd& rhs);
    /// Whole inverse; prefer entry()/column() for a few values.
    Eigen::MatrixXd full();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

double greens_function(const Chain& chain, const std::vector<int>& domain, int x, int y);
GreensMatrix greens_matrix(const Chain& chain, const std::vector<int>& domain);

/// First-landing distribution on a target set T from one start state.
/// mass[i] is the probability the walk first enters T at target[i];
/// defect is the probability T is never reached (0 when T is hit a.s.).
struct HittingDist {
    int start = -1;
    std::vector<int> target;    // sorted global indices
    std::vector<double> mass;   // aligned with target
    double defect = 0.0;

    double at(int y) const;     // 0 when y is not a target state
    double total_mass() const;  // 1 - defect
};

/// Batch solver for hitting distributions onto a fixed target. The linear
/// system lives on the states that can actually reach the target; states
/// that cannot carry zero mass and full defect rather than an error.
class HittingSolver {
public:
    HittingSolver(const Chain& chain, StoppingSpec target);
    ~HittingSolver();
    HittingSolver(HittingSolver&&) noexcept;
    HittingSolver& operator=(HittingSolver&&) noexcept;
    HittingSolver(const HittingSolver&) = delete;
    HittingSolver& operator=(const HittingSolver&) = delete;

    const StoppingSpec& target() const;
    /// H_T(x,y). Point mass when x is itself a target state.
    double mass(int x, int y);
    HittingDist distribution(int x);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Direct absorbing-system route.
HittingDist hitting_distribution(const Chain& chain, const StoppingSpec& target, int x);

/// Last-exit route: H_T(x,y) = sum_z G_{T^c}(x,z) p(z,y). Kept as a second
/// computation path for cross-checking; requires x outside T and throws
/// DivergentDomainError when some state of T^c cannot reach T.
HittingDist hitting_distribution_last_exit(const Chain& chain, const StoppingSpec& target, int x);

/// Expected first-hitting times E^x[T_target], 0 on the target itself.
struct HitTimeVector {
    std::vector<int> target;
    Eigen::VectorXd values;  // size n, in steps

    double at(int x) const { return values(x); }
};

/// Solves (I - P|_{T^c}) h = 1. Throws DivergentDomainError when the target
/// is not reachable from all of T^c.
HitTimeVector expected_hitting_time(const Chain& chain, const StoppingSpec& target);

/// Excursion statistics of a tripartition:
///   cross_a[a]      = P^a(T_B < T_C)            (reach B before C)
///   cross_b[b]      = P^b(T_A < T_C)
///   round_trip_a[a] = P^a(T_B, T*_A < T_C)       (cross and return before C)
///   round_trip_b[b] = P^b(T_A, T*_B < T_C)
/// plus the class suprema and the worst expected class-exit times
///   exit_time_sup_a = max_a E^a(T_{B∪C}),  exit_time_sup_b = max_b E^b(T_{A∪C}).
/// Vectors are sized n with zeros outside the owning class. With B empty,
/// crossings are impossible and everything B-related is 0 by convention.
struct ExcursionStats {
    Eigen::VectorXd cross_a, cross_b, round_trip_a, round_trip_b;
    double cross_sup_a = 0.0;
    double cross_sup_b = 0.0;
    double exit_time_sup_a = 0.0;
    double exit_time_sup_b = 0.0;
};

ExcursionStats excursion_stats(const Chain& chain, const Partition& partition);

/// P^x(T_y < T_{D^c}) for x, y in D; 1 when x == y. Computed from the
/// absorbing system on D \ {y}, independently of the Green's solve.
double first_passage_prob(const Chain& chain, int y, const std::vector<int>& domain, int x);

}  // namespace walkbounds
