#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "walkbounds/errors.hpp"

namespace walkbounds {

/// Row-stochasticity acceptance tolerance. Rows are never renormalized:
/// a row summing to 1 within this tolerance is taken as-is, anything
/// further off is rejected.
inline constexpr double kRowSumTolerance = 1e-12;

enum class StateClass : std::uint8_t { A, B, C };

const char* to_string(StateClass c);

/// Finite-state chain: an ordered list of opaque state labels and a
/// row-stochastic one-step transition matrix indexed by that order.
/// Immutable after construction and safe to share across threads.
class Chain {
public:
    int size() const noexcept { return static_cast<int>(states_.size()); }
    const std::vector<std::string>& states() const noexcept { return states_; }
    const std::string& label(int state) const { return states_.at(static_cast<std::size_t>(state)); }
    const Eigen::MatrixXd& transition() const noexcept { return transition_; }
    double prob(int from, int to) const { return transition_(from, to); }

    bool has_state(const std::string& label) const { return index_.count(label) != 0; }
    /// Throws UnknownStateError for labels not in the chain.
    int index_of(const std::string& label) const;

private:
    friend Chain build_chain(std::vector<std::string> states, Eigen::MatrixXd transition);
    Chain(std::vector<std::string> states, Eigen::MatrixXd transition);

    std::vector<std::string> states_;
    Eigen::MatrixXd transition_;
    std::unordered_map<std::string, int> index_;
};

/// Validates and wraps a transition matrix: unique labels, entries in
/// [0,1], every row summing to 1 within kRowSumTolerance.
Chain build_chain(std::vector<std::string> states, Eigen::MatrixXd transition);

/// Tripartition of the state space into classes A, B, C. A and C must be
/// nonempty; B may be empty (every excursion bound then collapses to an
/// equality). Immutable after construction.
class Partition {
public:
    int size() const noexcept { return static_cast<int>(label_.size()); }
    StateClass label(int state) const { return label_.at(static_cast<std::size_t>(state)); }
    const std::vector<int>& members(StateClass c) const;
    const std::vector<int>& a_states() const noexcept { return a_; }
    const std::vector<int>& b_states() const noexcept { return b_; }
    const std::vector<int>& c_states() const noexcept { return c_; }

private:
    friend Partition build_partition(const Chain& chain, std::vector<StateClass> assignment);
    explicit Partition(std::vector<StateClass> assignment);

    std::vector<StateClass> label_;
    std::vector<int> a_, b_, c_;
};

/// Core form: one class label per state, in state order.
Partition build_partition(const Chain& chain, std::vector<StateClass> assignment);

/// Map form; the assignment must cover exactly the chain's states.
Partition build_partition(const Chain& chain, const std::map<std::string, StateClass>& assignment);

/// List form (the JSON document's encoding); duplicate membership across
/// classes is rejected.
Partition build_partition(const Chain& chain,
                          const std::vector<std::string>& class_a,
                          const std::vector<std::string>& class_b,
                          const std::vector<std::string>& class_c);

/// Validated nonempty target set for first-hitting quantities. Hitting
/// times are defined with k >= 0: a walk started inside the target has
/// already hit it.
class StoppingSpec {
public:
    static StoppingSpec of(const Chain& chain, std::vector<int> target);
    static StoppingSpec of(const Chain& chain, const std::vector<std::string>& target);

    const std::vector<int>& target() const noexcept { return target_; }
    bool contains(int state) const { return member_.at(static_cast<std::size_t>(state)) != 0; }
    int chain_size() const noexcept { return static_cast<int>(member_.size()); }

private:
    StoppingSpec(std::vector<int> target, std::vector<char> member)
        : target_(std::move(target)), member_(std::move(member)) {}

    std::vector<int> target_;   // sorted, unique
    std::vector<char> member_;  // size n
};

struct ReachabilityReport {
    bool ok = false;
    /// States of A ∪ B with no support path to C, in state order.
    std::vector<int> offending_states;
};

/// Finite-chain absorption check: from every state of A ∪ B there must be
/// a support path to C. A finite substochastic class with an exit leaks
/// almost surely, so graph reachability is sufficient.
ReachabilityReport validate_absorption(const Chain& chain, const Partition& partition);

}  // namespace walkbounds
