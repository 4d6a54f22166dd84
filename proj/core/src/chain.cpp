#include "walkbounds/chain.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace walkbounds {

const char* to_string(StateClass c) {
    switch (c) {
        case StateClass::A: return "A";
        case StateClass::B: return "B";
        case StateClass::C: return "C";
    }
    return "?";
}

Chain::Chain(std::vector<std::string> states, Eigen::MatrixXd transition)
    : states_(std::move(states)), transition_(std::move(transition)) {
    index_.reserve(states_.size());
    for (int i = 0; i < size(); ++i) index_.emplace(states_[static_cast<std::size_t>(i)], i);
}

int Chain::index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw UnknownStateError("state '" + label + "' is not in the chain");
    return it->second;
}

Chain build_chain(std::vector<std::string> states, Eigen::MatrixXd transition) {
    const auto n = static_cast<int>(states.size());
    if (n < 1) throw InvalidArgumentError("a chain needs at least one state");
    if (transition.rows() != n || transition.cols() != n) {
        std::ostringstream msg;
        msg << "transition matrix is " << transition.rows() << "x" << transition.cols()
            << " but there are " << n << " states";
        throw InvalidArgumentError(msg.str());
    }

    {
        std::vector<std::string> sorted = states;
        std::sort(sorted.begin(), sorted.end());
        auto dup = std::adjacent_find(sorted.begin(), sorted.end());
        if (dup != sorted.end()) throw DuplicateStateError("state '" + *dup + "' appears more than once");
    }

    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int j = 0; j < n; ++j) {
            const double p = transition(i, j);
            if (!std::isfinite(p)) {
                throw InvalidArgumentError("row for state '" + states[static_cast<std::size_t>(i)] +
                                           "' contains a non-finite probability");
            }
            if (p < 0.0) {
                throw NegativeEntryError("negative probability " + std::to_string(p) + " in row for state '" +
                                         states[static_cast<std::size_t>(i)] + "'");
            }
            if (p > 1.0 + kRowSumTolerance) {
                throw RowSumError("probability " + std::to_string(p) + " exceeds 1 in row for state '" +
                                  states[static_cast<std::size_t>(i)] + "'");
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
            std::ostringstream msg;
            msg << "row for state '" << states[static_cast<std::size_t>(i)] << "' sums to " << sum
                << ", not 1 (tolerance " << kRowSumTolerance << ")";
            throw RowSumError(msg.str());
        }
    }

    return Chain(std::move(states), std::move(transition));
}

Partition::Partition(std::vector<StateClass> assignment) : label_(std::move(assignment)) {
    for (int i = 0; i < size(); ++i) {
        switch (label_[static_cast<std::size_t>(i)]) {
            case StateClass::A: a_.push_back(i); break;
            case StateClass::B: b_.push_back(i); break;
            case StateClass::C: c_.push_back(i); break;
        }
    }
}

const std::vector<int>& Partition::members(StateClass c) const {
    switch (c) {
        case StateClass::A: return a_;
        case StateClass::B: return b_;
        case StateClass::C: return c_;
    }
    return a_;  // unreachable
}

Partition build_partition(const Chain& chain, std::vector<StateClass> assignment) {
    if (static_cast<int>(assignment.size()) != chain.size()) {
        throw MissingStateError("assignment covers " + std::to_string(assignment.size()) + " of " +
                                std::to_string(chain.size()) + " states");
    }
    Partition partition(std::move(assignment));
    if (partition.a_states().empty()) throw EmptyClassError("class A must be nonempty");
    if (partition.c_states().empty()) throw EmptyClassError("class C must be nonempty");
    return partition;
}

Partition build_partition(const Chain& chain, const std::map<std::string, StateClass>& assignment) {
    std::vector<StateClass> labels(static_cast<std::size_t>(chain.size()), StateClass::C);
    std::vector<char> seen(static_cast<std::size_t>(chain.size()), 0);
    for (const auto& [state, cls] : assignment) {
        const int i = chain.index_of(state);  // UnknownStateError for strays
        labels[static_cast<std::size_t>(i)] = cls;
        seen[static_cast<std::size_t>(i)] = 1;
    }
    for (int i = 0; i < chain.size(); ++i) {
        if (!seen[static_cast<std::size_t>(i)]) {
            throw MissingStateError("state '" + chain.label(i) + "' has no class assignment");
        }
    }
    return build_partition(chain, std::move(labels));
}

Partition build_partition(const Chain& chain,
                          const std::vector<std::string>& class_a,
                          const std::vector<std::string>& class_b,
                          const std::vector<std::string>& class_c) {
    std::vector<StateClass> labels(static_cast<std::size_t>(chain.size()), StateClass::C);
    std::vector<char> seen(static_cast<std::size_t>(chain.size()), 0);
    auto place = [&](const std::vector<std::string>& members, StateClass cls) {
        for (const auto& state : members) {
            const int i = chain.index_of(state);
            if (seen[static_cast<std::size_t>(i)]) {
                throw DuplicateLabelError("state '" + state + "' is assigned to more than one class");
            }
            labels[static_cast<std::size_t>(i)] = cls;
            seen[static_cast<std::size_t>(i)] = 1;
        }
    };
    place(class_a, StateClass::A);
    place(class_b, StateClass::B);
    place(class_c, StateClass::C);
    for (int i = 0; i < chain.size(); ++i) {
        if (!seen[static_cast<std::size_t>(i)]) {
            throw MissingStateError("state '" + chain.label(i) + "' has no class assignment");
        }
    }
    return build_partition(chain, std::move(labels));
}

StoppingSpec StoppingSpec::of(const Chain& chain, std::vector<int> target) {
    if (target.empty()) throw InvalidArgumentError("target set must be nonempty");
    std::sort(target.begin(), target.end());
    target.erase(std::unique(target.begin(), target.end()), target.end());
    std::vector<char> member(static_cast<std::size_t>(chain.size()), 0);
    for (int s : target) {
        if (s < 0 || s >= chain.size()) {
            throw InvalidArgumentError("target state index " + std::to_string(s) + " is out of range");
        }
        member[static_cast<std::size_t>(s)] = 1;
    }
    return StoppingSpec(std::move(target), std::move(member));
}

StoppingSpec StoppingSpec::of(const Chain& chain, const std::vector<std::string>& target) {
    std::vector<int> indices;
    indices.reserve(target.size());
    for (const auto& label : target) indices.push_back(chain.index_of(label));
    return of(chain, std::move(indices));
}

ReachabilityReport validate_absorption(const Chain& chain, const Partition& partition) {
    const int n = chain.size();
    const auto& p = chain.transition();

    // Backward reachability from C over support edges whose source lies in A ∪ B.
    std::vector<char> reaches(static_cast<std::size_t>(n), 0);
    std::deque<int> frontier;
    for (int c : partition.c_states()) {
        reaches[static_cast<std::size_t>(c)] = 1;
        frontier.push_back(c);
    }
    while (!frontier.empty()) {
        const int v = frontier.front();
        frontier.pop_front();
        for (int u = 0; u < n; ++u) {
            if (reaches[static_cast<std::size_t>(u)]) continue;
            if (partition.label(u) == StateClass::C) continue;
            if (p(u, v) > 0.0) {
                reaches[static_cast<std::size_t>(u)] = 1;
                frontier.push_back(u);
            }
        }
    }

    ReachabilityReport report;
    for (int s = 0; s < n; ++s) {
        if (partition.label(s) == StateClass::C) continue;
        if (!reaches[static_cast<std::size_t>(s)]) report.offending_states.push_back(s);
    }
    report.ok = report.offending_states.empty();
    return report;
}

}  // namespace walkbounds
