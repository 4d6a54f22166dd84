#pragma once

// Shared fixtures and independent oracles for the test suites. The oracles
// only use the one-step kernel directly (distribution evolution with
// certified geometric tails), never the linear-algebra solvers they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "walkbounds/chain.hpp"
#include "walkbounds/generators.hpp"
#include "walkbounds/rng.hpp"

namespace testsupport {

namespace wb = walkbounds;

inline std::vector<int> sorted_unique(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// Distribution evolution restricted to a block of states, with a certified
// tail: alpha = ||P_block^m||_inf with m = |block| is < 1 whenever every
// block state can escape, and sum_{j >= q*m} ||v_j||_1 <= m*alpha^q/(1-alpha).
class BlockIterator {
public:
    BlockIterator(const wb::Chain& chain, std::vector<int> block)
        : block_(sorted_unique(std::move(block))) {
        const int m = static_cast<int>(block_.size());
        block_kernel_.resize(m, m);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                block_kernel_(i, j) = chain.prob(block_[static_cast<std::size_t>(i)],
                                                 block_[static_cast<std::size_t>(j)]);
            }
        }
        Eigen::MatrixXd power = Eigen::MatrixXd::Identity(m, m);
        for (int i = 0; i < m; ++i) power = power * block_kernel_;
        alpha_ = m > 0 ? power.rowwise().sum().maxCoeff() : 0.0;
        if (!(alpha_ < 1.0)) {
            throw std::runtime_error("oracle: some block state cannot escape within |block| steps");
        }
    }

    const std::vector<int>& block() const { return block_; }
    double alpha() const { return alpha_; }

    int pos(int state) const {
        auto it = std::lower_bound(block_.begin(), block_.end(), state);
        return (it != block_.end() && *it == state) ? static_cast<int>(it - block_.begin()) : -1;
    }

    // Calls per_step(v_j) for j = 0, 1, ... until the remaining l1 mass is
    // certifiably below tol; returns the final tail bound.
    template <class F>
    double iterate(int start, double tol, F&& per_step) const {
        const int m = static_cast<int>(block_.size());
        const int p = pos(start);
        if (p < 0) throw std::runtime_error("oracle: start outside the block");
        Eigen::RowVectorXd v = Eigen::RowVectorXd::Zero(m);
        v(p) = 1.0;
        long round = 0;
        double tail = static_cast<double>(m) / (1.0 - alpha_);
        while (tail >= tol) {
            for (int r = 0; r < m; ++r) {
                per_step(v);
                v = v * block_kernel_;
            }
            ++round;
            tail = static_cast<double>(m) * std::pow(alpha_, static_cast<double>(round)) / (1.0 - alpha_);
        }
        return tail;
    }

private:
    std::vector<int> block_;
    Eigen::MatrixXd block_kernel_;
    double alpha_ = 0.0;
};

struct OracleValue {
    double value = 0.0;
    double tail = 0.0;  // certified truncation bound
};

// Truncated path-sum for G_D(x,y): sum_j (P_D^j)(x,y).
inline OracleValue oracle_green(const wb::Chain& chain, const std::vector<int>& domain,
                                int x, int y, double tol = 1e-12) {
    BlockIterator it(chain, domain);
    const int py = it.pos(y);
    if (py < 0) return {0.0, 0.0};
    OracleValue out;
    out.tail = it.iterate(x, tol, [&](const Eigen::RowVectorXd& v) { out.value += v(py); });
    return out;
}

// Absorbed-mass iteration for H_T(x,y): mass landing at y on first entry.
inline OracleValue oracle_hitting_mass(const wb::Chain& chain, const std::vector<int>& target,
                                       int x, int y, double tol = 1e-12) {
    const auto t_sorted = sorted_unique(target);
    if (std::binary_search(t_sorted.begin(), t_sorted.end(), x)) {
        return {x == y ? 1.0 : 0.0, 0.0};
    }
    std::vector<int> block;
    for (int s = 0; s < chain.size(); ++s) {
        if (!std::binary_search(t_sorted.begin(), t_sorted.end(), s)) block.push_back(s);
    }
    BlockIterator it(chain, block);
    OracleValue out;
    out.tail = it.iterate(x, tol, [&](const Eigen::RowVectorXd& v) {
        double step_mass = 0.0;
        for (int zi = 0; zi < v.size(); ++zi) {
            step_mass += v(zi) * chain.prob(it.block()[static_cast<std::size_t>(zi)], y);
        }
        out.value += step_mass;
    });
    return out;
}

// Truncated expectation sum for E^x[T_T] = sum_k P(T > k).
inline OracleValue oracle_hitting_time(const wb::Chain& chain, const std::vector<int>& target,
                                       int x, double tol = 1e-12) {
    const auto t_sorted = sorted_unique(target);
    if (std::binary_search(t_sorted.begin(), t_sorted.end(), x)) return {0.0, 0.0};
    std::vector<int> block;
    for (int s = 0; s < chain.size(); ++s) {
        if (!std::binary_search(t_sorted.begin(), t_sorted.end(), s)) block.push_back(s);
    }
    BlockIterator it(chain, block);
    OracleValue out;
    out.tail = it.iterate(x, tol, [&](const Eigen::RowVectorXd& v) { out.value += v.sum(); });
    return out;
}

// Spectral-radius estimate by repeated squaring with norm tracking; used to
// cross-check reachability-based absorption validation.
inline double spectral_radius_estimate(Eigen::MatrixXd m, int doublings = 13) {
    if (m.rows() == 0) return 0.0;
    double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
    if (norm == 0.0) return 0.0;
    double log_norm = std::log(norm);  // log ||M^(2^j)||, tracked through normalization
    m /= norm;
    double power = 1.0;
    for (int i = 0; i < doublings; ++i) {
        m = m * m;
        power *= 2.0;
        norm = m.cwiseAbs().rowwise().sum().maxCoeff();
        if (norm == 0.0) return 0.0;
        log_norm = 2.0 * log_norm + std::log(norm);
        m /= norm;
    }
    return std::exp(log_norm / power);
}

inline Eigen::MatrixXd restrict_to(const wb::Chain& chain, const std::vector<int>& states) {
    const int m = static_cast<int>(states.size());
    Eigen::MatrixXd block(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            block(i, j) = chain.prob(states[static_cast<std::size_t>(i)],
                                     states[static_cast<std::size_t>(j)]);
        }
    }
    return block;
}

// Seeded chain corpus for the property suites; every 13th instance gets its
// B states folded into A to keep the B-empty branch exercised.
inline std::vector<wb::Generated> make_corpus(int count, std::uint64_t seed) {
    std::vector<wb::Generated> corpus;
    corpus.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        wb::rng::Xoshiro256 gen(wb::rng::derive_stream(seed, static_cast<std::uint64_t>(i)));
        const int n = 3 + static_cast<int>(gen.next() % 10);  // 3..12
        const double sparsity = 0.3 + 0.6 * gen.uniform01();
        wb::ClassFractions fractions;
        fractions.a = 0.15 + 0.35 * gen.uniform01();
        fractions.b = 0.05 + 0.45 * gen.uniform01();
        fractions.c = 0.15 + 0.35 * gen.uniform01();
        wb::Generated g = wb::random_chain(n, gen.next(), sparsity, fractions);
        if (i % 13 == 5) {
            std::vector<wb::StateClass> relabel;
            relabel.reserve(static_cast<std::size_t>(g.chain.size()));
            for (int s = 0; s < g.chain.size(); ++s) {
                const auto cls = g.partition.label(s);
                relabel.push_back(cls == wb::StateClass::B ? wb::StateClass::A : cls);
            }
            g.partition = wb::build_partition(g.chain, std::move(relabel));
        }
        corpus.push_back(std::move(g));
    }
    return corpus;
}

}  // namespace testsupport
