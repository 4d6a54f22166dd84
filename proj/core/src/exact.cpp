#include "walkbounds/exact.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <unordered_map>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace walkbounds {

namespace {

// Backend switch: large, mostly-empty restrictions go through SparseLU.
constexpr int kSparseSizeThreshold = 256;
constexpr double kSparseDensityThreshold = 0.05;

// Noise floor for values that are nonnegative (or in [0,1]) by definition.
constexpr double kNoiseTolerance = 1e-12;

std::vector<int> checked_sorted_set(const Chain& chain, std::vector<int> set, const char* what) {
    for (int s : set) {
        if (s < 0 || s >= chain.size()) {
            throw InvalidArgumentError(std::string(what) + " contains out-of-range state index " +
                                       std::to_string(s));
        }
    }
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    return set;
}

double clamp_nonneg(double v) { return (v < 0.0 && v >= -kNoiseTolerance) ? 0.0 : v; }

double clamp_unit(double v) {
    if (v < 0.0 && v >= -kNoiseTolerance) return 0.0;
    if (v > 1.0 && v <= 1.0 + kNoiseTolerance) return 1.0;
    return v;
}

std::string label_list(const Chain& chain, const std::vector<int>& states, std::size_t limit = 8) {
    std::string out;
    for (std::size_t i = 0; i < states.size() && i < limit; ++i) {
        if (i) out += ", ";
        out += chain.label(states[i]);
    }
    if (states.size() > limit) out += ", ...";
    return out;
}

}  // namespace

int GreensMatrix::pos(int state) const {
    auto it = std::lower_bound(domain.begin(), domain.end(), state);
    if (it == domain.end() || *it != state) return -1;
    return static_cast<int>(it - domain.begin());
}

double GreensMatrix::at(int x, int y) const {
    const int px = pos(x);
    const int py = pos(y);
    if (px < 0 || py < 0) return 0.0;
    return values(px, py);
}

double HittingDist::at(int y) const {
    auto it = std::lower_bound(target.begin(), target.end(), y);
    if (it == target.end() || *it != y) return 0.0;
    return mass[static_cast<std::size_t>(it - target.begin())];
}

double HittingDist::total_mass() const { return 1.0 - defect; }

// ---------------------------------------------------------------------------
// GreensSolver

struct GreensSolver::Impl {
    const Chain* chain = nullptr;
    std::vector<int> domain;  // sorted
    std::vector<int> pos;     // size n, -1 outside
    int m = 0;
    bool sparse = false;

    Eigen::MatrixXd dense_sys;  // I - P|_D
    Eigen::PartialPivLU<Eigen::MatrixXd> dense_lu;
    std::unique_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>> dense_lu_t;

    Eigen::SparseMatrix<double> sparse_sys, sparse_sys_t;
    std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> sparse_lu, sparse_lu_t;

    std::unordered_map<int, Eigen::VectorXd> column_cache;

    void validate_escape() const;
    void factor();
    void ensure_transposed();
    Eigen::VectorXd apply(const Eigen::VectorXd& v, bool transposed) const;
    Eigen::VectorXd solve_refined(const Eigen::VectorXd& rhs, bool transposed);
};

void GreensSolver::Impl::validate_escape() const {
    const auto& p = chain->transition();
    const int n = chain->size();

    // States with support mass leaving the domain seed a backward search
    // along in-domain edges; anything unreached can never leave.
    std::vector<char> escapes(static_cast<std::size_t>(m), 0);
    std::deque<int> frontier;
    for (int i = 0; i < m; ++i) {
        const int u = domain[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j) {
            if (pos[static_cast<std::size_t>(j)] < 0 && p(u, j) > 0.0) {
                escapes[static_cast<std::size_t>(i)] = 1;
                frontier.push_back(i);
                break;
            }
        }
    }
    while (!frontier.empty()) {
        const int vi = frontier.front();
        frontier.pop_front();
        const int v = domain[static_cast<std::size_t>(vi)];
        for (int i = 0; i < m; ++i) {
            if (escapes[static_cast<std::size_t>(i)]) continue;
            if (p(domain[static_cast<std::size_t>(i)], v) > 0.0) {
                escapes[static_cast<std::size_t>(i)] = 1;
                frontier.push_back(i);
            }
        }
    }

    std::vector<int> trapped;
    for (int i = 0; i < m; ++i) {
        if (!escapes[static_cast<std::size_t>(i)]) trapped.push_back(domain[static_cast<std::size_t>(i)]);
    }
    if (!trapped.empty()) {
        throw DivergentDomainError("the visit-count series diverges: no support path out of the domain from " +
                                   label_list(*chain, trapped));
    }
}

void GreensSolver::Impl::factor() {
    const auto& p = chain->transition();

    std::int64_t nnz = 0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (p(domain[static_cast<std::size_t>(i)], domain[static_cast<std::size_t>(j)]) != 0.0) ++nnz;
        }
    }
    const double density = m > 0 ? static_cast<double>(nnz) / (static_cast<double>(m) * m) : 0.0;
    sparse = m >= kSparseSizeThreshold && density <= kSparseDensityThreshold;

    if (sparse) {
        std::vector<Eigen::Triplet<double>> triplets;
        triplets.reserve(static_cast<std::size_t>(nnz) + static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                const double pij = p(domain[static_cast<std::size_t>(i)], domain[static_cast<std::size_t>(j)]);
                const double v = (i == j ? 1.0 : 0.0) - pij;
                if (v != 0.0) triplets.emplace_back(i, j, v);
            }
        }
        sparse_sys.resize(m, m);
        sparse_sys.setFromTriplets(triplets.begin(), triplets.end());
        sparse_sys.makeCompressed();
        sparse_lu = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
        sparse_lu->compute(sparse_sys);
        if (sparse_lu->info() != Eigen::Success) {
            throw SolveError("sparse factorization of (I - P) failed on the domain");
        }
    } else {
        dense_sys.resize(m, m);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                const double pij = p(domain[static_cast<std::size_t>(i)], domain[static_cast<std::size_t>(j)]);
                dense_sys(i, j) = (i == j ? 1.0 : 0.0) - pij;
            }
        }
        dense_lu.compute(dense_sys);
    }
}

void GreensSolver::Impl::ensure_transposed() {
    if (sparse) {
        if (sparse_lu_t) return;
        sparse_sys_t = sparse_sys.transpose();
        sparse_sys_t.makeCompressed();
        sparse_lu_t = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
        sparse_lu_t->compute(sparse_sys_t);
        if (sparse_lu_t->info() != Eigen::Success) {
            throw SolveError("sparse factorization of (I - P)^T failed on the domain");
        }
    } else {
        if (dense_lu_t) return;
        dense_lu_t = std::make_unique<Eigen::PartialPivLU<Eigen::MatrixXd>>(dense_sys.transpose());
    }
}

Eigen::VectorXd GreensSolver::Impl::apply(const Eigen::VectorXd& v, bool transposed) const {
    if (sparse) return transposed ? Eigen::VectorXd(sparse_sys_t * v) : Eigen::VectorXd(sparse_sys * v);
    return transposed ? Eigen::VectorXd(dense_sys.transpose() * v) : Eigen::VectorXd(dense_sys * v);
}

Eigen::VectorXd GreensSolver::Impl::solve_refined(const Eigen::VectorXd& rhs, bool transposed) {
    if (transposed) ensure_transposed();
    auto base_solve = [&](const Eigen::VectorXd& b) -> Eigen::VectorXd {
        if (sparse) return transposed ? sparse_lu_t->solve(b) : sparse_lu->solve(b);
        return transposed ? dense_lu_t->solve(b) : dense_lu.solve(b);
    };

    Eigen::VectorXd x = base_solve(rhs);
    Eigen::VectorXd r = rhs - apply(x, transposed);
    x += base_solve(r);
    r = rhs - apply(x, transposed);

    // Backward-error guard: ||I - P|| <= 2 for substochastic P.
    const double threshold =
        kSolveTolerance * (2.0 * x.lpNorm<Eigen::Infinity>() + rhs.lpNorm<Eigen::Infinity>() + 1.0);
    if (!(r.lpNorm<Eigen::Infinity>() <= threshold)) {
        throw SolveError("linear solve residual did not converge; the system is numerically singular");
    }
    return x;
}

GreensSolver::GreensSolver(const Chain& chain, std::vector<int> domain) : impl_(std::make_unique<Impl>()) {
    impl_->chain = &chain;
    impl_->domain = checked_sorted_set(chain, std::move(domain), "domain");
    impl_->m = static_cast<int>(impl_->domain.size());
    if (impl_->m == chain.size() && impl_->m > 0) {
        throw DivergentDomainError("the domain covers every state; the walk can never leave it");
    }
    impl_->pos.assign(static_cast<std::size_t>(chain.size()), -1);
    for (int i = 0; i < impl_->m; ++i) {
        impl_->pos[static_cast<std::size_t>(impl_->domain[static_cast<std::size_t>(i)])] = i;
    }
    if (impl_->m == 0) return;
    impl_->validate_escape();
    impl_->factor();
}

GreensSolver::~GreensSolver() = default;
GreensSolver::GreensSolver(GreensSolver&&) noexcept = default;
GreensSolver& GreensSolver::operator=(GreensSolver&&) noexcept = default;

const std::vector<int>& GreensSolver::domain() const { return impl_->domain; }

int GreensSolver::pos(int state) const {
    if (state < 0 || state >= static_cast<int>(impl_->pos.size())) return -1;
    return impl_->pos[static_cast<std::size_t>(state)];
}

const Eigen::VectorXd& GreensSolver::column(int y) {
    const int py = pos(y);
    if (py < 0) throw InvalidArgumentError("column state is outside the domain");
    auto it = impl_->column_cache.find(y);
    if (it != impl_->column_cache.end()) return it->second;

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(impl_->m);
    rhs(py) = 1.0;
    Eigen::VectorXd col = impl_->solve_refined(rhs, /*transposed=*/false);
    for (int i = 0; i < impl_->m; ++i) col(i) = clamp_nonneg(col(i));
    return impl_->column_cache.emplace(y, std::move(col)).first->second;
}

double GreensSolver::entry(int x, int y) {
    const int px = pos(x);
    const int py = pos(y);
    if (px < 0 || py < 0) return 0.0;  // 0 by definition outside the domain
    return column(y)(px);
}

Eigen::VectorXd GreensSolver::row(int x) {
    const int px = pos(x);
    if (px < 0) throw InvalidArgumentError("row state is outside the domain");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(impl_->m);
    rhs(px) = 1.0;
    Eigen::VectorXd out = impl_->solve_refined(rhs, /*transposed=*/true);
    for (int i = 0; i < impl_->m; ++i) out(i) = clamp_nonneg(out(i));
    return out;
}

Eigen::VectorXd GreensSolver::solve(const Eigen::VectorXd& rhs) {
    if (rhs.size() != impl_->m) throw InvalidArgumentError("rhs size does not match the domain");
    if (impl_->m == 0) return Eigen::VectorXd();
    return impl_->solve_refined(rhs, /*transposed=*/false);
}

Eigen::VectorXd GreensSolver::solve_transposed(const Eigen::VectorXd& rhs) {
    if (rhs.size() != impl_->m) throw InvalidArgumentError("rhs size does not match the domain");
    if (impl_->m == 0) return Eigen::VectorXd();
    return impl_->solve_refined(rhs, /*transposed=*/true);
}

Eigen::MatrixXd GreensSolver::full() {
    Eigen::MatrixXd values(impl_->m, impl_->m);
    for (int j = 0; j < impl_->m; ++j) {
        values.col(j) = column(impl_->domain[static_cast<std::size_t>(j)]);
    }
    return values;
}

double greens_function(const Chain& chain, const std::vector<int>& domain, int x, int y) {
    if (x < 0 || x >= chain.size() || y < 0 || y >= chain.size()) {
        throw InvalidArgumentError("state index out of range");
    }
    auto sorted = checked_sorted_set(chain, domain, "domain");
    const bool x_in = std::binary_search(sorted.begin(), sorted.end(), x);
    const bool y_in = std::binary_search(sorted.begin(), sorted.end(), y);
    if (!x_in || !y_in) return 0.0;
    GreensSolver solver(chain, std::move(sorted));
    return solver.entry(x, y);
}

GreensMatrix greens_matrix(const Chain& chain, const std::vector<int>& domain) {
    GreensSolver solver(chain, domain);
    GreensMatrix out;
    out.domain = solver.domain();
    out.values = solver.full();
    return out;
}

// ---------------------------------------------------------------------------
// HittingSolver

struct HittingSolver::Impl {
    const Chain* chain = nullptr;
    StoppingSpec target;
    std::vector<int> transient;  // states outside T that can reach T, sorted
    std::vector<int> tpos;       // size n, position in `transient` or -1
    std::unique_ptr<GreensSolver> greens;  // on `transient`
    std::unordered_map<int, Eigen::VectorXd> mass_columns;

    Impl(const Chain& c, StoppingSpec t) : chain(&c), target(std::move(t)) {}

    const Eigen::VectorXd& mass_column(int y);
};

const Eigen::VectorXd& HittingSolver::Impl::mass_column(int y) {
    auto it = mass_columns.find(y);
    if (it != mass_columns.end()) return it->second;

    const int m = static_cast<int>(transient.size());
    Eigen::VectorXd rhs(m);
    for (int i = 0; i < m; ++i) rhs(i) = chain->prob(transient[static_cast<std::size_t>(i)], y);
    Eigen::VectorXd col = m > 0 ? greens->solve(rhs) : Eigen::VectorXd();
    for (int i = 0; i < m; ++i) col(i) = clamp_unit(col(i));
    return mass_columns.emplace(y, std::move(col)).first->second;
}

HittingSolver::HittingSolver(const Chain& chain, StoppingSpec target)
    : impl_(std::make_unique<Impl>(chain, std::move(target))) {
    const int n = chain.size();
    const auto& p = chain.transition();
    const auto& spec = impl_->target;

    // States that can reach the target through non-target interiors.
    std::vector<char> reaches(static_cast<std::size_t>(n), 0);
    std::deque<int> frontier;
    for (int t : spec.target()) {
        reaches[static_cast<std::size_t>(t)] = 1;
        frontier.push_back(t);
    }
    while (!frontier.empty()) {
        const int v = frontier.front();
        frontier.pop_front();
        for (int u = 0; u < n; ++u) {
            if (reaches[static_cast<std::size_t>(u)] || spec.contains(u)) continue;
            if (p(u, v) > 0.0) {
                reaches[static_cast<std::size_t>(u)] = 1;
                frontier.push_back(u);
            }
        }
    }

    impl_->tpos.assign(static_cast<std::size_t>(n), -1);
    for (int s = 0; s < n; ++s) {
        if (!spec.contains(s) && reaches[static_cast<std::size_t>(s)]) {
            impl_->tpos[static_cast<std::size_t>(s)] = static_cast<int>(impl_->transient.size());
            impl_->transient.push_back(s);
        }
    }
    if (!impl_->transient.empty()) {
        impl_->greens = std::make_unique<GreensSolver>(chain, impl_->transient);
    }
}

HittingSolver::~HittingSolver() = default;
HittingSolver::HittingSolver(HittingSolver&&) noexcept = default;
HittingSolver& HittingSolver::operator=(HittingSolver&&) noexcept = default;

const StoppingSpec& HittingSolver::target() const { return impl_->target; }

double HittingSolver::mass(int x, int y) {
    const int n = impl_->chain->size();
    if (x < 0 || x >= n || y < 0 || y >= n) throw InvalidArgumentError("state index out of range");
    if (!impl_->target.contains(y)) return 0.0;  // the walk stops inside the target
    if (impl_->target.contains(x)) return x == y ? 1.0 : 0.0;
    const int px = impl_->tpos[static_cast<std::size_t>(x)];
    if (px < 0) return 0.0;  // x cannot reach the target at all
    return impl_->mass_column(y)(px);
}

HittingDist HittingSolver::distribution(int x) {
    const int n = impl_->chain->size();
    if (x < 0 || x >= n) throw InvalidArgumentError("state index out of range");

    HittingDist dist;
    dist.start = x;
    dist.target = impl_->target.target();
    dist.mass.resize(dist.target.size(), 0.0);

    if (impl_->target.contains(x)) {
        for (std::size_t i = 0; i < dist.target.size(); ++i) {
            dist.mass[i] = dist.target[i] == x ? 1.0 : 0.0;
        }
        dist.defect = 0.0;
        return dist;
    }

    double total = 0.0;
    for (std::size_t i = 0; i < dist.target.size(); ++i) {
        dist.mass[i] = mass(x, dist.target[i]);
        total += dist.mass[i];
    }
    dist.defect = clamp_unit(1.0 - total);
    return dist;
}

HittingDist hitting_distribution(const Chain& chain, const StoppingSpec& target, int x) {
    HittingSolver solver(chain, target);
    return solver.distribution(x);
}

HittingDist hitting_distribution_last_exit(const Chain& chain, const StoppingSpec& target, int x) {
    if (x < 0 || x >= chain.size()) throw InvalidArgumentError("state index out of range");
    if (target.contains(x)) {
        throw InvalidArgumentError("the last-exit route needs the start outside the target");
    }

    std::vector<int> complement;
    complement.reserve(static_cast<std::size_t>(chain.size()));
    for (int s = 0; s < chain.size(); ++s) {
        if (!target.contains(s)) complement.push_back(s);
    }

    GreensSolver solver(chain, complement);  // diverges unless T is reachable from all of T^c
    const Eigen::VectorXd visit_row = solver.row(x);

    HittingDist dist;
    dist.start = x;
    dist.target = target.target();
    dist.mass.resize(dist.target.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < dist.target.size(); ++i) {
        const int y = dist.target[i];
        double acc = 0.0;
        for (std::size_t zi = 0; zi < complement.size(); ++zi) {
            acc += visit_row(static_cast<int>(zi)) * chain.prob(complement[zi], y);
        }
        dist.mass[i] = clamp_unit(acc);
        total += dist.mass[i];
    }
    dist.defect = clamp_unit(1.0 - total);
    return dist;
}

HitTimeVector expected_hitting_time(const Chain& chain, const StoppingSpec& target) {
    HitTimeVector out;
    out.target = target.target();
    out.values = Eigen::VectorXd::Zero(chain.size());

    std::vector<int> complement;
    for (int s = 0; s < chain.size(); ++s) {
        if (!target.contains(s)) complement.push_back(s);
    }
    if (complement.empty()) return out;

    GreensSolver solver(chain, complement);  // throws when the target is not a.s. reachable
    const Eigen::VectorXd h = solver.solve(Eigen::VectorXd::Ones(static_cast<int>(complement.size())));
    for (std::size_t i = 0; i < complement.size(); ++i) {
        out.values(complement[i]) = clamp_nonneg(h(static_cast<int>(i)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Excursion statistics

ExcursionStats excursion_stats(const Chain& chain, const Partition& partition) {
    if (partition.size() != chain.size()) {
        throw InvalidArgumentError("partition size does not match the chain");
    }
    const auto reach = validate_absorption(chain, partition);
    if (!reach.ok) {
        throw DivergentDomainError("absorption fails: no support path to C from " +
                                   label_list(chain, reach.offending_states));
    }

    const int n = chain.size();
    const auto& class_a = partition.a_states();
    const auto& class_b = partition.b_states();
    const auto& p = chain.transition();

    ExcursionStats st;
    st.cross_a = Eigen::VectorXd::Zero(n);
    st.cross_b = Eigen::VectorXd::Zero(n);
    st.round_trip_a = Eigen::VectorXd::Zero(n);
    st.round_trip_b = Eigen::VectorXd::Zero(n);

    GreensSolver solver_a(chain, class_a);
    const int ma = static_cast<int>(class_a.size());
    {
        const Eigen::VectorXd exit_a = solver_a.solve(Eigen::VectorXd::Ones(ma));
        st.exit_time_sup_a = exit_a.maxCoeff();
    }

    if (class_b.empty()) return st;  // crossings impossible; everything stays 0

    GreensSolver solver_b(chain, class_b);
    const int mb = static_cast<int>(class_b.size());
    {
        const Eigen::VectorXd exit_b = solver_b.solve(Eigen::VectorXd::Ones(mb));
        st.exit_time_sup_b = exit_b.maxCoeff();
    }

    auto mass_into = [&p](const std::vector<int>& rows, const std::vector<int>& cols,
                          const Eigen::VectorXd* weight) {
        Eigen::VectorXd rhs(static_cast<int>(rows.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            double acc = 0.0;
            for (int c : cols) acc += p(rows[i], c) * (weight ? (*weight)(c) : 1.0);
            rhs(static_cast<int>(i)) = acc;
        }
        return rhs;
    };

    const Eigen::VectorXd psi = solver_a.solve(mass_into(class_a, class_b, nullptr));
    for (int i = 0; i < ma; ++i) st.cross_a(class_a[static_cast<std::size_t>(i)]) = clamp_unit(psi(i));

    const Eigen::VectorXd sigma = solver_b.solve(mass_into(class_b, class_a, nullptr));
    for (int i = 0; i < mb; ++i) st.cross_b(class_b[static_cast<std::size_t>(i)]) = clamp_unit(sigma(i));

    const Eigen::VectorXd rho = solver_a.solve(mass_into(class_a, class_b, &st.cross_b));
    for (int i = 0; i < ma; ++i) st.round_trip_a(class_a[static_cast<std::size_t>(i)]) = clamp_unit(rho(i));

    const Eigen::VectorXd phi = solver_b.solve(mass_into(class_b, class_a, &st.cross_a));
    for (int i = 0; i < mb; ++i) st.round_trip_b(class_b[static_cast<std::size_t>(i)]) = clamp_unit(phi(i));

    for (int a : class_a) st.cross_sup_a = std::max(st.cross_sup_a, st.cross_a(a));
    for (int b : class_b) st.cross_sup_b = std::max(st.cross_sup_b, st.cross_b(b));
    return st;
}

double first_passage_prob(const Chain& chain, int y, const std::vector<int>& domain, int x) {
    if (x < 0 || x >= chain.size() || y < 0 || y >= chain.size()) {
        throw InvalidArgumentError("state index out of range");
    }
    auto sorted = checked_sorted_set(chain, domain, "domain");
    if (!std::binary_search(sorted.begin(), sorted.end(), x) ||
        !std::binary_search(sorted.begin(), sorted.end(), y)) {
        throw InvalidArgumentError("first_passage_prob needs x and y inside the domain");
    }
    if (x == y) return 1.0;

    // Reaching y before leaving D == first landing on {y} ∪ D^c happens at y.
    std::vector<int> stop;
    stop.push_back(y);
    for (int s = 0; s < chain.size(); ++s) {
        if (!std::binary_search(sorted.begin(), sorted.end(), s)) stop.push_back(s);
    }
    HittingSolver solver(chain, StoppingSpec::of(chain, std::move(stop)));
    return solver.mass(x, y);
}

}  // namespace walkbounds
