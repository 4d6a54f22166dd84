#include "walkbounds/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "walkbounds/rng.hpp"

namespace walkbounds {

namespace {

constexpr int kMaxGenerationAttempts = 64;

std::string grid_label(int col, int row) {
    return "x" + std::to_string(col) + "y" + std::to_string(row);
}

void check_grid_spec(const GridSpec& spec) {
    if (spec.width < 3 || spec.height < 3) throw GeometryError("grid must be at least 3x3");
    if (!(spec.laziness >= 0.0 && spec.laziness < 1.0)) {
        throw GeometryError("laziness must lie in [0,1)");
    }
    if (spec.inner_radius < 1) throw GeometryError("inner_radius must be >= 1");
    if (spec.inner_radius >= spec.outer_radius) {
        throw GeometryError("inner_radius must be smaller than outer_radius");
    }
    if (2 * spec.outer_radius >= std::min(spec.width, spec.height)) {
        throw GeometryError("outer_radius must satisfy 2*outer_radius < min(width, height)");
    }
}

Generated build_grid(const GridSpec& spec, int gap) {
    check_grid_spec(spec);
    const int w = spec.width;
    const int h = spec.height;
    const int n = w * h;
    const int cx = w / 2;
    const int cy = h / 2;

    std::vector<StateClass> classes(static_cast<std::size_t>(n));
    auto chebyshev = [&](int col, int row) { return std::max(std::abs(col - cx), std::abs(row - cy)); };
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            const int d = chebyshev(col, row);
            StateClass cls = StateClass::B;
            if (d < spec.inner_radius) {
                cls = StateClass::A;
            } else if (d < spec.outer_radius) {
                cls = StateClass::C;
            }
            classes[static_cast<std::size_t>(row * w + col)] = cls;
        }
    }

    if (gap > 0) {
        // Open an eastward corridor through the full ring depth and hand it
        // to B. Offsets fan out from the center row: 0, +1, -1, +2, ...
        if (gap > 2 * spec.inner_radius + 1) {
            throw GeometryError("gap exceeds the corridor width limit 2*inner_radius + 1");
        }
        for (int gi = 0; gi < gap; ++gi) {
            const int offset = (gi % 2 == 1) ? (gi + 1) / 2 : -(gi / 2);
            const int row = cy + offset;
            for (int k = spec.inner_radius; k < spec.outer_radius; ++k) {
                const int col = cx + k;
                classes[static_cast<std::size_t>(row * w + col)] = StateClass::B;
            }
        }
        bool ring_left = false;
        for (const auto cls : classes) ring_left = ring_left || cls == StateClass::C;
        if (!ring_left) throw GeometryError("the corridor removed the whole separator ring");
    }

    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(n));
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) labels.push_back(grid_label(col, row));
    }

    Eigen::MatrixXd transition = Eigen::MatrixXd::Zero(n, n);
    const double move = (1.0 - spec.laziness) / 4.0;
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            const int s = row * w + col;
            if (classes[static_cast<std::size_t>(s)] == StateClass::C) {
                transition(s, s) = 1.0;  // absorbing by convention
                continue;
            }
            double stay = spec.laziness;
            const int dc[4] = {1, -1, 0, 0};
            const int dr[4] = {0, 0, 1, -1};
            for (int dir = 0; dir < 4; ++dir) {
                const int nc = col + dc[dir];
                const int nr = row + dr[dir];
                if (nc < 0 || nc >= w || nr < 0 || nr >= h) {
                    stay += move;  // reflecting boundary: off-grid mass stays put
                } else {
                    transition(s, nr * w + nc) += move;
                }
            }
            transition(s, s) += stay;
        }
    }

    Chain chain = build_chain(std::move(labels), std::move(transition));
    Partition partition = build_partition(chain, std::move(classes));

    if (gap == 0) {
        // A width >= 1 Chebyshev ring must block every 4-neighbor A-B path.
        const auto& p = chain.transition();
        for (int a : partition.a_states()) {
            for (int b : partition.b_states()) {
                if (p(a, b) > 0.0) throw GeometryError("separator ring failed to disconnect A from B");
            }
        }
    }
    return Generated{std::move(chain), std::move(partition)};
}

}  // namespace

Generated triad() {
    Eigen::MatrixXd transition(3, 3);
    transition << 0.0, 0.5, 0.5,
                  0.5, 0.0, 0.5,
                  0.0, 0.0, 1.0;
    Chain chain = build_chain({"a", "b", "c"}, std::move(transition));
    Partition partition = build_partition(chain, {StateClass::A, StateClass::B, StateClass::C});
    return Generated{std::move(chain), std::move(partition)};
}

Generated path_chain(int n, double p_right,
                     const std::vector<int>& class_a,
                     const std::vector<int>& class_b,
                     const std::vector<int>& class_c,
                     bool reflecting) {
    if (n < 2) throw InvalidArgumentError("path_chain needs n >= 2");
    if (!(p_right >= 0.0 && p_right <= 1.0)) {
        throw InvalidArgumentError("p_right must lie in [0,1]");
    }

    std::vector<StateClass> classes(static_cast<std::size_t>(n), StateClass::A);
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    auto place = [&](const std::vector<int>& members, StateClass cls) {
        for (int s : members) {
            if (s < 0 || s >= n || seen[static_cast<std::size_t>(s)]) {
                throw PartitionClassError("class index sets must partition 0..n-1");
            }
            seen[static_cast<std::size_t>(s)] = 1;
            classes[static_cast<std::size_t>(s)] = cls;
        }
    };
    place(class_a, StateClass::A);
    place(class_b, StateClass::B);
    place(class_c, StateClass::C);
    if (std::count(seen.begin(), seen.end(), 1) != n) {
        throw PartitionClassError("class index sets must partition 0..n-1");
    }

    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) labels.push_back("s" + std::to_string(i));

    Eigen::MatrixXd transition = Eigen::MatrixXd::Zero(n, n);
    const double p_left = 1.0 - p_right;
    for (int i = 0; i < n; ++i) {
        if (classes[static_cast<std::size_t>(i)] == StateClass::C) {
            transition(i, i) = 1.0;
            continue;
        }
        if (i > 0) {
            transition(i, i - 1) += p_left;
        } else {
            transition(i, reflecting ? i + 1 : i) += p_left;  // bounce or stay at the left end
        }
        if (i < n - 1) {
            transition(i, i + 1) += p_right;
        } else {
            transition(i, reflecting ? i - 1 : i) += p_right;
        }
    }

    Chain chain = build_chain(std::move(labels), std::move(transition));
    Partition partition = build_partition(chain, std::move(classes));
    return Generated{std::move(chain), std::move(partition)};
}

Generated grid_annulus(const GridSpec& spec) { return build_grid(spec, 0); }

Generated punctured_annulus(const GridSpec& spec, int gap) {
    if (gap < 1) throw GeometryError("gap must be >= 1");
    return build_grid(spec, gap);
}

Generated random_chain(int n, std::uint64_t seed, double sparsity, const ClassFractions& fractions) {
    if (n < 3) throw InvalidArgumentError("random_chain needs n >= 3");
    if (!(sparsity > 0.0 && sparsity <= 1.0)) throw InvalidArgumentError("sparsity must lie in (0,1]");
    if (!(fractions.a > 0.0) || !(fractions.c > 0.0) || fractions.b < 0.0) {
        throw InvalidArgumentError("class fractions need a > 0, b >= 0, c > 0");
    }
    const double total_fraction = fractions.a + fractions.b + fractions.c;

    for (int attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
        rng::Xoshiro256 gen(rng::derive_stream(seed, static_cast<std::uint64_t>(attempt)));

        std::vector<StateClass> classes(static_cast<std::size_t>(n));
        for (auto& cls : classes) {
            const double u = gen.uniform01() * total_fraction;
            cls = u < fractions.a                ? StateClass::A
                  : u < fractions.a + fractions.b ? StateClass::B
                                                  : StateClass::C;
        }
        const auto count = [&](StateClass c) {
            return std::count(classes.begin(), classes.end(), c);
        };
        if (count(StateClass::A) == 0 || count(StateClass::C) == 0) continue;

        Eigen::MatrixXd transition = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            if (classes[static_cast<std::size_t>(i)] == StateClass::C) {
                transition(i, i) = 1.0;
                continue;
            }
            double row_sum = 0.0;
            for (int j = 0; j < n; ++j) {
                if (gen.uniform01() < sparsity) {
                    const double weight = gen.uniform01() + 1e-3;
                    transition(i, j) = weight;
                    row_sum += weight;
                }
            }
            if (row_sum == 0.0) {
                const int j = std::min(n - 1, static_cast<int>(gen.uniform01() * n));
                transition(i, j) = 1.0;
                row_sum = 1.0;
            }
            for (int j = 0; j < n; ++j) transition(i, j) /= row_sum;
        }

        std::vector<std::string> labels;
        labels.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) labels.push_back("s" + std::to_string(i));

        Chain chain = build_chain(std::move(labels), std::move(transition));
        Partition partition = build_partition(chain, std::move(classes));
        if (!validate_absorption(chain, partition).ok) continue;
        return Generated{std::move(chain), std::move(partition)};
    }
    throw RetriesExhaustedError("no valid chain after " + std::to_string(kMaxGenerationAttempts) +
                                " attempts; loosen sparsity or fractions");
}

}  // namespace walkbounds
