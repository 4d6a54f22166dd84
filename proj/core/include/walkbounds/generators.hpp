#pragma once

#include <cstdint>
#include <vector>

#include "walkbounds/chain.hpp"

namespace walkbounds {

struct Generated {
    Chain chain;
    Partition partition;
};

/// Canonical 3-state fixture: a -> {b: 1/2, c: 1/2}, b -> {a: 1/2, c: 1/2},
/// c absorbing; A = {a}, B = {b}, C = {c}.
Generated triad();

/// Nearest-neighbor walk on 0..n-1 with right-step probability p_right.
/// C states are absorbing. Off-edge mass bounces to the neighbor when
/// `reflecting`, otherwise stays put.
Generated path_chain(int n, double p_right,
                     const std::vector<int>& class_a,
                     const std::vector<int>& class_b,
                     const std::vector<int>& class_c,
                     bool reflecting = true);

/// Lazy 4-neighbor walk on a width x height grid with reflecting boundary
/// (off-grid mass stays put). Classes by Chebyshev distance d from the
/// center cell: A = {d < inner_radius}, C = the ring
/// {inner_radius <= d < outer_radius} (absorbing), B = the rest. A
/// Chebyshev ring of width >= 1 blocks every 4-neighbor path from A to B.
struct GridSpec {
    int width = 0;
    int height = 0;
    double laziness = 0.0;  // stay-put probability, in [0,1)
    int inner_radius = 0;   // >= 1
    int outer_radius = 0;   // > inner_radius, 2*outer_radius < min(width,height)
};

Generated grid_annulus(const GridSpec& spec);

/// grid_annulus with an eastward corridor of angular width `gap` opened
/// through the full depth of the ring and relabeled B, so crossings between
/// A and B become possible in both directions while C still absorbs almost
/// surely. gap must lie in [1, 2*inner_radius + 1].
Generated punctured_annulus(const GridSpec& spec, int gap);

struct ClassFractions {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

/// Seeded random chain+partition: support drawn per entry with probability
/// `sparsity`, rows normalized from uniform weights, classes sampled by the
/// fractions, C states absorbing. Regenerates until validate_absorption
/// passes (bounded retries). Pure function of its arguments.
Generated random_chain(int n, std::uint64_t seed, double sparsity, const ClassFractions& fractions);

}  // namespace walkbounds
