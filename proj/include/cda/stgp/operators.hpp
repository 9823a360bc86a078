#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cda/rng.hpp"
#include "cda/stgp/expr_tree.hpp"

namespace cda::stgp {

struct OperatorParams {
    int max_depth = 8;
    std::vector<double> const_pool{1.0, 7.0};
};

/// Structural validity: arities, typing along every edge, and the depth bound.
bool well_formed(const ExprTree& tree, int max_depth);

/// Subtree crossover. A node is drawn uniformly in `p1`, then a node of the
/// same value type is drawn uniformly in `p2`, and the subtrees are swapped.
/// A child that would exceed `max_depth` is replaced by its own parent.
std::pair<ExprTree, ExprTree> crossover(const ExprTree& p1, const ExprTree& p2, Rng& rng, int max_depth = 8);

/// Crossover at explicit node indices (the deterministic core of `crossover`).
std::pair<ExprTree, ExprTree> crossover_at(const ExprTree& p1, std::size_t at1, const ExprTree& p2, std::size_t at2,
                                           int max_depth = 8);

/// Every node independently, with probability `p_mut`, switches to a uniformly
/// drawn different symbol of the same arity and type. Terminals choose among
/// the constant pool and the variable terminals. The shape never changes.
ExprTree point_mutate(const ExprTree& tree, Rng& rng, double p_mut, std::span<const double> const_pool);

/// Alternatives available to node `node` under point mutation.
std::vector<Node> mutation_alternatives(const Node& node, std::span<const double> const_pool);

struct Individual {
    ExprTree genome;
    double fitness = 0.0;
    std::uint64_t id = 0;
};

struct Population {
    std::vector<Individual> individuals;
    int generation = 1;
};

/// Roulette-wheel probabilities over shifted fitness f - min(f) + eps.
std::vector<double> selection_probabilities(std::span<const Individual> individuals, double eps = 1e-6);

/// Fitness-proportionate draw; returns an index into `individuals`.
/// Throws std::invalid_argument on an empty population.
std::size_t select_parent(std::span<const Individual> individuals, Rng& rng, double eps = 1e-6);

}  // namespace cda::stgp
