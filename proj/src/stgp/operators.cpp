#include "cda/stgp/operators.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace cda::stgp {

bool well_formed(const ExprTree& tree, int max_depth)
{
    const auto nodes = tree.nodes();
    // Walk with an explicit stack of (parent symbol, argument slot) to check
    // the type expected at every edge.
    struct Slot {
        Symbol parent;
        int next_arg;
    };
    std::vector<Slot> open;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Node& n = nodes[i];
        if (!open.empty()) {
            Slot& slot = open.back();
            if (argument_type(slot.parent, slot.next_arg) != result_type(n.symbol)) return false;
            ++slot.next_arg;
        }
        if (is_operator(n.symbol)) open.push_back(Slot{n.symbol, 0});
        while (!open.empty() && open.back().next_arg == arity(open.back().parent)) open.pop_back();
        if (open.empty() && i + 1 != nodes.size()) return false;
    }
    return open.empty() && tree.depth() <= max_depth;
}

std::pair<ExprTree, ExprTree> crossover_at(const ExprTree& p1, std::size_t at1, const ExprTree& p2, std::size_t at2,
                                           int max_depth)
{
    if (p1.type_at(at1) != p2.type_at(at2)) throw std::invalid_argument("crossover points have different types");
    const ExprTree s1 = p1.subtree(at1);
    const ExprTree s2 = p2.subtree(at2);
    ExprTree c1 = p1.with_subtree(at1, s2);
    ExprTree c2 = p2.with_subtree(at2, s1);
    if (c1.depth() > max_depth) c1 = p1;
    if (c2.depth() > max_depth) c2 = p2;
    return {std::move(c1), std::move(c2)};
}

std::pair<ExprTree, ExprTree> crossover(const ExprTree& p1, const ExprTree& p2, Rng& rng, int max_depth)
{
    std::uniform_int_distribution<std::size_t> pick1(0, p1.size() - 1);
    const std::size_t at1 = pick1(rng);

    std::vector<std::size_t> compatible;
    compatible.reserve(p2.size());
    for (std::size_t j = 0; j < p2.size(); ++j) {
        if (p2.type_at(j) == p1.type_at(at1)) compatible.push_back(j);
    }
    if (compatible.empty()) return {p1, p2};
    std::uniform_int_distribution<std::size_t> pick2(0, compatible.size() - 1);
    return crossover_at(p1, at1, p2, compatible[pick2(rng)], max_depth);
}

std::vector<Node> mutation_alternatives(const Node& node, std::span<const double> const_pool)
{
    std::vector<Node> out;
    if (is_operator(node.symbol)) {
        for (Symbol s : {Symbol::Add, Symbol::Sub, Symbol::Mul, Symbol::Div}) {
            if (s != node.symbol && arity(s) == arity(node.symbol) && result_type(s) == result_type(node.symbol)) {
                out.push_back(Node{s});
            }
        }
        return out;
    }
    std::vector<Node> terminals;
    for (double c : const_pool) terminals.push_back(Node{Symbol::Const, c});
    terminals.push_back(Node{Symbol::BestSame});
    terminals.push_back(Node{Symbol::Limit});
    for (const Node& t : terminals) {
        if (t == node) continue;
        if (std::find(out.begin(), out.end(), t) != out.end()) continue;
        out.push_back(t);
    }
    return out;
}

ExprTree point_mutate(const ExprTree& tree, Rng& rng, double p_mut, std::span<const double> const_pool)
{
    if (p_mut < 0.0 || p_mut > 1.0) throw std::invalid_argument("mutation probability must lie in [0, 1]");
    if (p_mut == 0.0) return tree;

    std::vector<Node> nodes(tree.nodes().begin(), tree.nodes().end());
    for (Node& n : nodes) {
        if (uniform01(rng) >= p_mut) continue;
        const auto options = mutation_alternatives(n, const_pool);
        if (options.empty()) continue;
        std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
        n = options[pick(rng)];
    }
    return ExprTree(std::move(nodes));
}

std::vector<double> selection_probabilities(std::span<const Individual> individuals, double eps)
{
    if (individuals.empty()) throw std::invalid_argument("cannot select from an empty population");
    double lowest = individuals.front().fitness;
    for (const auto& ind : individuals) lowest = std::min(lowest, ind.fitness);

    std::vector<double> weights;
    weights.reserve(individuals.size());
    for (const auto& ind : individuals) weights.push_back(ind.fitness - lowest + eps);
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (double& w : weights) w /= total;
    return weights;
}

std::size_t select_parent(std::span<const Individual> individuals, Rng& rng, double eps)
{
    const auto probs = selection_probabilities(individuals, eps);
    const double u = uniform01(rng);
    double cumulative = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        cumulative += probs[i];
        if (u < cumulative) return i;
    }
    return probs.size() - 1;
}

}  // namespace cda::stgp
