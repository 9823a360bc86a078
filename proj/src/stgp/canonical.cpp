#include <cmath>
#include <optional>

#include "cda/stgp/expr_tree.hpp"

namespace cda::stgp {

namespace {

// Offsets beyond this could lose integer exactness once added to a price.
constexpr double kMaxExactOffset = 0x1.0p50;

bool is_exact_integer(double v) { return std::isfinite(v) && v == std::trunc(v) && std::fabs(v) <= kMaxExactOffset; }

/// A variable terminal plus an integer offset: var + offset.
struct Chain {
    Symbol var;
    double offset;
};

std::optional<double> as_constant(const ExprTree& t)
{
    if (t.size() == 1 && t.root().symbol == Symbol::Const) return t.root().value;
    return std::nullopt;
}

std::optional<Chain> as_chain(const ExprTree& t)
{
    const Symbol root = t.root().symbol;
    if (root == Symbol::BestSame || root == Symbol::Limit) return Chain{root, 0.0};
    if (root != Symbol::Add && root != Symbol::Sub) return std::nullopt;
    if (t.size() != 3) return std::nullopt;
    const Node& lhs = t[1];
    const Node& rhs = t[2];
    if ((lhs.symbol == Symbol::BestSame || lhs.symbol == Symbol::Limit) && rhs.symbol == Symbol::Const) {
        return Chain{lhs.symbol, root == Symbol::Add ? rhs.value : -rhs.value};
    }
    return std::nullopt;
}

ExprTree emit(Chain c)
{
    const ExprTree var(std::vector<Node>{Node{c.var}});
    if (c.offset == 0.0) return var;
    if (c.offset > 0.0) return ExprTree::apply(Symbol::Add, var, ExprTree::constant(c.offset));
    return ExprTree::apply(Symbol::Sub, var, ExprTree::constant(-c.offset));
}

ExprTree simplify(const ExprTree& t)
{
    const Symbol op = t.root().symbol;
    if (!is_operator(op)) return t;

    const std::size_t rhs_at = t.subtree_end(1);
    const ExprTree lhs = simplify(t.subtree(1));
    const ExprTree rhs = simplify(t.subtree(rhs_at));
    ExprTree rebuilt = ExprTree::apply(op, lhs, rhs);

    const auto a = as_constant(lhs);
    const auto b = as_constant(rhs);
    if (a && b) {
        // Evaluate through eval_tree so the folded value is the exact double
        // the original subtree produces.
        const double v = eval_tree(rebuilt, EvalContext{});
        if (std::isfinite(v)) return ExprTree::constant(v);
        return rebuilt;
    }

    if (op == Symbol::Add || op == Symbol::Sub) {
        // chain +/- c, and c + chain
        if (auto chain = as_chain(lhs); chain && b && is_exact_integer(*b)) {
            const double offset = chain->offset + (op == Symbol::Add ? *b : -*b);
            if (is_exact_integer(offset)) return emit(Chain{chain->var, offset});
        }
        if (op == Symbol::Add && a && is_exact_integer(*a)) {
            if (auto chain = as_chain(rhs)) {
                const double offset = chain->offset + *a;
                if (is_exact_integer(offset)) return emit(Chain{chain->var, offset});
            }
        }
    }
    return rebuilt;
}

}  // namespace

ExprTree canonicalize(const ExprTree& tree) { return simplify(tree); }

}  // namespace cda::stgp
