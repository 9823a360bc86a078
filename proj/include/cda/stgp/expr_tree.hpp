#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cda/types.hpp"

namespace cda::stgp {

enum class Symbol : std::uint8_t {
    Add,       // A
    Sub,       // S
    Mul,       // M
    Div,       // D, protected: x / 0 == 1
    Const,
    BestSame,  // best price on the trader's own side of the book
    Limit,     // the customer order's limit price
};

/// Value types flowing along tree edges. Only one exists today; the typing
/// checks in the genetic operators are written against this table so that
/// adding a second type only touches `result_type` / `argument_type`.
enum class ValueType : std::uint8_t { Number };

constexpr int arity(Symbol s) noexcept
{
    switch (s) {
    case Symbol::Add:
    case Symbol::Sub:
    case Symbol::Mul:
    case Symbol::Div: return 2;
    default: return 0;
    }
}

constexpr bool is_operator(Symbol s) noexcept { return arity(s) > 0; }
constexpr ValueType result_type(Symbol) noexcept { return ValueType::Number; }
constexpr ValueType argument_type(Symbol, int) noexcept { return ValueType::Number; }

struct Node {
    Symbol symbol = Symbol::Const;
    double value = 0.0;  // meaningful for Const only

    friend bool operator==(const Node& a, const Node& b) noexcept
    {
        return a.symbol == b.symbol && (a.symbol != Symbol::Const || a.value == b.value);
    }
};

class ParseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Strongly-typed arithmetic expression tree stored in prefix order.
///
/// The subtree rooted at node i occupies the contiguous range
/// [i, subtree_end(i)), which makes subtree exchange a pair of splices.
class ExprTree {
public:
    ExprTree() : nodes_{Node{Symbol::Const, 0.0}} {}
    /// Throws std::invalid_argument unless `prefix` is a single well-formed tree.
    explicit ExprTree(std::vector<Node> prefix);

    static ExprTree constant(double v) { return ExprTree(std::vector<Node>{Node{Symbol::Const, v}}); }
    static ExprTree best_same() { return ExprTree(std::vector<Node>{Node{Symbol::BestSame}}); }
    static ExprTree limit() { return ExprTree(std::vector<Node>{Node{Symbol::Limit}}); }
    static ExprTree apply(Symbol op, const ExprTree& lhs, const ExprTree& rhs);

    std::span<const Node> nodes() const noexcept { return nodes_; }
    const Node& root() const noexcept { return nodes_.front(); }
    const Node& operator[](std::size_t i) const { return nodes_.at(i); }
    std::size_t size() const noexcept { return nodes_.size(); }

    /// Longest root-to-leaf path counted in nodes; a lone terminal has depth 1.
    int depth() const;
    /// Number of nodes above node i (the root sits at level 0).
    int level_of(std::size_t i) const;
    std::size_t subtree_end(std::size_t i) const;
    ExprTree subtree(std::size_t i) const;
    ExprTree with_subtree(std::size_t i, const ExprTree& replacement) const;
    ExprTree with_node(std::size_t i, Node node) const;

    ValueType type_at(std::size_t i) const { return result_type(nodes_.at(i).symbol); }

    friend bool operator==(const ExprTree&, const ExprTree&) = default;

private:
    std::vector<Node> nodes_;
};

/// Parses the parenthesized prefix form, e.g. `(S,(S,Pbest,1),LIMIT)`.
/// Accepts `Pbest`, `Psame`, `BestSame` for the best-price terminal and
/// `LIMIT`, `Limit`, `lambda` for the limit terminal.
ExprTree parse_expr(std::string_view text);
std::string to_string(const ExprTree& tree);

/// Inputs for evaluating a tree on behalf of one trader.
struct EvalContext {
    std::optional<Price> best_same;
    Price limit{1};
    Side side = Side::Bid;
    PriceBounds bounds{};

    /// Best same-side price, or the own-side stub price (sys_min for a
    /// buyer, sys_max for a seller) when that side of the book is empty.
    double best_same_value() const noexcept;
};

double eval_tree(const ExprTree& tree, const EvalContext& ctx);

/// How an evolved expression becomes a quote price.
enum class QuoteMapping : std::uint8_t {
    Direct,       ///< the expression value is the quote
    LimitOffset,  ///< quote = limit + expression value
    /// Buyers evaluate with negated prices and negate the result, so a genome
    /// reads the same way on both sides (`(S,Pbest,c)` improves the best
    /// same-side price by c). Sellers quote the value directly.
    Mirrored,
};

std::string_view to_string(QuoteMapping mapping) noexcept;
QuoteMapping parse_quote_mapping(std::string_view text);

/// Rounds the expression value to a price, applies loss-avoidance against the
/// limit, then clamps into the system bounds. Non-finite values quote the limit.
Price quote_from_tree(const ExprTree& tree, const EvalContext& ctx, QuoteMapping mapping = QuoteMapping::Direct);

/// Folds constant subtrees and merges +/- chains of integer constants hanging
/// off one variable terminal into `(S,var,c)` / `(A,var,c)` with c > 0.
/// Evaluation results are unchanged bit for bit.
ExprTree canonicalize(const ExprTree& tree);

}  // namespace cda::stgp
