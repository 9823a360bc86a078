#include "cda/stgp/expr_tree.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace cda::stgp {

namespace {

// Returns one past the end of the subtree starting at i, or npos when the
// prefix sequence is truncated.
std::size_t scan_subtree(std::span<const Node> nodes, std::size_t i)
{
    std::size_t pending = 1;
    while (pending > 0) {
        if (i >= nodes.size()) return std::string::npos;
        pending += static_cast<std::size_t>(arity(nodes[i].symbol));
        --pending;
        ++i;
    }
    return i;
}

std::string format_number(double v)
{
    if (std::isfinite(v) && v == std::trunc(v) && std::fabs(v) < 1e15) {
        return std::to_string(static_cast<long long>(v));
    }
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

char operator_letter(Symbol s)
{
    switch (s) {
    case Symbol::Add: return 'A';
    case Symbol::Sub: return 'S';
    case Symbol::Mul: return 'M';
    case Symbol::Div: return 'D';
    default: return '?';
    }
}

void print(std::span<const Node> nodes, std::size_t& i, std::string& out)
{
    const Node& n = nodes[i++];
    switch (n.symbol) {
    case Symbol::Const: out += format_number(n.value); return;
    case Symbol::BestSame: out += "Pbest"; return;
    case Symbol::Limit: out += "LIMIT"; return;
    default: break;
    }
    out += '(';
    out += operator_letter(n.symbol);
    for (int k = 0; k < arity(n.symbol); ++k) {
        out += ',';
        print(nodes, i, out);
    }
    out += ')';
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    std::vector<Node> parse_all()
    {
        std::vector<Node> out;
        parse(out);
        skip_ws();
        if (pos_ != text_.size()) fail("trailing characters");
        return out;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw ParseError("expression parse error at offset " + std::to_string(pos_) + ": " + what);
    }

    void skip_ws()
    {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' || text_[pos_] == '\r')) {
            ++pos_;
        }
    }

    void expect(char c)
    {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string_view word()
    {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == ',' || c == '(' || c == ')' || c == ' ' || c == '\t' || c == '\n' || c == '\r') break;
            ++pos_;
        }
        if (start == pos_) fail("expected a symbol");
        return text_.substr(start, pos_ - start);
    }

    void parse(std::vector<Node>& out)
    {
        if (++nesting_ > 4096) fail("nesting too deep");
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            ++pos_;
            const std::string_view op = word();
            Symbol sym{};
            if (op == "A") sym = Symbol::Add;
            else if (op == "S") sym = Symbol::Sub;
            else if (op == "M") sym = Symbol::Mul;
            else if (op == "D") sym = Symbol::Div;
            else fail("unknown operator '" + std::string(op) + "'");
            out.push_back(Node{sym});
            for (int k = 0; k < arity(sym); ++k) {
                expect(',');
                parse(out);
            }
            expect(')');
        } else {
            out.push_back(terminal(word()));
        }
        --nesting_;
    }

    Node terminal(std::string_view w)
    {
        if (w == "Pbest" || w == "Psame" || w == "BestSame") return Node{Symbol::BestSame};
        if (w == "LIMIT" || w == "Limit" || w == "lambda") return Node{Symbol::Limit};
        double v = 0.0;
        auto [end, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
        if (ec != std::errc{} || end != w.data() + w.size()) fail("bad terminal '" + std::string(w) + "'");
        return Node{Symbol::Const, v};
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int nesting_ = 0;
};

double apply_op(Symbol op, double a, double b) noexcept
{
    switch (op) {
    case Symbol::Add: return a + b;
    case Symbol::Sub: return a - b;
    case Symbol::Mul: return a * b;
    case Symbol::Div: return b == 0.0 ? 1.0 : a / b;
    default: return std::numeric_limits<double>::quiet_NaN();
    }
}

double eval_at(std::span<const Node> nodes, std::size_t& i, const EvalContext& ctx)
{
    const Node& n = nodes[i++];
    switch (n.symbol) {
    case Symbol::Const: return n.value;
    case Symbol::BestSame: return ctx.best_same_value();
    case Symbol::Limit: return static_cast<double>(ctx.limit.ticks);
    default: break;
    }
    const double a = eval_at(nodes, i, ctx);
    const double b = eval_at(nodes, i, ctx);
    return apply_op(n.symbol, a, b);
}

}  // namespace

ExprTree::ExprTree(std::vector<Node> prefix) : nodes_(std::move(prefix))
{
    if (nodes_.empty()) throw std::invalid_argument("empty expression tree");
    if (scan_subtree(nodes_, 0) != nodes_.size()) throw std::invalid_argument("malformed prefix sequence");
}

ExprTree ExprTree::apply(Symbol op, const ExprTree& lhs, const ExprTree& rhs)
{
    if (!is_operator(op)) throw std::invalid_argument("apply needs an operator symbol");
    std::vector<Node> nodes;
    nodes.reserve(1 + lhs.size() + rhs.size());
    nodes.push_back(Node{op});
    nodes.insert(nodes.end(), lhs.nodes_.begin(), lhs.nodes_.end());
    nodes.insert(nodes.end(), rhs.nodes_.begin(), rhs.nodes_.end());
    return ExprTree(std::move(nodes));
}

int ExprTree::depth() const
{
    // Walk the prefix sequence keeping a stack of outstanding child slots.
    std::vector<int> open;
    int deepest = 0;
    for (const Node& n : nodes_) {
        const int level = static_cast<int>(open.size()) + 1;
        deepest = std::max(deepest, level);
        if (!open.empty()) --open.back();
        if (is_operator(n.symbol)) {
            open.push_back(arity(n.symbol));
        }
        while (!open.empty() && open.back() == 0) open.pop_back();
    }
    return deepest;
}

int ExprTree::level_of(std::size_t target) const
{
    std::vector<int> open;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (i == target) return static_cast<int>(open.size());
        if (!open.empty()) --open.back();
        if (is_operator(nodes_[i].symbol)) open.push_back(arity(nodes_[i].symbol));
        while (!open.empty() && open.back() == 0) open.pop_back();
    }
    throw std::out_of_range("node index out of range");
}

std::size_t ExprTree::subtree_end(std::size_t i) const
{
    if (i >= nodes_.size()) throw std::out_of_range("node index out of range");
    return scan_subtree(nodes_, i);
}

ExprTree ExprTree::subtree(std::size_t i) const
{
    const std::size_t end = subtree_end(i);
    return ExprTree(std::vector<Node>(nodes_.begin() + static_cast<std::ptrdiff_t>(i),
                                      nodes_.begin() + static_cast<std::ptrdiff_t>(end)));
}

ExprTree ExprTree::with_subtree(std::size_t i, const ExprTree& replacement) const
{
    const std::size_t end = subtree_end(i);
    std::vector<Node> nodes;
    nodes.reserve(nodes_.size() - (end - i) + replacement.size());
    nodes.insert(nodes.end(), nodes_.begin(), nodes_.begin() + static_cast<std::ptrdiff_t>(i));
    nodes.insert(nodes.end(), replacement.nodes_.begin(), replacement.nodes_.end());
    nodes.insert(nodes.end(), nodes_.begin() + static_cast<std::ptrdiff_t>(end), nodes_.end());
    return ExprTree(std::move(nodes));
}

ExprTree ExprTree::with_node(std::size_t i, Node node) const
{
    if (i >= nodes_.size()) throw std::out_of_range("node index out of range");
    if (arity(node.symbol) != arity(nodes_[i].symbol)) throw std::invalid_argument("replacement changes arity");
    std::vector<Node> nodes = nodes_;
    nodes[i] = node;
    return ExprTree(std::move(nodes));
}

ExprTree parse_expr(std::string_view text) { return ExprTree(Parser(text).parse_all()); }

std::string to_string(const ExprTree& tree)
{
    std::string out;
    std::size_t i = 0;
    print(tree.nodes(), i, out);
    return out;
}

double EvalContext::best_same_value() const noexcept
{
    if (best_same) return static_cast<double>(best_same->ticks);
    return static_cast<double>(side == Side::Bid ? bounds.min.ticks : bounds.max.ticks);
}

double eval_tree(const ExprTree& tree, const EvalContext& ctx)
{
    std::size_t i = 0;
    return eval_at(tree.nodes(), i, ctx);
}

std::string_view to_string(QuoteMapping mapping) noexcept
{
    switch (mapping) {
    case QuoteMapping::Direct: return "direct";
    case QuoteMapping::LimitOffset: return "limit_offset";
    case QuoteMapping::Mirrored: return "mirrored";
    }
    return "direct";
}

QuoteMapping parse_quote_mapping(std::string_view text)
{
    if (text == "direct") return QuoteMapping::Direct;
    if (text == "limit_offset") return QuoteMapping::LimitOffset;
    if (text == "mirrored") return QuoteMapping::Mirrored;
    throw std::invalid_argument("unknown quote mapping '" + std::string(text) + "'");
}

Price quote_from_tree(const ExprTree& tree, const EvalContext& ctx, QuoteMapping mapping)
{
    double v = 0.0;
    if (mapping == QuoteMapping::Mirrored && ctx.side == Side::Bid) {
        EvalContext mirror = ctx;
        mirror.best_same = Price{-static_cast<std::int64_t>(ctx.best_same_value())};
        mirror.limit = Price{-ctx.limit.ticks};
        v = -eval_tree(tree, mirror);
    } else {
        v = eval_tree(tree, ctx);
    }
    if (mapping == QuoteMapping::LimitOffset) v += static_cast<double>(ctx.limit.ticks);
    if (!std::isfinite(v)) return ctx.bounds.clamp(ctx.limit);

    // Clamp in floating point first so huge values cannot overflow the cast.
    const double lo = static_cast<double>(ctx.bounds.min.ticks);
    const double hi = static_cast<double>(ctx.bounds.max.ticks);
    const Price raw{static_cast<std::int64_t>(std::llround(std::clamp(v, lo - 1.0, hi + 1.0)))};
    const Price guarded = ctx.side == Side::Bid ? std::min(raw, ctx.limit) : std::max(raw, ctx.limit);
    return ctx.bounds.clamp(guarded);
}

}  // namespace cda::stgp
