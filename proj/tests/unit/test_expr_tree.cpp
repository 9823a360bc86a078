#include <cmath>
#include <functional>

#include "cda/stgp/operators.hpp"
#include "doctest.h"

using namespace cda;
using namespace cda::stgp;

namespace {

EvalContext ctx(std::optional<std::int64_t> best, std::int64_t limit, Side side = Side::Ask)
{
    EvalContext c;
    if (best) c.best_same = Price{*best};
    c.limit = Price{limit};
    c.side = side;
    return c;
}

// Reference evaluator written recursively over the s-expression text.
double eval_text(std::string_view& s, const EvalContext& c)
{
    auto trim = [&] { while (!s.empty() && (s.front() == ' ' || s.front() == ',')) s.remove_prefix(1); };
    trim();
    if (s.front() == '(') {
        s.remove_prefix(1);
        const char op = s.front();
        s.remove_prefix(1);
        const double a = eval_text(s, c);
        const double b = eval_text(s, c);
        trim();
        s.remove_prefix(1);  // ')'
        switch (op) {
        case 'A': return a + b;
        case 'S': return a - b;
        case 'M': return a * b;
        default: return b == 0 ? 1.0 : a / b;
        }
    }
    std::size_t n = 0;
    while (n < s.size() && s[n] != ',' && s[n] != ')') ++n;
    const std::string word(s.substr(0, n));
    s.remove_prefix(n);
    if (word == "Pbest") return c.best_same_value();
    if (word == "LIMIT") return static_cast<double>(c.limit.ticks);
    return std::stod(word);
}

}  // namespace

TEST_CASE("evaluation examples")
{
    CHECK(eval_tree(parse_expr("(A,(M,3,2),(D,10,(S,5,3)))"), {}) == 11.0);
    CHECK(eval_tree(parse_expr("(D,5,0)"), {}) == 1.0);
    CHECK(eval_tree(parse_expr("(S,(S,Pbest,1),7)"), ctx(100, 40)) == 92.0);
    CHECK(eval_tree(parse_expr("LIMIT"), ctx(100, 40)) == 40.0);
    // empty same side reads the own-side stub
    CHECK(eval_tree(parse_expr("Pbest"), ctx(std::nullopt, 40, Side::Ask)) == 500.0);
    CHECK(eval_tree(parse_expr("Pbest"), ctx(std::nullopt, 40, Side::Bid)) == 1.0);
}

TEST_CASE("quote mapping examples")
{
    CHECK(quote_from_tree(parse_expr("(S,Pbest,1)"), ctx(50, 40)) == Price{49});
    CHECK(quote_from_tree(parse_expr("(S,Pbest,34)"), ctx(60, 40)) == Price{40});
    CHECK(quote_from_tree(parse_expr("1000000000"), ctx(50, 120, Side::Bid)) == Price{120});
    CHECK(quote_from_tree(parse_expr("-1000000000"), ctx(50, 120, Side::Ask)) == Price{120});
    CHECK(quote_from_tree(parse_expr("-5"), ctx(50, 120, Side::Bid)) == Price{1});
    CHECK(quote_from_tree(parse_expr("(D,(S,Pbest,Pbest),(M,0,0))"), ctx(50, 120, Side::Bid)) == Price{1});
    CHECK(quote_from_tree(parse_expr("99.5"), ctx(50, 120, Side::Bid)) == Price{100});
}

TEST_CASE("alternative quote mappings")
{
    // limit plus offset
    CHECK(quote_from_tree(parse_expr("-7"), ctx(50, 120, Side::Bid), QuoteMapping::LimitOffset) == Price{113});
    CHECK(quote_from_tree(parse_expr("(S,LIMIT,LIMIT)"), ctx(50, 40, Side::Ask), QuoteMapping::LimitOffset) == Price{40});
    // mirrored: the same genome shades toward the book from either side
    const auto shade = parse_expr("(S,Pbest,1)");
    CHECK(quote_from_tree(shade, ctx(90, 120, Side::Bid), QuoteMapping::Mirrored) == Price{91});
    CHECK(quote_from_tree(shade, ctx(90, 40, Side::Ask), QuoteMapping::Mirrored) == Price{89});
    // the seller-side reading of a margin is limit + c
    const auto margin = parse_expr("(A,LIMIT,10)");
    CHECK(quote_from_tree(margin, ctx(90, 120, Side::Bid), QuoteMapping::Mirrored) == Price{110});
    CHECK(quote_from_tree(margin, ctx(90, 40, Side::Ask), QuoteMapping::Mirrored) == Price{50});
    CHECK(parse_quote_mapping(to_string(QuoteMapping::Mirrored)) == QuoteMapping::Mirrored);
    CHECK_THROWS(parse_quote_mapping("inverse"));
}

TEST_CASE("print and parse round trip")
{
    for (const char* text : {"(S,(S,Pbest,1),LIMIT)", "(A,(M,3,2),(D,10,(S,5,3)))", "LIMIT", "7", "(S,Pbest,-10)",
                             "(M,0.25,Pbest)"}) {
        const auto t = parse_expr(text);
        CHECK(to_string(t) == text);
        CHECK(parse_expr(to_string(t)) == t);
    }
    CHECK(parse_expr(" ( S , Psame , lambda ) ") == parse_expr("(S,Pbest,LIMIT)"));
    CHECK_THROWS_AS(parse_expr("(S,Pbest)"), ParseError);
    CHECK_THROWS_AS(parse_expr("(X,1,2)"), ParseError);
    CHECK_THROWS_AS(parse_expr("(S,1,2) 3"), ParseError);
    CHECK_THROWS_AS(parse_expr("foo"), ParseError);
    CHECK_THROWS_AS(parse_expr(""), ParseError);
}

TEST_CASE("tree structure")
{
    const auto t = parse_expr("(A,(M,3,2),(D,10,(S,5,3)))");
    CHECK(t.size() == 9);
    CHECK(t.depth() == 4);
    CHECK(t.subtree_end(1) == 4);
    CHECK(to_string(t.subtree(4)) == "(D,10,(S,5,3))");
    CHECK(t.level_of(6) == 2);
    CHECK(to_string(t.with_subtree(1, ExprTree::limit())) == "(A,LIMIT,(D,10,(S,5,3)))");
    CHECK(to_string(t.with_node(0, Node{Symbol::Sub})) == "(S,(M,3,2),(D,10,(S,5,3)))");
    CHECK_THROWS(t.with_node(0, Node{Symbol::Limit}));
    CHECK(ExprTree::best_same().depth() == 1);
    CHECK_THROWS(ExprTree(std::vector<Node>{Node{Symbol::Add}, Node{Symbol::Const, 1}}));
    CHECK(well_formed(t, 4));
    CHECK_FALSE(well_formed(t, 3));
}

TEST_CASE("eval agrees with a text evaluator on Table-like genomes")
{
    for (const char* text : {"(S,(S,(S,(S,Pbest,1),7),1),1)", "(A,(D,LIMIT,(S,Pbest,Pbest)),(M,7,LIMIT))",
                             "(D,(A,Pbest,LIMIT),7)"}) {
        for (auto c : {ctx(88, 40), ctx(std::nullopt, 140, Side::Bid), ctx(3, 300, Side::Bid)}) {
            std::string_view sv(text);
            CHECK(eval_tree(parse_expr(text), c) == eval_text(sv, c));
        }
    }
}
