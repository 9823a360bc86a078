#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "cda/types.hpp"

namespace cda::lob {

struct Order {
    TraderId trader = 0;
    Side side = Side::Bid;
    Price price;
    std::int64_t quantity = 1;
    Time submit_time = 0;

    friend bool operator==(const Order&, const Order&) = default;
};

struct Trade {
    Time time = 0;
    Price price;
    TraderId buyer = 0;
    TraderId seller = 0;
    std::int64_t quantity = 1;

    friend bool operator==(const Trade&, const Trade&) = default;
};

struct OrderRested {
    Order order;
};

/// Emitted when a submission displaces the trader's earlier resting order.
struct OrderReplaced {
    Order previous;
};

struct TradeExecuted {
    Trade trade;
};

using MarketEvent = std::variant<OrderRested, OrderReplaced, TradeExecuted>;

struct BestPrices {
    std::optional<Price> bid;
    std::optional<Price> ask;

    std::optional<Price> same_side(Side side) const noexcept { return side == Side::Bid ? bid : ask; }
    std::optional<Price> opposite_side(Side side) const noexcept { return side == Side::Bid ? ask : bid; }
};

class OrderRejected : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Continuous double auction limit order book.
///
/// Each trader holds at most one resting order; a new submission replaces the
/// old one. An incoming order that crosses executes against the best opposite
/// order at the resting order's price. Orders are accepted only from traders
/// with an open customer assignment, and a fill consumes the assignment.
///
/// With `multi_unit` off every order has quantity 1. With it on, the incoming
/// order walks the opposite side while it still crosses, and residual quantity
/// rests.
class OrderBook {
public:
    explicit OrderBook(PriceBounds bounds, bool multi_unit = false);

    /// Authorizes `trader` to quote for `quantity` units, replacing any earlier
    /// assignment and cancelling its resting order.
    void open_assignment(TraderId trader, std::int64_t quantity = 1);
    /// Withdraws the assignment and any resting order. Returns whether one existed.
    bool close_assignment(TraderId trader);
    bool has_assignment(TraderId trader) const;
    std::int64_t assignment_remaining(TraderId trader) const;

    std::vector<MarketEvent> submit(const Order& order);
    bool cancel(TraderId trader);

    BestPrices best_prices() const;
    std::optional<Price> best_bid() const;
    std::optional<Price> best_ask() const;

    bool crossed() const;
    std::size_t depth(Side side) const;
    std::optional<Order> order_of(TraderId trader) const;
    /// Resting orders of one side in priority order.
    std::vector<Order> orders(Side side) const;

    const std::vector<Trade>& tape() const noexcept { return tape_; }
    const PriceBounds& bounds() const noexcept { return bounds_; }
    bool multi_unit() const noexcept { return multi_unit_; }

private:
    // Bids are keyed by negated price so that begin() is the best order on
    // both sides; the sequence number breaks ties in arrival order.
    using Key = std::pair<std::int64_t, std::uint64_t>;
    using SideBook = std::map<Key, Order>;

    struct Locator {
        Side side;
        Key key;
    };

    SideBook& book(Side side) { return side == Side::Bid ? bids_ : asks_; }
    const SideBook& book(Side side) const { return side == Side::Bid ? bids_ : asks_; }
    Key key_for(Side side, Price price);
    void remove_resting(TraderId trader);
    void consume(TraderId trader, std::int64_t quantity);

    PriceBounds bounds_;
    bool multi_unit_;
    SideBook bids_;
    SideBook asks_;
    std::map<TraderId, Locator> index_;
    std::map<TraderId, std::int64_t> assignments_;
    std::vector<Trade> tape_;
    std::uint64_t next_seq_ = 0;
    Time last_time_ = 0;
};

inline BestPrices best_prices(const OrderBook& book) { return book.best_prices(); }

/// CSV with header `time,price,buyer_id,seller_id,qty`.
void write_tape_csv(std::ostream& out, std::span<const Trade> tape);

}  // namespace cda::lob
