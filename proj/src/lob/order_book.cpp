#include "cda/lob/order_book.hpp"

#include <ostream>
#include <string>

namespace cda::lob {

OrderBook::OrderBook(PriceBounds bounds, bool multi_unit) : bounds_(bounds), multi_unit_(multi_unit)
{
    bounds_.validate();
}

void OrderBook::open_assignment(TraderId trader, std::int64_t quantity)
{
    if (quantity < 1) throw std::invalid_argument("assignment quantity must be >= 1");
    if (!multi_unit_ && quantity != 1) throw std::invalid_argument("multi-unit assignments are disabled");
    remove_resting(trader);
    assignments_[trader] = quantity;
}

bool OrderBook::close_assignment(TraderId trader)
{
    remove_resting(trader);
    return assignments_.erase(trader) > 0;
}

bool OrderBook::has_assignment(TraderId trader) const { return assignments_.contains(trader); }

std::int64_t OrderBook::assignment_remaining(TraderId trader) const
{
    auto it = assignments_.find(trader);
    return it == assignments_.end() ? 0 : it->second;
}

OrderBook::Key OrderBook::key_for(Side side, Price price)
{
    return {side == Side::Bid ? -price.ticks : price.ticks, next_seq_++};
}

void OrderBook::remove_resting(TraderId trader)
{
    auto it = index_.find(trader);
    if (it == index_.end()) return;
    book(it->second.side).erase(it->second.key);
    index_.erase(it);
}

void OrderBook::consume(TraderId trader, std::int64_t quantity)
{
    auto it = assignments_.find(trader);
    if (it == assignments_.end()) return;
    it->second -= quantity;
    if (it->second <= 0) assignments_.erase(it);
}

std::vector<MarketEvent> OrderBook::submit(const Order& order)
{
    if (!has_assignment(order.trader)) {
        throw OrderRejected("trader " + std::to_string(order.trader) + " has no active customer assignment");
    }
    if (!bounds_.contains(order.price)) {
        throw OrderRejected("price " + std::to_string(order.price.ticks) + " outside system bounds");
    }
    if (order.quantity < 1) throw OrderRejected("quantity must be >= 1");
    if (!multi_unit_ && order.quantity != 1) throw OrderRejected("multi-unit orders are disabled");
    if (order.quantity > assignment_remaining(order.trader)) {
        throw OrderRejected("quantity exceeds the trader's customer assignment");
    }
    if (order.submit_time < last_time_) throw OrderRejected("submit_time runs backwards");
    last_time_ = order.submit_time;

    std::vector<MarketEvent> events;
    if (auto prior = order_of(order.trader)) {
        remove_resting(order.trader);
        events.emplace_back(OrderReplaced{*prior});
    }

    const Side contra = opposite(order.side);
    std::int64_t remaining = order.quantity;
    auto& opposite_book = book(contra);
    while (remaining > 0 && !opposite_book.empty()) {
        auto best = opposite_book.begin();
        Order& resting = best->second;
        const bool crosses = order.side == Side::Bid ? order.price >= resting.price : order.price <= resting.price;
        if (!crosses) break;

        const std::int64_t qty = std::min(remaining, resting.quantity);
        Trade trade{order.submit_time, resting.price, 0, 0, qty};
        trade.buyer = order.side == Side::Bid ? order.trader : resting.trader;
        trade.seller = order.side == Side::Bid ? resting.trader : order.trader;
        tape_.push_back(trade);
        events.emplace_back(TradeExecuted{trade});

        remaining -= qty;
        resting.quantity -= qty;
        const TraderId resting_trader = resting.trader;
        if (resting.quantity == 0) {
            index_.erase(resting_trader);
            opposite_book.erase(best);
        }
        consume(resting_trader, qty);
        consume(order.trader, qty);
    }

    if (remaining > 0) {
        Order rest = order;
        rest.quantity = remaining;
        const Key key = key_for(order.side, order.price);
        book(order.side).emplace(key, rest);
        index_[order.trader] = Locator{order.side, key};
        events.emplace_back(OrderRested{rest});
    }
    return events;
}

bool OrderBook::cancel(TraderId trader)
{
    if (!index_.contains(trader)) return false;
    remove_resting(trader);
    return true;
}

std::optional<Price> OrderBook::best_bid() const
{
    if (bids_.empty()) return std::nullopt;
    return bids_.begin()->second.price;
}

std::optional<Price> OrderBook::best_ask() const
{
    if (asks_.empty()) return std::nullopt;
    return asks_.begin()->second.price;
}

BestPrices OrderBook::best_prices() const { return {best_bid(), best_ask()}; }

bool OrderBook::crossed() const
{
    auto bid = best_bid();
    auto ask = best_ask();
    return bid && ask && *bid >= *ask;
}

std::size_t OrderBook::depth(Side side) const { return book(side).size(); }

std::optional<Order> OrderBook::order_of(TraderId trader) const
{
    auto it = index_.find(trader);
    if (it == index_.end()) return std::nullopt;
    return book(it->second.side).at(it->second.key);
}

std::vector<Order> OrderBook::orders(Side side) const
{
    std::vector<Order> out;
    out.reserve(book(side).size());
    for (const auto& [key, order] : book(side)) out.push_back(order);
    return out;
}

void write_tape_csv(std::ostream& out, std::span<const Trade> tape)
{
    out << "time,price,buyer_id,seller_id,qty\n";
    for (const auto& t : tape) {
        out << t.time << ',' << t.price.ticks << ',' << t.buyer << ',' << t.seller << ',' << t.quantity << '\n';
    }
}

}  // namespace cda::lob
