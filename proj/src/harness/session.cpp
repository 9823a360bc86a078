#include "cda/harness/session.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

namespace cda::harness {

namespace {

// Stream tags for derive_seed.
constexpr std::uint64_t kPollStream = 1;
constexpr std::uint64_t kAssignStream = 2;
constexpr std::uint64_t kTraderStream = 3;
constexpr std::uint64_t kClimberStream = 4;

/// Set of indices supporting O(1) insert, erase and uniform draw.
class ActiveSet {
public:
    explicit ActiveSet(std::size_t capacity) : where_(capacity, kAbsent) {}

    void insert(std::size_t i)
    {
        if (where_[i] != kAbsent) return;
        where_[i] = items_.size();
        items_.push_back(i);
    }

    void erase(std::size_t i)
    {
        if (where_[i] == kAbsent) return;
        const std::size_t slot = where_[i];
        items_[slot] = items_.back();
        where_[items_[slot]] = slot;
        items_.pop_back();
        where_[i] = kAbsent;
    }

    bool empty() const noexcept { return items_.empty(); }
    std::size_t draw(Rng& rng) const
    {
        std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
        return items_[pick(rng)];
    }

private:
    static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
    std::vector<std::size_t> items_;
    std::vector<std::size_t> where_;
};

struct Seat {
    traders::TraderState state;
    Rng rng;
    std::optional<coevo::AdaptiveClimber> climber;
    Rng climber_rng;
    double initial_s = 0.0;
};

}  // namespace

std::string_view to_string(AssignmentMode mode) noexcept { return mode == AssignmentMode::FixedStep ? "fixed" : "uniform"; }

void SupplyDemandSchedule::validate(PriceBounds bounds) const
{
    if (p_min > p_max) throw ConfigError("schedule p_min exceeds p_max");
    if (!bounds.contains(p_min) || !bounds.contains(p_max)) throw ConfigError("schedule limits lie outside the system price bounds");
    if (interval < 1) throw ConfigError("schedule interval must be >= 1");
}

void SessionConfig::validate() const
{
    try {
        bounds.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (duration < 0) throw ConfigError("duration must be >= 0");
    if (log_interval < 1) throw ConfigError("log_interval must be >= 1");
    if (shave < 1) throw ConfigError("shave must be >= 1");
    if (roster.size() < 2) throw ConfigError("roster needs at least two traders");

    std::set<TraderId> ids;
    bool has_buyer = false;
    bool has_seller = false;
    for (const auto& entry : roster) {
        if (!ids.insert(entry.id).second) throw ConfigError("duplicate trader id " + std::to_string(entry.id));
        (entry.side == Side::Bid ? has_buyer : has_seller) = true;
        if (entry.adaptive) {
            if (!std::holds_alternative<traders::Przi>(entry.strategy)) {
                throw ConfigError("trader " + std::to_string(entry.id) + ": only PRZI traders can adapt");
            }
            try {
                entry.adaptive->validate();
            } catch (const std::invalid_argument& e) {
                throw ConfigError("trader " + std::to_string(entry.id) + ": " + e.what());
            }
        }
        if (const auto* p = std::get_if<traders::Przi>(&entry.strategy); p && !(p->s >= -1.0 && p->s <= 1.0)) {
            throw ConfigError("trader " + std::to_string(entry.id) + ": PRZI value outside [-1, +1]");
        }
    }
    if (!has_buyer || !has_seller) throw ConfigError("roster needs at least one buyer and one seller");

    bool bid_schedule = false;
    bool ask_schedule = false;
    for (const auto& schedule : schedules) {
        schedule.validate(bounds);
        bool& seen = schedule.side == Side::Bid ? bid_schedule : ask_schedule;
        if (seen) throw ConfigError("more than one schedule for the " + std::string(cda::to_string(schedule.side)) + " side");
        seen = true;
    }
    if (!bid_schedule || !ask_schedule) throw ConfigError("every side of the roster needs a schedule");
}

std::int64_t SessionResult::total_profit() const noexcept
{
    std::int64_t total = 0;
    for (const auto& t : traders) total += t.profit;
    return total;
}

std::int64_t SessionResult::profit_of(TraderId id) const
{
    for (const auto& t : traders) {
        if (t.id == id) return t.profit;
    }
    throw std::out_of_range("unknown trader id " + std::to_string(id));
}

std::vector<Assignment> assign_customer_orders(const SupplyDemandSchedule& schedule, std::span<const TraderId> roster, Time t,
                                               Rng& rng)
{
    std::vector<Assignment> out;
    out.reserve(roster.size());
    const std::int64_t lo = schedule.p_min.ticks;
    const std::int64_t hi = schedule.p_max.ticks;
    std::uniform_int_distribution<std::int64_t> draw(lo, hi);
    for (std::size_t i = 0; i < roster.size(); ++i) {
        Price limit{lo};
        if (schedule.mode == AssignmentMode::Uniform) {
            limit = Price{draw(rng)};
        } else if (roster.size() > 1) {
            const auto n = static_cast<std::int64_t>(roster.size()) - 1;
            const auto step_num = (hi - lo) * static_cast<std::int64_t>(i);
            // Round to nearest so both ends of the range are hit exactly.
            limit = Price{lo + (2 * step_num + n) / (2 * n)};
        }
        out.push_back(Assignment{roster[i], traders::CustomerOrder{schedule.side, limit, t}});
    }
    return out;
}

SessionResult run_session(const SessionConfig& cfg)
{
    cfg.validate();

    lob::OrderBook book(cfg.bounds, cfg.multi_unit);
    Rng poll_rng = make_rng(cfg.seed, {cfg.session_index, kPollStream});
    const traders::QuoteOptions quote_options{cfg.shave, cfg.stgp_mapping};

    std::vector<Seat> seats;
    seats.reserve(cfg.roster.size());
    std::map<TraderId, std::size_t> seat_of;
    std::vector<std::size_t> adaptive_seats;
    for (const auto& entry : cfg.roster) {
        Seat seat{traders::TraderState{entry.id, entry.side, entry.strategy, std::nullopt, {}, 0},
                  make_rng(cfg.seed, {cfg.session_index, kTraderStream, entry.id}), std::nullopt,
                  make_rng(cfg.seed, {cfg.session_index, kClimberStream, entry.id}), 0.0};
        if (entry.adaptive) {
            seat.initial_s = std::get<traders::Przi>(entry.strategy).s;
            seat.climber.emplace(seat.initial_s, *entry.adaptive, seat.climber_rng);
            adaptive_seats.push_back(seats.size());
        }
        seat_of[entry.id] = seats.size();
        seats.push_back(std::move(seat));
    }

    std::vector<std::pair<SupplyDemandSchedule, std::vector<TraderId>>> sweeps;
    std::vector<Rng> sweep_rngs;
    for (const auto& schedule : cfg.schedules) {
        std::vector<TraderId> ids;
        for (const auto& entry : cfg.roster) {
            if (entry.side == schedule.side) ids.push_back(entry.id);
        }
        sweep_rngs.push_back(make_rng(cfg.seed, {cfg.session_index, kAssignStream, static_cast<std::uint64_t>(schedule.side)}));
        sweeps.emplace_back(schedule, std::move(ids));
    }
    // Bid side first so that assignment order does not depend on config order.
    std::vector<std::size_t> sweep_order(sweeps.size());
    for (std::size_t i = 0; i < sweeps.size(); ++i) sweep_order[i] = i;
    std::sort(sweep_order.begin(), sweep_order.end(),
              [&](std::size_t a, std::size_t b) { return sweeps[a].first.side < sweeps[b].first.side; });

    SessionResult result;
    result.strategy_log = analysis::StateSeries(adaptive_seats.size(), cfg.log_interval);
    ActiveSet active(seats.size());

    auto credit = [&](std::size_t idx, const lob::Trade& trade) {
        Seat& seat = seats[idx];
        const Price limit = seat.state.current->limit;
        const std::size_t slot = seat.climber ? seat.climber->active_slot() : 0;
        seat.state.record_fill(trade);
        if (seat.climber) {
            const double delta = static_cast<double>(trade_profit(seat.state.side, limit, trade.price) * trade.quantity);
            if (seat.climber->observe_trade(slot, delta, seat.climber_rng)) ++result.counts.adoptions;
        }
        if (!book.has_assignment(seat.state.id)) {
            seat.state.current.reset();
            active.erase(idx);
        }
        return limit;
    };

    for (Time t = 0; t < cfg.duration; ++t) {
        for (std::size_t s : sweep_order) {
            const auto& [schedule, ids] = sweeps[s];
            if (t % schedule.interval != 0) continue;
            for (const auto& a : assign_customer_orders(schedule, ids, t, sweep_rngs[s])) {
                const std::size_t idx = seat_of.at(a.trader);
                if (book.order_of(a.trader)) ++result.counts.cancelled;
                book.open_assignment(a.trader);
                seats[idx].state.current = a.order;
                active.insert(idx);
                result.assignments.push_back(a);
                ++result.counts.assignments;
            }
        }

        if (!active.empty()) {
            const std::size_t idx = active.draw(poll_rng);
            Seat& seat = seats[idx];
            const traders::CustomerOrder co = *seat.state.current;
            const traders::StrategySpec live =
                seat.climber ? traders::StrategySpec{traders::Przi{seat.climber->active_strategy()}} : seat.state.strategy;
            const Price price = traders::quote(live, co, book.best_prices(), cfg.bounds, seat.rng, quote_options);
            ++result.counts.quotes;

            const auto events = book.submit(lob::Order{seat.state.id, co.side, price, 1, t});
            for (const auto& ev : events) {
                if (std::holds_alternative<lob::OrderRested>(ev)) {
                    ++result.counts.rested;
                } else if (std::holds_alternative<lob::OrderReplaced>(ev)) {
                    ++result.counts.replaced;
                } else {
                    const auto& trade = std::get<lob::TradeExecuted>(ev).trade;
                    ++result.counts.trades;
                    const Price buyer_limit = credit(seat_of.at(trade.buyer), trade);
                    const Price seller_limit = credit(seat_of.at(trade.seller), trade);
                    result.fills.push_back(Fill{trade, buyer_limit, seller_limit});
                }
            }
            if (book.crossed()) ++result.counts.crossed;
        }

        if (!adaptive_seats.empty() && t % cfg.log_interval == 0) {
            std::vector<double> state;
            state.reserve(adaptive_seats.size());
            for (std::size_t idx : adaptive_seats) state.push_back(seats[idx].climber->prod());
            result.strategy_log.push(t, std::move(state));
        }
    }

    result.tape = book.tape();
    result.traders.reserve(seats.size());
    for (const auto& seat : seats) {
        result.traders.push_back(
            TraderSummary{seat.state.id, seat.state.side, seat.state.strategy, seat.state.profit, seat.state.blotter.size()});
    }
    for (std::size_t idx : adaptive_seats) {
        const auto& seat = seats[idx];
        result.adaptive.push_back(
            AdaptiveSummary{seat.state.id, seat.initial_s, seat.climber->prod(), seat.climber->adoptions()});
    }
    return result;
}

EquilibriumSurplus equilibrium_surplus(std::span<const Price> buyer_limits, std::span<const Price> seller_limits)
{
    std::vector<Price> buyers(buyer_limits.begin(), buyer_limits.end());
    std::vector<Price> sellers(seller_limits.begin(), seller_limits.end());
    std::sort(buyers.begin(), buyers.end(), std::greater<>{});
    std::sort(sellers.begin(), sellers.end());

    EquilibriumSurplus out;
    const std::size_t n = std::min(buyers.size(), sellers.size());
    while (out.matched < n && buyers[out.matched] >= sellers[out.matched]) {
        out.surplus += buyers[out.matched] - sellers[out.matched];
        ++out.matched;
    }
    if (out.matched == 0) return out;

    // Bounded by the marginal matched pair and the first extramarginal units.
    const std::size_t q = out.matched - 1;
    Price lo = sellers[q];
    Price hi = buyers[q];
    if (out.matched < buyers.size()) lo = std::max(lo, buyers[out.matched]);
    if (out.matched < sellers.size()) hi = std::min(hi, sellers[out.matched]);
    out.price_range = std::make_pair(lo, hi);
    return out;
}

double allocative_efficiency(const SessionResult& result)
{
    std::vector<Price> buyers;
    std::vector<Price> sellers;
    for (const auto& a : result.assignments) {
        (a.order.side == Side::Bid ? buyers : sellers).push_back(a.order.limit);
    }
    const auto best = equilibrium_surplus(buyers, sellers);
    if (best.surplus == 0) return 0.0;
    return static_cast<double>(result.total_profit()) / static_cast<double>(best.surplus);
}

}  // namespace cda::harness
