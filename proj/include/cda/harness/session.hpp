#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cda/analysis/recurrence.hpp"
#include "cda/coevo/adaptive_climber.hpp"
#include "cda/lob/order_book.hpp"
#include "cda/rng.hpp"
#include "cda/traders/strategy_spec.hpp"

namespace cda::harness {

/// Raised for invalid session or experiment configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class AssignmentMode : std::uint8_t {
    FixedStep,  ///< evenly spaced limits across the roster, ascending in roster order
    Uniform,    ///< independent uniform integer limits
};

std::string_view to_string(AssignmentMode mode) noexcept;

/// Where and how often one side of the market receives customer orders.
struct SupplyDemandSchedule {
    Side side = Side::Bid;
    Price p_min{1};
    Price p_max{500};
    AssignmentMode mode = AssignmentMode::Uniform;
    /// Time units between assignment sweeps; the first sweep is at t = 0.
    Time interval = 1;

    void validate(PriceBounds bounds) const;
};

struct RosterEntry {
    TraderId id = 0;
    Side side = Side::Bid;
    traders::StrategySpec strategy;
    /// Present for PRZI traders that adapt their strategy value.
    std::optional<coevo::AdaptiveClimberParams> adaptive;
};

struct SessionConfig {
    Time duration = 0;
    std::vector<RosterEntry> roster;
    std::vector<SupplyDemandSchedule> schedules;
    PriceBounds bounds{};
    std::uint64_t seed = 0;
    /// Distinguishes sessions that share a master seed.
    std::uint64_t session_index = 0;
    /// Strategy-log sampling interval.
    Time log_interval = 100;
    int shave = 1;
    stgp::QuoteMapping stgp_mapping = stgp::QuoteMapping::Direct;
    bool multi_unit = false;

    /// Throws ConfigError describing the first problem found.
    void validate() const;
};

struct Assignment {
    TraderId trader = 0;
    traders::CustomerOrder order;
};

/// A trade together with the limits it was filled against.
struct Fill {
    lob::Trade trade;
    Price buyer_limit;
    Price seller_limit;
};

struct TraderSummary {
    TraderId id = 0;
    Side side = Side::Bid;
    traders::StrategySpec strategy;
    std::int64_t profit = 0;
    std::size_t trades = 0;
};

struct AdaptiveSummary {
    TraderId id = 0;
    double initial = 0.0;
    double final_prod = 0.0;
    std::uint64_t adoptions = 0;
};

struct EventCounts {
    std::uint64_t quotes = 0;
    std::uint64_t rested = 0;
    std::uint64_t replaced = 0;
    std::uint64_t trades = 0;
    std::uint64_t assignments = 0;
    std::uint64_t cancelled = 0;
    std::uint64_t adoptions = 0;
    /// Steps that ended with best bid >= best ask; a correct book keeps this at 0.
    std::uint64_t crossed = 0;
};

struct SessionResult {
    std::vector<lob::Trade> tape;
    std::vector<Fill> fills;
    std::vector<TraderSummary> traders;  // roster order
    std::vector<AdaptiveSummary> adaptive;
    /// Prod strategy values of the adaptive traders, one column per trader.
    analysis::StateSeries strategy_log;
    std::vector<Assignment> assignments;
    EventCounts counts;

    std::int64_t total_profit() const noexcept;
    std::int64_t profit_of(TraderId id) const;
};

/// Fresh customer orders for every trader in `roster` (ids on the schedule's side).
std::vector<Assignment> assign_customer_orders(const SupplyDemandSchedule& schedule, std::span<const TraderId> roster, Time t,
                                               Rng& rng);

/// Runs one market session. Deterministic in the config (including its seed).
SessionResult run_session(const SessionConfig& cfg);

struct EquilibriumSurplus {
    std::int64_t surplus = 0;
    std::size_t matched = 0;
    /// Competitive equilibrium price range; absent when no pair is matched.
    std::optional<std::pair<Price, Price>> price_range;
};

/// Maximum total surplus: buyers sorted descending, sellers ascending, matched
/// greedily while the buyer limit is at least the seller limit.
EquilibriumSurplus equilibrium_surplus(std::span<const Price> buyer_limits, std::span<const Price> seller_limits);

/// Realized surplus over the maximum for the limits in `assignments`.
double allocative_efficiency(const SessionResult& result);

}  // namespace cda::harness
