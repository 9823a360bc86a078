#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cda {

using TraderId = std::uint32_t;

/// Simulation clock, in discrete time units.
using Time = std::int64_t;

enum class Side : std::uint8_t { Bid, Ask };

constexpr Side opposite(Side side) noexcept { return side == Side::Bid ? Side::Ask : Side::Bid; }

std::string_view to_string(Side side) noexcept;
Side parse_side(std::string_view text);

/// Integer price in ticks. Tick size is 1.
struct Price {
    std::int64_t ticks = 0;

    constexpr Price() = default;
    constexpr explicit Price(std::int64_t t) noexcept : ticks(t) {}

    friend constexpr auto operator<=>(Price, Price) = default;
    friend constexpr Price operator+(Price p, std::int64_t d) noexcept { return Price{p.ticks + d}; }
    friend constexpr Price operator-(Price p, std::int64_t d) noexcept { return Price{p.ticks - d}; }
    friend constexpr std::int64_t operator-(Price a, Price b) noexcept { return a.ticks - b.ticks; }
};

/// System-wide price bounds [min, max].
struct PriceBounds {
    Price min{1};
    Price max{500};

    constexpr bool contains(Price p) const noexcept { return p >= min && p <= max; }
    constexpr Price clamp(Price p) const noexcept { return std::clamp(p, min, max); }

    /// Throws std::invalid_argument unless 1 <= min < max.
    void validate() const;
};

/// Surplus a trader earns filling a customer order with `limit` at `price`.
constexpr std::int64_t trade_profit(Side side, Price limit, Price price) noexcept
{
    return side == Side::Bid ? limit - price : price - limit;
}

}  // namespace cda
