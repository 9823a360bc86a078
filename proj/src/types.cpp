#include "cda/types.hpp"

#include <string>

namespace cda {

std::string_view to_string(Side side) noexcept { return side == Side::Bid ? "bid" : "ask"; }

Side parse_side(std::string_view text)
{
    if (text == "bid" || text == "buy" || text == "Bid") return Side::Bid;
    if (text == "ask" || text == "sell" || text == "Ask") return Side::Ask;
    throw std::invalid_argument("unknown side '" + std::string(text) + "'");
}

void PriceBounds::validate() const
{
    if (min.ticks < 1) throw std::invalid_argument("sys_min must be >= 1");
    if (max <= min) throw std::invalid_argument("sys_max must exceed sys_min");
}

}  // namespace cda
