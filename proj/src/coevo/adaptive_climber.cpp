#include "cda/coevo/adaptive_climber.hpp"

#include <algorithm>
#include <stdexcept>

namespace cda::coevo {

double mutate_strategy(double p, double width, Rng& rng)
{
    if (width < 0.0) throw std::invalid_argument("mutation width must be >= 0");
    if (width == 0.0) return std::clamp(p, -1.0, 1.0);
    const double step = (2.0 * uniform01(rng) - 1.0) * width;
    return std::clamp(p + step, -1.0, 1.0);
}

void AdaptiveClimberParams::validate() const
{
    if (k < 2) throw std::invalid_argument("adaptive climber needs k >= 2");
    if (trades_per_eval < 1) throw std::invalid_argument("trades_per_eval must be >= 1");
    if (!(mutation_width >= 0.0)) throw std::invalid_argument("mutation_width must be >= 0");
}

AdaptiveClimber::AdaptiveClimber(double initial, const AdaptiveClimberParams& params, Rng& rng) : params_(params)
{
    params_.validate();
    if (!(initial >= -1.0 && initial <= 1.0)) throw std::invalid_argument("strategy value must lie in [-1, +1]");
    const auto k = static_cast<std::size_t>(params_.k);
    slots_.assign(k, initial);
    for (std::size_t i = 1; i < k; ++i) slots_[i] = mutate_strategy(initial, params_.mutation_width, rng);
    profits_.assign(k, 0.0);
    counts_.assign(k, 0);
}

bool AdaptiveClimber::evaluation_complete() const noexcept
{
    return std::all_of(counts_.begin(), counts_.end(), [&](int c) { return c >= params_.trades_per_eval; });
}

std::optional<Adoption> AdaptiveClimber::observe_trade(std::size_t slot, double profit, Rng& rng)
{
    if (slot != active_) throw std::logic_error("trade credited to an inactive strategy slot");
    profits_[active_] += profit;
    ++counts_[active_];
    if (counts_[active_] < params_.trades_per_eval) return std::nullopt;
    if (active_ + 1 < slots_.size()) {
        ++active_;
        return std::nullopt;
    }
    return adopt(rng);
}

Adoption AdaptiveClimber::adopt(Rng& rng)
{
    if (!evaluation_complete()) throw std::logic_error("adopt called before every strategy finished its window");

    std::size_t winner = 0;
    for (std::size_t i = 1; i < slots_.size(); ++i) {
        if (profits_[i] > profits_[winner]) winner = i;
    }
    Adoption out{slots_.front(), slots_[winner], winner, winner != 0};
    slots_.front() = slots_[winner];
    for (std::size_t i = 1; i < slots_.size(); ++i) slots_[i] = mutate_strategy(slots_.front(), params_.mutation_width, rng);
    std::fill(profits_.begin(), profits_.end(), 0.0);
    std::fill(counts_.begin(), counts_.end(), 0);
    active_ = 0;
    ++adoptions_;
    return out;
}

}  // namespace cda::coevo
