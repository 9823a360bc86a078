#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cda/rng.hpp"

namespace cda::coevo {

/// clip(p + U(-width, +width), -1, +1). A zero width returns p unchanged.
double mutate_strategy(double p, double width, Rng& rng);

struct AdaptiveClimberParams {
    /// Number of strategy slots: the prod strategy plus k-1 dev candidates.
    int k = 2;
    /// Trades each slot executes before it is scored.
    int trades_per_eval = 5;
    double mutation_width = 0.05;

    /// Throws std::invalid_argument when k < 2, trades_per_eval < 1 or width < 0.
    void validate() const;
};

/// Outcome of one scoring round.
struct Adoption {
    double previous_prod = 0.0;
    double new_prod = 0.0;
    std::size_t winner_slot = 0;
    bool replaced = false;
};

/// Prod/dev stochastic hill climber over PRZI strategy values.
///
/// Slot 0 holds the prod strategy P, slots 1..k-1 hold dev candidates. Slots
/// are traded in order, each for `trades_per_eval` trades. Once every slot has
/// been scored, the candidate with the strictly highest total profit becomes
/// the new P (P keeps its place on ties) and every dev slot is refilled with a
/// fresh mutant of P. With k = 2 this is the two-point Adaptive Climber.
class AdaptiveClimber {
public:
    AdaptiveClimber(double initial, const AdaptiveClimberParams& params, Rng& rng);

    double prod() const noexcept { return slots_.front(); }
    double active_strategy() const noexcept { return slots_[active_]; }
    std::size_t active_slot() const noexcept { return active_; }
    const std::vector<double>& slots() const noexcept { return slots_; }
    const std::vector<double>& profits() const noexcept { return profits_; }
    const std::vector<int>& trade_counts() const noexcept { return counts_; }
    const AdaptiveClimberParams& params() const noexcept { return params_; }
    bool evaluation_complete() const noexcept;
    std::uint64_t adoptions() const noexcept { return adoptions_; }

    /// Credits a trade made while `slot` was active. Advances to the next slot
    /// when this one has its full window, and adopts after the last slot.
    /// Throws std::logic_error when `slot` is not the active slot.
    std::optional<Adoption> observe_trade(std::size_t slot, double profit, Rng& rng);

    /// Picks the winner, reseeds the dev slots and resets all accumulators.
    /// Throws std::logic_error before every slot has completed its window.
    Adoption adopt(Rng& rng);

private:
    AdaptiveClimberParams params_;
    std::vector<double> slots_;
    std::vector<double> profits_;
    std::vector<int> counts_;
    std::size_t active_ = 0;
    std::uint64_t adoptions_ = 0;
};

}  // namespace cda::coevo
