#pragma once

#include <optional>
#include <vector>

#include "cda/lob/order_book.hpp"
#include "cda/rng.hpp"
#include "cda/types.hpp"

namespace cda::traders {

/// A private instruction to buy or sell one unit at no worse than `limit`.
struct CustomerOrder {
    Side side = Side::Bid;
    Price limit{1};
    Time issue_time = 0;

    friend bool operator==(const CustomerOrder&, const CustomerOrder&) = default;
};

/// Zero-intelligence-constrained: uniform over [sys_min, limit] for a buyer,
/// [limit, sys_max] for a seller.
Price zic_quote(const CustomerOrder& co, PriceBounds bounds, Rng& rng);

/// Giveaway: quotes the limit price.
Price gvwy_quote(const CustomerOrder& co) noexcept;

/// Shaver: improves the best same-side price by `shave` ticks, never past the
/// limit. An empty same side quotes the own-side stub (sys_min / sys_max).
Price shvr_quote(const CustomerOrder& co, const lob::BestPrices& best, PriceBounds bounds, int shave = 1);

/// Probability mass over a contiguous price range.
class PrziPmf {
public:
    PrziPmf(Price lo, double s, std::vector<double> mass);

    Price lo() const noexcept { return lo_; }
    Price hi() const noexcept { return Price{lo_.ticks + static_cast<std::int64_t>(mass_.size()) - 1}; }
    double s() const noexcept { return s_; }
    const std::vector<double>& mass() const noexcept { return mass_; }
    std::size_t support_size() const noexcept { return mass_.size(); }

    double probability(Price p) const noexcept;
    double mean() const noexcept;
    /// Inverse-CDF draw.
    Price sample(Rng& rng) const;

private:
    Price lo_;
    double s_;
    std::vector<double> mass_;
    std::vector<double> cdf_;
};

/// Strategy parameter s at or beyond which the PMF snaps to its degenerate endpoint.
inline constexpr double kPrziSnap = 0.995;
/// Keeps the shape exponent finite as |s| approaches 1.
inline constexpr double kPrziThetaEps = 0.01;

/// Shape exponent theta(s) = tan(pi * s * (1 - eps) / 2).
double przi_theta(double s) noexcept;

/// PRZI quote distribution.
///
/// Support runs from the SHVR anchor to the limit (collapsing to the limit
/// when the anchor is already past it). Mass is proportional to
/// exp(theta(s) * u) where u maps the support linearly onto [0, 1] with u = 1
/// at the limit. s = 0 is exactly uniform; s = +1 is GVWY, s = -1 is SHVR.
/// Throws std::invalid_argument for s outside [-1, +1].
PrziPmf przi_pmf(double s, const CustomerOrder& co, const lob::BestPrices& best, PriceBounds bounds, int shave = 1);

inline Price przi_quote(const PrziPmf& pmf, Rng& rng) { return pmf.sample(rng); }

/// True when `quote` would not lose money against `co`.
constexpr bool loss_avoiding(const CustomerOrder& co, Price quote) noexcept
{
    return co.side == Side::Bid ? quote <= co.limit : quote >= co.limit;
}

}  // namespace cda::traders
