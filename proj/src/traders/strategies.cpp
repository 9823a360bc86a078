#include "cda/traders/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cda::traders {

Price zic_quote(const CustomerOrder& co, PriceBounds bounds, Rng& rng)
{
    const Price lo = co.side == Side::Bid ? bounds.min : co.limit;
    const Price hi = co.side == Side::Bid ? co.limit : bounds.max;
    std::uniform_int_distribution<std::int64_t> draw(lo.ticks, hi.ticks);
    return Price{draw(rng)};
}

Price gvwy_quote(const CustomerOrder& co) noexcept { return co.limit; }

Price shvr_quote(const CustomerOrder& co, const lob::BestPrices& best, PriceBounds bounds, int shave)
{
    if (shave < 1) throw std::invalid_argument("shave must be >= 1");
    const auto same = best.same_side(co.side);
    if (co.side == Side::Bid) {
        if (!same) return bounds.min;
        return std::min(*same + shave, co.limit);
    }
    if (!same) return bounds.max;
    return std::max(*same - shave, co.limit);
}

PrziPmf::PrziPmf(Price lo, double s, std::vector<double> mass) : lo_(lo), s_(s), mass_(std::move(mass))
{
    if (mass_.empty()) throw std::invalid_argument("PMF support is empty");
    cdf_.reserve(mass_.size());
    double running = 0.0;
    for (double m : mass_) {
        running += m;
        cdf_.push_back(running);
    }
}

double PrziPmf::probability(Price p) const noexcept
{
    if (p < lo_ || p > hi()) return 0.0;
    return mass_[static_cast<std::size_t>(p - lo_)];
}

double PrziPmf::mean() const noexcept
{
    double m = 0.0;
    for (std::size_t i = 0; i < mass_.size(); ++i) m += mass_[i] * static_cast<double>(lo_.ticks + static_cast<std::int64_t>(i));
    return m;
}

Price PrziPmf::sample(Rng& rng) const
{
    const double u = uniform01(rng) * cdf_.back();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), mass_.size() - 1);
    return Price{lo_.ticks + static_cast<std::int64_t>(idx)};
}

double przi_theta(double s) noexcept { return std::tan(std::numbers::pi * s * (1.0 - kPrziThetaEps) / 2.0); }

PrziPmf przi_pmf(double s, const CustomerOrder& co, const lob::BestPrices& best, PriceBounds bounds, int shave)
{
    if (!(s >= -1.0 && s <= 1.0)) throw std::invalid_argument("PRZI strategy value must lie in [-1, +1]");

    const Price anchor = shvr_quote(co, best, bounds, shave);
    const Price lo = co.side == Side::Bid ? std::min(anchor, co.limit) : co.limit;
    const Price hi = co.side == Side::Bid ? co.limit : std::max(anchor, co.limit);
    const auto n = static_cast<std::size_t>(hi - lo + 1);

    std::vector<double> mass(n, 0.0);
    if (n == 1) {
        mass[0] = 1.0;
        return PrziPmf(lo, s, std::move(mass));
    }

    // Index of the GVWY endpoint (the limit) within the support.
    const std::size_t limit_at = co.side == Side::Bid ? n - 1 : 0;
    const std::size_t anchor_at = n - 1 - limit_at;

    if (s >= kPrziSnap) {
        mass[limit_at] = 1.0;
        return PrziPmf(lo, s, std::move(mass));
    }
    if (s <= -kPrziSnap) {
        mass[anchor_at] = 1.0;
        return PrziPmf(lo, s, std::move(mass));
    }
    if (s == 0.0) {
        std::fill(mass.begin(), mass.end(), 1.0 / static_cast<double>(n));
        return PrziPmf(lo, s, std::move(mass));
    }

    const double theta = przi_theta(s);
    const double span = static_cast<double>(n - 1);
    // Subtract the largest exponent before exponentiating.
    const double peak = theta > 0.0 ? theta : 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double steps_from_anchor = co.side == Side::Bid ? static_cast<double>(i) : static_cast<double>(n - 1 - i);
        const double u = steps_from_anchor / span;
        mass[i] = std::exp(theta * u - peak);
        total += mass[i];
    }
    for (double& m : mass) m /= total;
    return PrziPmf(lo, s, std::move(mass));
}

}  // namespace cda::traders
