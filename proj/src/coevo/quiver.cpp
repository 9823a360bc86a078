#include "cda/coevo/quiver.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <queue>
#include <thread>

namespace cda::coevo {

double QuiverField::max_magnitude() const noexcept
{
    double m = 0.0;
    for (const auto& p : points) m = std::max(m, p.magnitude);
    return m;
}

double grid_value(int i, int resolution) noexcept
{
    return -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(resolution - 1);
}

namespace {

struct AdaptivePair {
    std::size_t buyer;
    std::size_t seller;
};

AdaptivePair find_adaptive_pair(const harness::SessionConfig& cfg)
{
    std::optional<std::size_t> buyer;
    std::optional<std::size_t> seller;
    for (std::size_t i = 0; i < cfg.roster.size(); ++i) {
        const auto& entry = cfg.roster[i];
        if (!entry.adaptive) continue;
        auto& slot = entry.side == Side::Bid ? buyer : seller;
        if (slot) throw harness::ConfigError("quiver template needs exactly one adaptive buyer and one adaptive seller");
        slot = i;
    }
    if (!buyer || !seller) throw harness::ConfigError("quiver template needs exactly one adaptive buyer and one adaptive seller");
    return {*buyer, *seller};
}

QuiverPoint sample_point(const harness::SessionConfig& tmpl, AdaptivePair pair, int ib, int is, int grid_res, Time horizon,
                         int reps, std::uint64_t seed)
{
    QuiverPoint out;
    out.s_b = grid_value(ib, grid_res);
    out.s_s = grid_value(is, grid_res);
    out.reps = reps;
    const auto grid_index = static_cast<std::uint64_t>(is * grid_res + ib);

    harness::SessionConfig cfg = tmpl;
    cfg.duration = horizon;
    cfg.roster[pair.buyer].strategy = traders::Przi{out.s_b};
    cfg.roster[pair.seller].strategy = traders::Przi{out.s_s};
    const TraderId buyer_id = cfg.roster[pair.buyer].id;

    double sum_b = 0.0;
    double sum_s = 0.0;
    for (int r = 0; r < reps; ++r) {
        cfg.seed = derive_seed(seed, {grid_index, static_cast<std::uint64_t>(r)});
        cfg.session_index = 0;
        const auto result = harness::run_session(cfg);
        for (const auto& a : result.adaptive) {
            (a.id == buyer_id ? sum_b : sum_s) += a.final_prod - a.initial;
        }
    }
    out.d_sb = sum_b / reps;
    out.d_ss = sum_s / reps;
    out.magnitude = std::hypot(out.d_sb, out.d_ss);
    return out;
}

}  // namespace

QuiverField quiver_sample(const harness::SessionConfig& session_template, int grid_res, Time horizon, int reps,
                          std::uint64_t seed, unsigned threads)
{
    if (grid_res < 2) throw harness::ConfigError("quiver grid resolution must be >= 2");
    if (reps < 1) throw harness::ConfigError("quiver repetitions must be >= 1");
    if (horizon < 0) throw harness::ConfigError("quiver horizon must be >= 0");
    const AdaptivePair pair = find_adaptive_pair(session_template);
    {
        harness::SessionConfig probe = session_template;
        probe.duration = horizon;
        probe.validate();
    }

    QuiverField field;
    field.resolution = grid_res;
    const auto cells = static_cast<std::size_t>(grid_res) * static_cast<std::size_t>(grid_res);
    field.points.resize(cells);

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, cells));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t c = next++; c < cells; c = next++) {
            try {
                const int ib = static_cast<int>(c % static_cast<std::size_t>(grid_res));
                const int is = static_cast<int>(c / static_cast<std::size_t>(grid_res));
                field.points[c] = sample_point(session_template, pair, ib, is, grid_res, horizon, reps, seed);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return field;
}

void write_quiver_csv(std::ostream& out, const QuiverField& field)
{
    out << "s_b,s_s,d_sb,d_ss,magnitude,reps\n";
    const auto old_precision = out.precision(12);
    for (const auto& p : field.points) {
        const double ub = p.magnitude > 0.0 ? p.d_sb / p.magnitude : 0.0;
        const double us = p.magnitude > 0.0 ? p.d_ss / p.magnitude : 0.0;
        out << p.s_b << ',' << p.s_s << ',' << ub << ',' << us << ',' << p.magnitude << ',' << p.reps << '\n';
    }
    out.precision(old_precision);
}

std::vector<Attractor> detect_attractors(const QuiverField& field, const AttractorOptions& options)
{
    const int n = field.resolution;
    const double peak = field.max_magnitude();
    std::vector<Attractor> out;
    if (n < 2 || peak <= 0.0) return out;

    const auto index = [n](int ib, int is) { return static_cast<std::size_t>(is * n + ib); };
    std::vector<double> inflow_at(field.points.size(), 0.0);
    std::vector<char> sink(field.points.size(), 0);

    for (int is = 0; is < n; ++is) {
        for (int ib = 0; ib < n; ++ib) {
            const QuiverPoint& centre = field.at(ib, is);
            if (centre.magnitude >= options.slow_fraction * peak) continue;
            double cos_sum = 0.0;
            double strength = 0.0;
            int ring = 0;
            for (int dy = -options.radius; dy <= options.radius; ++dy) {
                for (int dx = -options.radius; dx <= options.radius; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int jb = ib + dx;
                    const int js = is + dy;
                    if (jb < 0 || js < 0 || jb >= n || js >= n) continue;
                    const QuiverPoint& p = field.at(jb, js);
                    ++ring;
                    strength += p.magnitude;
                    if (p.magnitude == 0.0) continue;
                    const double to_b = centre.s_b - p.s_b;
                    const double to_s = centre.s_s - p.s_s;
                    cos_sum += (p.d_sb * to_b + p.d_ss * to_s) / (p.magnitude * std::hypot(to_b, to_s));
                }
            }
            if (ring == 0) continue;
            const double inflow = cos_sum / ring;
            inflow_at[index(ib, is)] = inflow;
            if (inflow >= options.min_inflow && strength / ring >= options.min_ring_strength * peak) {
                sink[index(ib, is)] = 1;
            }
        }
    }

    std::vector<char> seen(field.points.size(), 0);
    for (std::size_t start = 0; start < field.points.size(); ++start) {
        if (!sink[start] || seen[start]) continue;
        Attractor a;
        std::queue<std::size_t> frontier;
        frontier.push(start);
        seen[start] = 1;
        while (!frontier.empty()) {
            const std::size_t c = frontier.front();
            frontier.pop();
            a.cells.push_back(c);
            const int ib = static_cast<int>(c) % n;
            const int is = static_cast<int>(c) / n;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int jb = ib + dx;
                    const int js = is + dy;
                    if (jb < 0 || js < 0 || jb >= n || js >= n) continue;
                    const std::size_t j = index(jb, js);
                    if (sink[j] && !seen[j]) {
                        seen[j] = 1;
                        frontier.push(j);
                    }
                }
            }
        }
        for (std::size_t c : a.cells) {
            a.s_b += field.points[c].s_b;
            a.s_s += field.points[c].s_s;
            a.inflow += inflow_at[c];
        }
        const auto count = static_cast<double>(a.cells.size());
        a.s_b /= count;
        a.s_s /= count;
        a.inflow /= count;
        out.push_back(std::move(a));
    }
    return out;
}

std::vector<std::size_t> low_drift_region(const QuiverField& field, int ib, int is, double fraction)
{
    const int n = field.resolution;
    const double limit = fraction * field.max_magnitude();
    std::vector<std::size_t> region;
    if (ib < 0 || is < 0 || ib >= n || is >= n) return region;
    if (!(field.at(ib, is).magnitude < limit)) return region;

    std::vector<char> seen(field.points.size(), 0);
    std::queue<std::pair<int, int>> frontier;
    frontier.emplace(ib, is);
    seen[static_cast<std::size_t>(is * n + ib)] = 1;
    while (!frontier.empty()) {
        const auto [b, s] = frontier.front();
        frontier.pop();
        region.push_back(static_cast<std::size_t>(s * n + b));
        constexpr int kSteps[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (const auto& step : kSteps) {
            const int jb = b + step[0];
            const int js = s + step[1];
            if (jb < 0 || js < 0 || jb >= n || js >= n) continue;
            const auto j = static_cast<std::size_t>(js * n + jb);
            if (seen[j] || !(field.points[j].magnitude < limit)) continue;
            seen[j] = 1;
            frontier.emplace(jb, js);
        }
    }
    return region;
}

}  // namespace cda::coevo
