// End-to-end acceptance checks. One PASS/FAIL line per criterion; the exit
// code is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cda/analysis/recurrence.hpp"
#include "cda/coevo/adaptive_climber.hpp"
#include "cda/coevo/quiver.hpp"
#include "cda/harness/config.hpp"
#include "cda/harness/session.hpp"
#include "cda/stgp/evolution.hpp"
#include "cda/traders/strategies.hpp"
#include "oracles/rqa_oracle.hpp"
#include "oracles/stats.hpp"

using namespace cda;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi)
{
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

// 1. PRZI endpoints -------------------------------------------------------

Outcome przi_endpoints()
{
    Rng rng(derive_seed(1, {1}));
    double worst_uniform = 0.0;
    int bad_endpoints = 0;
    for (int i = 0; i < 1000; ++i) {
        const PriceBounds bounds{Price{uniform_int(rng, 1, 20)}, Price{uniform_int(rng, 200, 600)}};
        const Side side = uniform01(rng) < 0.5 ? Side::Bid : Side::Ask;
        const traders::CustomerOrder co{side, Price{uniform_int(rng, bounds.min.ticks, bounds.max.ticks)}, 0};
        lob::BestPrices best;
        if (uniform01(rng) < 0.7) best.bid = Price{uniform_int(rng, bounds.min.ticks, bounds.max.ticks - 1)};
        if (uniform01(rng) < 0.7) {
            const std::int64_t floor = best.bid ? best.bid->ticks + 1 : bounds.min.ticks;
            best.ask = Price{uniform_int(rng, floor, bounds.max.ticks)};
        }

        const auto zero = traders::przi_pmf(0.0, co, best, bounds);
        const double u = 1.0 / static_cast<double>(zero.support_size());
        for (double m : zero.mass()) worst_uniform = std::max(worst_uniform, std::abs(m - u));

        const auto give = traders::przi_pmf(1.0, co, best, bounds);
        const auto shave = traders::przi_pmf(-1.0, co, best, bounds);
        if (give.probability(traders::gvwy_quote(co)) != 1.0) ++bad_endpoints;
        if (shave.probability(traders::shvr_quote(co, best, bounds)) != 1.0) ++bad_endpoints;
    }
    return {worst_uniform == 0.0 && bad_endpoints == 0,
            "max |pmf(0) - uniform| = " + fmt("%g", worst_uniform) + ", non-degenerate endpoints = " +
                std::to_string(bad_endpoints)};
}

// 2. Adaptive Climber on a frozen unimodal oracle --------------------------

Outcome climber_convergence()
{
    int converged = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        Rng rng(derive_seed(2, {seed}));
        const double optimum = -0.9 + 1.8 * uniform01(rng);
        const double start = -1.0 + 2.0 * uniform01(rng);
        // Per-trade profit peaks at the optimum and falls off quadratically.
        const auto f = [optimum](double s) { return 100.0 - 40.0 * (s - optimum) * (s - optimum); };
        coevo::AdaptiveClimber ac(start, coevo::AdaptiveClimberParams{}, rng);
        int rounds = 0;
        bool hit = std::abs(ac.prod() - optimum) <= 0.1;
        while (!hit && rounds < 500) {
            const std::size_t slot = ac.active_slot();
            if (ac.observe_trade(slot, f(ac.active_strategy()), rng)) {
                ++rounds;
                hit = std::abs(ac.prod() - optimum) <= 0.1;
            }
        }
        if (hit) ++converged;
    }
    return {converged >= 95, std::to_string(converged) + "/100 seeds within 0.1 in <= 500 adoption rounds"};
}

// 3. Quiver field ----------------------------------------------------------

Outcome quiver_field()
{
    harness::ExperimentConfig cfg;
    cfg.market = harness::default_market(harness::Experiment::Quiver);
    cfg.market.seed = 1;
    const auto& q = cfg.quiver;
    const int grid = std::max(q.grid, 21);
    const int reps = std::max(q.reps, 5);
    const auto field = coevo::quiver_sample(cfg.market, grid, q.horizon, reps, cfg.market.seed, q.threads);
    const auto attractors = coevo::detect_attractors(field);
    const int mid = grid / 2;
    const auto plateau = coevo::low_drift_region(field, mid, mid, 0.25);

    std::ostringstream d;
    d << grid << "x" << grid << " x" << reps << " reps, max drift " << fmt("%.3f", field.max_magnitude()) << "; attractors:";
    for (const auto& a : attractors) d << " (" << fmt("%.2f", a.s_b) << "," << fmt("%.2f", a.s_s) << ")";
    if (attractors.empty()) d << " none";
    d << "; origin plateau " << plateau.size() << " cells";
    const bool one_attractor = attractors.size() == 1 && attractors[0].s_b < 0.0 && attractors[0].s_s > 0.0;
    return {one_attractor && !plateau.empty(), d.str()};
}

// 4. RQA against the brute-force oracle ------------------------------------

Outcome rqa_oracle_equivalence()
{
    Rng rng(derive_seed(4, {}));
    int mismatches = 0;
    for (int i = 0; i < 100; ++i) {
        const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 30));
        const double density = uniform01(rng);
        std::vector<std::uint8_t> bits(n * n);
        for (auto& b : bits) b = uniform01(rng) < density ? 1 : 0;
        const auto theiler = static_cast<std::size_t>(uniform_int(rng, 0, 3));
        const auto l_min = static_cast<std::size_t>(uniform_int(rng, 2, 4));
        const auto v_min = static_cast<std::size_t>(uniform_int(rng, 2, 4));
        const auto m = analysis::matrix_from_bits(n, bits, theiler);
        const auto got = analysis::rqa_metrics(m, l_min, v_min);
        const auto want = oracle::rqa(m, l_min, v_min);
        if (got.rr != want.rr || got.det != want.det || got.lam != want.lam || got.l_mean != want.l_mean ||
            got.l_max != want.l_max || got.ent != want.ent) {
            ++mismatches;
        }
    }
    return {mismatches == 0, std::to_string(mismatches) + "/100 matrices differ from the oracle"};
}

// 5. Recurrence structure against shuffled surrogates ----------------------

Outcome recurrence_structure()
{
    harness::ExperimentConfig cfg;
    cfg.market = harness::default_market(harness::Experiment::Coevolve);
    cfg.market.seed = 1;
    std::size_t adaptive = 0;
    for (const auto& e : cfg.market.roster) adaptive += e.adaptive ? 1 : 0;

    const auto result = harness::run_session(cfg.market);
    const auto& c = cfg.coevolve;
    const auto& log = result.strategy_log;
    const double eps = analysis::default_threshold(log, c.epsilon_fraction);
    const double det = analysis::rqa_metrics(analysis::recurrence_matrix(log, eps, c.theiler), c.l_min, c.v_min).det;

    Rng rng(derive_seed(5, {}));
    std::vector<double> null;
    for (int i = 0; i < 100; ++i) {
        const auto shuffled = analysis::surrogate_shuffle(log, rng);
        null.push_back(analysis::rqa_metrics(analysis::recurrence_matrix(shuffled, eps, c.theiler), c.l_min, c.v_min).det);
    }
    std::sort(null.begin(), null.end());
    const double p95 = null[94];  // nearest-rank 95th percentile of 100 values
    return {adaptive >= 10 && det > p95,
            std::to_string(adaptive) + " adaptive traders, " + std::to_string(log.size()) + " samples, DET " +
                fmt("%.4f", det) + " vs surrogate p95 " + fmt("%.4f", p95)};
}

// 6 and 7. STGP generations ------------------------------------------------

struct StgpSeries {
    std::vector<double> mean;
    std::vector<double> size;
};

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

const StgpSeries& stgp_median_series()
{
    static const StgpSeries series = [] {
        harness::ExperimentConfig cfg;
        cfg.market = harness::default_market(harness::Experiment::Stgp);
        const auto pop = stgp::seeded_population(stgp::parse_expr(cfg.stgp.seed_genome), stgp::stgp_seats(cfg.market));
        std::vector<std::vector<stgp::GenStats>> runs;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            runs.push_back(stgp::run_evolution(pop, cfg.market, cfg.stgp.gen, cfg.stgp.generations, seed).stats);
        }
        StgpSeries out;
        for (std::size_t g = 0; g < runs.front().size(); ++g) {
            std::vector<double> m, s;
            for (const auto& r : runs) {
                m.push_back(r[g].mean_fitness);
                s.push_back(r[g].mean_size);
            }
            out.mean.push_back(median(m));
            out.size.push_back(median(s));
        }
        return out;
    }();
    return series;
}

std::vector<double> generations(std::size_t first, std::size_t last)
{
    std::vector<double> g;
    for (std::size_t i = first; i < last; ++i) g.push_back(static_cast<double>(i + 1));
    return g;
}

Outcome stgp_biphasic()
{
    const auto& s = stgp_median_series();
    const auto peak_at = static_cast<std::size_t>(std::max_element(s.mean.begin(), s.mean.end()) - s.mean.begin());
    const double gen1 = s.mean.front();
    const double peak = s.mean[peak_at];
    const std::vector<double> tail(s.mean.begin() + static_cast<std::ptrdiff_t>(peak_at), s.mean.end());
    const double rho = tail.size() >= 3 ? oracle::spearman(generations(peak_at, s.mean.size()), tail) : 0.0;
    const bool rise = peak >= 1.5 * gen1 && peak_at + 1 >= 2 && peak_at + 1 <= 10;
    return {rise && tail.size() >= 3 && rho < 0.0,
            "gen1 mean " + fmt("%.2f", gen1) + ", peak " + fmt("%.2f", peak) + " at gen " + std::to_string(peak_at + 1) +
                ", post-peak Spearman " + fmt("%.3f", rho)};
}

Outcome stgp_bloat_and_canonical()
{
    const auto& s = stgp_median_series();
    const double rho = oracle::spearman(generations(0, s.size.size()), s.size);
    const auto gen30 = stgp::parse_expr("(S,(S,(S,(S,(S,(S,(S,(S,(S,(S,Pbest,1),7),7),1),1),7),1),1),7),1)");
    const std::string canon = stgp::to_string(stgp::canonicalize(gen30));
    return {rho > 0.0 && canon == "(S,Pbest,34)",
            "size Spearman " + fmt("%.3f", rho) + " (gen1 " + fmt("%.2f", s.size.front()) + ", gen" +
                std::to_string(s.size.size()) + " " + fmt("%.2f", s.size.back()) + "), canonical gen-30 genome " + canon};
}

// 8. Market invariants over fuzzed sessions --------------------------------

traders::StrategySpec random_strategy(Rng& rng, bool& adaptive)
{
    static const char* genomes[] = {"(S,(S,Pbest,1),LIMIT)", "(S,Pbest,34)", "(A,LIMIT,7)", "(M,Pbest,(D,LIMIT,0))",
                                    "(D,(S,LIMIT,1),(A,Pbest,7))", "LIMIT", "-3"};
    adaptive = false;
    switch (uniform_int(rng, 0, 5)) {
        case 0: return traders::Zic{};
        case 1: return traders::Gvwy{};
        case 2: return traders::Shvr{};
        case 3: return traders::Przi{-1.0 + 2.0 * uniform01(rng)};
        case 4:
            adaptive = true;
            return traders::Przi{-1.0 + 2.0 * uniform01(rng)};
        default: return traders::Stgp{stgp::parse_expr(genomes[uniform_int(rng, 0, 6)])};
    }
}

harness::SessionConfig fuzz_config(std::uint64_t i)
{
    Rng rng(derive_seed(8, {i}));
    harness::SessionConfig cfg;
    cfg.seed = i;
    cfg.bounds = PriceBounds{Price{uniform_int(rng, 1, 30)}, Price{uniform_int(rng, 150, 500)}};
    cfg.duration = uniform_int(rng, 0, 300);
    cfg.log_interval = uniform_int(rng, 1, 50);
    cfg.shave = static_cast<int>(uniform_int(rng, 1, 3));
    cfg.stgp_mapping = static_cast<stgp::QuoteMapping>(uniform_int(rng, 0, 2));
    cfg.multi_unit = uniform01(rng) < 0.3;
    TraderId id = 1;
    for (Side side : {Side::Bid, Side::Ask}) {
        const auto n = uniform_int(rng, 1, 8);
        for (std::int64_t k = 0; k < n; ++k) {
            bool adaptive = false;
            auto spec = random_strategy(rng, adaptive);
            std::optional<coevo::AdaptiveClimberParams> params;
            if (adaptive) params = coevo::AdaptiveClimberParams{static_cast<int>(uniform_int(rng, 2, 4)), 2, 0.1};
            cfg.roster.push_back({id++, side, spec, params});
        }
        const auto lo = uniform_int(rng, cfg.bounds.min.ticks, cfg.bounds.max.ticks);
        const auto hi = uniform_int(rng, lo, cfg.bounds.max.ticks);
        const auto mode = uniform01(rng) < 0.5 ? harness::AssignmentMode::Uniform : harness::AssignmentMode::FixedStep;
        cfg.schedules.push_back({side, Price{lo}, Price{hi}, mode, uniform_int(rng, 1, 120)});
    }
    return cfg;
}

std::string fingerprint(const harness::SessionResult& r)
{
    std::ostringstream out;
    lob::write_tape_csv(out, r.tape);
    for (const auto& t : r.traders) out << t.id << ':' << t.profit << ':' << t.trades << '\n';
    out.precision(17);
    for (std::size_t i = 0; i < r.strategy_log.size(); ++i) {
        for (double v : r.strategy_log[i]) out << v << ',';
        out << '\n';
    }
    return out.str();
}

Outcome market_invariants()
{
    int crossed = 0, losing = 0, conservation = 0, nondeterministic = 0;
    std::size_t trades = 0;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        const auto cfg = fuzz_config(i);
        const auto r = harness::run_session(cfg);
        trades += r.fills.size();
        if (r.counts.crossed != 0) ++crossed;

        std::int64_t surplus = 0;
        std::map<TraderId, std::int64_t> per;
        bool lost = false;
        for (const auto& f : r.fills) {
            const std::int64_t q = f.trade.quantity;
            if (f.trade.price > f.buyer_limit || f.trade.price < f.seller_limit) lost = true;
            surplus += (f.buyer_limit - f.seller_limit) * q;
            per[f.trade.buyer] += (f.buyer_limit - f.trade.price) * q;
            per[f.trade.seller] += (f.trade.price - f.seller_limit) * q;
        }
        if (lost) ++losing;
        bool conserved = r.total_profit() == surplus;
        for (const auto& t : r.traders) conserved = conserved && per[t.id] == t.profit;
        if (!conserved) ++conservation;

        if (fingerprint(r) != fingerprint(harness::run_session(cfg))) ++nondeterministic;
    }
    return {crossed == 0 && losing == 0 && conservation == 0 && nondeterministic == 0,
            "10000 sessions, " + std::to_string(trades) + " trades; crossed " + std::to_string(crossed) + ", losing " +
                std::to_string(losing) + ", surplus mismatches " + std::to_string(conservation) + ", nondeterministic " +
                std::to_string(nondeterministic)};
}

// 9. ZIC allocative efficiency ---------------------------------------------

Outcome zic_efficiency()
{
    auto cfg = harness::default_market(harness::Experiment::Session);
    double total = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        cfg.seed = seed;
        total += harness::allocative_efficiency(harness::run_session(cfg));
    }
    const double mean = total / 100.0;
    return {mean >= 0.9, "mean efficiency over 100 seeds " + fmt("%.4f", mean)};
}

struct Criterion {
    int number;
    const char* name;
    double time_limit;  // seconds; 0 = none
    std::function<Outcome()> run;
};

}  // namespace

// Optional arguments pick criteria by number; no arguments runs all of them.
int main(int argc, char** argv)
{
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));

    const std::vector<Criterion> criteria = {
        {1, "PRZI endpoint equivalence", 5.0, przi_endpoints},
        {2, "AC hill-climber convergence", 30.0, climber_convergence},
        {3, "quiver attractor and origin plateau", 0.0, quiver_field},
        {4, "RQA oracle equivalence", 5.0, rqa_oracle_equivalence},
        {5, "recurrence structure vs shuffled surrogates", 0.0, recurrence_structure},
        {6, "STGP biphasic profits", 0.0, stgp_biphasic},
        {7, "STGP bloat and canonicalization", 0.0, stgp_bloat_and_canonical},
        {8, "market invariants over fuzzed sessions", 60.0, market_invariants},
        {9, "ZIC allocative efficiency", 0.0, zic_efficiency},
    };

    int failed = 0, ran = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.number) == only.end()) continue;
        ++ran;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool pass = o.pass;
        if (c.time_limit > 0.0 && secs >= c.time_limit) {
            pass = false;
            o.detail += "; over the " + fmt("%.0f", c.time_limit) + " s limit";
        }
        if (!pass) ++failed;
        std::printf("%s %d %s: %s [%.1f s]\n", pass ? "PASS" : "FAIL", c.number, c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", ran - failed, ran);
    return failed == 0 ? 0 : 1;
}
