#include "cda/stgp/evolution.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cda::stgp {

void GenParams::validate() const
{
    if (!(p_crossover >= 0.0 && p_crossover <= 1.0)) throw std::invalid_argument("p_crossover must lie in [0, 1]");
    if (!(p_mutation >= 0.0 && p_mutation <= 1.0)) throw std::invalid_argument("p_mutation must lie in [0, 1]");
    if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
    if (const_pool.empty()) throw std::invalid_argument("constant pool is empty");
    if (!(selection_eps > 0.0)) throw std::invalid_argument("selection_eps must be > 0");
}

GenStats population_stats(const Population& pop)
{
    GenStats s;
    s.generation = pop.generation;
    const auto& ind = pop.individuals;
    if (ind.empty()) return s;
    const auto n = static_cast<double>(ind.size());
    s.max_fitness = ind.front().fitness;
    double size_sum = 0.0;
    double fit_sum = 0.0;
    for (const auto& i : ind) {
        s.max_fitness = std::max(s.max_fitness, i.fitness);
        fit_sum += i.fitness;
        size_sum += static_cast<double>(i.genome.size());
    }
    s.mean_fitness = fit_sum / n;
    s.mean_size = size_sum / n;
    double var = 0.0;
    for (const auto& i : ind) var += (i.fitness - s.mean_fitness) * (i.fitness - s.mean_fitness);
    s.std_fitness = std::sqrt(var / n);
    return s;
}

Population seeded_population(const ExprTree& genome, std::size_t n)
{
    Population pop;
    pop.individuals.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pop.individuals.push_back(Individual{genome, 0.0, i});
    return pop;
}

std::size_t stgp_seats(const harness::SessionConfig& market)
{
    std::size_t n = 0;
    for (const auto& e : market.roster) n += std::holds_alternative<traders::Stgp>(e.strategy) ? 1 : 0;
    return n;
}

GenerationResult run_generation(const Population& pop, const harness::SessionConfig& market, const GenParams& params,
                                std::uint64_t seed)
{
    params.validate();
    const std::size_t n = pop.individuals.size();
    if (n == 0) throw std::invalid_argument("population is empty");
    if (stgp_seats(market) != n) {
        throw harness::ConfigError("market has " + std::to_string(stgp_seats(market)) + " STGP seats for " + std::to_string(n) +
                                   " individuals");
    }

    harness::SessionConfig cfg = market;
    cfg.seed = derive_seed(seed, {static_cast<std::uint64_t>(pop.generation)});
    std::vector<std::size_t> seat_roster;
    for (std::size_t r = 0, k = 0; r < cfg.roster.size(); ++r) {
        if (!std::holds_alternative<traders::Stgp>(cfg.roster[r].strategy)) continue;
        cfg.roster[r].strategy = traders::Stgp{pop.individuals[k++].genome};
        seat_roster.push_back(r);
    }
    const auto session = harness::run_session(cfg);

    GenerationResult out;
    out.evaluated = pop;
    for (std::size_t k = 0; k < n; ++k) {
        out.evaluated.individuals[k].fitness = static_cast<double>(session.traders[seat_roster[k]].profit);
    }
    out.stats = population_stats(out.evaluated);

    std::size_t best = 0;
    for (std::size_t k = 1; k < n; ++k) {
        if (out.evaluated.individuals[k].fitness > out.evaluated.individuals[best].fitness) best = k;
    }
    out.elite = out.evaluated.individuals[best];

    // Breeding draws from its own stream so it never shifts the session.
    Rng rng = make_rng(seed, {static_cast<std::uint64_t>(pop.generation), 0xB4EEDull});
    const std::span<const Individual> parents(out.evaluated.individuals);
    std::uint64_t next_id = 0;
    for (const auto& i : pop.individuals) next_id = std::max(next_id, i.id + 1);

    out.next.generation = pop.generation + 1;
    auto& children = out.next.individuals;
    children.reserve(n);
    if (params.elitism) children.push_back(Individual{out.elite.genome, 0.0, next_id++});
    while (children.size() < n) {
        const ExprTree& a = parents[select_parent(parents, rng, params.selection_eps)].genome;
        const ExprTree& b = parents[select_parent(parents, rng, params.selection_eps)].genome;
        std::pair<ExprTree, ExprTree> kids{a, b};
        if (uniform01(rng) < params.p_crossover) kids = crossover(a, b, rng, params.max_depth);
        for (ExprTree* kid : {&kids.first, &kids.second}) {
            if (children.size() == n) break;
            children.push_back(Individual{point_mutate(*kid, rng, params.p_mutation, params.const_pool), 0.0, next_id++});
        }
    }
    return out;
}

EvolutionRun run_evolution(Population pop, const harness::SessionConfig& market, const GenParams& params, int generations,
                           std::uint64_t seed)
{
    if (generations < 0) throw std::invalid_argument("generation count must be >= 0");
    EvolutionRun run;
    for (int g = 0; g < generations; ++g) {
        auto gen = run_generation(pop, market, params, seed);
        run.stats.push_back(gen.stats);
        run.elites.push_back(std::move(gen.elite));
        pop = std::move(gen.next);
    }
    run.final_population = std::move(pop);
    return run;
}

void write_genstats_csv(std::ostream& out, const std::vector<GenStats>& stats)
{
    out << "gen,max_fitness,mean_fitness,std_fitness,mean_size\n";
    const auto old_precision = out.precision(12);
    for (const auto& s : stats) {
        out << s.generation << ',' << s.max_fitness << ',' << s.mean_fitness << ',' << s.std_fitness << ',' << s.mean_size << '\n';
    }
    out.precision(old_precision);
}

void write_elites(std::ostream& out, const std::vector<Individual>& elites, int first_generation)
{
    const auto old_precision = out.precision(12);
    for (std::size_t g = 0; g < elites.size(); ++g) {
        out << "gen=" << first_generation + static_cast<int>(g) << " fitness=" << elites[g].fitness << ' '
            << to_string(elites[g].genome) << '\n';
    }
    out.precision(old_precision);
}

}  // namespace cda::stgp
