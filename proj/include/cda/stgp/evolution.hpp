#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cda/harness/session.hpp"
#include "cda/stgp/operators.hpp"

namespace cda::stgp {

struct GenParams {
    double p_crossover = 0.9;
    /// Per-node point mutation probability.
    double p_mutation = 0.05;
    int max_depth = 8;
    std::vector<double> const_pool{1.0, 7.0};
    double selection_eps = 1e-6;
    /// Copy the best individual unchanged into the next generation.
    bool elitism = false;

    void validate() const;
};

struct GenStats {
    int generation = 0;
    double max_fitness = 0.0;
    double mean_fitness = 0.0;
    double std_fitness = 0.0;  // population standard deviation
    double mean_size = 0.0;
};

GenStats population_stats(const Population& pop);

struct GenerationResult {
    Population evaluated;  // the input population with fitness filled in
    Population next;
    GenStats stats;
    Individual elite;  // first individual with the highest fitness
};

/// Population built from one genome repeated n times.
Population seeded_population(const ExprTree& genome, std::size_t n);

/// Number of STGP seats in a market template.
std::size_t stgp_seats(const harness::SessionConfig& market);

/// Evaluates `pop` in one session of `market` and breeds the next generation.
/// STGP seats in the template are filled with the individuals in order, so the
/// template must have exactly |pop| of them. The session seed derives from
/// (seed, generation).
GenerationResult run_generation(const Population& pop, const harness::SessionConfig& market, const GenParams& params,
                                std::uint64_t seed);

struct EvolutionRun {
    std::vector<GenStats> stats;
    std::vector<Individual> elites;
    Population final_population;
};

EvolutionRun run_evolution(Population pop, const harness::SessionConfig& market, const GenParams& params, int generations,
                           std::uint64_t seed);

/// CSV `gen,max_fitness,mean_fitness,std_fitness,mean_size`.
void write_genstats_csv(std::ostream& out, const std::vector<GenStats>& stats);
/// One line per generation: `gen=<g> fitness=<f> <s-expression>`.
void write_elites(std::ostream& out, const std::vector<Individual>& elites, int first_generation = 1);

}  // namespace cda::stgp
