#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "cda/harness/session.hpp"
#include "cda/stgp/evolution.hpp"

namespace cda::harness {

struct QuiverParams {
    int grid = 21;
    Time horizon = 200000;
    int reps = 5;
    unsigned threads = 0;
};

struct CoevolveParams {
    /// Recurrence radius as a fraction of the widest pairwise distance.
    double epsilon_fraction = 0.1;
    std::size_t theiler = 1;
    std::size_t l_min = 2;
    std::size_t v_min = 2;
};

struct StgpParams {
    int generations = 40;
    std::string seed_genome = "(S,(S,Pbest,1),LIMIT)";
    /// Deeper than the library default: offsets built from the constant pool
    /// need long subtraction chains.
    stgp::GenParams gen = [] {
        stgp::GenParams g;
        g.p_mutation = 0.02;
        g.max_depth = 17;
        return g;
    }();
};

enum class Experiment { Session, Quiver, Coevolve, Stgp };

std::string_view to_string(Experiment e) noexcept;

/// Everything one CLI run needs. `market` is the session template.
struct ExperimentConfig {
    SessionConfig market;
    QuiverParams quiver;
    CoevolveParams coevolve;
    StgpParams stgp;
};

/// Built-in market for each experiment family when a config omits `market`.
SessionConfig default_market(Experiment e);

/// Parses a JSON config document. Sections: `seed`, `market`, `quiver`,
/// `coevolve`, `stgp`; all optional. Unknown keys anywhere raise ConfigError.
/// An `experiment` key, as written to metadata.json, must name `e`.
ExperimentConfig parse_config(std::string_view text, Experiment e);
/// Reads and parses `path`; a missing or unreadable file is a ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path, Experiment e);

/// JSON rendering of the resolved config, as written to metadata.json.
std::string config_to_json(const ExperimentConfig& cfg, Experiment e);

}  // namespace cda::harness
