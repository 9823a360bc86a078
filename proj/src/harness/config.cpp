#include "cda/harness/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

namespace cda::harness {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where)
{
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

template <class T>
T read(const json& obj, std::string_view key, T fallback, const std::string& where)
{
    const auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!it->is_boolean()) throw ConfigError(where + "." + std::string(key) + ": expected a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!it->is_number_integer()) throw ConfigError(where + "." + std::string(key) + ": expected an integer");
            if constexpr (std::is_unsigned_v<T>) {
                if (it->is_number_integer() && !it->is_number_unsigned() && it->get<std::int64_t>() < 0) {
                    throw ConfigError(where + "." + std::string(key) + ": expected a non-negative integer");
                }
            }
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!it->is_number()) throw ConfigError(where + "." + std::string(key) + ": expected a number");
        } else {
            if (!it->is_string()) throw ConfigError(where + "." + std::string(key) + ": expected a string");
        }
        return it->get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + std::string(key) + ": " + e.what());
    }
}

Side read_side(const json& obj, const std::string& where)
{
    const auto text = read<std::string>(obj, "side", "", where);
    if (text.empty()) throw ConfigError(where + ": missing 'side'");
    try {
        return parse_side(text);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

RosterEntry przi_entry(TraderId id, Side side, double s, bool adaptive)
{
    RosterEntry e{id, side, traders::Przi{s}, std::nullopt};
    if (adaptive) e.adaptive = coevo::AdaptiveClimberParams{};
    return e;
}

void add_block(SessionConfig& cfg, Side side, const traders::StrategySpec& spec, int count)
{
    for (int i = 0; i < count; ++i) {
        cfg.roster.push_back(RosterEntry{static_cast<TraderId>(cfg.roster.size() + 1), side, spec, std::nullopt});
    }
}

SupplyDemandSchedule schedule(Side side, std::int64_t lo, std::int64_t hi, AssignmentMode mode, Time interval)
{
    return SupplyDemandSchedule{side, Price{lo}, Price{hi}, mode, interval};
}

void parse_roster(const json& list, SessionConfig& cfg)
{
    if (!list.is_array()) throw ConfigError("market.roster: expected an array");
    TraderId next_id = 1;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string where = "market.roster[" + std::to_string(i) + "]";
        const json& item = list[i];
        check_keys(item, {"id", "side", "strategy", "count", "adaptive"}, where);
        const Side side = read_side(item, where);
        const auto text = read<std::string>(item, "strategy", "", where);
        if (text.empty()) throw ConfigError(where + ": missing 'strategy'");
        traders::StrategySpec spec;
        try {
            spec = traders::parse_strategy(text);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(where + ": " + e.what());
        }
        const int count = read<int>(item, "count", 1, where);
        if (count < 1) throw ConfigError(where + ".count must be >= 1");
        TraderId id = read<TraderId>(item, "id", next_id, where);

        std::optional<coevo::AdaptiveClimberParams> adaptive;
        if (const auto it = item.find("adaptive"); it != item.end()) {
            if (it->is_boolean()) {
                if (it->get<bool>()) adaptive.emplace();
            } else {
                const std::string aw = where + ".adaptive";
                check_keys(*it, {"k", "trades_per_eval", "mutation_width"}, aw);
                coevo::AdaptiveClimberParams p;
                p.k = read<int>(*it, "k", p.k, aw);
                p.trades_per_eval = read<int>(*it, "trades_per_eval", p.trades_per_eval, aw);
                p.mutation_width = read<double>(*it, "mutation_width", p.mutation_width, aw);
                adaptive = p;
            }
        }
        for (int c = 0; c < count; ++c) cfg.roster.push_back(RosterEntry{id++, side, spec, adaptive});
        next_id = id;
    }
}

void parse_schedules(const json& list, SessionConfig& cfg)
{
    if (!list.is_array()) throw ConfigError("market.schedules: expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string where = "market.schedules[" + std::to_string(i) + "]";
        const json& item = list[i];
        check_keys(item, {"side", "p_min", "p_max", "mode", "interval"}, where);
        SupplyDemandSchedule s;
        s.side = read_side(item, where);
        s.p_min = Price{read<std::int64_t>(item, "p_min", cfg.bounds.min.ticks, where)};
        s.p_max = Price{read<std::int64_t>(item, "p_max", cfg.bounds.max.ticks, where)};
        const auto mode = read<std::string>(item, "mode", "uniform", where);
        if (mode == "uniform") {
            s.mode = AssignmentMode::Uniform;
        } else if (mode == "fixed") {
            s.mode = AssignmentMode::FixedStep;
        } else {
            throw ConfigError(where + ".mode: expected 'uniform' or 'fixed'");
        }
        s.interval = read<Time>(item, "interval", s.interval, where);
        cfg.schedules.push_back(s);
    }
}

SessionConfig parse_market(const json& m, SessionConfig cfg)
{
    check_keys(m, {"duration", "roster", "schedules", "sys_min", "sys_max", "seed", "session_index", "log_interval", "shave",
                   "stgp_mapping", "multi_unit"},
               "market");
    cfg.duration = read<Time>(m, "duration", cfg.duration, "market");
    cfg.bounds.min = Price{read<std::int64_t>(m, "sys_min", cfg.bounds.min.ticks, "market")};
    cfg.bounds.max = Price{read<std::int64_t>(m, "sys_max", cfg.bounds.max.ticks, "market")};
    cfg.seed = read<std::uint64_t>(m, "seed", cfg.seed, "market");
    cfg.session_index = read<std::uint64_t>(m, "session_index", cfg.session_index, "market");
    cfg.log_interval = read<Time>(m, "log_interval", cfg.log_interval, "market");
    cfg.shave = read<int>(m, "shave", cfg.shave, "market");
    cfg.multi_unit = read<bool>(m, "multi_unit", cfg.multi_unit, "market");
    if (m.contains("stgp_mapping")) {
        try {
            cfg.stgp_mapping = stgp::parse_quote_mapping(read<std::string>(m, "stgp_mapping", "", "market"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("market.stgp_mapping: ") + e.what());
        }
    }
    if (m.contains("roster")) {
        cfg.roster.clear();
        parse_roster(m["roster"], cfg);
    }
    if (m.contains("schedules")) {
        cfg.schedules.clear();
        parse_schedules(m["schedules"], cfg);
    }
    return cfg;
}

}  // namespace

std::string_view to_string(Experiment e) noexcept
{
    switch (e) {
        case Experiment::Session: return "session";
        case Experiment::Quiver: return "quiver";
        case Experiment::Coevolve: return "coevolve";
        case Experiment::Stgp: return "stgp";
    }
    return "session";
}

SessionConfig default_market(Experiment e)
{
    SessionConfig cfg;
    cfg.bounds = PriceBounds{Price{1}, Price{500}};
    switch (e) {
        case Experiment::Session:
            cfg.duration = 1000;
            add_block(cfg, Side::Bid, traders::Zic{}, 20);
            add_block(cfg, Side::Ask, traders::Zic{}, 20);
            // Limits span most of the price range, as in the classic ZI-constrained setup.
            cfg.schedules = {schedule(Side::Bid, 50, 450, AssignmentMode::Uniform, 1000),
                             schedule(Side::Ask, 50, 450, AssignmentMode::Uniform, 1000)};
            break;
        case Experiment::Quiver:
            // Per-trade profit differences between nearby s values are small, so
            // the pair needs long horizons and wider steps to show a drift at all.
            cfg.duration = 200000;
            cfg.roster.push_back(przi_entry(1, Side::Bid, 0.0, true));
            cfg.roster.push_back(przi_entry(2, Side::Ask, 0.0, true));
            for (auto& e : cfg.roster) e.adaptive = coevo::AdaptiveClimberParams{2, 10, 0.1};
            add_block(cfg, Side::Bid, traders::Zic{}, 9);
            add_block(cfg, Side::Ask, traders::Zic{}, 9);
            cfg.schedules = {schedule(Side::Bid, 50, 150, AssignmentMode::Uniform, 50),
                             schedule(Side::Ask, 50, 150, AssignmentMode::Uniform, 50)};
            break;
        case Experiment::Coevolve:
            cfg.duration = 20000;
            for (int i = 0; i < 10; ++i) {
                const double s = -0.9 + 0.2 * i;
                cfg.roster.push_back(przi_entry(static_cast<TraderId>(cfg.roster.size() + 1), Side::Bid, s, true));
                cfg.roster.push_back(przi_entry(static_cast<TraderId>(cfg.roster.size() + 1), Side::Ask, -s, true));
            }
            cfg.schedules = {schedule(Side::Bid, 50, 150, AssignmentMode::Uniform, 50),
                             schedule(Side::Ask, 50, 150, AssignmentMode::Uniform, 50)};
            break;
        case Experiment::Stgp:
            cfg.duration = 10000;
            add_block(cfg, Side::Ask, traders::Zic{}, 100);
            add_block(cfg, Side::Bid, traders::Zic{}, 50);
            add_block(cfg, Side::Bid, traders::Stgp{stgp::parse_expr("(S,(S,Pbest,1),LIMIT)")}, 50);
            // Buyers read the genome in the seller's frame, so Pbest - c bids c above the best bid.
            cfg.stgp_mapping = stgp::QuoteMapping::Mirrored;
            cfg.schedules = {schedule(Side::Bid, 50, 150, AssignmentMode::Uniform, 100),
                             schedule(Side::Ask, 50, 150, AssignmentMode::Uniform, 100)};
            break;
    }
    return cfg;
}

ExperimentConfig parse_config(std::string_view text, Experiment e)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        throw ConfigError(std::string("malformed config: ") + err.what());
    }
    check_keys(doc, {"experiment", "seed", "market", "quiver", "coevolve", "stgp"}, "config");
    // metadata.json names its experiment; feeding it back must target the same one.
    if (const auto kind = read<std::string>(doc, "experiment", std::string(to_string(e)), "config"); kind != to_string(e)) {
        throw ConfigError("config was written for '" + kind + "', not '" + std::string(to_string(e)) + "'");
    }

    ExperimentConfig cfg;
    cfg.market = default_market(e);
    if (doc.contains("market")) cfg.market = parse_market(doc["market"], cfg.market);
    cfg.market.seed = read<std::uint64_t>(doc, "seed", cfg.market.seed, "config");

    if (doc.contains("quiver")) {
        const json& q = doc["quiver"];
        check_keys(q, {"grid", "horizon", "reps", "threads"}, "quiver");
        cfg.quiver.grid = read<int>(q, "grid", cfg.quiver.grid, "quiver");
        cfg.quiver.horizon = read<Time>(q, "horizon", cfg.quiver.horizon, "quiver");
        cfg.quiver.reps = read<int>(q, "reps", cfg.quiver.reps, "quiver");
        cfg.quiver.threads = read<unsigned>(q, "threads", cfg.quiver.threads, "quiver");
    }
    if (doc.contains("coevolve")) {
        const json& c = doc["coevolve"];
        check_keys(c, {"epsilon_fraction", "theiler", "l_min", "v_min"}, "coevolve");
        cfg.coevolve.epsilon_fraction = read<double>(c, "epsilon_fraction", cfg.coevolve.epsilon_fraction, "coevolve");
        cfg.coevolve.theiler = read<std::size_t>(c, "theiler", cfg.coevolve.theiler, "coevolve");
        cfg.coevolve.l_min = read<std::size_t>(c, "l_min", cfg.coevolve.l_min, "coevolve");
        cfg.coevolve.v_min = read<std::size_t>(c, "v_min", cfg.coevolve.v_min, "coevolve");
    }
    if (doc.contains("stgp")) {
        const json& s = doc["stgp"];
        check_keys(s, {"generations", "seed_genome", "p_crossover", "p_mutation", "max_depth", "const_pool", "selection_eps",
                       "elitism"},
                   "stgp");
        auto& g = cfg.stgp.gen;
        cfg.stgp.generations = read<int>(s, "generations", cfg.stgp.generations, "stgp");
        cfg.stgp.seed_genome = read<std::string>(s, "seed_genome", cfg.stgp.seed_genome, "stgp");
        g.p_crossover = read<double>(s, "p_crossover", g.p_crossover, "stgp");
        g.p_mutation = read<double>(s, "p_mutation", g.p_mutation, "stgp");
        g.max_depth = read<int>(s, "max_depth", g.max_depth, "stgp");
        g.selection_eps = read<double>(s, "selection_eps", g.selection_eps, "stgp");
        g.elitism = read<bool>(s, "elitism", g.elitism, "stgp");
        if (s.contains("const_pool")) {
            const json& pool = s["const_pool"];
            if (!pool.is_array()) throw ConfigError("stgp.const_pool: expected an array of numbers");
            g.const_pool.clear();
            for (const auto& v : pool) {
                if (!v.is_number()) throw ConfigError("stgp.const_pool: expected an array of numbers");
                g.const_pool.push_back(v.get<double>());
            }
        }
    }

    // Fail before anything runs.
    cfg.market.validate();
    if (cfg.quiver.grid < 2) throw ConfigError("quiver.grid must be >= 2");
    if (cfg.quiver.reps < 1) throw ConfigError("quiver.reps must be >= 1");
    if (cfg.quiver.horizon < 0) throw ConfigError("quiver.horizon must be >= 0");
    if (!(cfg.coevolve.epsilon_fraction >= 0.0)) throw ConfigError("coevolve.epsilon_fraction must be >= 0");
    if (cfg.coevolve.l_min < 2 || cfg.coevolve.v_min < 2) throw ConfigError("coevolve line minimums must be >= 2");
    if (cfg.stgp.generations < 0) throw ConfigError("stgp.generations must be >= 0");
    try {
        cfg.stgp.gen.validate();
        (void)stgp::parse_expr(cfg.stgp.seed_genome);
    } catch (const std::invalid_argument& err) {
        throw ConfigError(std::string("stgp: ") + err.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, Experiment e)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), e);
}

std::string config_to_json(const ExperimentConfig& cfg, Experiment e)
{
    const SessionConfig& m = cfg.market;
    ordered roster = ordered::array();
    for (const auto& r : m.roster) {
        ordered entry{{"id", r.id}, {"side", std::string(to_string(r.side))}, {"strategy", traders::to_string(r.strategy)}};
        if (r.adaptive) {
            entry["adaptive"] = ordered{{"k", r.adaptive->k},
                                        {"trades_per_eval", r.adaptive->trades_per_eval},
                                        {"mutation_width", r.adaptive->mutation_width}};
        }
        roster.push_back(std::move(entry));
    }
    ordered schedules = ordered::array();
    for (const auto& s : m.schedules) {
        schedules.push_back(ordered{{"side", std::string(to_string(s.side))},
                                    {"p_min", s.p_min.ticks},
                                    {"p_max", s.p_max.ticks},
                                    {"mode", std::string(to_string(s.mode))},
                                    {"interval", s.interval}});
    }
    ordered doc;
    doc["experiment"] = std::string(to_string(e));
    doc["seed"] = m.seed;
    doc["market"] = ordered{{"duration", m.duration},
                            {"sys_min", m.bounds.min.ticks},
                            {"sys_max", m.bounds.max.ticks},
                            {"session_index", m.session_index},
                            {"log_interval", m.log_interval},
                            {"shave", m.shave},
                            {"stgp_mapping", std::string(stgp::to_string(m.stgp_mapping))},
                            {"multi_unit", m.multi_unit},
                            {"roster", roster},
                            {"schedules", schedules}};
    switch (e) {
        case Experiment::Quiver:
            doc["quiver"] = ordered{{"grid", cfg.quiver.grid},
                                    {"horizon", cfg.quiver.horizon},
                                    {"reps", cfg.quiver.reps},
                                    {"threads", cfg.quiver.threads}};
            break;
        case Experiment::Coevolve:
            doc["coevolve"] = ordered{{"epsilon_fraction", cfg.coevolve.epsilon_fraction},
                                      {"theiler", cfg.coevolve.theiler},
                                      {"l_min", cfg.coevolve.l_min},
                                      {"v_min", cfg.coevolve.v_min}};
            break;
        case Experiment::Stgp: {
            const auto& g = cfg.stgp.gen;
            doc["stgp"] = ordered{{"generations", cfg.stgp.generations},
                                  {"seed_genome", cfg.stgp.seed_genome},
                                  {"p_crossover", g.p_crossover},
                                  {"p_mutation", g.p_mutation},
                                  {"max_depth", g.max_depth},
                                  {"const_pool", g.const_pool},
                                  {"selection_eps", g.selection_eps},
                                  {"elitism", g.elitism}};
            break;
        }
        case Experiment::Session: break;
    }
    return doc.dump(2) + "\n";
}

}  // namespace cda::harness
