#include "cda/cli/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cda/analysis/recurrence.hpp"
#include "cda/coevo/quiver.hpp"
#include "cda/harness/config.hpp"
#include "cda/stgp/evolution.hpp"

namespace cda::cli {

namespace {

namespace fs = std::filesystem;
using harness::Experiment;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Files are rendered in memory first so a failed run leaves nothing half-written.
struct Outputs {
    std::ostringstream& add(std::string name)
    {
        streams.emplace_back(std::make_unique<std::ostringstream>());
        names.push_back(std::move(name));
        return *streams.back();
    }

    void write(const fs::path& dir)
    {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
        for (std::size_t i = 0; i < names.size(); ++i) {
            const fs::path path = dir / names[i];
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            out << streams[i]->str();
            out.flush();
            if (!out) throw IoError("cannot write " + path.string());
        }
    }

    std::vector<std::string> names;
    std::vector<std::unique_ptr<std::ostringstream>> streams;
};

void write_profits_csv(std::ostream& out, const harness::SessionResult& r)
{
    out << "trader_id,side,strategy,profit,trades\n";
    for (const auto& t : r.traders) {
        // STGP genomes contain commas; strategy text never contains quotes.
        out << t.id << ',' << to_string(t.side) << ",\"" << traders::to_string(t.strategy) << "\"," << t.profit << ','
            << t.trades << '\n';
    }
}

void write_strategy_log_csv(std::ostream& out, const harness::SessionResult& r)
{
    out << "time";
    for (const auto& a : r.adaptive) out << ",s_" << a.id;
    out << '\n';
    const auto old_precision = out.precision(12);
    const auto& log = r.strategy_log;
    for (std::size_t i = 0; i < log.size(); ++i) {
        out << log.times()[i];
        for (double v : log[i]) out << ',' << v;
        out << '\n';
    }
    out.precision(old_precision);
}

void run_session_cmd(const harness::ExperimentConfig& cfg, Outputs& files)
{
    const auto result = harness::run_session(cfg.market);
    lob::write_tape_csv(files.add("tape.csv"), result.tape);
    write_profits_csv(files.add("profits.csv"), result);
    if (!result.adaptive.empty()) write_strategy_log_csv(files.add("strategy_log.csv"), result);
    std::cerr << "trades=" << result.tape.size() << " efficiency=" << harness::allocative_efficiency(result) << '\n';
}

void run_quiver_cmd(const harness::ExperimentConfig& cfg, Outputs& files)
{
    const auto& q = cfg.quiver;
    const auto field = coevo::quiver_sample(cfg.market, q.grid, q.horizon, q.reps, cfg.market.seed, q.threads);
    coevo::write_quiver_csv(files.add("quiver.csv"), field);
    const auto attractors = coevo::detect_attractors(field);
    auto& summary = files.add("attractors.csv");
    summary << "s_b,s_s,cells,inflow\n";
    for (const auto& a : attractors) summary << a.s_b << ',' << a.s_s << ',' << a.cells.size() << ',' << a.inflow << '\n';
    std::cerr << "attractors=" << attractors.size() << '\n';
}

void run_coevolve_cmd(const harness::ExperimentConfig& cfg, Outputs& files)
{
    const auto& m = cfg.market;
    bool any_adaptive = false;
    for (const auto& e : m.roster) any_adaptive = any_adaptive || e.adaptive.has_value();
    if (!any_adaptive) throw harness::ConfigError("coevolve needs at least one adaptive trader");
    if (m.duration <= m.log_interval) throw harness::ConfigError("coevolve needs a duration longer than log_interval");

    const auto result = harness::run_session(m);
    write_strategy_log_csv(files.add("strategy_log.csv"), result);
    const auto& c = cfg.coevolve;
    const double eps = analysis::default_threshold(result.strategy_log, c.epsilon_fraction);
    const auto matrix = analysis::recurrence_matrix(result.strategy_log, eps, c.theiler);
    analysis::write_pbm(files.add("recurrence.pbm"), matrix);
    analysis::write_rqa_csv(files.add("rqa.csv"), analysis::rqa_metrics(matrix, c.l_min, c.v_min));
}

void run_stgp_cmd(const harness::ExperimentConfig& cfg, Outputs& files)
{
    const std::size_t seats = stgp::stgp_seats(cfg.market);
    if (seats == 0) throw harness::ConfigError("stgp needs at least one STGP trader in the roster");
    const auto pop = stgp::seeded_population(stgp::parse_expr(cfg.stgp.seed_genome), seats);
    const auto run = stgp::run_evolution(pop, cfg.market, cfg.stgp.gen, cfg.stgp.generations, cfg.market.seed);
    stgp::write_genstats_csv(files.add("genstats.csv"), run.stats);
    stgp::write_elites(files.add("elites.txt"), run.elites);
}

}  // namespace

int cli_main(int argc, const char* const* argv)
{
    CLI::App app{"Continuous double auction simulator"};
    app.require_subcommand(1);
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--seed", seed, "master seed (overrides the config)");
    app.add_option("--out", out_dir, "output directory");

    auto* session = app.add_subcommand("session", "run one market session; writes tape.csv and profits.csv");
    auto* quiver = app.add_subcommand("quiver", "sample the adaptive buyer/seller drift field; writes quiver.csv");
    auto* coevolve =
        app.add_subcommand("coevolve", "run adaptive PRZI traders; writes strategy_log.csv, recurrence.pbm and rqa.csv");
    auto* stgp_cmd = app.add_subcommand("stgp", "evolve STGP traders; writes genstats.csv and elites.txt");
    for (auto* sub : {session, quiver, coevolve, stgp_cmd}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    Experiment which = Experiment::Session;
    if (*quiver) which = Experiment::Quiver;
    if (*coevolve) which = Experiment::Coevolve;
    if (*stgp_cmd) which = Experiment::Stgp;

    try {
        harness::ExperimentConfig cfg;
        if (config_path.empty()) {
            cfg.market = harness::default_market(which);
        } else {
            cfg = harness::load_config(config_path, which);
        }
        if (seed) cfg.market.seed = *seed;
        cfg.market.validate();

        Outputs files;
        switch (which) {
            case Experiment::Session: run_session_cmd(cfg, files); break;
            case Experiment::Quiver: run_quiver_cmd(cfg, files); break;
            case Experiment::Coevolve: run_coevolve_cmd(cfg, files); break;
            case Experiment::Stgp: run_stgp_cmd(cfg, files); break;
        }
        files.add("metadata.json") << harness::config_to_json(cfg, which);
        files.write(out_dir);
    } catch (const harness::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace cda::cli
