#include "cda/harness/config.hpp"
#include "doctest.h"

using namespace cda;
using namespace cda::harness;

TEST_CASE("defaults without a market section")
{
    const auto cfg = parse_config("{}", Experiment::Session);
    CHECK(cfg.market.roster.size() == 40);
    CHECK(cfg.market.bounds.min == Price{1});
    CHECK(cfg.market.bounds.max == Price{500});

    const auto stgp = parse_config(R"({"seed": 9})", Experiment::Stgp);
    CHECK(stgp.market.seed == 9);
    CHECK(stgp::stgp_seats(stgp.market) == 50);
    std::size_t sellers = 0, buyers = 0;
    for (const auto& r : stgp.market.roster) (r.side == Side::Ask ? sellers : buyers)++;
    CHECK(sellers == 100);
    CHECK(buyers == 100);
    CHECK(stgp.stgp.generations == 40);
    CHECK(stgp.market.duration == 10000);

    std::size_t adaptive = 0;
    for (const auto& r : default_market(Experiment::Coevolve).roster) adaptive += r.adaptive.has_value();
    CHECK(adaptive >= 10);
}

TEST_CASE("market section")
{
    const auto cfg = parse_config(R"j({
      "seed": 3,
      "market": {
        "duration": 200, "sys_min": 5, "sys_max": 300, "log_interval": 10, "shave": 2,
        "stgp_mapping": "limit_offset",
        "roster": [
          {"side": "bid", "strategy": "ZIC", "count": 2},
          {"id": 10, "side": "ask", "strategy": "PRZI(0.5)", "adaptive": {"k": 3, "trades_per_eval": 4}},
          {"side": "ask", "strategy": "STGP((S,LIMIT,1))"}
        ],
        "schedules": [
          {"side": "bid", "p_min": 20, "p_max": 80, "mode": "fixed", "interval": 7},
          {"side": "ask", "p_min": 10, "p_max": 70}
        ]
      }
    })j",
                                  Experiment::Session);
    const auto& m = cfg.market;
    CHECK(m.seed == 3);
    CHECK(m.duration == 200);
    CHECK(m.bounds.min == Price{5});
    CHECK(m.shave == 2);
    CHECK(m.stgp_mapping == stgp::QuoteMapping::LimitOffset);
    REQUIRE(m.roster.size() == 4);
    CHECK(m.roster[1].id == 2);
    CHECK(m.roster[2].id == 10);
    CHECK(m.roster[3].id == 11);
    REQUIRE(m.roster[2].adaptive);
    CHECK(m.roster[2].adaptive->k == 3);
    CHECK(m.roster[2].adaptive->trades_per_eval == 4);
    CHECK(m.roster[2].adaptive->mutation_width == 0.05);
    CHECK(m.schedules[0].mode == AssignmentMode::FixedStep);
    CHECK(m.schedules[0].interval == 7);
    CHECK(m.schedules[1].mode == AssignmentMode::Uniform);
}

TEST_CASE("config errors")
{
    for (const char* bad : {
             R"({"sed": 1})",
             R"({"market": {"durration": 5}})",
             R"({"market": {"roster": [{"side": "bid", "strategy": "ZIC", "colour": 1}]}})",
             R"({"market": {"roster": [{"side": "buy", "strategy": "ZIC"}]}})",
             R"({"market": {"roster": [{"side": "bid", "strategy": "ZIP"}]}})",
             R"({"market": {"duration": "long"}})",
             R"({"market": {"duration": 1.5}})",
             R"({"seed": -1})",
             R"({"market": {"schedules": [{"side": "bid", "mode": "random"}]}})",
             R"({"market": {"roster": [{"side": "bid", "strategy": "ZIC", "adaptive": true}]}})",
             R"({"quiver": {"grid": 1}})",
             R"({"stgp": {"seed_genome": "(S,Pbest"}})",
             R"({"stgp": {"p_mutation": 2}})",
             R"({"experiment": "stgp"})",
             R"([1, 2])",
             "not json",
         }) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_config(bad, Experiment::Session), ConfigError);
    }
    CHECK_THROWS_AS(load_config("/nonexistent/config.json", Experiment::Session), ConfigError);
}

TEST_CASE("metadata json parses back to the same config")
{
    for (auto e : {Experiment::Session, Experiment::Quiver, Experiment::Coevolve, Experiment::Stgp}) {
        ExperimentConfig cfg;
        cfg.market = default_market(e);
        cfg.market.seed = 77;
        const auto text = config_to_json(cfg, e);
        const auto again = parse_config(text, e);
        CHECK(config_to_json(again, e) == text);
    }
}
