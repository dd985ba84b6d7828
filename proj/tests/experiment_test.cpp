#include <gtest/gtest.h>

#include <set>
#include <sstream>
#include <string>

#include "json.hpp"

#include "fdrlab/fdrlab.hpp"

using namespace fdrlab;
using nlohmann::json;

namespace {

errc config_error(const std::string& text)
{
    try {
        parse_config_text(text);
    } catch (const error& e) {
        return e.code();
    }
    ADD_FAILURE() << "config accepted: " << text;
    return errc::empty_problem;
}

std::string csv_of(const std::vector<ReportRow>& rows)
{
    std::ostringstream os;
    write_csv(os, rows);
    return os.str();
}

ScenarioParams small(std::uint64_t seed, std::size_t n_reps = 5000)
{
    ScenarioParams p;
    p.seed = seed;
    p.n_reps = n_reps;
    p.grid_n = 2000;
    return p;
}

} // namespace

TEST(CatalogTest, NamesAreUniqueAndResolvable)
{
    const std::set<std::string_view> expected{"bh-equality", "bh-conservative", "bonferroni-sharp", "by-bound",
                                              "m2-su-sharp", "sd-sharp", "modified-sd", "nonmonotone-sd",
                                              "monotonicity-probe"};
    std::set<std::string_view> seen;
    for (const auto& s : scenario_catalog()) {
        EXPECT_TRUE(seen.insert(s.name).second) << s.name;
        EXPECT_FALSE(s.anchor.empty());
        EXPECT_EQ(find_scenario(s.name), &s);
    }
    EXPECT_EQ(seen, expected);
    EXPECT_EQ(find_scenario("nope"), nullptr);
}

TEST(ConfigTest, SeedIsMandatory)
{
    EXPECT_EQ(config_error(R"({"scenario": "bh-equality"})"), errc::config_parse);
}

TEST(ConfigTest, RejectsMalformedInput)
{
    EXPECT_EQ(config_error("{"), errc::config_parse);
    EXPECT_EQ(config_error("[1, 2]"), errc::config_parse);
    EXPECT_EQ(config_error(R"({"seed": 1})"), errc::config_parse);
    EXPECT_EQ(config_error(R"({"scenario": "bh-equality", "seed": 1, "colour": 3})"), errc::config_parse);
    EXPECT_EQ(config_error(R"({"scenario": "nope", "seed": 1})"), errc::config_parse);
    EXPECT_EQ(config_error(R"({"scenario": "bh-equality", "seed": -1})"), errc::config_parse);
    EXPECT_EQ(config_error(R"({"scenario": "bh-equality", "seed": 1, "alpha": "x"})"), errc::config_parse);
    EXPECT_EQ(config_error(R"({"scenario": "bh-equality", "seed": 1, "format": "xml"})"), errc::config_parse);
    EXPECT_EQ(config_error(R"({"scenario": "bh-equality", "seed": 1, "sweep": []})"), errc::config_parse);
    EXPECT_EQ(config_error(R"({"scenario": "bh-equality", "seed": 1, "sweep": [{"out": "x"}]})"),
              errc::config_parse);
    EXPECT_EQ(config_error(R"({"scenario": "bh-equality", "seed": 1, "n_reps": 0})"), errc::config_parse);
}

TEST(ConfigTest, SweepKeepsOrderAndOverrides)
{
    const auto cfg = parse_config_text(R"({
        "scenario": "bh-equality", "seed": 3, "alpha": 0.1, "n_reps": 1000, "format": "json",
        "sweep": [{"alpha": 0.05}, {"alpha": 0.2, "m0": 4}, {"scenario": "sd-sharp", "seed": 9}]
    })");
    ASSERT_EQ(cfg.runs.size(), 3u);
    EXPECT_EQ(cfg.format, "json");
    EXPECT_EQ(cfg.runs[0].scenario, "bh-equality");
    EXPECT_EQ(*cfg.runs[0].params.alpha, 0.05);
    EXPECT_EQ(*cfg.runs[1].params.alpha, 0.2);
    EXPECT_EQ(*cfg.runs[1].params.m0, 4u);
    EXPECT_FALSE(cfg.runs[0].params.m0.has_value());
    EXPECT_EQ(cfg.runs[2].scenario, "sd-sharp");
    EXPECT_EQ(cfg.runs[2].params.seed, 9u);
    EXPECT_EQ(cfg.runs[0].params.seed, 3u);
    for (const auto& r : cfg.runs)
        EXPECT_EQ(r.params.n_reps, 1000u);

    const auto rows = run_config(cfg);
    ASSERT_EQ(rows.size(), 2u + 2u + 3u);
    EXPECT_EQ(rows[0].alpha, 0.05);
    EXPECT_EQ(rows[2].m0, 4u);
    EXPECT_EQ(rows[4].scenario, "sd-sharp");
}

TEST(ConfigTest, InlineScenario)
{
    const auto cfg = parse_config_text(R"({
        "seed": 5, "n_reps": 2000, "grid_n": 2000,
        "scenario": {"model": "bi", "m0": 1, "false_null": "dirac", "false_values": [1.0],
                     "kind": "step-down", "critical_values": "modified-c", "alpha": 0.19, "bound": 0.1}
    })");
    ASSERT_EQ(cfg.runs.size(), 1u);
    ASSERT_TRUE(cfg.runs[0].inline_spec.has_value());
    const auto rows = run_config(cfg);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].scenario, "inline");
    EXPECT_EQ(rows[0].procedure, "SD-modified_c(0.19)");
    EXPECT_EQ(rows[0].kind, "step-down");
    EXPECT_EQ(*rows[0].bound, 0.1);
    ASSERT_TRUE(rows[0].oracle_value.has_value());
    EXPECT_NEAR(*rows[0].oracle_value, 0.1, 10.0 / 2000);

    EXPECT_EQ(config_error(R"({"seed": 1, "scenario": {"model": "tree"}})"), errc::config_parse);
    EXPECT_EQ(config_error(R"({"seed": 1, "scenario": {"model": "bi", "depth": 2}})"), errc::config_parse);
    // Model parameters are checked when the run starts.
    const auto bad = parse_config_text(R"({"seed": 1, "scenario": {"model": "bi", "m0": 2, "alpha": 1.5}})");
    EXPECT_THROW(run_config(bad), error);
}

TEST(ReportTest, CsvHeaderAndEscaping)
{
    EXPECT_EQ(csv_header(), "scenario,model,m,m0,alpha,procedure,kind,n_reps,seed,fdr_hat,fwer_hat,se_fdr,bound,"
                            "bound_satisfied,oracle_value,wall_time_ms");
    EXPECT_EQ(detail::csv_escape("plain"), "plain");
    EXPECT_EQ(detail::csv_escape("a,b"), "\"a,b\"");
    EXPECT_EQ(detail::csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(detail::json_escape("a\"b\\c\n"), "a\\\"b\\\\c\\n");
    EXPECT_EQ(format_real(0.1), "0.10000000000000001");
    EXPECT_EQ(format_real(0.0), "0");
}

TEST(ReportTest, CsvAndJsonCarryTheSameFields)
{
    ReportRow row;
    row.scenario = "x";
    row.model = "bi(m0=1;dirac(0))";
    row.m = 2;
    row.m0 = 1;
    row.alpha = 0.2;
    row.procedure = "SU-bh(0.2)";
    row.kind = "step-up";
    row.n_reps = 10;
    row.seed = 4;
    row.fdr_hat = 0.1;
    row.fwer_hat = 0.1;
    row.se_fdr = 0.01;
    row.bound = 0.1;
    const std::vector<ReportRow> rows{row, row};

    const std::string csv = csv_of(rows);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
    EXPECT_NE(csv.find("\nx,bi(m0=1;dirac(0)),2,1,0.20000000000000001,SU-bh(0.2),step-up,10,4,"), std::string::npos);
    EXPECT_NE(csv.find(",true,,\n"), std::string::npos); // empty oracle and timing

    std::ostringstream os;
    write_json(os, rows);
    const json doc = json::parse(os.str());
    ASSERT_TRUE(doc.is_array());
    ASSERT_EQ(doc.size(), 2u);
    for (const auto& obj : doc) {
        ASSERT_EQ(obj.size(), std::size(report_columns));
        for (auto col : report_columns)
            EXPECT_TRUE(obj.contains(std::string(col))) << col;
        EXPECT_EQ(obj["fdr_hat"].get<double>(), 0.1);
        EXPECT_EQ(obj["bound_satisfied"].get<bool>(), true);
        EXPECT_TRUE(obj["oracle_value"].is_null());
        EXPECT_EQ(obj["model"].get<std::string>(), "bi(m0=1;dirac(0))");
    }
    std::ostringstream empty;
    write_json(empty, {});
    EXPECT_EQ(json::parse(empty.str()), json::array());
}

TEST(ScenarioTest, RowShapes)
{
    const std::pair<const char*, std::size_t> shapes[] = {
        {"bh-equality", 2},    {"bh-conservative", 1}, {"bonferroni-sharp", 2}, {"by-bound", 4},
        {"m2-su-sharp", 1},    {"sd-sharp", 3},        {"modified-sd", 2},      {"nonmonotone-sd", 4},
        {"monotonicity-probe", 12},
    };
    for (const auto& [name, count] : shapes) {
        const auto rows = run_scenario(name, small(21, 2000));
        EXPECT_EQ(rows.size(), count) << name;
        for (const auto& r : rows) {
            EXPECT_EQ(r.scenario, name);
            EXPECT_EQ(r.n_reps, 2000u);
            EXPECT_TRUE(r.bound.has_value()) << name;
            EXPECT_LE(r.fdr_hat, r.fwer_hat);
            EXPECT_FALSE(r.wall_time_ms.has_value());
            EXPECT_EQ(r.oracle_value.has_value(), r.m == 2 && r.model.rfind("bonferroni", 0) != 0) << r.model;
        }
    }
}

TEST(ScenarioTest, BoundsHoldAtDefaults)
{
    for (const auto& s : scenario_catalog())
        for (const auto& r : run_scenario(s.name, small(22, 20000)))
            EXPECT_TRUE(r.bound_satisfied) << r.scenario << " " << r.model << " " << r.procedure << " "
                                           << r.fdr_hat << " > " << *r.bound;
}

TEST(ScenarioTest, ParameterOverrides)
{
    auto p = small(23, 2000);
    p.m = 2;
    const auto bonf = run_scenario("bonferroni-sharp", p);
    ASSERT_EQ(bonf.size(), 3u);
    EXPECT_NE(bonf[2].model.find("countermonotone"), std::string::npos);

    p = small(23, 2000);
    p.alpha1 = 0.2;
    p.alpha2 = 0.5;
    const auto m2 = run_scenario("m2-su-sharp", p);
    EXPECT_EQ(*m2[0].bound, 0.7);
    EXPECT_EQ(m2[0].alpha, 0.5);

    p = small(23, 2000);
    p.m = 8;
    p.m0 = 9;
    EXPECT_THROW(run_scenario("bh-equality", p), error);
    p.m0 = 5;
    EXPECT_THROW(run_scenario("monotonicity-probe", p), error);
    EXPECT_THROW(run_scenario("nope", p), error);

    RunOptions opts;
    opts.timing = true;
    const auto timed = run_scenario("m2-su-sharp", small(23, 1000), opts);
    ASSERT_TRUE(timed[0].wall_time_ms.has_value());
    EXPECT_GE(*timed[0].wall_time_ms, 0.0);
}

TEST(ScenarioTest, CsvIsByteIdenticalAcrossThreads)
{
    const auto cfg = parse_config_text(R"({
        "seed": 99, "n_reps": 30000, "grid_n": 2000,
        "sweep": [{"scenario": "bh-equality"}, {"scenario": "nonmonotone-sd"}, {"scenario": "by-bound"}]
    })");
    const std::string one = csv_of(run_config(cfg, 1));
    for (std::size_t t : {2u, 5u, 16u})
        EXPECT_EQ(one, csv_of(run_config(cfg, t))) << t;
}
