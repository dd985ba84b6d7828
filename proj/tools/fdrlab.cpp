// fdrlab: runs named FDR verification scenarios and writes CSV/JSON reports.
//
//   fdrlab list
//   fdrlab run [--config FILE] [--scenario NAME] [--alpha X] [--m N] [--m0 K]
//              [--n-reps N] [--seed S] [--out PATH] [--format csv|json]
//
// Exit status: 0 all bounds hold, 1 a bound was violated (rows still written),
// 2 bad config or invalid model/procedure parameters.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "fdrlab/fdrlab.hpp"

namespace {

std::size_t worker_count()
{
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FDRLAB_THREADS")) {
        char* end = nullptr;
        const unsigned long cap = std::strtoul(env, &end, 10);
        if (end != env && cap > 0)
            n = std::min<std::size_t>(n, cap);
    }
    return n;
}

void print_catalog()
{
    std::cout << "report schema v" << fdrlab::report_schema_version << "\n";
    for (const auto& s : fdrlab::scenario_catalog())
        std::cout << s.name << "\t[" << s.anchor << "]\t" << s.summary << "\n";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multiple-testing FDR verification lab"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "List named scenarios");
    auto* run = app.add_subcommand("run", "Run a scenario or a config file");

    std::string config_path, scenario, out, format;
    double alpha = 0, alpha1 = 0, alpha2 = 0, null_floor = 0;
    std::size_t m = 0, m0 = 0, n_reps = 0, grid_n = 0;
    std::uint64_t seed = 0;
    bool timing = false;

    run->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    auto* o_scenario = run->add_option("--scenario", scenario, "Named scenario");
    auto* o_alpha = run->add_option("--alpha", alpha, "Level alpha");
    auto* o_alpha1 = run->add_option("--alpha1", alpha1, "First critical value (m2-su-sharp)");
    auto* o_alpha2 = run->add_option("--alpha2", alpha2, "Second critical value (m2-su-sharp)");
    auto* o_floor = run->add_option("--null-floor", null_floor, "Lower end of conservative true nulls");
    auto* o_m = run->add_option("--m", m, "Number of hypotheses");
    auto* o_m0 = run->add_option("--m0", m0, "Number of true nulls");
    auto* o_reps = run->add_option("--n-reps", n_reps, "Monte-Carlo replicates");
    auto* o_grid = run->add_option("--grid-n", grid_n, "Cells of the m = 2 integration oracle");
    auto* o_seed = run->add_option("--seed", seed, "Experiment seed (mandatory)");
    auto* o_out = run->add_option("--out", out, "Output path (default stdout)");
    auto* o_format = run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    auto* o_timing = run->add_flag("--timing", timing, "Fill the wall_time_ms column");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (*list) {
        print_catalog();
        return 0;
    }

    std::vector<fdrlab::ReportRow> rows;
    fdrlab::ExperimentConfig cfg;
    try {
        nlohmann::json doc = nlohmann::json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            std::stringstream ss;
            ss << in.rdbuf();
            try {
                doc = nlohmann::json::parse(ss.str());
            } catch (const nlohmann::json::exception& e) {
                throw fdrlab::error(fdrlab::errc::config_parse, std::string("invalid JSON: ") + e.what());
            }
            if (!doc.is_object())
                throw fdrlab::error(fdrlab::errc::config_parse, "config must be a JSON object");
        }
        // Flags override file keys.
        if (*o_scenario) doc["scenario"] = scenario;
        if (*o_alpha) doc["alpha"] = alpha;
        if (*o_alpha1) doc["alpha1"] = alpha1;
        if (*o_alpha2) doc["alpha2"] = alpha2;
        if (*o_floor) doc["null_floor"] = null_floor;
        if (*o_m) doc["m"] = m;
        if (*o_m0) doc["m0"] = m0;
        if (*o_reps) doc["n_reps"] = n_reps;
        if (*o_grid) doc["grid_n"] = grid_n;
        if (*o_seed) doc["seed"] = seed;
        if (*o_out) doc["out"] = out;
        if (*o_format) doc["format"] = format;
        if (*o_timing) doc["timing"] = timing;

        cfg = fdrlab::parse_config(doc);
        rows = fdrlab::run_config(cfg, worker_count());
    } catch (const fdrlab::error& e) {
        std::cerr << "fdrlab: " << e.what() << "\n";
        return 2;
    }

    auto emit = [&](std::ostream& os) {
        if (cfg.format == "json")
            fdrlab::write_json(os, rows);
        else
            fdrlab::write_csv(os, rows);
    };
    if (cfg.out) {
        std::ofstream file(*cfg.out, std::ios::binary);
        if (!file) {
            std::cerr << "fdrlab: cannot open " << *cfg.out << "\n";
            return 2;
        }
        emit(file);
    } else {
        emit(std::cout);
    }

    bool ok = true;
    for (const auto& r : rows) {
        if (!r.bound_satisfied) {
            ok = false;
            std::cerr << "fdrlab: bound violated: " << r.scenario << " " << r.model << " " << r.procedure
                      << " fdr_hat=" << fdrlab::format_real(r.fdr_hat) << " bound=" << fdrlab::format_real(*r.bound)
                      << "\n";
        }
    }
    return ok ? 0 : 1;
}
