#ifndef FDRLAB_CONFIG_HPP
#define FDRLAB_CONFIG_HPP

// Experiment configuration: a flat JSON object with an optional "sweep" array
// of parameter bindings. Every binding produces its own report rows, in order.
//
//   {"scenario": "bh-equality", "seed": 7, "alpha": 0.1, "m": 16, "m0": 8,
//    "n_reps": 100000, "out": "bh.csv", "format": "csv",
//    "sweep": [{"alpha": 0.05}, {"alpha": 0.1, "m0": 4}]}
//
// "scenario" may instead be an inline object, e.g.
//   {"model": "bi", "m0": 3, "false_null": "dirac", "false_values": [0.0],
//    "kind": "step-down", "critical_values": "bh", "alpha": 0.2, "bound": 0.15}

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fdrlab/error.hpp"
#include "fdrlab/estimation.hpp"
#include "fdrlab/models.hpp"
#include "fdrlab/scenarios.hpp"

namespace fdrlab {

struct RunBinding {
    std::string scenario;            // empty for inline runs
    std::optional<nlohmann::json> inline_spec;
    ScenarioParams params;
};

struct ExperimentConfig {
    std::vector<RunBinding> runs;
    std::optional<std::string> out;
    std::string format = "csv";
    bool timing = false;
};

namespace detail {

[[noreturn]] inline void config_fail(const std::string& what) { throw error(errc::config_parse, what); }

inline void check_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed, const char* where)
{
    for (const auto& [key, value] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            config_fail(std::string("unknown key '") + key + "' in " + where);
    }
}

inline std::optional<double> opt_real(const nlohmann::json& obj, const char* key)
{
    if (!obj.contains(key))
        return std::nullopt;
    const auto& v = obj.at(key);
    if (!v.is_number())
        config_fail(std::string("'") + key + "' must be a number");
    return v.get<double>();
}

inline std::optional<std::uint64_t> opt_unsigned(const nlohmann::json& obj, const char* key)
{
    if (!obj.contains(key))
        return std::nullopt;
    const auto& v = obj.at(key);
    if (v.is_number_unsigned())
        return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    config_fail(std::string("'") + key + "' must be a non-negative integer");
}

inline std::optional<std::string> opt_string(const nlohmann::json& obj, const char* key)
{
    if (!obj.contains(key))
        return std::nullopt;
    const auto& v = obj.at(key);
    if (!v.is_string())
        config_fail(std::string("'") + key + "' must be a string");
    return v.get<std::string>();
}

inline std::vector<double> real_list(const nlohmann::json& obj, const char* key)
{
    if (!obj.contains(key))
        config_fail(std::string("missing '") + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_array())
        config_fail(std::string("'") + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number())
            config_fail(std::string("'") + key + "' must be an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

// Applies the parameter keys present in obj on top of params.
inline void apply_params(const nlohmann::json& obj, ScenarioParams& params)
{
    if (auto x = opt_real(obj, "alpha")) params.alpha = x;
    if (auto x = opt_real(obj, "alpha1")) params.alpha1 = x;
    if (auto x = opt_real(obj, "alpha2")) params.alpha2 = x;
    if (auto x = opt_real(obj, "null_floor")) params.null_floor = x;
    if (auto x = opt_unsigned(obj, "m")) params.m = static_cast<std::size_t>(*x);
    if (auto x = opt_unsigned(obj, "m0")) params.m0 = static_cast<std::size_t>(*x);
    if (auto x = opt_unsigned(obj, "n_reps")) params.n_reps = static_cast<std::size_t>(*x);
    if (auto x = opt_unsigned(obj, "grid_n")) params.grid_n = static_cast<std::size_t>(*x);
    if (auto x = opt_unsigned(obj, "seed")) params.seed = *x;
}

inline void apply_scenario(const nlohmann::json& obj, RunBinding& run)
{
    if (!obj.contains("scenario"))
        return;
    const auto& s = obj.at("scenario");
    if (s.is_string()) {
        run.scenario = s.get<std::string>();
        run.inline_spec.reset();
        if (!find_scenario(run.scenario))
            config_fail("unknown scenario '" + run.scenario + "'");
    } else if (s.is_object()) {
        run.scenario.clear();
        run.inline_spec = s;
    } else {
        config_fail("'scenario' must be a name or an inline object");
    }
}

} // namespace detail

/// Resolves an inline scenario object against the binding's parameters.
inline InlineSpec parse_inline(const nlohmann::json& obj, const ScenarioParams& params)
{
    using namespace detail;
    check_keys(obj,
               {"model", "m", "m0", "false_null", "false_values", "scale", "shift", "count", "null_floor", "copula",
                "alpha1", "alpha2", "variant", "kind", "critical_values", "alpha", "alphas", "bound"},
               "inline scenario");
    InlineSpec spec;
    const std::optional<double> alpha = opt_real(obj, "alpha") ? opt_real(obj, "alpha") : params.alpha;

    const std::string model = opt_string(obj, "model").value_or("bi");
    if (model == "bi") {
        BiModel b;
        b.m0 = static_cast<std::size_t>(opt_unsigned(obj, "m0").value_or(params.m0.value_or(0)));
        const std::string fn = opt_string(obj, "false_null").value_or("dirac");
        const auto count = static_cast<std::size_t>(opt_unsigned(obj, "count").value_or(1));
        if (fn == "dirac")
            b.false_nulls = FalseNullSpec::dirac(obj.contains("false_values") ? real_list(obj, "false_values")
                                                                              : std::vector<double>{});
        else if (fn == "scaled-uniform")
            b.false_nulls = FalseNullSpec::scaled_uniform(opt_real(obj, "scale").value_or(1.0), count);
        else if (fn == "shifted-uniform")
            b.false_nulls = FalseNullSpec::shifted_uniform(opt_real(obj, "scale").value_or(1.0),
                                                           opt_real(obj, "shift").value_or(0.0), count);
        else
            config_fail("unknown false_null '" + fn + "'");
        const double floor = opt_real(obj, "null_floor").value_or(params.null_floor.value_or(0.0));
        b.true_nulls = TrueNullLaw::conservative(floor);
        spec.model = b;
    } else if (model == "bonferroni-sharp") {
        BonferroniSharpModel b;
        b.m = static_cast<std::size_t>(opt_unsigned(obj, "m").value_or(params.m.value_or(1)));
        const std::string c = opt_string(obj, "copula").value_or("independent");
        if (c == "independent")
            b.dependence = copula::independent;
        else if (c == "comonotone")
            b.dependence = copula::comonotone;
        else if (c == "countermonotone")
            b.dependence = copula::countermonotone;
        else
            config_fail("unknown copula '" + c + "'");
        spec.model = b;
    } else if (model == "m2-su-sharp") {
        const auto a1 = opt_real(obj, "alpha1") ? opt_real(obj, "alpha1") : params.alpha1;
        const auto a2 = opt_real(obj, "alpha2") ? opt_real(obj, "alpha2") : params.alpha2;
        if (!a1 || !a2)
            config_fail("m2-su-sharp needs alpha1 and alpha2");
        spec.model = M2SuSharpModel{*a1, *a2};
    } else if (model == "nonmonotone-sd") {
        const std::string v = opt_string(obj, "variant").value_or("zero");
        const auto it = std::find_if(all_sd_variants.begin(), all_sd_variants.end(),
                                     [&](sd_variant x) { return v == to_string(x); });
        if (it == all_sd_variants.end())
            throw error(errc::unknown_variant, "unknown variant '" + v + "'");
        if (!alpha)
            config_fail("nonmonotone-sd needs alpha");
        spec.model = NonmonotoneSdModel{*it, *alpha};
    } else {
        config_fail("unknown model '" + model + "'");
    }

    const std::string kind = opt_string(obj, "kind").value_or("step-up");
    if (kind == "step-up")
        spec.procedure.kind = test_kind::step_up;
    else if (kind == "step-down")
        spec.procedure.kind = test_kind::step_down;
    else
        config_fail("unknown kind '" + kind + "'");

    const std::string cv = opt_string(obj, "critical_values").value_or("bh");
    if (cv == "explicit") {
        auto alphas = real_list(obj, "alphas");
        spec.alpha = alpha.value_or(alphas.empty() ? 0.0 : alphas.back());
        spec.procedure.rule = rule::Explicit{std::move(alphas)};
    } else {
        if (!alpha)
            config_fail("critical_values '" + cv + "' needs alpha");
        spec.alpha = *alpha;
        if (cv == "bh")
            spec.procedure.rule = rule::Bh{*alpha};
        else if (cv == "by")
            spec.procedure.rule = rule::By{*alpha};
        else if (cv == "bonferroni")
            spec.procedure.rule = rule::Bonferroni{*alpha};
        else if (cv == "modified-c")
            spec.procedure.rule = rule::ModifiedC{*alpha};
        else if (cv == "tie-adjusted-bh")
            spec.procedure.rule = rule::TieAdjustedBh{*alpha};
        else if (cv == "tie-adjusted-c")
            spec.procedure.rule = rule::TieAdjustedC{*alpha};
        else
            config_fail("unknown critical_values '" + cv + "'");
    }
    spec.bound = opt_real(obj, "bound");
    return spec;
}

inline ExperimentConfig parse_config(const nlohmann::json& doc)
{
    using namespace detail;
    if (!doc.is_object())
        config_fail("config must be a JSON object");
    check_keys(doc,
               {"scenario", "seed", "alpha", "alpha1", "alpha2", "m", "m0", "n_reps", "grid_n", "null_floor", "out",
                "format", "sweep", "timing"},
               "config");

    ExperimentConfig cfg;
    cfg.out = opt_string(doc, "out");
    cfg.format = opt_string(doc, "format").value_or("csv");
    if (cfg.format != "csv" && cfg.format != "json")
        config_fail("format must be csv or json");
    if (doc.contains("timing")) {
        if (!doc.at("timing").is_boolean())
            config_fail("'timing' must be a boolean");
        cfg.timing = doc.at("timing").get<bool>();
    }
    if (!doc.contains("seed"))
        config_fail("'seed' is mandatory");

    RunBinding base;
    apply_scenario(doc, base);
    apply_params(doc, base.params);

    std::vector<nlohmann::json> bindings;
    if (doc.contains("sweep")) {
        const auto& sweep = doc.at("sweep");
        if (!sweep.is_array() || sweep.empty())
            config_fail("'sweep' must be a non-empty array of objects");
        for (const auto& b : sweep) {
            if (!b.is_object())
                config_fail("'sweep' entries must be objects");
            check_keys(b, {"scenario", "seed", "alpha", "alpha1", "alpha2", "m", "m0", "n_reps", "grid_n", "null_floor"},
                       "sweep binding");
            bindings.push_back(b);
        }
    } else {
        bindings.push_back(nlohmann::json::object());
    }

    for (const auto& b : bindings) {
        RunBinding run = base;
        apply_scenario(b, run);
        apply_params(b, run.params);
        if (run.scenario.empty() && !run.inline_spec)
            config_fail("'scenario' is mandatory");
        if (run.params.n_reps < 1)
            config_fail("n_reps must be at least 1");
        if (run.inline_spec)
            parse_inline(*run.inline_spec, run.params); // key and name errors surface here
        cfg.runs.push_back(std::move(run));
    }
    return cfg;
}

inline ExperimentConfig parse_config_text(const std::string& text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        detail::config_fail(std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

/// Runs every binding in config order.
inline std::vector<ReportRow> run_config(const ExperimentConfig& cfg, std::size_t threads = 1)
{
    const RunOptions opts{threads, cfg.timing};
    std::vector<ReportRow> rows;
    for (const auto& run : cfg.runs) {
        auto part = run.inline_spec ? run_inline(parse_inline(*run.inline_spec, run.params), run.params, opts)
                                    : run_scenario(run.scenario, run.params, opts);
        rows.insert(rows.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return rows;
}

} // namespace fdrlab

#endif // FDRLAB_CONFIG_HPP
