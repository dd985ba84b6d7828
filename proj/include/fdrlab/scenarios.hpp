#ifndef FDRLAB_SCENARIOS_HPP
#define FDRLAB_SCENARIOS_HPP

// Named verification scenarios. Each one binds a model family, one or more
// procedures and the analytic bound the estimate is checked against.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fdrlab/core.hpp"
#include "fdrlab/estimation.hpp"
#include "fdrlab/models.hpp"

namespace fdrlab {

/// Monte-Carlo slack: an estimate passes a bound when fdr_hat <= bound + 4 SE.
inline constexpr double se_slack = 4.0;

inline bool satisfies_bound(const EstimateReport& rep, double bound)
{
    return rep.fdr_hat <= bound + se_slack * rep.std_error_fdr;
}

struct ScenarioParams {
    std::optional<double> alpha;
    std::optional<double> alpha1;
    std::optional<double> alpha2;
    std::optional<double> null_floor;
    std::optional<std::size_t> m;
    std::optional<std::size_t> m0;
    std::size_t n_reps = 100000;
    std::size_t grid_n = 10000;
    std::uint64_t seed = 0;
};

struct RunOptions {
    std::size_t threads = 1;
    bool timing = false;
};

struct ReportRow {
    std::string scenario;
    std::string model;
    std::size_t m = 0;
    std::size_t m0 = 0;
    double alpha = 0.0;
    std::string procedure;
    std::string kind;
    std::size_t n_reps = 0;
    std::uint64_t seed = 0;
    double fdr_hat = 0.0;
    double fwer_hat = 0.0;
    double se_fdr = 0.0;
    std::optional<double> bound;
    bool bound_satisfied = true;
    std::optional<double> oracle_value;
    std::optional<double> wall_time_ms;
};

struct ScenarioInfo {
    std::string_view name;
    std::string_view anchor;
    std::string_view summary;
};

inline const std::vector<ScenarioInfo>& scenario_catalog()
{
    static const std::vector<ScenarioInfo> catalog{
        {"bh-equality", "BH step-up bound, equality case",
         "SU-BH under independence with uniform true nulls: FDR = m0 alpha / m for any false-null placement"},
        {"bh-conservative", "BH step-up bound, inequality case",
         "SU-BH with stochastically larger true nulls: FDR <= m0 alpha / m"},
        {"bonferroni-sharp", "Bonferroni sharpness under dependence",
         "block-permutation copula construction: FDR = FWER = alpha for the Bonferroni test"},
        {"by-bound", "BY dependence bound and its sharpness for m = 2",
         "SU-BH under dependence: FDR <= min(alpha H_m, 1), attained at m = 2 for alpha < 2/3"},
        {"m2-su-sharp", "two-hypothesis step-up bound min(a1 + a2, 1)",
         "conditional-uniform construction attaining FDR = a1 + a2"},
        {"sd-sharp", "BH step-down bound and its sharpness",
         "p = (U, 0, ..., 0): FDR = alpha / m for SU-BH, SD-BH and tie-adjusted SD"},
        {"modified-sd", "modified first step-down value c_1 = 1 - (1 - alpha)^(1/m)",
         "SD with c-values: FDR <= 1 - (1 - alpha)^(m0/m) <= alpha, equality when false p-values exceed c_m"},
        {"nonmonotone-sd", "step-down FDR is not monotone",
         "p2 in {0, alpha U, U, (1 - alpha) U + alpha}: FDR = alpha/2, 3 alpha/8, alpha/2 - alpha^2/8, alpha/2"},
        {"monotonicity-probe", "step-up FDR monotonicity in false-null p-values",
         "common-random-number sweep of one false null for alpha_i/i increasing, decreasing and constant"},
    };
    return catalog;
}

inline const ScenarioInfo* find_scenario(std::string_view name)
{
    for (const auto& s : scenario_catalog())
        if (s.name == name)
            return &s;
    return nullptr;
}

/// A free-form (model x procedure) run with an optional user-supplied bound.
struct InlineSpec {
    ModelSpec model;
    ProcedureSpec procedure;
    double alpha = 0.0;
    std::optional<double> bound;
};

namespace detail {

inline bool oracle_supported(const ModelSpec& model)
{
    if (model_size(model) != 2)
        return false;
    if (const auto* b = std::get_if<BiModel>(&model))
        return b->m0 >= 1;
    return !std::holds_alternative<BonferroniSharpModel>(model);
}

inline ReportRow make_row(std::string_view scenario, const ModelSpec& model, const ProcedureSpec& proc, double alpha,
                          std::optional<double> bound, const ScenarioParams& params, const RunOptions& opts)
{
    const auto start = std::chrono::steady_clock::now();
    const EstimateReport rep = monte_carlo(model, proc, params.n_reps, params.seed, opts.threads);
    std::optional<double> oracle;
    if (oracle_supported(model))
        oracle = exact_fdr_m2_grid(model, proc, params.grid_n);
    const auto stop = std::chrono::steady_clock::now();

    ReportRow row;
    row.scenario = std::string(scenario);
    row.model = rep.model_id;
    row.m = model_size(model);
    row.m0 = model_true_nulls(model);
    row.alpha = alpha;
    row.procedure = rep.procedure_id;
    row.kind = to_string(proc.kind);
    row.n_reps = rep.n_reps;
    row.seed = rep.seed;
    row.fdr_hat = rep.fdr_hat;
    row.fwer_hat = rep.fwer_hat;
    row.se_fdr = rep.std_error_fdr;
    row.bound = bound;
    row.bound_satisfied = !bound || satisfies_bound(rep, *bound);
    row.oracle_value = oracle;
    if (opts.timing)
        row.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    return row;
}

inline std::size_t require_m0(const ScenarioParams& p, std::size_t m, std::size_t fallback)
{
    const std::size_t m0 = p.m0.value_or(fallback);
    if (m0 > m)
        throw error(errc::parameter_constraint, "m0 cannot exceed m");
    return m0;
}

} // namespace detail

inline std::vector<ReportRow> run_inline(const InlineSpec& spec, const ScenarioParams& params,
                                         const RunOptions& opts = {})
{
    return {detail::make_row("inline", spec.model, spec.procedure, spec.alpha, spec.bound, params, opts)};
}

/// Runs a named scenario; unset parameters take the scenario's defaults.
inline std::vector<ReportRow> run_scenario(std::string_view name, const ScenarioParams& params,
                                           const RunOptions& opts = {})
{
    using detail::make_row;
    std::vector<ReportRow> rows;
    const ScenarioParams& p = params;
    const auto su = [](CriticalValueRule r) { return ProcedureSpec{test_kind::step_up, std::move(r)}; };
    const auto sd = [](CriticalValueRule r) { return ProcedureSpec{test_kind::step_down, std::move(r)}; };

    if (name == "bh-equality" || name == "bh-conservative") {
        const double alpha = p.alpha.value_or(0.1);
        const std::size_t m = p.m.value_or(16);
        const std::size_t m0 = detail::require_m0(p, m, 8);
        const double bound = static_cast<double>(m0) * alpha / static_cast<double>(m);
        if (name == "bh-equality") {
            for (double level : {0.0, 0.99}) {
                BiModel model{m0, FalseNullSpec::dirac(std::vector<double>(m - m0, level)), TrueNullLaw::uniform()};
                rows.push_back(make_row(name, model, su(rule::Bh{alpha}), alpha, bound, p, opts));
            }
        } else {
            BiModel model{m0, FalseNullSpec::dirac(std::vector<double>(m - m0, 0.0)),
                          TrueNullLaw::conservative(p.null_floor.value_or(0.05))};
            rows.push_back(make_row(name, model, su(rule::Bh{alpha}), alpha, bound, p, opts));
        }
    } else if (name == "bonferroni-sharp") {
        const double alpha = p.alpha.value_or(0.25);
        const std::size_t m = p.m.value_or(5);
        std::vector<copula> copulas{copula::independent, copula::comonotone};
        if (m == 2)
            copulas.push_back(copula::countermonotone);
        for (copula c : copulas)
            rows.push_back(make_row(name, BonferroniSharpModel{m, c}, su(rule::Bonferroni{alpha}), alpha, alpha, p, opts));
    } else if (name == "m2-su-sharp") {
        const double a1 = p.alpha1.value_or(0.1);
        const double a2 = p.alpha2.value_or(0.3);
        rows.push_back(make_row(name, M2SuSharpModel{a1, a2}, su(rule::Explicit{{a1, a2}}), a2,
                                std::min(a1 + a2, 1.0), p, opts));
    } else if (name == "by-bound") {
        const double alpha = p.alpha.value_or(0.4);
        const std::size_t m = p.m.value_or(2);
        rows.push_back(make_row(name, M2SuSharpModel{alpha / 2.0, alpha}, su(rule::Bh{alpha}), alpha,
                                std::min(alpha * harmonic_number(2), 1.0), p, opts));
        rows.push_back(make_row(name, M2SuSharpModel{alpha / 3.0, 2.0 * alpha / 3.0}, su(rule::By{alpha}), alpha,
                                alpha, p, opts));
        for (copula c : {copula::independent, copula::comonotone})
            rows.push_back(make_row(name, BonferroniSharpModel{m, c}, su(rule::Bh{alpha}), alpha,
                                    std::min(alpha * harmonic_number(m), 1.0), p, opts));
    } else if (name == "sd-sharp") {
        const double alpha = p.alpha.value_or(0.2);
        const std::size_t m = p.m.value_or(4);
        if (m < 1)
            throw error(errc::invalid_size, "m must be at least 1");
        const BiModel model{1, FalseNullSpec::dirac(std::vector<double>(m - 1, 0.0)), TrueNullLaw::uniform()};
        const double bound = alpha / static_cast<double>(m);
        for (const auto& proc : {su(rule::Bh{alpha}), sd(rule::Bh{alpha}), sd(rule::TieAdjustedBh{alpha})})
            rows.push_back(make_row(name, model, proc, alpha, bound, p, opts));
    } else if (name == "modified-sd") {
        const double alpha = p.alpha.value_or(0.19);
        const std::size_t m = p.m.value_or(2);
        const std::size_t m0 = detail::require_m0(p, m, 1);
        const BiModel model{m0, FalseNullSpec::dirac(std::vector<double>(m - m0, 1.0)), TrueNullLaw::uniform()};
        const double bound = 1.0 - std::pow(1.0 - alpha, static_cast<double>(m0) / static_cast<double>(m));
        for (const auto& proc : {sd(rule::ModifiedC{alpha}), sd(rule::TieAdjustedC{alpha})})
            rows.push_back(make_row(name, model, proc, alpha, bound, p, opts));
    } else if (name == "nonmonotone-sd") {
        const double alpha = p.alpha.value_or(0.2);
        for (sd_variant v : all_sd_variants)
            rows.push_back(make_row(name, NonmonotoneSdModel{v, alpha}, sd(rule::Bh{alpha}), alpha, alpha / 2.0, p,
                                    opts));
    } else if (name == "monotonicity-probe") {
        const double alpha = p.alpha.value_or(0.5);
        const std::size_t m = p.m.value_or(4);
        const std::size_t m0 = detail::require_m0(p, m, m - 1);
        if (m0 + 1 != m)
            throw error(errc::parameter_constraint, "monotonicity-probe uses exactly one false null (m0 = m - 1)");
        std::vector<double> increasing(m), decreasing(m);
        const double md = static_cast<double>(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double k = static_cast<double>(i + 1);
            increasing[i] = alpha * k * k / (md * md);
            decreasing[i] = alpha * std::sqrt(k / md);
        }
        const std::vector<ProcedureSpec> procs{su(rule::Explicit{increasing}), su(rule::Explicit{decreasing}),
                                               su(rule::Bh{alpha})};
        for (const auto& proc : procs) {
            const double bound =
                std::min(1.0, static_cast<double>(m0) * max_alpha_over_index(Procedure(proc, m).base_critical_values()));
            for (double level : {0.0, 0.3, 0.7, 1.0}) {
                const BiModel model{m0, FalseNullSpec::dirac({level}), TrueNullLaw::uniform()};
                rows.push_back(make_row(name, model, proc, alpha, bound, p, opts));
            }
        }
    } else {
        throw error(errc::unknown_variant, "unknown scenario '" + std::string(name) + "'");
    }
    return rows;
}

} // namespace fdrlab

#endif // FDRLAB_SCENARIOS_HPP
