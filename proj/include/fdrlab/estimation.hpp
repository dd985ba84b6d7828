#ifndef FDRLAB_ESTIMATION_HPP
#define FDRLAB_ESTIMATION_HPP

// Monte-Carlo FDR/FWER estimation, a deterministic two-hypothesis integration
// oracle, and probes for the event decomposition and monotonicity results.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "fdrlab/core.hpp"
#include "fdrlab/error.hpp"
#include "fdrlab/models.hpp"
#include "fdrlab/random.hpp"

namespace fdrlab {

enum class test_kind { step_up, step_down };

inline const char* to_string(test_kind k) noexcept
{
    return k == test_kind::step_up ? "step-up" : "step-down";
}

namespace rule {
struct Bh { double alpha; };
struct By { double alpha_prime; };
struct Bonferroni { double alpha; };
struct ModifiedC { double alpha; };
struct TieAdjustedBh { double alpha; };
struct TieAdjustedC { double alpha; };
struct Explicit { std::vector<double> alphas; };
} // namespace rule

using CriticalValueRule = std::variant<rule::Bh, rule::By, rule::Bonferroni, rule::ModifiedC,
                                       rule::TieAdjustedBh, rule::TieAdjustedC, rule::Explicit>;

struct ProcedureSpec {
    test_kind kind = test_kind::step_up;
    CriticalValueRule rule = rule::Bh{0.05};
};

inline std::string describe(const CriticalValueRule& r)
{
    return std::visit(overloaded{
                          [](const rule::Bh& x) { return "bh(" + format_number(x.alpha) + ")"; },
                          [](const rule::By& x) { return "by(" + format_number(x.alpha_prime) + ")"; },
                          [](const rule::Bonferroni& x) { return "bonferroni(" + format_number(x.alpha) + ")"; },
                          [](const rule::ModifiedC& x) { return "modified_c(" + format_number(x.alpha) + ")"; },
                          [](const rule::TieAdjustedBh& x) {
                              return "tie_adjusted_bh(" + format_number(x.alpha) + ")";
                          },
                          [](const rule::TieAdjustedC& x) {
                              return "tie_adjusted_c(" + format_number(x.alpha) + ")";
                          },
                          [](const rule::Explicit& x) {
                              std::string s = "explicit(";
                              for (std::size_t i = 0; i < x.alphas.size(); ++i) {
                                  if (i)
                                      s += ';';
                                  s += format_number(x.alphas[i]);
                              }
                              return s + ")";
                          },
                      },
                      r);
}

inline std::string describe(const ProcedureSpec& p)
{
    return std::string(p.kind == test_kind::step_up ? "SU-" : "SD-") + describe(p.rule);
}

/// A ProcedureSpec bound to a problem size. Fixed critical values are built
/// once; tie-adjusted rules re-index their base sequence per p-value vector.
class Procedure {
public:
    Procedure(ProcedureSpec spec, std::size_t m) : spec_(std::move(spec)), base_(build_base(spec_.rule, m)) {}

    const ProcedureSpec& spec() const noexcept { return spec_; }
    std::size_t size() const noexcept { return base_.size(); }
    bool tie_adjusted() const noexcept
    {
        return std::holds_alternative<rule::TieAdjustedBh>(spec_.rule) ||
               std::holds_alternative<rule::TieAdjustedC>(spec_.rule);
    }

    /// Critical values before any tie adjustment.
    const CriticalValues& base_critical_values() const noexcept { return base_; }

    CriticalValues critical_values(const PValueVector& p) const
    {
        return tie_adjusted() ? tie_adjust(p, base_) : base_;
    }

    TestOutcome operator()(const PValueVector& p) const
    {
        if (!tie_adjusted())
            return run(p, base_);
        return run(p, tie_adjust(p, base_));
    }

private:
    TestOutcome run(const PValueVector& p, const CriticalValues& crit) const
    {
        return spec_.kind == test_kind::step_up ? step_up(p, crit) : step_down(p, crit);
    }

    static CriticalValues build_base(const CriticalValueRule& r, std::size_t m)
    {
        return std::visit(overloaded{
                              [m](const rule::Bh& x) { return bh_critical_values(m, x.alpha); },
                              [m](const rule::By& x) { return by_critical_values(m, x.alpha_prime); },
                              [m](const rule::Bonferroni& x) { return bonferroni_critical_values(m, x.alpha); },
                              [m](const rule::ModifiedC& x) { return modified_sd_critical_values(m, x.alpha); },
                              [m](const rule::TieAdjustedBh& x) { return bh_critical_values(m, x.alpha); },
                              [m](const rule::TieAdjustedC& x) { return modified_sd_critical_values(m, x.alpha); },
                              [m](const rule::Explicit& x) {
                                  if (x.alphas.size() != m)
                                      throw error(errc::length_mismatch,
                                                  "explicit critical values do not match m");
                                  return CriticalValues(x.alphas);
                              },
                          },
                          r);
    }

    ProcedureSpec spec_;
    CriticalValues base_;
};

/// One replicate: R, V and the false discovery proportion V / max(R, 1).
struct ReplicateRecord {
    std::size_t rejections = 0;
    std::size_t false_rejections = 0;
    double fdp = 0.0;

    bool any_false() const noexcept { return false_rejections > 0; }
};

struct EstimateReport {
    double fdr_hat = 0.0;
    double fwer_hat = 0.0;
    double mean_R = 0.0;
    double mean_V = 0.0;
    double std_error_fdr = 0.0;
    std::size_t n_reps = 0;
    std::uint64_t seed = 0;
    std::string procedure_id;
    std::string model_id;
};

/// Pairwise summation with a fixed split point, so the result depends only
/// on the order of the input.
inline double pairwise_sum(std::span<const double> xs)
{
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs)
            s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

inline ReplicateRecord evaluate(const Procedure& proc, const LabeledSample& s)
{
    if (proc.size() != s.pvalues.size())
        throw error(errc::size_mismatch, "procedure and model sizes differ");
    const TestOutcome out = proc(s.pvalues);
    ReplicateRecord rec;
    rec.rejections = out.rejections;
    rec.false_rejections = count_false_rejections(out, s.partition);
    rec.fdp = rec.rejections == 0 ? 0.0
                                  : static_cast<double>(rec.false_rejections) / static_cast<double>(rec.rejections);
    return rec;
}

namespace detail {

// Runs body(r) for r in [0, n) on up to `threads` workers over contiguous
// chunks. Worker exceptions are rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t n, std::size_t threads, Body&& body)
{
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t r = 0; r < n; ++r)
            body(r);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back([&, t, begin, end] {
            try {
                for (std::size_t r = begin; r < end; ++r)
                    body(r);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool)
        th.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace detail

/// Replicate r draws the model from RandomSeed{seed, r}, so the records do not
/// depend on the number of threads.
inline std::vector<ReplicateRecord> simulate_replicates(const ModelSpec& model, const ProcedureSpec& proc,
                                                        std::size_t n_reps, std::uint64_t seed,
                                                        std::size_t threads = 1)
{
    if (n_reps < 1)
        throw error(errc::parameter_constraint, "n_reps must be at least 1");
    const Procedure bound(proc, model_size(model));
    // Surface construction errors on the calling thread.
    std::vector<ReplicateRecord> records(n_reps);
    records[0] = evaluate(bound, sample(model, RandomSeed{seed, 0}));
    detail::parallel_for(n_reps - 1, threads, [&](std::size_t k) {
        const std::size_t r = k + 1;
        records[r] = evaluate(bound, sample(model, RandomSeed{seed, r}));
    });
    return records;
}

inline EstimateReport summarize(std::span<const ReplicateRecord> records)
{
    const std::size_t n = records.size();
    if (n == 0)
        throw error(errc::parameter_constraint, "no replicates to summarize");
    std::vector<double> fdp(n), any(n), rs(n), vs(n);
    for (std::size_t r = 0; r < n; ++r) {
        fdp[r] = records[r].fdp;
        any[r] = records[r].any_false() ? 1.0 : 0.0;
        rs[r] = static_cast<double>(records[r].rejections);
        vs[r] = static_cast<double>(records[r].false_rejections);
    }
    const double nd = static_cast<double>(n);
    EstimateReport rep;
    rep.n_reps = n;
    rep.fdr_hat = pairwise_sum(fdp) / nd;
    rep.fwer_hat = pairwise_sum(any) / nd;
    rep.mean_R = pairwise_sum(rs) / nd;
    rep.mean_V = pairwise_sum(vs) / nd;
    if (n > 1) {
        for (auto& x : fdp)
            x = (x - rep.fdr_hat) * (x - rep.fdr_hat);
        const double var = pairwise_sum(fdp) / (nd - 1.0);
        rep.std_error_fdr = std::sqrt(var / nd);
    }
    return rep;
}

inline EstimateReport monte_carlo(const ModelSpec& model, const ProcedureSpec& proc, std::size_t n_reps,
                                  std::uint64_t seed, std::size_t threads = 1)
{
    const auto records = simulate_replicates(model, proc, n_reps, seed, threads);
    EstimateReport rep = summarize(records);
    rep.seed = seed;
    rep.procedure_id = describe(proc);
    rep.model_id = describe(model);
    return rep;
}

// ---------------------------------------------------------------------------
// Two-hypothesis integration oracle.

namespace detail {

// A probability mass `weight` spread uniformly on [lo, hi]; lo == hi is an atom.
struct LawPiece {
    double lo;
    double hi;
    double weight;
};

inline std::vector<LawPiece> false_null_pieces(const FalseNullSpec& spec)
{
    if (const auto* d = std::get_if<Dirac>(&spec.law))
        return {{d->values.at(0), d->values.at(0), 1.0}};
    if (const auto* s = std::get_if<ScaledUniform>(&spec.law))
        return {{0.0, s->scale, 1.0}};
    const auto& s = std::get<ShiftedUniform>(spec.law);
    return {{s.shift, s.shift + s.scale, 1.0}};
}

// Density of the first coordinate and law of the second given the first.
struct M2Model {
    double first_lo = 0.0; // first coordinate uniform on [first_lo, 1]
    HypothesisPartition partition = HypothesisPartition::all_true(2);
    std::function<std::vector<LawPiece>(double)> second_given_first;
};

inline M2Model m2_model(const ModelSpec& model)
{
    M2Model out;
    if (const auto* b = std::get_if<BiModel>(&model)) {
        b->false_nulls.validate();
        b->true_nulls.validate();
        if (b->m0 + b->false_nulls.count() != 2 || b->m0 == 0)
            throw error(errc::unsupported_model, "integration oracle needs m = 2 with m0 >= 1");
        out.first_lo = b->true_nulls.lower;
        if (b->m0 == 2) {
            const double lo = b->true_nulls.lower;
            out.second_given_first = [lo](double) { return std::vector<LawPiece>{{lo, 1.0, 1.0}}; };
        } else {
            const std::size_t idx[] = {0};
            out.partition = HypothesisPartition(2, idx);
            auto pieces = false_null_pieces(b->false_nulls);
            out.second_given_first = [pieces](double) { return pieces; };
        }
        return out;
    }
    if (const auto* s = std::get_if<M2SuSharpModel>(&model)) {
        check_m2_su_sharp(s->alpha1, s->alpha2);
        const double a1 = s->alpha1;
        const double a2 = s->alpha2;
        out.second_given_first = [a1, a2](double x) -> std::vector<LawPiece> {
            if (x <= a1)
                return {{1.0 - a1, 1.0, 1.0}};
            if (x <= a2)
                return {{a1, a2, 1.0}};
            const double total = 1.0 - a2;
            return {{0.0, a1, a1 / total}, {a2, 1.0 - a1, (1.0 - a1 - a2) / total}};
        };
        return out;
    }
    if (const auto* s = std::get_if<NonmonotoneSdModel>(&model)) {
        if (!(s->alpha > 0.0 && s->alpha < 1.0))
            throw error(errc::invalid_level, "alpha must lie in (0,1)");
        const std::size_t idx[] = {0};
        out.partition = HypothesisPartition(2, idx);
        auto pieces = false_null_pieces(to_false_null_spec(s->variant, s->alpha));
        out.second_given_first = [pieces](double) { return pieces; };
        return out;
    }
    throw error(errc::unsupported_model, "integration oracle has no closed-form law for " + describe(model));
}

} // namespace detail

/// FDR of a two-hypothesis model by deterministic integration. The first
/// coordinate is integrated by the midpoint rule on grid_n cells; for each
/// cell the second coordinate is integrated exactly, since the rejection
/// pattern is constant between the critical values and the first coordinate.
inline double exact_fdr_m2_grid(const ModelSpec& model, const ProcedureSpec& proc, std::size_t grid_n)
{
    if (grid_n < 1000)
        throw error(errc::parameter_constraint, "grid_n must be at least 1000");
    const detail::M2Model law = detail::m2_model(model);
    const Procedure bound(proc, 2);
    const auto crit = bound.base_critical_values().values();

    auto fdp_at = [&](double x, double y) {
        const TestOutcome out = bound(PValueVector({x, y}));
        return false_discovery_proportion(out, law.partition);
    };

    const double density = 1.0 / (1.0 - law.first_lo);
    std::vector<double> cells(grid_n, 0.0);
    std::vector<double> cuts;
    for (std::size_t k = 0; k < grid_n; ++k) {
        const double x = (static_cast<double>(k) + 0.5) / static_cast<double>(grid_n);
        if (x < law.first_lo)
            continue;
        double acc = 0.0;
        for (const auto& piece : law.second_given_first(x)) {
            if (piece.hi == piece.lo) {
                acc += piece.weight * fdp_at(x, piece.lo);
                continue;
            }
            cuts.assign({piece.lo, piece.hi});
            for (double c : crit)
                if (c > piece.lo && c < piece.hi)
                    cuts.push_back(c);
            if (x > piece.lo && x < piece.hi)
                cuts.push_back(x);
            std::sort(cuts.begin(), cuts.end());
            const double len = piece.hi - piece.lo;
            for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
                const double w = cuts[j + 1] - cuts[j];
                if (w <= 0.0)
                    continue;
                acc += piece.weight * (w / len) * fdp_at(x, cuts[j] + 0.5 * w);
            }
        }
        cells[k] = density * acc;
    }
    return pairwise_sum(cells) / static_cast<double>(grid_n);
}

// ---------------------------------------------------------------------------
// Event decomposition of the two-hypothesis step-up FDR.

struct EventDecomposition {
    double p_a1 = 0.0; // P(p1 <= a1)
    double p_a2 = 0.0; // P(p2 <= a1, p1 > a1)
    double p_c = 0.0;  // P(a1 < p1 <= a2, a1 < p2 <= a2)
    double fdr_hat = 0.0;
    std::size_t n_reps = 0;
    /// Replicates where 1{A1} + 1{A2} + 1{C} differs from the step-up FDP.
    std::size_t mismatches = 0;
    std::size_t count_a1 = 0;
    std::size_t count_a2 = 0;
    std::size_t count_c = 0;

    double total() const noexcept
    {
        return static_cast<double>(count_a1 + count_a2 + count_c) / static_cast<double>(n_reps);
    }
};

/// Splits the FDR of the step-up test with values (a1, a2) over the three
/// disjoint events A1, A2, C, using the same replicate streams as monte_carlo.
inline EventDecomposition event_decomposition_m2(const ModelSpec& model, double alpha1, double alpha2,
                                                 std::size_t n_reps, std::uint64_t seed)
{
    if (n_reps < 1)
        throw error(errc::parameter_constraint, "n_reps must be at least 1");
    const Procedure su(ProcedureSpec{test_kind::step_up, rule::Explicit{{alpha1, alpha2}}}, 2);
    if (!(alpha1 < alpha2))
        throw error(errc::parameter_constraint, "decomposition needs alpha1 < alpha2");
    if (model_size(model) != 2)
        throw error(errc::size_mismatch, "decomposition needs m = 2");

    EventDecomposition out;
    out.n_reps = n_reps;
    std::vector<double> fdp(n_reps);
    for (std::size_t r = 0; r < n_reps; ++r) {
        const LabeledSample s = sample(model, RandomSeed{seed, r});
        if (!(s.partition.is_true_null(0) && s.partition.is_true_null(1)))
            throw error(errc::partition_mismatch, "decomposition needs I0 = {1, 2}");
        const double p1 = s.pvalues[0];
        const double p2 = s.pvalues[1];
        const bool a1 = p1 <= alpha1;
        const bool a2 = p2 <= alpha1 && p1 > alpha1;
        const bool c = p1 > alpha1 && p1 <= alpha2 && p2 > alpha1 && p2 <= alpha2;
        out.count_a1 += a1;
        out.count_a2 += a2;
        out.count_c += c;
        fdp[r] = evaluate(su, s).fdp;
        if (fdp[r] != static_cast<double>(int(a1) + int(a2) + int(c)))
            ++out.mismatches;
    }
    const double nd = static_cast<double>(n_reps);
    out.p_a1 = static_cast<double>(out.count_a1) / nd;
    out.p_a2 = static_cast<double>(out.count_a2) / nd;
    out.p_c = static_cast<double>(out.count_c) / nd;
    out.fdr_hat = pairwise_sum(fdp) / nd;
    return out;
}

// ---------------------------------------------------------------------------

/// FDR of `proc` with m0 uniform true nulls and one false null fixed at each
/// level. Every level reuses the same seed, hence the same true-null draws
/// and interleaving (common random numbers).
inline std::vector<EstimateReport> monotonicity_probe(const ProcedureSpec& proc, std::size_t m0,
                                                      std::span<const double> false_levels, std::size_t n_reps,
                                                      std::uint64_t seed, std::size_t threads = 1)
{
    if (false_levels.empty())
        throw error(errc::invalid_levels, "no false-null levels given");
    for (std::size_t i = 0; i < false_levels.size(); ++i) {
        const double t = false_levels[i];
        if (!(t >= 0.0 && t <= 1.0) || (i > 0 && !(t > false_levels[i - 1])))
            throw error(errc::invalid_levels, "levels must be strictly increasing in [0,1]");
    }
    std::vector<EstimateReport> out;
    out.reserve(false_levels.size());
    for (double t : false_levels)
        out.push_back(monte_carlo(BiModel{m0, FalseNullSpec::dirac({t}), TrueNullLaw::uniform()}, proc, n_reps,
                                  seed, threads));
    return out;
}

} // namespace fdrlab

#endif // FDRLAB_ESTIMATION_HPP
