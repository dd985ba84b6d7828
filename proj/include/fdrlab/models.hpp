#ifndef FDRLAB_MODELS_HPP
#define FDRLAB_MODELS_HPP

// Seeded p-value generators: independence (BI) models with uniform or
// conservative true nulls, and the adversarial dependence constructions that
// make the Bonferroni, BH and step-down bounds sharp.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "fdrlab/core.hpp"
#include "fdrlab/error.hpp"
#include "fdrlab/random.hpp"

namespace fdrlab {

struct Dirac {
    std::vector<double> values;
};

/// scale * U for each false null.
struct ScaledUniform {
    double scale = 1.0;
    std::size_t count = 1;
};

/// shift + scale * U for each false null.
struct ShiftedUniform {
    double scale = 1.0;
    double shift = 0.0;
    std::size_t count = 1;
};

/// Law of the false-null block; every coordinate is independent of the true nulls.
struct FalseNullSpec {
    std::variant<Dirac, ScaledUniform, ShiftedUniform> law = Dirac{};

    static FalseNullSpec none() { return {}; }
    static FalseNullSpec dirac(std::vector<double> values) { return {Dirac{std::move(values)}}; }
    static FalseNullSpec scaled_uniform(double scale, std::size_t count = 1)
    {
        return {ScaledUniform{scale, count}};
    }
    static FalseNullSpec shifted_uniform(double scale, double shift, std::size_t count = 1)
    {
        return {ShiftedUniform{scale, shift, count}};
    }

    std::size_t count() const
    {
        return std::visit(
            [](const auto& l) -> std::size_t {
                if constexpr (std::is_same_v<std::decay_t<decltype(l)>, Dirac>)
                    return l.values.size();
                else
                    return l.count;
            },
            law);
    }

    void validate() const
    {
        if (const auto* d = std::get_if<Dirac>(&law)) {
            for (double v : d->values)
                if (!(v >= 0.0 && v <= 1.0))
                    throw error(errc::parameter_constraint, "dirac false-null value outside [0,1]");
        } else if (const auto* s = std::get_if<ScaledUniform>(&law)) {
            if (!(s->scale > 0.0 && s->scale <= 1.0))
                throw error(errc::parameter_constraint, "scaled_uniform scale must lie in (0,1]");
        } else if (const auto* s = std::get_if<ShiftedUniform>(&law)) {
            if (!(s->scale > 0.0 && s->scale <= 1.0) || !(s->shift >= 0.0) || s->scale + s->shift > 1.0)
                throw error(errc::parameter_constraint,
                            "shifted_uniform needs scale in (0,1], shift >= 0, scale + shift <= 1");
        }
    }

    /// Appends count() draws; uniforms are consumed only by the random variants.
    void draw(Rng& rng, std::vector<double>& out) const
    {
        if (const auto* d = std::get_if<Dirac>(&law)) {
            out.insert(out.end(), d->values.begin(), d->values.end());
        } else if (const auto* s = std::get_if<ScaledUniform>(&law)) {
            for (std::size_t i = 0; i < s->count; ++i)
                out.push_back(s->scale * rng.uniform());
        } else if (const auto* s = std::get_if<ShiftedUniform>(&law)) {
            for (std::size_t i = 0; i < s->count; ++i)
                out.push_back(std::min(1.0, s->shift + s->scale * rng.uniform()));
        }
    }

    std::string describe() const;
};

/// True-null law lower + (1 - lower) U. lower = 0 is the uniform case; lower > 0
/// gives a stochastically larger (conservative) p-value, P(p <= x) <= x.
struct TrueNullLaw {
    double lower = 0.0;

    static TrueNullLaw uniform() { return {}; }
    static TrueNullLaw conservative(double lower) { return {lower}; }

    bool is_uniform() const noexcept { return lower == 0.0; }

    void validate() const
    {
        if (!(lower >= 0.0 && lower < 1.0))
            throw error(errc::parameter_constraint, "conservative lower end must lie in [0,1)");
    }

    double draw(Rng& rng) const { return lower + (1.0 - lower) * rng.uniform(); }
};

enum class copula { independent, comonotone, countermonotone };

inline const char* to_string(copula c) noexcept
{
    switch (c) {
    case copula::independent: return "independent";
    case copula::comonotone: return "comonotone";
    case copula::countermonotone: return "countermonotone";
    }
    return "independent";
}

/// The four false-null placements compared in the step-down non-monotonicity example.
enum class sd_variant { zero, alpha_u, u, shifted };

inline const char* to_string(sd_variant v) noexcept
{
    switch (v) {
    case sd_variant::zero: return "zero";
    case sd_variant::alpha_u: return "alphaU";
    case sd_variant::u: return "U";
    case sd_variant::shifted: return "shifted";
    }
    return "zero";
}

inline constexpr std::array<sd_variant, 4> all_sd_variants{sd_variant::zero, sd_variant::alpha_u,
                                                           sd_variant::u, sd_variant::shifted};

/// zero -> dirac(0), alphaU -> alpha U, U -> U, shifted -> (1 - alpha) U + alpha.
inline FalseNullSpec to_false_null_spec(sd_variant v, double alpha)
{
    switch (v) {
    case sd_variant::zero: return FalseNullSpec::dirac({0.0});
    case sd_variant::alpha_u: return FalseNullSpec::scaled_uniform(alpha);
    case sd_variant::u: return FalseNullSpec::scaled_uniform(1.0);
    case sd_variant::shifted: return FalseNullSpec::shifted_uniform(1.0 - alpha, alpha);
    }
    throw error(errc::unknown_variant, "unknown step-down variant");
}

struct LabeledSample {
    PValueVector pvalues;
    HypothesisPartition partition;
};

inline std::string format_number(double x);

inline std::string FalseNullSpec::describe() const
{
    if (const auto* d = std::get_if<Dirac>(&law)) {
        std::string s = "dirac(";
        for (std::size_t i = 0; i < d->values.size(); ++i) {
            if (i)
                s += ';';
            s += format_number(d->values[i]);
        }
        return s + ")";
    }
    if (const auto* s = std::get_if<ScaledUniform>(&law))
        return "scaled_uniform(" + format_number(s->scale) + ")x" + std::to_string(s->count);
    const auto& s = std::get<ShiftedUniform>(law);
    return "shifted_uniform(" + format_number(s.scale) + ";" + format_number(s.shift) + ")x" +
           std::to_string(s.count);
}

/// Shortest "%.*g" text (up to 17 digits) that round-trips the value; used in
/// descriptors only. Report columns use fixed 17-digit output.
inline std::string format_number(double x)
{
    char buf[32];
    for (int digits = 1; digits <= 17; ++digits) {
        std::snprintf(buf, sizeof buf, "%.*g", digits, x);
        if (std::strtod(buf, nullptr) == x)
            break;
    }
    return buf;
}

/// m0 true nulls drawn i.i.d. from `true_nulls`, then the false-null block,
/// then a seeded interleaving of all m positions.
inline LabeledSample sample_bi_uniform(std::size_t m0, const FalseNullSpec& false_spec, RandomSeed seed,
                                       const TrueNullLaw& true_nulls = TrueNullLaw::uniform())
{
    false_spec.validate();
    true_nulls.validate();
    const std::size_t m = m0 + false_spec.count();
    if (m == 0)
        throw error(errc::empty_problem, "model has no hypotheses");

    Rng rng(seed);
    std::vector<double> block;
    block.reserve(m);
    for (std::size_t i = 0; i < m0; ++i)
        block.push_back(true_nulls.draw(rng));
    false_spec.draw(rng, block);

    std::vector<std::size_t> position(m);
    std::iota(position.begin(), position.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(position));

    std::vector<double> p(m);
    std::vector<std::size_t> true_idx;
    true_idx.reserve(m0);
    for (std::size_t k = 0; k < m; ++k) {
        p[position[k]] = block[k];
        if (k < m0)
            true_idx.push_back(position[k]);
    }
    return {PValueVector(std::move(p)), HypothesisPartition(m, true_idx)};
}

/// Bonferroni least-favorable construction: U from the copula, U'_i = (i + U_i)/m
/// for 0-based block i, then p_i = U'_sigma(i) for a uniform random permutation.
inline LabeledSample sample_bonferroni_sharp(std::size_t m, copula c, RandomSeed seed)
{
    if (m < 1)
        throw error(errc::empty_problem, "model has no hypotheses");
    if (c == copula::countermonotone && m != 2)
        throw error(errc::parameter_constraint, "countermonotone copula requires m = 2");

    Rng rng(seed);
    std::vector<double> u(m);
    switch (c) {
    case copula::independent:
        for (auto& x : u)
            x = rng.uniform();
        break;
    case copula::comonotone:
        std::fill(u.begin(), u.end(), rng.uniform());
        break;
    case copula::countermonotone:
        u[0] = rng.uniform();
        u[1] = 1.0 - u[0];
        break;
    }

    std::vector<std::size_t> sigma(m);
    std::iota(sigma.begin(), sigma.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(sigma));

    const double md = static_cast<double>(m);
    std::vector<double> p(m);
    for (std::size_t i = 0; i < m; ++i)
        p[i] = (static_cast<double>(sigma[i]) + u[sigma[i]]) / md;
    return {PValueVector(std::move(p)), HypothesisPartition::all_true(m)};
}

inline void check_m2_su_sharp(double alpha1, double alpha2)
{
    if (!(alpha1 > 0.0 && alpha1 < alpha2 && alpha2 < 1.0 && alpha1 + alpha2 < 1.0))
        throw error(errc::parameter_constraint,
                    "m2_su_sharp needs 0 < alpha1 < alpha2 < 1 and alpha1 + alpha2 < 1");
}

/// p2 given p1 = x for the two-hypothesis step-up least-favorable law, as a
/// function of a second uniform v. Boundary x values go to the lower branch.
inline double m2_su_sharp_conditional(double x, double v, double alpha1, double alpha2)
{
    if (x <= alpha1)
        return (1.0 - alpha1) + alpha1 * v;
    if (x <= alpha2)
        return alpha1 + (alpha2 - alpha1) * v;
    // Uniform on (0, alpha1] u (alpha2, 1 - alpha1], total length 1 - alpha2.
    const double t = (1.0 - alpha2) * v;
    return t <= alpha1 ? t : alpha2 + (t - alpha1);
}

inline LabeledSample sample_m2_su_sharp(double alpha1, double alpha2, RandomSeed seed)
{
    check_m2_su_sharp(alpha1, alpha2);
    Rng rng(seed);
    const double p1 = rng.uniform();
    const double p2 = m2_su_sharp_conditional(p1, rng.uniform(), alpha1, alpha2);
    return {PValueVector({p1, p2}), HypothesisPartition::all_true(2)};
}

/// p1 uniform true null, p2 the false null built from an independent uniform U.
/// Every variant consumes the same two draws, so one seed couples all four.
inline LabeledSample sample_nonmonotone_sd(sd_variant variant, double alpha, RandomSeed seed)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw error(errc::invalid_level, "alpha must lie in (0,1)");
    Rng rng(seed);
    const double p1 = rng.uniform();
    const double u = rng.uniform();
    double p2 = 0.0;
    switch (variant) {
    case sd_variant::zero: p2 = 0.0; break;
    case sd_variant::alpha_u: p2 = alpha * u; break;
    case sd_variant::u: p2 = u; break;
    case sd_variant::shifted: p2 = (1.0 - alpha) * u + alpha; break;
    default: throw error(errc::unknown_variant, "unknown step-down variant");
    }
    const std::size_t true_idx[] = {0};
    return {PValueVector({p1, p2}), HypothesisPartition(2, true_idx)};
}

inline std::array<LabeledSample, 4> sample_nonmonotone_sd_all(double alpha, RandomSeed seed)
{
    return {sample_nonmonotone_sd(sd_variant::zero, alpha, seed),
            sample_nonmonotone_sd(sd_variant::alpha_u, alpha, seed),
            sample_nonmonotone_sd(sd_variant::u, alpha, seed),
            sample_nonmonotone_sd(sd_variant::shifted, alpha, seed)};
}

// Model specs consumed by the estimators.

struct BiModel {
    std::size_t m0 = 0;
    FalseNullSpec false_nulls;
    TrueNullLaw true_nulls;
};

struct BonferroniSharpModel {
    std::size_t m = 1;
    copula dependence = copula::independent;
};

struct M2SuSharpModel {
    double alpha1 = 0.1;
    double alpha2 = 0.3;
};

struct NonmonotoneSdModel {
    sd_variant variant = sd_variant::zero;
    double alpha = 0.2;
};

using ModelSpec = std::variant<BiModel, BonferroniSharpModel, M2SuSharpModel, NonmonotoneSdModel>;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline LabeledSample sample(const ModelSpec& model, RandomSeed seed)
{
    return std::visit(
        overloaded{
            [&](const BiModel& b) { return sample_bi_uniform(b.m0, b.false_nulls, seed, b.true_nulls); },
            [&](const BonferroniSharpModel& b) { return sample_bonferroni_sharp(b.m, b.dependence, seed); },
            [&](const M2SuSharpModel& b) { return sample_m2_su_sharp(b.alpha1, b.alpha2, seed); },
            [&](const NonmonotoneSdModel& b) { return sample_nonmonotone_sd(b.variant, b.alpha, seed); },
        },
        model);
}

inline std::size_t model_size(const ModelSpec& model)
{
    return std::visit(overloaded{
                          [](const BiModel& b) { return b.m0 + b.false_nulls.count(); },
                          [](const BonferroniSharpModel& b) { return b.m; },
                          [](const M2SuSharpModel&) { return std::size_t{2}; },
                          [](const NonmonotoneSdModel&) { return std::size_t{2}; },
                      },
                      model);
}

inline std::size_t model_true_nulls(const ModelSpec& model)
{
    return std::visit(overloaded{
                          [](const BiModel& b) { return b.m0; },
                          [](const BonferroniSharpModel& b) { return b.m; },
                          [](const M2SuSharpModel&) { return std::size_t{2}; },
                          [](const NonmonotoneSdModel&) { return std::size_t{1}; },
                      },
                      model);
}

inline std::string describe(const ModelSpec& model)
{
    return std::visit(
        overloaded{
            [](const BiModel& b) {
                std::string s = "bi(m0=" + std::to_string(b.m0) + ";" + b.false_nulls.describe();
                if (!b.true_nulls.is_uniform())
                    s += ";conservative(" + format_number(b.true_nulls.lower) + ")";
                return s + ")";
            },
            [](const BonferroniSharpModel& b) {
                return "bonferroni_sharp(m=" + std::to_string(b.m) + ";" + to_string(b.dependence) + ")";
            },
            [](const M2SuSharpModel& b) {
                return "m2_su_sharp(" + format_number(b.alpha1) + ";" + format_number(b.alpha2) + ")";
            },
            [](const NonmonotoneSdModel& b) {
                return std::string("nonmonotone_sd(") + to_string(b.variant) + ";" + format_number(b.alpha) + ")";
            },
        },
        model);
}

} // namespace fdrlab

#endif // FDRLAB_MODELS_HPP
