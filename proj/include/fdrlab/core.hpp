#ifndef FDRLAB_CORE_HPP
#define FDRLAB_CORE_HPP

// Critical-value families, step-up / step-down rejection engines and
// per-realization error metrics.
//
// Indices are 0-based throughout: hypothesis i of an m-vector is p[i], and
// the critical value compared with the (j+1)-th smallest p-value is crit[j].

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fdrlab/error.hpp"

namespace fdrlab {

/// A realized vector of m >= 1 p-values, each in [0,1].
class PValueVector {
public:
    explicit PValueVector(std::vector<double> values) : values_(std::move(values))
    {
        if (values_.empty())
            throw error(errc::invalid_size, "p-value vector must be non-empty");
        for (double v : values_) {
            if (!(v >= 0.0 && v <= 1.0))
                throw error(errc::invalid_pvalue, "p-value outside [0,1]: " + std::to_string(v));
        }
    }

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }

    friend bool operator==(const PValueVector&, const PValueVector&) = default;

private:
    std::vector<double> values_;
};

/// Non-decreasing critical values 0 < alpha_1 <= ... <= alpha_m < 1.
class CriticalValues {
public:
    explicit CriticalValues(std::vector<double> alphas) : alphas_(std::move(alphas))
    {
        if (alphas_.empty())
            throw error(errc::invalid_size, "critical values must be non-empty");
        double prev = 0.0;
        for (double a : alphas_) {
            if (!(a > 0.0 && a < 1.0) || a < prev)
                throw error(errc::invalid_critical_values,
                            "critical values must satisfy 0 < a_1 <= ... <= a_m < 1");
            prev = a;
        }
    }

    std::size_t size() const noexcept { return alphas_.size(); }
    double operator[](std::size_t i) const { return alphas_[i]; }
    std::span<const double> values() const noexcept { return alphas_; }

    friend bool operator==(const CriticalValues&, const CriticalValues&) = default;

private:
    std::vector<double> alphas_;
};

/// Ground-truth split {0..m-1} = I0 u I1 of true and false nulls.
class HypothesisPartition {
public:
    HypothesisPartition(std::size_t m, std::span<const std::size_t> true_nulls) : is_true_(m, false)
    {
        for (std::size_t i : true_nulls) {
            if (i >= m)
                throw error(errc::size_mismatch, "true-null index out of range");
            is_true_[i] = true;
        }
    }

    static HypothesisPartition all_true(std::size_t m)
    {
        std::vector<std::size_t> idx(m);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        return HypothesisPartition(m, idx);
    }

    std::size_t size() const noexcept { return is_true_.size(); }
    bool is_true_null(std::size_t i) const { return is_true_[i]; }
    std::size_t true_null_count() const
    {
        return static_cast<std::size_t>(std::count(is_true_.begin(), is_true_.end(), true));
    }
    std::size_t false_null_count() const { return size() - true_null_count(); }

    std::vector<std::size_t> true_nulls() const
    {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < is_true_.size(); ++i)
            if (is_true_[i])
                out.push_back(i);
        return out;
    }

    friend bool operator==(const HypothesisPartition&, const HypothesisPartition&) = default;

private:
    std::vector<bool> is_true_;
};

struct TestOutcome {
    std::vector<bool> rejected;
    std::size_t rejections = 0;
    std::optional<std::size_t> false_rejections;

    friend bool operator==(const TestOutcome&, const TestOutcome&) = default;
};

namespace detail {

inline void check_level(double alpha, const char* what)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw error(errc::invalid_level, std::string(what) + " must lie in (0,1)");
}

inline void check_size(std::size_t m)
{
    if (m < 1)
        throw error(errc::invalid_size, "m must be at least 1");
}

// Indices sorted by ascending p-value; ties keep ascending original index.
inline std::vector<std::size_t> ascending_order(std::span<const double> p)
{
    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    return order;
}

inline void check_lengths(const PValueVector& p, const CriticalValues& crit)
{
    if (p.size() != crit.size())
        throw error(errc::length_mismatch, "p-value and critical value lengths differ");
}

} // namespace detail

inline CriticalValues bh_critical_values(std::size_t m, double alpha)
{
    detail::check_size(m);
    detail::check_level(alpha, "alpha");
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i)
        out[i] = static_cast<double>(i + 1) * alpha / static_cast<double>(m);
    return CriticalValues(std::move(out));
}

inline double harmonic_number(std::size_t m)
{
    double sum = 0.0;
    for (std::size_t k = m; k >= 1; --k)
        sum += 1.0 / static_cast<double>(k);
    return sum;
}

/// Linear values shrunk by the harmonic sum: alpha_i = i alpha' / (m H_m).
inline CriticalValues by_critical_values(std::size_t m, double alpha_prime)
{
    detail::check_size(m);
    detail::check_level(alpha_prime, "alpha'");
    const double denom = static_cast<double>(m) * harmonic_number(m);
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i)
        out[i] = static_cast<double>(i + 1) * alpha_prime / denom;
    return CriticalValues(std::move(out));
}

inline CriticalValues bonferroni_critical_values(std::size_t m, double alpha)
{
    detail::check_size(m);
    detail::check_level(alpha, "alpha");
    return CriticalValues(std::vector<double>(m, alpha / static_cast<double>(m)));
}

/// Closed bracket [lo, hi] known to contain a sign change of some function.
struct Bracket {
    double lo = 0.0;
    double hi = 0.0;

    double midpoint() const noexcept { return lo + 0.5 * (hi - lo); }
    double width() const noexcept { return hi - lo; }
};

/// Bisection on [lo, hi]; f(lo) and f(hi) must have opposite signs.
/// Returns a bracket of width <= tolerance that still straddles the root.
template <class F>
Bracket bisect(F&& f, double lo, double hi, double tolerance)
{
    if (!(tolerance > 0.0))
        throw error(errc::parameter_constraint, "tolerance must be positive");
    double f_lo = f(lo);
    const double f_hi = f(hi);
    if (f_lo == 0.0)
        return {lo, lo};
    if (f_hi == 0.0)
        return {hi, hi};
    if ((f_lo > 0.0) == (f_hi > 0.0))
        throw error(errc::parameter_constraint, "bisection interval does not bracket a root");
    while (hi - lo > tolerance) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi)
            break; // no representable midpoint left
        const double f_mid = f(mid);
        if (f_mid == 0.0)
            return {mid, mid};
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return {lo, hi};
}

/// f(a) = (1 - a) - exp(-2a); positive root on (0,1) is alpha_0 ~ 0.797.
inline double alpha0_residual(double a) { return (1.0 - a) - std::exp(-2.0 * a); }

inline Bracket alpha0_bracket(double tolerance)
{
    return bisect(alpha0_residual, 0.5, 0.99, tolerance);
}

inline double solve_alpha0(double tolerance) { return alpha0_bracket(tolerance).midpoint(); }

/// Largest admissible level for the modified step-down values.
inline double alpha0() { return solve_alpha0(1e-12); }

/// c_1 = 1 - (1-alpha)^(1/m), c_i = i alpha / m for i >= 2; requires 0 < alpha <= alpha_0.
inline CriticalValues modified_sd_critical_values(std::size_t m, double alpha)
{
    detail::check_size(m);
    if (!(alpha > 0.0))
        throw error(errc::invalid_level, "alpha must be positive");
    if (alpha > alpha0())
        throw error(errc::level_too_large, "alpha exceeds alpha_0 ~ 0.797");
    std::vector<double> out(m);
    out[0] = -std::expm1(std::log1p(-alpha) / static_cast<double>(m));
    for (std::size_t i = 1; i < m; ++i)
        out[i] = static_cast<double>(i + 1) * alpha / static_cast<double>(m);
    return CriticalValues(std::move(out));
}

/// Replaces base[i] by base[k-1], k = #{j : p_j <= p_(i+1)}. Untied order
/// statistics keep their own value; a tie block takes the value at its end.
inline CriticalValues tie_adjust(const PValueVector& p, const CriticalValues& base)
{
    detail::check_lengths(p, base);
    std::vector<double> sorted(p.values().begin(), p.values().end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> out(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const auto k = static_cast<std::size_t>(
            std::upper_bound(sorted.begin(), sorted.end(), sorted[i]) - sorted.begin());
        out[i] = base[k - 1];
    }
    return CriticalValues(std::move(out));
}

inline CriticalValues tie_adjusted_critical_values(const PValueVector& p, double alpha)
{
    return tie_adjust(p, bh_critical_values(p.size(), alpha));
}

/// Step-up: R = max{j : p_(j) <= alpha_j}; reject H_i iff p_i <= alpha_R.
inline TestOutcome step_up(const PValueVector& p, const CriticalValues& crit)
{
    detail::check_lengths(p, crit);
    const std::size_t m = p.size();
    const auto order = detail::ascending_order(p.values());

    std::size_t r = 0;
    for (std::size_t j = m; j >= 1; --j) {
        if (p[order[j - 1]] <= crit[j - 1]) {
            r = j;
            break;
        }
    }

    TestOutcome out;
    out.rejected.assign(m, false);
    if (r > 0) {
        const double threshold = crit[r - 1];
        for (std::size_t i = 0; i < m; ++i)
            out.rejected[i] = p[i] <= threshold;
    }
    out.rejections = r;
    return out;
}

/// Step-down: R = max{j : p_(i) <= alpha_i for all i <= j}; the R smallest
/// p-values are rejected, tied p-values in ascending index order.
inline TestOutcome step_down(const PValueVector& p, const CriticalValues& crit)
{
    detail::check_lengths(p, crit);
    const std::size_t m = p.size();
    const auto order = detail::ascending_order(p.values());

    std::size_t r = 0;
    while (r < m && p[order[r]] <= crit[r])
        ++r;

    TestOutcome out;
    out.rejected.assign(m, false);
    for (std::size_t j = 0; j < r; ++j)
        out.rejected[order[j]] = true;
    out.rejections = r;
    return out;
}

inline std::size_t count_false_rejections(const TestOutcome& outcome,
                                          const HypothesisPartition& partition)
{
    if (outcome.rejected.size() != partition.size())
        throw error(errc::size_mismatch, "outcome and partition sizes differ");
    std::size_t v = 0;
    for (std::size_t i = 0; i < partition.size(); ++i)
        if (outcome.rejected[i] && partition.is_true_null(i))
            ++v;
    return v;
}

inline TestOutcome with_partition(TestOutcome outcome, const HypothesisPartition& partition)
{
    outcome.false_rejections = count_false_rejections(outcome, partition);
    return outcome;
}

/// V / max(R, 1) for one realization.
inline double false_discovery_proportion(const TestOutcome& outcome,
                                         const HypothesisPartition& partition)
{
    const std::size_t v = count_false_rejections(outcome, partition);
    if (outcome.rejections == 0)
        return 0.0;
    return static_cast<double>(v) / static_cast<double>(outcome.rejections);
}

enum class ratio_trend { constant, non_decreasing, non_increasing, mixed };

inline const char* to_string(ratio_trend t) noexcept
{
    switch (t) {
    case ratio_trend::constant: return "constant";
    case ratio_trend::non_decreasing: return "non-decreasing";
    case ratio_trend::non_increasing: return "non-increasing";
    case ratio_trend::mixed: return "mixed";
    }
    return "mixed";
}

/// Shape of i -> alpha_i / i, with steps below a relative 1e-12 treated as flat.
inline ratio_trend alpha_over_index_trend(const CriticalValues& crit)
{
    bool up = false;
    bool down = false;
    double prev = crit[0];
    for (std::size_t i = 1; i < crit.size(); ++i) {
        const double cur = crit[i] / static_cast<double>(i + 1);
        const double scale = std::max(std::abs(cur), std::abs(prev));
        if (cur - prev > 1e-12 * scale)
            up = true;
        else if (prev - cur > 1e-12 * scale)
            down = true;
        prev = cur;
    }
    if (up && down)
        return ratio_trend::mixed;
    if (up)
        return ratio_trend::non_decreasing;
    if (down)
        return ratio_trend::non_increasing;
    return ratio_trend::constant;
}

/// Largest alpha_j / j; m0 times this bounds the step-up FDR under independence.
inline double max_alpha_over_index(const CriticalValues& crit)
{
    double best = 0.0;
    for (std::size_t i = 0; i < crit.size(); ++i)
        best = std::max(best, crit[i] / static_cast<double>(i + 1));
    return best;
}

} // namespace fdrlab

#endif // FDRLAB_CORE_HPP
