#ifndef FDRLAB_TEST_SUPPORT_HPP
#define FDRLAB_TEST_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "fdrlab/core.hpp"

namespace fdrlab::test {

// sup_x |F_n(x) - x| against the uniform CDF on [0,1].
inline double ks_uniform(std::vector<double> xs)
{
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = std::clamp(xs[i], 0.0, 1.0);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - x, x - static_cast<double>(i) / n});
    }
    return d;
}

// Acceptance bound for ks_uniform: the 5% asymptotic critical value with 1.5x slack.
inline double ks_bound(std::size_t n) { return 1.36 / std::sqrt(static_cast<double>(n)) * 1.5; }

inline double correlation(const std::vector<double>& a, const std::vector<double>& b)
{
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

// Brute-force engines phrased through counts instead of order statistics:
// p_(j) <= a_j  <=>  #{i : p_i <= a_j} >= j.
inline std::size_t count_le(const std::vector<double>& p, double t)
{
    return static_cast<std::size_t>(std::count_if(p.begin(), p.end(), [t](double x) { return x <= t; }));
}

inline TestOutcome brute_step_up(const std::vector<double>& p, const std::vector<double>& a)
{
    const std::size_t m = p.size();
    std::size_t r = 0;
    for (std::size_t j = 1; j <= m; ++j)
        if (count_le(p, a[j - 1]) >= j)
            r = j;
    TestOutcome out;
    out.rejected.assign(m, false);
    for (std::size_t i = 0; i < m && r > 0; ++i)
        out.rejected[i] = p[i] <= a[r - 1];
    out.rejections = r;
    return out;
}

inline TestOutcome brute_step_down(const std::vector<double>& p, const std::vector<double>& a)
{
    const std::size_t m = p.size();
    std::size_t r = 0;
    for (std::size_t j = 1; j <= m; ++j) {
        bool all = true;
        for (std::size_t i = 1; i <= j; ++i)
            all = all && count_le(p, a[i - 1]) >= i;
        if (all)
            r = j;
    }
    TestOutcome out;
    out.rejected.assign(m, false);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t rank = 0;
        for (std::size_t k = 0; k < m; ++k)
            if (p[k] < p[i] || (p[k] == p[i] && k < i))
                ++rank;
        out.rejected[i] = rank < r;
    }
    out.rejections = r;
    return out;
}

struct Instance {
    std::vector<double> p;
    std::vector<double> crit;
};

// Mix of coarse-grid values (ties, exact 0 and 1) and continuous draws.
inline Instance random_instance(std::mt19937_64& gen, std::size_t max_m = 8)
{
    std::uniform_int_distribution<std::size_t> size(1, max_m);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> grid(0, 10);
    std::bernoulli_distribution coarse(0.5);
    const std::size_t m = size(gen);
    Instance in;
    for (std::size_t i = 0; i < m; ++i)
        in.p.push_back(coarse(gen) ? grid(gen) / 10.0 : unif(gen));
    for (std::size_t i = 0; i < m; ++i) {
        const double c = coarse(gen) ? std::clamp(grid(gen) / 10.0, 0.05, 0.95) : 0.01 + 0.98 * unif(gen);
        in.crit.push_back(c);
    }
    std::sort(in.crit.begin(), in.crit.end());
    return in;
}

} // namespace fdrlab::test

#endif // FDRLAB_TEST_SUPPORT_HPP
