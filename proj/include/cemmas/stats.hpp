#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace cemmas {

// z for a two-sided 99% interval; all Monte Carlo confidence statements in
// the harness use this level.
inline constexpr double kZ99 = 2.5758293035489004;

struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;
};

// Wilson score interval for a binomial proportion.
inline WilsonInterval wilson(long long successes, long long trials, double z = kZ99) {
    if (trials <= 0 || successes < 0 || successes > trials)
        throw std::invalid_argument("wilson: bad counts");
    const double nd = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / nd;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nd;
    const double center = (phat + z2 / (2.0 * nd)) / denom;
    const double radius =
        z / denom * std::sqrt(phat * (1.0 - phat) / nd + z2 / (4.0 * nd * nd));
    WilsonInterval ci{std::max(0.0, center - radius), std::min(1.0, center + radius)};
    if (successes == 0) ci.low = 0.0;
    if (successes == trials) ci.high = 1.0;
    return ci;
}

namespace detail {

inline double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_contfrac(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace detail

// Regularized upper incomplete gamma Q(a, x).
inline double gammq(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gammq: domain");
    if (x == 0.0) return 1.0;
    return x < a + 1.0 ? 1.0 - detail::gamma_p_series(a, x) : detail::gamma_q_contfrac(a, x);
}

// Upper-tail p-value of the chi-square distribution.
inline double chi_square_pvalue(double statistic, int dof) {
    if (dof < 1) throw std::invalid_argument("chi_square_pvalue: dof must be >= 1");
    return gammq(dof / 2.0, statistic / 2.0);
}

// Goodness-of-fit p-value of observed counts against equal expected counts.
inline double chi_square_uniform_pvalue(const std::vector<long long>& counts) {
    if (counts.size() < 2) throw std::invalid_argument("chi_square_uniform_pvalue: need >= 2 cells");
    long long total = 0;
    for (long long c : counts) total += c;
    if (total <= 0) throw std::invalid_argument("chi_square_uniform_pvalue: empty sample");
    const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
    double stat = 0.0;
    for (long long c : counts) {
        const double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    return chi_square_pvalue(stat, static_cast<int>(counts.size()) - 1);
}

} // namespace cemmas
