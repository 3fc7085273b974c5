#pragma once
// Scalar special functions shared across the library: log binomial
// coefficients, the regularized incomplete beta and gamma functions,
// digamma, and normal/chi-square distribution helpers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

#include "sievecox/errors.hpp"

namespace sievecox {

inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

inline double log_choose(long long n, long long k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    if (k == 0 || k == n) return 0.0;
    return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
           std::lgamma(double(n - k) + 1.0);
}

// log P(K = k) for K ~ Binomial(m, q); exact at the q -> {0,1} boundaries.
inline double binom_logpmf(long long k, long long m, double q) {
    if (k < 0 || k > m)
        return -std::numeric_limits<double>::infinity();
    if (q <= 0.0)
        return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    if (q >= 1.0)
        return k == m ? 0.0 : -std::numeric_limits<double>::infinity();
    return log_choose(m, k) + double(k) * std::log(q) +
           double(m - k) * std::log1p(-q);
}

inline double digamma(double x) {
    if (!(x > 0.0))
        throw Error(ErrorCode::DomainError, "digamma requires x > 0");
    double result = 0.0;
    // recurrence into the asymptotic region
    while (x < 6.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    result += std::log(x) - 0.5 * inv -
              inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 -
                       inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
    return result;
}

namespace detail {

// Continued fraction for the incomplete beta (modified Lentz).
inline double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    const double eps = std::numeric_limits<double>::epsilon();
    const double fpmin = std::numeric_limits<double>::min() / eps;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= eps) break;
    }
    return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b) = P(X <= x) for X ~ Beta(a, b).
inline double betainc(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw Error(ErrorCode::DomainError, "betainc requires a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double lnfront = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
    if (x < (a + 1.0) / (a + b + 2.0))
        return std::exp(lnfront) * detail::betacf(a, b, x) / a;
    return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta(b, a)) *
                     detail::betacf(b, a, 1.0 - x) / b;
}

inline double beta_cdf(double x, double a, double b) { return betainc(a, b, x); }

// Regularized lower incomplete gamma P(a, x); series/continued-fraction split.
inline double gammainc_lower(double a, double x) {
    if (!(a > 0.0) || x < 0.0)
        throw Error(ErrorCode::DomainError, "gammainc requires a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * eps) break;
        }
        return sum * std::exp(-x + a * std::log(x) - gln);
    }
    const double fpmin = std::numeric_limits<double>::min() / eps;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= eps) break;
    }
    return 1.0 - std::exp(-x + a * std::log(x) - gln) * h;
}

// Survival function of a chi-square with df degrees of freedom.
inline double chi2_survival(double x, int df) {
    if (df < 1) throw Error(ErrorCode::DomainError, "chi2 df must be >= 1");
    if (x <= 0.0) return 1.0;
    if (df == 2) return std::exp(-0.5 * x);
    return 1.0 - gammainc_lower(0.5 * df, 0.5 * x);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Inverse normal CDF via bisection on erfc; ~1e-13 absolute accuracy.
// Called off any hot path, so robustness beats a polynomial fit here.
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw Error(ErrorCode::DomainError, "normal_quantile requires p in (0,1)");
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (normal_cdf(mid) < p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-13) break;
    }
    return 0.5 * (lo + hi);
}

inline double logsumexp(std::span<const double> v) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : v) mx = std::max(mx, x);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

// Quantile with linear interpolation between order statistics
// (the convention most statistical software defaults to, "type 7").
inline double quantile_type7(std::span<const double> sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 0)
        throw Error(ErrorCode::DomainError, "quantile of empty sample");
    if (n == 1) return sorted[0];
    const double h = (double(n) - 1.0) * p;
    const std::size_t lo = std::size_t(std::clamp(std::floor(h), 0.0, double(n - 1)));
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double w = h - double(lo);
    return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

}  // namespace sievecox
