#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "stimrec/errors.hpp"

namespace stimrec {

// Regularized upper incomplete gamma Q(a, x) = Gamma(a,x)/Gamma(a).
// Series for x < a+1, Lentz continued fraction otherwise; rel. tol. 1e-12.
inline double incomplete_gamma_q(double a, double x) {
    if (!(a > 0.0)) throw data_error("incomplete_gamma_q: a must be positive");
    if (x < 0.0) throw data_error("incomplete_gamma_q: x must be nonnegative");
    if (x == 0.0) return 1.0;

    const double log_prefactor = a * std::log(x) - x - std::lgamma(a);
    constexpr int kMaxIter = 1000;
    constexpr double kTol = 1e-12;
    constexpr double kTiny = 1e-300;

    if (x < a + 1.0) {
        // P(a,x) = x^a e^-x / Gamma(a) * sum_n x^n / (a(a+1)...(a+n))
        double term = 1.0 / a;
        double sum = term;
        for (int n = 1; n <= kMaxIter; ++n) {
            term *= x / (a + n);
            sum += term;
            if (std::abs(term) < std::abs(sum) * kTol)
                return 1.0 - sum * std::exp(log_prefactor);
        }
        throw numeric_error("incomplete_gamma_q: series did not converge");
    }

    // Q(a,x) = x^a e^-x / Gamma(a) * CF, CF = 1/(x+1-a- 1*(1-a)/(x+3-a- ...))
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kTol) return h * std::exp(log_prefactor);
    }
    throw numeric_error("incomplete_gamma_q: continued fraction did not converge");
}

namespace detail {

// Continued fraction for the incomplete beta (Lentz), valid for
// x < (a+1)/(a+b+2); callers apply the symmetry transform otherwise.
inline double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 1000;
    constexpr double kTol = 1e-12;
    constexpr double kTiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kTol) return h;
    }
    throw numeric_error("incomplete_beta: continued fraction did not converge");
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b); rel. tol. 1e-12.
inline double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw data_error("incomplete_beta: a, b must be positive");
    if (x < 0.0 || x > 1.0) throw data_error("incomplete_beta: x must lie in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_cf(a, b, x) / a;
    return 1.0 - front * detail::beta_cf(b, a, 1.0 - x) / b;  // I_x(a,b) = 1 - I_{1-x}(b,a)
}

// Sample Pearson correlation coefficient.
inline double pearson_r(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw data_error("pearson_r: length mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw data_error("pearson_r: need at least 2 samples");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw data_error("pearson_r: correlation undefined for constant input");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Two-tailed p-value for r under the null of zero correlation:
// t = r sqrt((n-2)/(1-r^2)), p = I_{df/(df+t^2)}(df/2, 1/2) with df = n-2.
inline double pearson_p(double r, std::size_t n) {
    if (std::abs(r) > 1.0) throw data_error("pearson_p: |r| must not exceed 1");
    if (n < 3) throw data_error("pearson_p: need n >= 3");
    const double df = static_cast<double>(n - 2);
    if (std::abs(r) >= 1.0) return 1e-300;  // t diverges
    const double t2 = r * r * df / (1.0 - r * r);
    const double p = incomplete_beta(df / 2.0, 0.5, df / (df + t2));
    return std::clamp(p, 1e-300, 1.0);
}

// Fisher's method: X^2 = -2 sum ln p_i ~ chi^2(2k) under the null;
// fused p = Q(k, X^2/2).  Inputs are clamped to >= 1e-300 before the log.
inline double fisher_fuse(std::span<const double> pvals) {
    if (pvals.empty()) throw data_error("fisher_fuse: empty input");
    double x2 = 0.0;
    for (const double p : pvals) {
        if (!(p > 0.0) || p > 1.0) throw data_error("fisher_fuse: p-values must lie in (0, 1]");
        x2 += -2.0 * std::log(std::max(p, 1e-300));
    }
    return incomplete_gamma_q(static_cast<double>(pvals.size()), x2 / 2.0);
}

struct CorrelationResult {
    double r = 0.0;
    double p = 1.0;
    std::size_t n = 0;
};

inline CorrelationResult correlate(std::span<const double> x, std::span<const double> y) {
    CorrelationResult result;
    result.r = pearson_r(x, y);
    result.n = x.size();
    result.p = pearson_p(result.r, result.n);
    return result;
}

}  // namespace stimrec
