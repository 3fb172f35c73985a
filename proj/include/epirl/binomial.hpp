#pragma once

#include <cmath>
#include <cstdint>

#include "epirl/errors.hpp"
#include "epirl/rng.hpp"

namespace epirl {

namespace detail {

// BINV: walk the CDF from 0. Exact; O(n*p) expected cost. Requires p <= 0.5.
inline std::int64_t binomial_inversion(RngStream& rng, std::int64_t n, double p) {
    const double q = 1.0 - p;
    const double s = p / q;
    const double a = static_cast<double>(n + 1) * s;
    double pmf = std::pow(q, static_cast<double>(n));
    double u = rng.next_double();
    std::int64_t x = 0;
    while (u > pmf) {
        u -= pmf;
        ++x;
        if (x > n) return n; // fp guard: residual mass beyond n
        pmf *= a / static_cast<double>(x) - s;
        if (!(pmf > 0.0)) return x; // underflow in the far tail
    }
    return x;
}

// BTRS transformed rejection (Hormann 1993). Exact: candidates are accepted
// against the true log-pmf ratio. Requires p <= 0.5 and n*p >= 10.
inline std::int64_t binomial_btrs(RngStream& rng, std::int64_t n, double p) {
    const double nd = static_cast<double>(n);
    const double q = 1.0 - p;
    const double spq = std::sqrt(nd * p * q);
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = nd * p + 0.5;
    const double v_r = 0.92 - 4.2 / b;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double lpq = std::log(p / q);
    const double m = std::floor((nd + 1.0) * p);
    const double h = std::lgamma(m + 1.0) + std::lgamma(nd - m + 1.0);

    for (;;) {
        const double u = rng.next_double() - 0.5;
        double v = rng.next_double();
        const double us = 0.5 - std::fabs(u);
        const double kd = std::floor((2.0 * a / us + b) * u + c);
        if (kd < 0.0 || kd > nd) continue;
        if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kd);
        v = std::log(v * alpha / (a / (us * us) + b));
        const double accept =
            h - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) + (kd - m) * lpq;
        if (v <= accept) return static_cast<std::int64_t>(kd);
    }
}

} // namespace detail

/// Exact Binomial(n, p) variate. Inversion for small n*p, BTRS rejection
/// otherwise; never a normal approximation, so sampled counts follow the
/// closed-form pmf at any sample size.
inline std::int64_t sample_binomial(RngStream& rng, std::int64_t n, double p) {
    if (n < 0) throw InvalidParams("sample_binomial: n must be >= 0");
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidParams("sample_binomial: p must be in [0, 1]");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;

    const bool flipped = p > 0.5;
    const double ps = flipped ? 1.0 - p : p;
    std::int64_t k;
    if (static_cast<double>(n) * ps < 10.0) {
        k = detail::binomial_inversion(rng, n, ps);
    } else {
        k = detail::binomial_btrs(rng, n, ps);
    }
    return flipped ? n - k : k;
}

} // namespace epirl
