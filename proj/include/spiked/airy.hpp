#pragma once

#include <cmath>
#include <stdexcept>

#include "spiked/quadrature.hpp"

namespace spiked {
namespace detail {

// Maclaurin series of Ai and Ai'. Accumulated in long double: near the
// series/asymptotic switchover the two auxiliary sums cancel to ~1e-7 of
// their own size, which costs double accumulation its 1e-12 budget.
inline void airy_series(double x, double& ai, double& aip) {
    const long double c1 = 0.35502805388781723926L;   // 3^{-2/3} / Gamma(2/3)
    const long double c2 = 0.25881940379280679841L;   // 3^{-1/3} / Gamma(1/3)
    const long double x3 = static_cast<long double>(x) * x * x;

    long double f = 1.0L, fp = 0.0L;                  // f, f'
    long double g = x, gp = 1.0L;                     // g, g'
    long double tf = 1.0L, tg = x;
    for (int k = 0; k < 200; ++k) {
        const long double tf_next = tf * x3 / ((3.0L * k + 2.0L) * (3.0L * k + 3.0L));
        const long double tg_next = tg * x3 / ((3.0L * k + 3.0L) * (3.0L * k + 4.0L));
        f += tf_next;
        fp += tf_next * (3.0L * k + 3.0L) / x;
        g += tg_next;
        gp += tg_next * (3.0L * k + 4.0L) / x;
        tf = tf_next;
        tg = tg_next;
        if (std::abs((double)tf) < 1e-22 * std::abs((double)f) &&
            std::abs((double)tg) < 1e-22 * (std::abs((double)g) + 1e-30))
            break;
    }
    if (x == 0.0) { fp = 0.0L; gp = 1.0L; }
    ai = static_cast<double>(c1 * f - c2 * g);
    aip = static_cast<double>(c1 * fp - c2 * gp);
}

// u_k, v_k coefficients of the large-|x| expansions, optimally truncated.
inline void airy_asymptotic_pos(double x, double& ai, double& aip) {
    const double zeta = (2.0 / 3.0) * x * std::sqrt(x);
    double u = 1.0, su = 1.0, sv = 1.0;
    double prev = 1.0;
    for (int k = 0; k < 60; ++k) {
        u *= (6.0 * k + 1.0) * (6.0 * k + 5.0) / (72.0 * (k + 1.0));
        const double term = u / std::pow(zeta, k + 1.0);
        if (term > prev) break;  // divergent tail reached
        prev = term;
        const double sgn = ((k + 1) % 2 == 0) ? 1.0 : -1.0;
        su += sgn * term;
        sv += sgn * term * (-(6.0 * (k + 1) + 1.0) / (6.0 * (k + 1) - 1.0));
        if (term < 1e-19) break;
    }
    const double pre = std::exp(-zeta) / (2.0 * std::sqrt(M_PI));
    ai = pre * su / std::pow(x, 0.25);
    aip = -pre * sv * std::pow(x, 0.25);
}

inline void airy_asymptotic_neg(double x, double& ai, double& aip) {
    const double t = -x;
    const double zeta = (2.0 / 3.0) * t * std::sqrt(t);
    double u[40];
    u[0] = 1.0;
    for (int k = 0; k + 1 < 40; ++k)
        u[k + 1] = u[k] * (6.0 * k + 1.0) * (6.0 * k + 5.0) / (72.0 * (k + 1.0));
    double se = 1.0, so = 0.0, sve = 1.0, svo = 0.0;
    for (int k = 1; k < 40; ++k) {
        const double term = u[k] / std::pow(zeta, k);
        if (term > 1.0) break;
        const double v_term = -term * (6.0 * k + 1.0) / (6.0 * k - 1.0);
        const double sgn = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 0) { se += sgn * term; sve += sgn * v_term; }
        else            { so += sgn * term; svo += sgn * v_term; }
        if (term < 1e-19) break;
    }
    const double c = std::cos(zeta + 0.25 * M_PI), s = std::sin(zeta + 0.25 * M_PI);
    ai = (s * se - c * so) / (std::sqrt(M_PI) * std::pow(t, 0.25));
    aip = -(c * sve + s * svo) * std::pow(t, 0.25) / std::sqrt(M_PI);
}

}  // namespace detail

inline double airy_ai(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("airy_ai: non-finite argument");
    double ai, aip;
    if (std::abs(x) <= 8.0) detail::airy_series(x, ai, aip);
    else if (x > 0.0) detail::airy_asymptotic_pos(x, ai, aip);
    else detail::airy_asymptotic_neg(x, ai, aip);
    return ai;
}

inline double airy_ai_prime(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("airy_ai_prime: non-finite argument");
    double ai, aip;
    if (std::abs(x) <= 8.0) detail::airy_series(x, ai, aip);
    else if (x > 0.0) detail::airy_asymptotic_pos(x, ai, aip);
    else detail::airy_asymptotic_neg(x, ai, aip);
    return aip;
}

// B(x) = int_x^inf Ai(t) dt. Ai is below 1e-13 past t = 12, and the
// remaining tail is under the 1e-12 contract, so panels stop at 14.
inline double airy_tail(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("airy_tail: non-finite argument");
    const double upper = 14.0;
    if (x >= upper) return 0.0;
    const int panels = std::max(2, static_cast<int>(std::ceil((upper - x) / 0.5)));
    return integrate_panels([](double t) { return airy_ai(t); }, x, upper, panels);
}

}  // namespace spiked
