#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace spiked {

// Probabilists' Hermite polynomials, H_{j+1} = x H_j - j H_{j-1}.
inline double hermite(int j, double x) {
    if (j < 0) throw std::domain_error("hermite: negative degree");
    double h0 = 1.0;
    if (j == 0) return h0;
    double h1 = x;
    for (int k = 1; k < j; ++k) {
        const double h2 = x * h1 - k * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

// Generalized Laguerre L_n^{(alpha)} by the three-term recurrence.
inline double laguerre(int n, double alpha, double x) {
    if (n < 0) return 0.0;
    if (alpha <= -1.0) throw std::domain_error("laguerre: alpha must be > -1");
    double l0 = 1.0;
    if (n == 0) return l0;
    double l1 = 1.0 + alpha - x;
    for (int k = 1; k < n; ++k) {
        const double l2 = ((2.0 * k + 1.0 + alpha - x) * l1 - (k + alpha) * l0) / (k + 1.0);
        l0 = l1;
        l1 = l2;
    }
    return l1;
}

// Orthonormal Laguerre functions
//   ell_n(u) = sqrt(n! / Gamma(n+alpha+1)) L_n^{(alpha)}(u) u^{alpha/2} e^{-u/2},
// evaluated for n = 0..nmax by the orthonormal recurrence. These stay O(1)
// in the oscillatory region, which keeps the white-Wishart kernels finite at
// the large (M, N) used by the convergence probe.
inline void laguerre_ortho_functions(int nmax, double alpha, double u, std::vector<double>& out) {
    out.assign(nmax + 1, 0.0);
    double lw = 0.5 * alpha * std::log(u) - 0.5 * u - 0.5 * std::lgamma(alpha + 1.0);
    const double ell0 = (u > 0.0) ? std::exp(lw) : (alpha == 0.0 ? 1.0 : 0.0);
    out[0] = ell0;
    if (nmax == 0) return;
    out[1] = (1.0 + alpha - u) / std::sqrt(1.0 + alpha) * ell0;
    for (int k = 1; k < nmax; ++k) {
        const double a_k = std::sqrt((k + 1.0) * (k + 1.0 + alpha));
        const double a_km1 = std::sqrt(k * (k + alpha));
        out[k + 1] = ((2.0 * k + 1.0 + alpha - u) * out[k] - a_km1 * out[k - 1]) / a_k;
    }
}

// log of n! via lgamma; used wherever factorial ratios would overflow
inline double log_factorial(double n) { return std::lgamma(n + 1.0); }

}  // namespace spiked
