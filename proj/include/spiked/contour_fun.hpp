#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "spiked/quadrature.hpp"

namespace spiked {

// The Airy-type contour integrals
//   t^(j)(x) = (1/2pi) int e^{ixz + iz^3/3} (-iz)^{j-1} dz
//   s^(j)(x) = (1/2pi) int e^{ixz + iz^3/3} (iz)^{-j}   dz
// along an arc running from the direction e^{5 pi i/6} to e^{pi i/6}.
// The s-integrand has a pole at z = 0, so the two rays are joined by a
// circular indentation of radius 1/4 passing below the origin. The same
// path is used for t^(j), where it is homotopic to any admissible arc.
enum class ContourKind { s, t };

struct ContourFunIndex {
    int j;
    ContourKind kind;
};

namespace detail {

inline std::complex<double> contour_core(int j, ContourKind kind, double x) {
    using cplx = std::complex<double>;
    const cplx i(0.0, 1.0);

    auto integrand = [&](cplx z) -> cplx {
        const cplx e = std::exp(i * x * z + i * z * z * z / 3.0);
        cplx p(1.0, 0.0);
        if (kind == ContourKind::t) {
            const cplx b = -i * z;
            for (int k = 0; k < j - 1; ++k) p *= b;
            return e * p;
        }
        const cplx b = i * z;
        for (int k = 0; k < j; ++k) p *= b;
        return e / p;
    };

    // Ray endpoint R: |e^{iz^3/3}| decays like e^{-rho^3/3} along both rays,
    // so R = 8 leaves the truncated tail below 1e-18 for |x| <= 12, j <= 8.
    const double rho0 = 0.25;
    const double R = 8.0;
    const cplx dir_right = std::exp(i * (M_PI / 6.0));
    const cplx dir_left = std::exp(i * (5.0 * M_PI / 6.0));

    const int panels = 40, pts = 16;
    static thread_local QuadRule rule = gauss_legendre(pts);

    cplx total(0.0, 0.0);
    const double h = (R - rho0) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = rho0 + p * h;
        for (int q = 0; q < pts; ++q) {
            const double rho = lo + 0.5 * h * (1.0 + rule.nodes[q]);
            const double w = 0.5 * h * rule.weights[q];
            total -= integrand(rho * dir_left) * dir_left * w;   // incoming ray
            total += integrand(rho * dir_right) * dir_right * w; // outgoing ray
        }
    }

    // Indentation: theta from 5pi/6 up to 13pi/6 walks the radius-1/4 circle
    // through 3pi/2, i.e. below z = 0.
    const int arc_panels = 12;
    const double a_begin = 5.0 * M_PI / 6.0, a_finish = 13.0 * M_PI / 6.0;
    const double ah = (a_finish - a_begin) / arc_panels;
    for (int p = 0; p < arc_panels; ++p) {
        const double lo = a_begin + p * ah;
        for (int q = 0; q < pts; ++q) {
            const double th = lo + 0.5 * ah * (1.0 + rule.nodes[q]);
            const double w = 0.5 * ah * rule.weights[q];
            const cplx z = rho0 * std::exp(i * th);
            total += integrand(z) * (i * z) * w;  // dz = i z dtheta
        }
    }
    return total / (2.0 * M_PI);
}

}  // namespace detail

inline double contour_fun(const ContourFunIndex& idx, double x) {
    if (idx.j <= 0) throw std::domain_error("contour_fun: index j must be >= 1");
    return detail::contour_core(idx.j, idx.kind, x).real();
}

inline double airy_s(int j, double x) { return contour_fun({j, ContourKind::s}, x); }
inline double airy_t(int j, double x) { return contour_fun({j, ContourKind::t}, x); }

}  // namespace spiked
