#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace spiked {

struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1] by Newton iteration on the recurrence.
inline QuadRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

inline QuadRule gauss_legendre_on(int n, double a, double b) {
    QuadRule rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = mid + half * rule.nodes[i];
        rule.weights[i] *= half;
    }
    return rule;
}

// Generalized Gauss-Laguerre rule for the weight x^alpha e^{-x} on [0, inf),
// by Golub-Welsch on the Jacobi matrix.
inline QuadRule gauss_laguerre(int n, double alpha) {
    if (n < 1) throw std::invalid_argument("gauss_laguerre: order must be >= 1");
    if (alpha <= -1.0) throw std::invalid_argument("gauss_laguerre: alpha must be > -1");
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        jacobi(k, k) = 2.0 * k + alpha + 1.0;
        if (k + 1 < n) {
            const double off = std::sqrt((k + 1.0) * (k + 1.0 + alpha));
            jacobi(k, k + 1) = off;
            jacobi(k + 1, k) = off;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    const double mu0 = std::exp(std::lgamma(alpha + 1.0));
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int k = 0; k < n; ++k) {
        rule.nodes[k] = es.eigenvalues()(k);
        const double v0 = es.eigenvectors()(0, k);
        rule.weights[k] = mu0 * v0 * v0;
    }
    return rule;
}

// Composite Gauss-Legendre integration of f over [a, b].
inline double integrate_panels(const std::function<double(double)>& f, double a, double b,
                               int panels, int points_per_panel = 16) {
    if (panels < 1) panels = 1;
    static thread_local int cached_n = -1;
    static thread_local QuadRule cached;
    if (cached_n != points_per_panel) {
        cached = gauss_legendre(points_per_panel);
        cached_n = points_per_panel;
    }
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h, half = 0.5 * h;
        double acc = 0.0;
        for (int i = 0; i < points_per_panel; ++i)
            acc += cached.weights[i] * f(mid + half * cached.nodes[i]);
        total += acc * half;
    }
    return total;
}

}  // namespace spiked
