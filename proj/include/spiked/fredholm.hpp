#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "spiked/quadrature.hpp"

namespace spiked {

using ScalarKernel = std::function<double(double, double)>;

// 2x2 matrix kernel in block order (S, SD; IS, S^T).
struct MatrixKernel2 {
    ScalarKernel k11, k12, k21, k22;
};

// Gauss-Legendre discretization of [T, T+L], the Nystrom stand-in for the
// indicator chi_[T,inf); the truncation point is chosen so the kernel tail
// is below the determinant tolerance.
struct QuadratureGrid {
    double T = 0.0;
    double L = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;

    int order() const { return static_cast<int>(nodes.size()); }
};

inline QuadratureGrid make_grid(double T, int order, double L) {
    if (order < 4) throw std::invalid_argument("make_grid: order must be >= 4");
    if (!(L > 0.0)) throw std::invalid_argument("make_grid: L must be positive");
    QuadratureGrid grid;
    grid.T = T;
    grid.L = L;
    QuadRule rule = gauss_legendre_on(order, T, T + L);
    grid.nodes = std::move(rule.nodes);
    grid.weights = std::move(rule.weights);
    return grid;
}

namespace detail {

inline void check_finite(double v, double x, double y) {
    if (!std::isfinite(v)) {
        throw std::runtime_error("fredholm: kernel evaluated to a non-finite value at (" +
                                 std::to_string(x) + ", " + std::to_string(y) + ")");
    }
}

}  // namespace detail

// det(I - W^{1/2} K W^{1/2}); the symmetric square-root weighting keeps the
// discrete matrix similar to the Nystrom operator and symmetric whenever the
// kernel is.
inline double det_scalar(const ScalarKernel& kernel, const QuadratureGrid& grid) {
    const int n = grid.order();
    std::vector<double> sq(n);
    for (int i = 0; i < n; ++i) sq[i] = std::sqrt(grid.weights[i]);
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double v = kernel(grid.nodes[i], grid.nodes[j]);
            detail::check_finite(v, grid.nodes[i], grid.nodes[j]);
            a(i, j) -= sq[i] * v * sq[j];
        }
    }
    return Eigen::PartialPivLU<Eigen::MatrixXd>(a).determinant();
}

inline double det_matrix2(const MatrixKernel2& kernel, const QuadratureGrid& grid) {
    const int n = grid.order();
    std::vector<double> sq(n);
    for (int i = 0; i < n; ++i) sq[i] = std::sqrt(grid.weights[i]);
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    const ScalarKernel* blocks[2][2] = {{&kernel.k11, &kernel.k12}, {&kernel.k21, &kernel.k22}};
    for (int bi = 0; bi < 2; ++bi) {
        for (int bj = 0; bj < 2; ++bj) {
            const ScalarKernel& k = *blocks[bi][bj];
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    const double v = k(grid.nodes[i], grid.nodes[j]);
                    detail::check_finite(v, grid.nodes[i], grid.nodes[j]);
                    a(bi * n + i, bj * n + j) -= sq[i] * v * sq[j];
                }
            }
        }
    }
    return Eigen::PartialPivLU<Eigen::MatrixXd>(a).determinant();
}

// det(delta_ij - int f_i g_j) for a finite-rank kernel sum_j f_j(x) g_j(y).
inline double det_finite_rank(const std::vector<std::function<double(double)>>& fs,
                              const std::vector<std::function<double(double)>>& gs,
                              const QuadratureGrid& grid) {
    if (fs.size() != gs.size())
        throw std::invalid_argument("det_finite_rank: f/g length mismatch");
    const int m = static_cast<int>(fs.size());
    const int n = grid.order();
    Eigen::MatrixXd fv(m, n), gv(m, n);
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < n; ++i) {
            fv(j, i) = fs[j](grid.nodes[i]);
            gv(j, i) = gs[j](grid.nodes[i]) * grid.weights[i];
            detail::check_finite(fv(j, i), grid.nodes[i], 0.0);
            detail::check_finite(gv(j, i), grid.nodes[i], 0.0);
        }
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m) - fv * gv.transpose();
    return Eigen::PartialPivLU<Eigen::MatrixXd>(a).determinant();
}

// (x, y) -> w(x) K(x, y) / w(y); leaves every Fredholm determinant unchanged
// and is how non-L2 kernel pieces are tamed before discretization.
inline ScalarKernel conjugate_kernel(const ScalarKernel& kernel,
                                     const std::function<double(double)>& weight) {
    return [kernel, weight](double x, double y) {
        const double wx = weight(x), wy = weight(y);
        if (!(wx > 0.0) || !(wy > 0.0))
            throw std::domain_error("conjugate_kernel: weight must be positive on the grid");
        return wx * kernel(x, y) / wy;
    };
}

// Nystrom solution u of (I - K) u = f on the grid, returned as a callable
// that extends off-grid via u(x) = f(x) + sum_j K(x, x_j) w_j u_j.
inline std::function<double(double)> solve_resolvent(const ScalarKernel& kernel,
                                                     const std::function<double(double)>& f,
                                                     const QuadratureGrid& grid) {
    const int n = grid.order();
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
        rhs(i) = f(grid.nodes[i]);
        for (int j = 0; j < n; ++j)
            a(i, j) -= kernel(grid.nodes[i], grid.nodes[j]) * grid.weights[j];
    }
    Eigen::VectorXd u = a.partialPivLu().solve(rhs);
    std::vector<double> uvec(u.data(), u.data() + n);
    auto nodes = grid.nodes;
    auto weights = grid.weights;
    return [kernel, f, nodes, weights, uvec](double x) {
        double acc = f(x);
        for (std::size_t j = 0; j < nodes.size(); ++j)
            acc += kernel(x, nodes[j]) * weights[j] * uvec[j];
        return acc;
    };
}

}  // namespace spiked
