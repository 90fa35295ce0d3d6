#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "spiked/ensembles.hpp"
#include "spiked/fredholm.hpp"
#include "spiked/orthopoly.hpp"
#include "spiked/quadrature.hpp"

namespace spiked {

// Skew-orthogonal basis of the rank-1 quaternionic spiked model: a basis
// phi_0..phi_{2N-1} of span{1, x, ..., x^{2N-2}, e^{2Max/(1+a)}} with skew
// products <phi_{2j}, phi_{2j+1}>_4 = r_j and all other pairs zero, where
//   <f, g>_4 = int_0^inf (f g' - f' g) x^{2(M-N)+1} e^{-2Mx} dx.
// Everything is expressed through weighted Laguerre functions
//   w_n(x) = L_n^{(q)}(2Mx) x^{q/2} e^{-Mx},  q = 2(M-N),
// evaluated as orthonormal-function values times a log-space prefactor, so
// the construction survives the (2M)^{q+1}-sized constants at large M.
class QuaternionSkewSystem {
public:
    QuaternionSkewSystem(const ModelParams& params, double a)
        : params_(params), a_(a), q_(2 * (params.M - params.N)) {
        if (params.division.beta() != 4)
            throw std::invalid_argument("QuaternionSkewSystem: needs beta = 4");
        if (params.N < 2) throw std::invalid_argument("QuaternionSkewSystem: needs N >= 2");
        if (a <= -1.0) throw std::domain_error("QuaternionSkewSystem: spike must be > -1");
        if (a == 0.0) throw std::invalid_argument("QuaternionSkewSystem: a = 0 is the white case");
        const int N = params_.N, M = params_.M;
        // d_j = prod_{i<=j} (2i-1)/(2i+q), log-accumulated
        log_d_.assign(N, 0.0);
        for (int j = 1; j < N; ++j)
            log_d_[j] = log_d_[j - 1] + std::log((2.0 * j - 1.0) / (2.0 * j + q_));
        // norms r_j
        log_r_.assign(N, 0.0);
        sign_r_.assign(N, 1.0);
        const double log_2m = std::log(2.0 * M);
        for (int j = 0; j + 1 < N; ++j)
            log_r_[j] = -(q_ + 1) * log_2m + log_factorial(2 * j + q_ + 1) -
                        log_factorial(2 * j) + log_d_[j];
        log_r_[N - 1] = (q_ + 1) * (std::log1p(a_) - log_2m) +
                        (2 * N - 1) * std::log(std::abs(a_)) + log_factorial(2 * M - 1) -
                        log_factorial(2 * N - 2) + log_d_[N - 1];
        sign_r_[N - 1] = (a_ > 0.0) ? 1.0 : ((2 * N - 1) % 2 ? -1.0 : 1.0);
        // prefactors of w_n = ell_n(2Mx) e^{h_n}
        log_h_.assign(2 * N, 0.0);
        for (int n = 0; n < 2 * N; ++n)
            log_h_[n] = 0.5 * (std::lgamma(n + q_ + 1.0) - log_factorial(n)) - 0.5 * q_ * log_2m;
    }

    const ModelParams& params() const { return params_; }
    double a() const { return a_; }
    double r_norm(int j) const { return sign_r_[j] * std::exp(log_r_[j]); }
    double log_r_norm(int j) const { return log_r_[j]; }

    struct BasisValues {
        std::vector<double> psi;       // psi_0 .. psi_{2N-1}
        std::vector<double> psi_der;   // psi'_0 .. psi'_{2N-1}
    };

    // all psi_i(x), psi'_i(x) at once; x > 0
    BasisValues basis(double x) const {
        if (x <= 0.0) throw std::domain_error("QuaternionSkewSystem: x must be positive");
        const int N = params_.N, M = params_.M;
        const double u = 2.0 * M * x;
        std::vector<double> ell;
        laguerre_ortho_functions(2 * N - 1, q_, u, ell);
        std::vector<double> w(2 * N);
        for (int n = 0; n < 2 * N; ++n) w[n] = ell[n] * std::exp(log_h_[n]);
        const double rx = std::sqrt(x);

        BasisValues out;
        out.psi.assign(2 * N, 0.0);
        out.psi_der.assign(2 * N, 0.0);
        // even polynomials and their derivatives
        double partial = 0.0;
        for (int j = 0; j < N; ++j) {
            partial += std::exp(log_d_[j]) * w[2 * j];
            out.psi[2 * j] = rx * partial;
            out.psi_der[2 * j] =
                0.5 * std::exp(log_d_[j]) * (2.0 * j + 1.0) * w[2 * j + 1] / rx;
        }
        // odd polynomials, j = 0..N-2
        for (int j = 0; j + 1 < N; ++j) {
            out.psi[2 * j + 1] = -rx * w[2 * j + 1];
            out.psi_der[2 * j + 1] =
                -0.5 * ((2.0 * j + 2.0) * w[2 * j + 2] - (2.0 * j + q_ + 1.0) * w[2 * j]) / rx;
        }
        // psi_{2N-1}: exponential minus the Laguerre tail
        const double log_pow = (q_ + 1) * std::log1p(a_);
        const double eterm = std::exp(0.5 * q_ * std::log(x) + M * x * (a_ - 1.0) / (1.0 + a_));
        double lag_sum = 0.0, lag_der_sum = 0.0;
        double a_pow = 1.0;  // (-a)^n
        for (int n = 0; n <= 2 * N - 2; ++n) {
            const double coeff = a_pow * std::exp(log_pow);
            lag_sum += coeff * w[n];
            const double wm1 = (n == 0) ? 0.0 : w[n - 1];
            lag_der_sum += coeff * ((n + 0.5 * (q_ + 1.0) - M * x) * w[n] - (n + q_) * wm1);
            a_pow *= -a_;
        }
        out.psi[2 * N - 1] = rx * (eterm - lag_sum);
        out.psi_der[2 * N - 1] =
            rx * eterm * (2.0 * M * a_ / (1.0 + a_) + 0.5 * (q_ + 1.0) / x - M) -
            lag_der_sum / rx;
        return out;
    }

    // 2x2 matrix kernel blocks (S4, SD4; IS4, S4^T) from the definitional sums
    struct BlockValues {
        double s4, sd4, is4, s4t;
    };

    BlockValues blocks(const BasisValues& bx, const BasisValues& by) const {
        const int N = params_.N;
        BlockValues out{0.0, 0.0, 0.0, 0.0};
        for (int j = 0; j < N; ++j) {
            const double inv_r = sign_r_[j] * std::exp(-log_r_[j]);
            const double pe_x = bx.psi[2 * j], po_x = bx.psi[2 * j + 1];
            const double pe_y = by.psi[2 * j], po_y = by.psi[2 * j + 1];
            const double de_x = bx.psi_der[2 * j], do_x = bx.psi_der[2 * j + 1];
            const double de_y = by.psi_der[2 * j], do_y = by.psi_der[2 * j + 1];
            out.s4 += inv_r * (-de_x * po_y + do_x * pe_y);
            out.sd4 += inv_r * (de_x * do_y - do_x * de_y);
            out.is4 += inv_r * (-pe_x * po_y + po_x * pe_y);
            out.s4t += inv_r * (pe_x * do_y - po_x * de_y);
        }
        return out;
    }

    double s4(double x, double y) const { return blocks(basis(x), basis(y)).s4; }
    double sd4(double x, double y) const { return blocks(basis(x), basis(y)).sd4; }
    double is4(double x, double y) const { return blocks(basis(x), basis(y)).is4; }

    // split form S4 = S4a1 + S4a2 + S4b (Laguerre-sum representation)
    double s4a1(double x, double y) const {
        const int N = params_.N, M = params_.M;
        std::vector<double> lx, ly;
        laguerre_ortho_functions(2 * N - 2, q_, 2.0 * M * x, lx);
        laguerre_ortho_functions(2 * N - 2, q_, 2.0 * M * y, ly);
        double acc = 0.0;
        for (int j = 0; j <= 2 * N - 2; ++j) acc += lx[j] * ly[j];
        return M * std::sqrt(y / x) * acc;
    }

    double s4a2(double x, double y) const {
        const int N = params_.N, M = params_.M;
        const double log_pre = std::log(0.25) + (q_ + 1) * std::log(2.0 * M) +
                               log_factorial(2 * N - 1) - log_factorial(2 * M - 2);
        return std::exp(log_pre) * (w_fn(2 * N - 2, x) / std::sqrt(x)) * w_tail(y);
    }

    double s4b(double x, double y) const {
        const int N = params_.N, M = params_.M;
        const double log_pre = std::log(0.5) + (q_ + 1) * (std::log(2.0 * M) - std::log1p(a_)) -
                               (2 * N - 1) * std::log(std::abs(a_)) + log_factorial(2 * N - 1) -
                               log_factorial(2 * M - 1);
        const double sign = (a_ > 0.0) ? 1.0 : ((2 * N - 1) % 2 ? -1.0 : 1.0);
        const BasisValues bx = basis(x), by = basis(y);
        return -sign * std::exp(log_pre) *
               ((w_fn(2 * N - 1, x) / std::sqrt(x)) * by.psi[2 * N - 1] +
                bx.psi_der[2 * N - 1] * w_tail(y));
    }

    // skew product <phi_i, phi_j>_4 = int (psi_i psi_j' - psi_i' psi_j) dx
    // by panel quadrature; the weight is already inside psi
    double skew_product(int i, int j, int panels_per_unit = 8) const {
        const double upper = integration_length();
        const int panels = std::max(16, static_cast<int>(upper * panels_per_unit));
        return integrate_panels(
            [&](double x) {
                const BasisValues b = basis(x);
                return b.psi[i] * b.psi_der[j] - b.psi_der[i] * b.psi[j];
            },
            1e-12, upper, panels);
    }

    // max deviation of the skew products from (r_j-scaled) canonical form
    double skew_orthogonality_check() const {
        const int N = params_.N;
        double worst = 0.0;
        for (int i = 0; i < 2 * N; ++i) {
            for (int j = i + 1; j < 2 * N; ++j) {
                const double v = skew_product(i, j);
                if (i % 2 == 0 && j == i + 1) {
                    const double r = r_norm(i / 2);
                    worst = std::max(worst, std::abs(v - r) / std::abs(r));
                } else {
                    // scale-free comparison against the geometric mean of norms
                    const double scale =
                        std::exp(0.5 * (log_r_[i / 2] + log_r_[j / 2]));
                    worst = std::max(worst, std::abs(v) / scale);
                }
            }
        }
        return worst;
    }

    // P(max lambda <= T) = sqrt(det(I - chi P chi)) with the 2x2 block kernel
    double gap_probability(double T, int order = 96, double length = -1.0) const {
        if (T <= 0.0) throw std::domain_error("gap_probability: T must be positive");
        const double L = (length > 0.0) ? length : integration_length();
        QuadratureGrid grid = make_grid(T, order, L);
        const int n = grid.order();
        std::vector<BasisValues> bv(n);
        for (int i = 0; i < n; ++i) bv[i] = basis(grid.nodes[i]);
        Eigen::MatrixXd mat = Eigen::MatrixXd::Identity(2 * n, 2 * n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const BlockValues b = blocks(bv[i], bv[j]);
                const double w = std::sqrt(grid.weights[i] * grid.weights[j]);
                mat(i, j) -= w * b.s4;
                mat(i, n + j) -= w * b.sd4;
                mat(n + i, j) -= w * b.is4;
                mat(n + i, n + j) -= w * b.s4t;
            }
        }
        const double det = Eigen::PartialPivLU<Eigen::MatrixXd>(mat).determinant();
        if (det < -1e-8)
            throw std::runtime_error("gap_probability: negative determinant " + std::to_string(det));
        return std::min(1.0, std::sqrt(std::max(0.0, det)));
    }

    double integration_length() const {
        return (50.0 + 4.0 * params_.N) * (1.0 + std::max(0.0, a_)) / (2.0 * params_.M);
    }

    // w_n(x) = L_n^{(q)}(2Mx) x^{q/2} e^{-Mx}
    double w_fn(int n, double x) const {
        std::vector<double> ell;
        laguerre_ortho_functions(n, q_, 2.0 * params_.M * x, ell);
        return ell[n] * std::exp(log_h_[n]);
    }

    // int_y^inf w_{2N-1}(t) / sqrt(t) dt
    double w_tail(double y) const {
        const double upper = y + integration_length();
        const int panels = std::max(16, static_cast<int>((upper - y) * 8));
        return integrate_panels(
            [&](double t) { return w_fn(2 * params_.N - 1, t) / std::sqrt(t); }, y, upper, panels);
    }

private:
    ModelParams params_;
    double a_;
    int q_;
    std::vector<double> log_d_, log_r_, sign_r_, log_h_;
};

}  // namespace spiked
