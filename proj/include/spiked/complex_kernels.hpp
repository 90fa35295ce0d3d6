#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "spiked/ensembles.hpp"
#include "spiked/fredholm.hpp"
#include "spiked/orthopoly.hpp"
#include "spiked/quadrature.hpp"

namespace spiked {

// Triple index r' <-> (s', t'): r' = sum_{j < s'} r_j + t', 1 <= t' <= r_{s'}.
struct TripleIndex {
    int r_prime;  // 1-based
    int s_prime;  // 1-based spike group
    int t_prime;  // 1-based position within the group
};

namespace detail {

inline std::complex<double> pow_int(std::complex<double> base, int e) {
    if (e < 0) return 1.0 / pow_int(base, -e);
    std::complex<double> out(1.0, 0.0);
    while (e) {
        if (e & 1) out *= base;
        base *= base;
        e >>= 1;
    }
    return out;
}

// trapezoid rule on a circle; spectrally accurate for periodic analytic
// integrands, nodes doubled until successive values settle
template <typename F>
inline std::complex<double> circle_integral(F&& f, std::complex<double> center, double radius) {
    std::complex<double> prev(0.0, 0.0);
    for (int nodes = 256; nodes <= 4096; nodes *= 2) {
        std::complex<double> acc(0.0, 0.0);
        for (int k = 0; k < nodes; ++k) {
            const double th = 2.0 * M_PI * k / nodes;
            const std::complex<double> offset = std::polar(radius, th);
            acc += f(center + offset) * offset;
        }
        acc /= static_cast<double>(nodes);
        if (nodes > 256 && std::abs(acc - prev) <= 1e-12 * (1.0 + std::abs(acc))) return acc;
        prev = acc;
    }
    return prev;
}

// one pole of a rational-exponential contour integrand, reduced to the
// finite residue polynomial: contribution e^{-Mxp} sum_k coeff_k (-Mx)^{m-1-k}
struct PoleExpansion {
    double location;
    int order;
    std::vector<double> coeffs;  // g^{(k)}(p)/k! / (m-1-k)!, k = 0..m-1
};

}  // namespace detail

// The biorthogonal multiple-Laguerre system of the rank-r complex spiked
// model: phi_j are polynomials, psi~_j their dual functions, biorthonormal
// under <f, g> = int_0^inf f g x^{M-N} e^{-Mx} dx. Indices below N-r are
// plain Laguerre pairs; the top r pairs come from contour integrals around
// z = 0 (phi) and around z = 1, 1/(1+a_j) (psi~). The contours are
// evaluated once per system: phi's residue at 0 is an explicit polynomial,
// and psi~'s pole data turns into residue polynomials whose Taylor
// coefficients are extracted by trapezoidal quadrature on small circles.
// A direct per-x trapezoid is kept for cross-checks; it loses all digits
// once Mx is large because the circle passes through regions where the
// integrand exceeds the result by e^{Mx * radius}.
class ComplexSpikedSystem {
public:
    ComplexSpikedSystem(const ModelParams& params, const SpikeSpec& spikes)
        : params_(params), spikes_(spikes) {
        if (params.division.beta() != 2)
            throw std::invalid_argument("ComplexSpikedSystem: needs beta = 2");
        if (spikes.rank() > params.N)
            throw std::invalid_argument("ComplexSpikedSystem: rank exceeds N");
        for (double a : spikes.values)
            if (a == 0.0)
                throw std::invalid_argument("ComplexSpikedSystem: spike value 0 is the white case");
        for (std::size_t i = 0; i < spikes.values.size(); ++i)
            poles_.push_back(1.0 / (1.0 + spikes.values[i]));
        double lo = 1.0, hi = 1.0;
        for (double c : poles_) {
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
        sigma_radius_ = lo / 2.0;
        gamma_center_ = 0.5 * (lo + hi);
        gamma_radius_ = 0.5 * (hi - lo) + 0.25 * lo;
        for (int i = 1; i <= spikes_.rank(); ++i) {
            triples_.push_back(make_triple(i));
            phi_poly_.push_back(build_phi_polynomial(triples_.back()));
            psi_poles_.push_back(build_psi_expansion(triples_.back()));
        }
        if (params_.N - spikes_.rank() > 0)
            psi0_poles_ = build_expansion_at(
                1.0, params_.N - spikes_.rank(),
                [this](std::complex<double> z) {
                    return detail::pow_int(z, params_.M - spikes_.rank());
                });
    }

    const ModelParams& params() const { return params_; }
    const SpikeSpec& spikes() const { return spikes_; }
    int rank() const { return spikes_.rank(); }
    double sigma_radius() const { return sigma_radius_; }
    double gamma_center() const { return gamma_center_; }
    double gamma_radius() const { return gamma_radius_; }

    TripleIndex make_triple(int r_prime) const {
        int acc = 0;
        for (std::size_t s = 0; s < spikes_.multiplicities.size(); ++s) {
            if (r_prime <= acc + spikes_.multiplicities[s])
                return {r_prime, static_cast<int>(s) + 1, r_prime - acc};
            acc += spikes_.multiplicities[s];
        }
        throw std::out_of_range("make_triple: r' exceeds rank");
    }

    // phi_j, degree-j polynomial
    double phi(int j, double x) const {
        check_index(j);
        const int N = params_.N, M = params_.M, r = rank();
        if (j < N - r) return laguerre(j, M - N, M * x);
        const std::vector<double>& poly = phi_poly_[j - (N - r)];
        double acc = 0.0;
        for (int m = static_cast<int>(poly.size()) - 1; m >= 0; --m) acc = acc * x + poly[m];
        return acc;
    }

    // psi~_j; for spiked indices a sum over poles of e^{Mx(1-p)} times a
    // residue polynomial in Mx
    double psi_tilde(int j, double x) const {
        check_index(j);
        const int N = params_.N, M = params_.M, r = rank();
        if (j < N - r) {
            const double log_c = log_factorial(j) + (M - N + 1) * std::log(static_cast<double>(M)) -
                                 log_factorial(M - N + j);
            return std::exp(log_c) * laguerre(j, M - N, M * x);
        }
        if (x <= 0.0) throw std::domain_error("psi_tilde: x must be positive");
        const TripleIndex& idx = triples_[j - (N - r)];
        const double scale = M / (1.0 + spikes_.values[idx.s_prime - 1]);
        return scale * eval_expansion(psi_poles_[j - (N - r)], M * x);
    }

    // direct trapezoidal contour evaluations (cross-check path)
    double phi_contour_quadrature(int j, double x) const {
        check_index(j);
        const int N = params_.N, M = params_.M, r = rank();
        if (j < N - r) throw std::invalid_argument("phi_contour_quadrature: index is Laguerre");
        const TripleIndex idx = triples_[j - (N - r)];
        auto f = [&](std::complex<double> z) {
            std::complex<double> val = std::exp(M * x * z);
            val *= detail::pow_int(z - 1.0, N - r);
            val /= detail::pow_int(z, M - r + idx.r_prime);
            for (int s = 0; s < idx.s_prime - 1; ++s)
                val *= detail::pow_int(z - poles_[s], spikes_.multiplicities[s]);
            val *= detail::pow_int(z - poles_[idx.s_prime - 1], idx.t_prime - 1);
            return val;
        };
        return detail::circle_integral(f, {0.0, 0.0}, sigma_radius_).real() *
               std::pow(x, -(double)(M - N));
    }

    double psi_contour_quadrature(int j, double x) const {
        check_index(j);
        const int N = params_.N, M = params_.M, r = rank();
        if (j < N - r) throw std::invalid_argument("psi_contour_quadrature: index is Laguerre");
        const TripleIndex idx = triples_[j - (N - r)];
        auto f = [&](std::complex<double> z) {
            std::complex<double> val = std::exp(M * x * (1.0 - z));
            val *= detail::pow_int(z, M - r + idx.r_prime - 1);
            val /= detail::pow_int(z - 1.0, N - r);
            for (int s = 0; s < idx.s_prime - 1; ++s)
                val /= detail::pow_int(z - poles_[s], spikes_.multiplicities[s]);
            val /= detail::pow_int(z - poles_[idx.s_prime - 1], idx.t_prime);
            return val;
        };
        const std::complex<double> integral =
            detail::circle_integral(f, gamma_center_, gamma_radius_);
        return integral.real() * M / (1.0 + spikes_.values[idx.s_prime - 1]);
    }

    // weighted kernel K_2(x,y) = sum_j phi_j(x) psi~_j(y) (xy)^{(M-N)/2} e^{-M(x+y)/2}
    double kernel_k2(double x, double y) const {
        if (x <= 0.0 || y <= 0.0) throw std::domain_error("kernel_k2: arguments must be positive");
        double acc = 0.0;
        for (int j = 0; j < params_.N; ++j) acc += phi(j, x) * psi_tilde(j, y);
        return acc * weight_half(x) * weight_half(y);
    }

    double kernel_k2a_sum(double x, double y) const {
        double acc = 0.0;
        for (int j = 0; j < params_.N - rank(); ++j) acc += phi(j, x) * psi_tilde(j, y);
        return acc * weight_half(x) * weight_half(y);
    }

    // LUE part of the kernel through the double-contour integral form;
    // the dual formula the Laguerre sum is tested against
    double kernel_k2a_integral(double x, double y) const {
        const int M = params_.M;
        const double t_max = (50.0 + 2.0 * params_.N) / M;
        const double integral = integrate_panels(
            [&](double t) { return psi0_tilde(y + t) * psi0(x + t); }, 0.0, t_max,
            std::max(8, static_cast<int>(t_max * M)));
        const double ratio = std::pow(y / x, 0.5 * (M - params_.N)) * std::exp(0.5 * M * (y - x));
        return -static_cast<double>(M) * M * ratio * integral;
    }

    // psi(u) = (1/2pi i) oint_Sigma e^{Muw} (w-1)^{N-r} / w^{M-r} dw: the
    // residue at 0 is a binomial-coefficient polynomial in Mu
    double psi0(double u) const {
        const int N = params_.N, M = params_.M, r = rank();
        const double mu = M * u;
        double acc = 0.0;
        for (int k = 0; k <= M - r - 1; ++k) {
            const int bin_idx = M - r - 1 - k;  // power of w picked from (w-1)^{N-r}
            if (bin_idx > N - r) continue;
            const double bin = std::exp(log_factorial(N - r) - log_factorial(bin_idx) -
                                        log_factorial(N - r - bin_idx));
            const double sign = ((N - r - bin_idx) % 2 == 0) ? 1.0 : -1.0;
            acc += sign * bin * std::pow(mu, k) / std::exp(log_factorial(k));
        }
        return acc;
    }

    // psi~(u) = (1/2pi i) oint_Gamma e^{-Muz} z^{M-r} / (z-1)^{N-r} dz;
    // the only pole sits at z = 1, so the expansion carries e^{-Mu} itself
    double psi0_tilde(double u) const {
        if (params_.N == rank()) return 0.0;
        return std::exp(-params_.M * u) * eval_expansion(psi0_poles_, params_.M * u);
    }

    // max_{i,j} |<phi_i, psi~_j> - delta_ij| by generalized Gauss-Laguerre
    // quadrature; order-doubling discrepancy above 1e-6 reports under-resolution
    double biorthonormality_check(int order = 160) const {
        if (params_.N > 12 || params_.M > 16)
            throw std::invalid_argument("biorthonormality_check: restricted to N <= 12, M <= 16");
        const double dev1 = biorth_deviation(order);
        const double dev2 = biorth_deviation(2 * order);
        if (std::abs(dev1 - dev2) > 1e-6)
            throw std::runtime_error("biorthonormality_check: quadrature under-resolved");
        return dev2;
    }

    // P(max lambda < T) as det(I_N - (<phi_i, psi~_j> over [T, inf)))
    double gap_probability(double T, int order = 96, double length = -1.0) const {
        if (T <= 0.0) throw std::domain_error("gap_probability: T must be positive");
        QuadratureGrid grid = make_grid(T, order, length > 0.0 ? length : grid_length());
        std::vector<std::function<double(double)>> fs, gs;
        for (int j = 0; j < params_.N; ++j) {
            fs.emplace_back([this, j](double x) { return phi(j, x) * weight_half(x); });
            gs.emplace_back([this, j](double y) { return psi_tilde(j, y) * weight_half(y); });
        }
        const double det = det_finite_rank(fs, gs, grid);
        return std::min(1.0, std::max(0.0, det));
    }

    // Nystrom route over the same kernel, for the cross-backend invariant
    double gap_probability_nystrom(double T, int order = 96) const {
        if (T <= 0.0) throw std::domain_error("gap_probability_nystrom: T must be positive");
        QuadratureGrid grid = make_grid(T, order, grid_length());
        return det_scalar([this](double x, double y) { return kernel_k2(x, y); }, grid);
    }

    double weight_half(double x) const {
        return std::pow(x, 0.5 * (params_.M - params_.N)) * std::exp(-0.5 * params_.M * x);
    }

    double grid_length() const {
        const double a_top = std::max(0.0, spikes_.a_max());
        return (50.0 + 2.0 * params_.N) * (1.0 + a_top) / params_.M;
    }

private:
    void check_index(int j) const {
        if (j < 0 || j >= params_.N) throw std::out_of_range("multiple-Laguerre index out of range");
    }

    // phi_{N-r+r'-1}(x) = x^{-(M-N)} Res_{z=0} e^{Mxz} P(z) / z^{M-r+r'}
    // with P the polynomial (z-1)^{N-r} prod (z-c_j)^{r_j} (z-c_s')^{t'-1};
    // only powers x^{k-(M-N)} with k >= M-N survive, so this is a polynomial
    // with coefficients P_m M^k / k!.
    std::vector<double> build_phi_polynomial(const TripleIndex& idx) const {
        const int N = params_.N, M = params_.M, r = rank();
        std::vector<double> p = {1.0};
        auto mul_linear = [&p](double root, int times) {
            for (int t = 0; t < times; ++t) {
                std::vector<double> q(p.size() + 1, 0.0);
                for (std::size_t i = 0; i < p.size(); ++i) {
                    q[i + 1] += p[i];
                    q[i] -= root * p[i];
                }
                p = std::move(q);
            }
        };
        mul_linear(1.0, N - r);
        for (int s = 0; s < idx.s_prime - 1; ++s) mul_linear(poles_[s], spikes_.multiplicities[s]);
        mul_linear(poles_[idx.s_prime - 1], idx.t_prime - 1);
        // residue: sum_m P_m (Mx)^{M-r+r'-1-m} / (M-r+r'-1-m)!; shift by x^{-(M-N)}
        const int top = M - r + idx.r_prime - 1;
        std::vector<double> poly(N - r + idx.r_prime, 0.0);  // degree N-r+r'-1
        for (int m = 0; m < static_cast<int>(p.size()); ++m) {
            const int k = top - m;
            if (k < M - N || k < 0) continue;
            poly[k - (M - N)] = p[m] * std::exp(k * std::log(static_cast<double>(M)) - log_factorial(k));
        }
        return poly;
    }

    std::vector<detail::PoleExpansion> build_psi_expansion(const TripleIndex& idx) const {
        const int N = params_.N, M = params_.M, r = rank();
        // pole set: z = 1 (order N-r), z = c_j (order r_j for j < s', t' at s')
        std::vector<std::pair<double, int>> pole_set;
        if (N - r > 0) pole_set.emplace_back(1.0, N - r);
        for (int s = 0; s < idx.s_prime - 1; ++s)
            pole_set.emplace_back(poles_[s], spikes_.multiplicities[s]);
        pole_set.emplace_back(poles_[idx.s_prime - 1], idx.t_prime);

        std::vector<detail::PoleExpansion> out;
        for (const auto& [p, m] : pole_set) {
            auto g = [&, p = p, m = m](std::complex<double> z) {
                std::complex<double> val = detail::pow_int(z, M - r + idx.r_prime - 1);
                val /= detail::pow_int(z - 1.0, N - r);
                for (int s = 0; s < idx.s_prime - 1; ++s)
                    val /= detail::pow_int(z - poles_[s], spikes_.multiplicities[s]);
                val /= detail::pow_int(z - poles_[idx.s_prime - 1], idx.t_prime);
                val *= detail::pow_int(z - p, m);
                return val;
            };
            out.push_back(expand_pole(p, m, g, pole_set));
        }
        return out;
    }

    std::vector<detail::PoleExpansion> build_expansion_at(
        double pole, int order, const std::function<std::complex<double>(std::complex<double>)>& g)
        const {
        std::vector<std::pair<double, int>> pole_set = {{pole, order}};
        return {expand_pole(pole, order, g, pole_set)};
    }

    template <typename G>
    detail::PoleExpansion expand_pole(double p, int m, G&& g,
                                      const std::vector<std::pair<double, int>>& pole_set) const {
        // Cauchy-extract the Taylor coefficients of g around p; the circle
        // stays at a quarter of the distance to the nearest other singularity
        double nearest = std::abs(p);  // z = 0 is always singular (or just far)
        for (const auto& [q, mq] : pole_set)
            if (q != p) nearest = std::min(nearest, std::abs(q - p));
        const double rho = 0.25 * nearest;
        detail::PoleExpansion exp_out;
        exp_out.location = p;
        exp_out.order = m;
        exp_out.coeffs.resize(m);
        const int nodes = 512;
        std::vector<std::complex<double>> values(nodes);
        for (int k = 0; k < nodes; ++k) {
            const double th = 2.0 * M_PI * k / nodes;
            values[k] = g(p + std::polar(rho, th));
        }
        for (int k = 0; k < m; ++k) {
            std::complex<double> acc(0.0, 0.0);
            for (int q = 0; q < nodes; ++q) {
                const double th = 2.0 * M_PI * q / nodes;
                acc += values[q] * std::polar(1.0, -k * th);
            }
            acc /= static_cast<double>(nodes) * std::pow(rho, k);
            exp_out.coeffs[k] = acc.real() / std::exp(log_factorial(m - 1 - k));
        }
        return exp_out;
    }

    // sum over poles of e^{Mx(1-p)} sum_k coeff_k (-Mx)^{m-1-k}
    double eval_expansion(const std::vector<detail::PoleExpansion>& poles, double mx) const {
        double total = 0.0;
        for (const auto& pe : poles) {
            double poly = 0.0;
            for (int k = 0; k < pe.order; ++k)
                poly += pe.coeffs[k] * std::pow(-mx, pe.order - 1 - k);
            total += std::exp(mx * (1.0 - pe.location)) * poly;
        }
        return total;
    }

    // inner products under the substitution x = sigma u / M with
    // sigma = 1 + a_s, which turns the fastest-growing exponential inside
    // psi~ into a bounded one (Gauss-Laguerre diverges on growing integrands)
    double biorth_deviation(int order) const {
        const int N = params_.N, M = params_.M;
        const double sigma = 1.0 + std::max(0.0, spikes_.a_max());
        QuadRule rule = gauss_laguerre(order, M - N);
        const double log_norm = (M - N + 1) * std::log(sigma / M);
        double worst = 0.0;
        std::vector<std::vector<double>> phis(N, std::vector<double>(order));
        std::vector<std::vector<double>> psis(N, std::vector<double>(order));
        std::vector<double> damp(order);
        for (int q = 0; q < order; ++q) {
            const double x = sigma * rule.nodes[q] / M;
            damp[q] = std::exp(-(sigma - 1.0) * rule.nodes[q]);
            for (int j = 0; j < N; ++j) {
                phis[j][q] = phi(j, x);
                psis[j][q] = psi_tilde(j, x);
            }
        }
        for (int i = 0; i < N; ++i) {
            for (int j = 0; j < N; ++j) {
                double acc = 0.0;
                for (int q = 0; q < order; ++q)
                    acc += rule.weights[q] * damp[q] * phis[i][q] * psis[j][q];
                acc *= std::exp(log_norm);
                worst = std::max(worst, std::abs(acc - (i == j ? 1.0 : 0.0)));
            }
        }
        return worst;
    }

    ModelParams params_;
    SpikeSpec spikes_;
    std::vector<double> poles_;
    std::vector<TripleIndex> triples_;
    std::vector<std::vector<double>> phi_poly_;
    std::vector<std::vector<detail::PoleExpansion>> psi_poles_;
    std::vector<detail::PoleExpansion> psi0_poles_;
    double sigma_radius_, gamma_center_, gamma_radius_;
};

}  // namespace spiked
