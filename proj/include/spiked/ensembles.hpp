#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "spiked/quadrature.hpp"
#include "spiked/rng.hpp"

namespace spiked {

enum class Division { Real, Complex, Quaternion };

struct DivisionAlgebra {
    Division tag = Division::Complex;

    int beta() const {
        switch (tag) {
            case Division::Real: return 1;
            case Division::Complex: return 2;
            case Division::Quaternion: return 4;
        }
        throw std::logic_error("DivisionAlgebra: bad tag");
    }

    static DivisionAlgebra from_beta(int beta) {
        switch (beta) {
            case 1: return {Division::Real};
            case 2: return {Division::Complex};
            case 4: return {Division::Quaternion};
        }
        throw std::invalid_argument("beta must be 1, 2 or 4");
    }
};

// The perturbation: population eigenvalues 1+a_1 < ... < 1+a_s with
// multiplicities r_1 ... r_s on top of an identity background.
struct SpikeSpec {
    std::vector<double> values;
    std::vector<int> multiplicities;

    SpikeSpec() = default;
    SpikeSpec(std::vector<double> vals, std::vector<int> mults)
        : values(std::move(vals)), multiplicities(std::move(mults)) {
        if (values.size() != multiplicities.size())
            throw std::invalid_argument("SpikeSpec: values/multiplicities length mismatch");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (values[i] <= -1.0)
                throw std::domain_error("SpikeSpec: spike values must be > -1");
            if (i > 0 && values[i] <= values[i - 1])
                throw std::invalid_argument("SpikeSpec: spike values must be strictly increasing");
            if (multiplicities[i] < 1)
                throw std::invalid_argument("SpikeSpec: multiplicities must be positive");
        }
    }

    int rank() const {
        int r = 0;
        for (int m : multiplicities) r += m;
        return r;
    }
    bool white() const { return values.empty(); }
    double a_max() const {
        return values.empty() ? 0.0 : values.back();
    }
};

struct ModelParams {
    DivisionAlgebra division;
    int N = 1;
    int M = 1;
    double gamma_sq = 1.0;  // realized M/N

    ModelParams() = default;
    ModelParams(DivisionAlgebra div, int n, int m) : division(div), N(n), M(m) {
        if (N < 1 || M < N) throw std::invalid_argument("ModelParams: need M >= N >= 1");
        gamma_sq = static_cast<double>(M) / N;
    }

    // The scaling laws take M and gamma^2 as the free parameters; N is the
    // nearest integer and the realized ratio is what every later formula uses.
    static ModelParams from_gamma(DivisionAlgebra div, int m, double gamma_sq_req) {
        if (gamma_sq_req < 1.0) throw std::domain_error("ModelParams: gamma^2 must be >= 1");
        const int n = std::max(1, static_cast<int>(std::lround(m / gamma_sq_req)));
        return ModelParams(div, n, m);
    }

    double gamma() const { return std::sqrt(gamma_sq); }
};

struct Spectrum {
    std::vector<double> eigenvalues;  // ascending
    ModelParams params;

    double max() const {
        if (eigenvalues.empty()) throw std::logic_error("Spectrum: empty");
        return eigenvalues.back();
    }
};

enum class Regime { Subcritical, Critical, Supercritical };

struct ScalingRegime {
    Regime tag;
    double center;
    double scale;
};

inline Eigen::VectorXd build_covariance(const SpikeSpec& spec, int N) {
    if (spec.rank() > N) throw std::invalid_argument("build_covariance: rank exceeds dimension");
    Eigen::VectorXd diag = Eigen::VectorXd::Ones(N);
    int at = 0;
    // spec guarantees a_j > -1 already; descending so the largest spike leads
    for (int i = static_cast<int>(spec.values.size()) - 1; i >= 0; --i)
        for (int m = 0; m < spec.multiplicities[i]; ++m) diag(at++) = 1.0 + spec.values[i];
    return diag;
}

// N x M data matrix over the division algebra, columns i.i.d. centered
// normal with the given diagonal covariance. Complex entries carry variance
// sigma^2/2 per part and quaternion entries sigma^2/4 per part; quaternions
// are stored through the 2x2 complex symplectic embedding, so the returned
// matrix is (2N) x (2M) in that case.
inline Eigen::MatrixXcd sample_data_matrix(const ModelParams& params,
                                           const Eigen::VectorXd& covariance, Rng& rng) {
    const int N = params.N, M = params.M;
    if (covariance.size() != N) throw std::invalid_argument("sample_data_matrix: covariance size");
    if ((covariance.array() <= 0.0).any())
        throw std::domain_error("sample_data_matrix: covariance must be positive");
    switch (params.division.tag) {
        case Division::Real: {
            Eigen::MatrixXcd x(N, M);
            for (int j = 0; j < M; ++j)
                for (int i = 0; i < N; ++i) x(i, j) = std::sqrt(covariance(i)) * rng.normal();
            return x;
        }
        case Division::Complex: {
            Eigen::MatrixXcd x(N, M);
            for (int j = 0; j < M; ++j)
                for (int i = 0; i < N; ++i) {
                    const double s = std::sqrt(covariance(i) / 2.0);
                    x(i, j) = std::complex<double>(s * rng.normal(), s * rng.normal());
                }
            return x;
        }
        case Division::Quaternion: {
            Eigen::MatrixXcd x(2 * N, 2 * M);
            for (int j = 0; j < M; ++j)
                for (int i = 0; i < N; ++i) {
                    const double s = std::sqrt(covariance(i) / 4.0);
                    const double a = s * rng.normal(), b = s * rng.normal();
                    const double c = s * rng.normal(), d = s * rng.normal();
                    // q = a+bi+cj+dk embeds as [alpha, beta; -conj(beta), conj(alpha)]
                    const std::complex<double> alpha(a, b), beta(c, d);
                    x(2 * i, 2 * j) = alpha;
                    x(2 * i, 2 * j + 1) = beta;
                    x(2 * i + 1, 2 * j) = -std::conj(beta);
                    x(2 * i + 1, 2 * j + 1) = std::conj(alpha);
                }
            return x;
        }
    }
    throw std::logic_error("sample_data_matrix: bad division");
}

inline Eigen::MatrixXcd sample_data_matrix(const ModelParams& params,
                                           const Eigen::VectorXd& covariance,
                                           std::uint64_t seed) {
    Rng rng(seed);
    return sample_data_matrix(params, covariance, rng);
}

// S = X X^* / M. For quaternions X is already the complex embedding, and M
// is the quaternion sample count, not the embedded column count.
inline Eigen::MatrixXcd sample_covariance(const Eigen::MatrixXcd& x, int m_samples) {
    if (m_samples < 1) throw std::invalid_argument("sample_covariance: M must be >= 1");
    const int n = static_cast<int>(x.rows());
    Eigen::MatrixXcd lower = Eigen::MatrixXcd::Zero(n, n);
    lower.selfadjointView<Eigen::Lower>().rankUpdate(x, 1.0 / m_samples);
    Eigen::MatrixXcd s = lower.selfadjointView<Eigen::Lower>();
    return s;
}

namespace detail {

inline std::vector<double> kramers_dedup(const std::vector<double>& paired) {
    std::vector<double> out;
    out.reserve(paired.size() / 2);
    for (std::size_t i = 0; i + 1 < paired.size(); i += 2) {
        const double gap = std::abs(paired[i + 1] - paired[i]);
        const double tol = 1e-8 * std::max(1.0, std::abs(paired[i]));
        if (gap > tol)
            throw std::runtime_error("spectrum: Kramers pair mismatch, gap = " + std::to_string(gap));
        out.push_back(0.5 * (paired[i] + paired[i + 1]));
    }
    return out;
}

}  // namespace detail

inline Spectrum spectrum(const Eigen::MatrixXcd& s, const ModelParams& params) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(s, Eigen::EigenvaluesOnly);
    std::vector<double> evals(solver.eigenvalues().data(),
                              solver.eigenvalues().data() + solver.eigenvalues().size());
    std::sort(evals.begin(), evals.end());
    if (params.division.tag == Division::Quaternion) evals = detail::kramers_dedup(evals);
    if (static_cast<int>(evals.size()) != params.N)
        throw std::invalid_argument("spectrum: matrix size does not match params");
    return Spectrum{std::move(evals), params};
}

inline ScalingRegime classify_regime(double a_max, const ModelParams& params) {
    if (a_max <= -1.0) throw std::domain_error("classify_regime: spike must be > -1");
    const double gamma = params.gamma();
    const double g_inv = 1.0 / gamma;
    const double M = params.M;
    const double edge_m = (params.division.tag == Division::Quaternion) ? 2.0 * M : M;
    ScalingRegime out{};
    if (a_max < g_inv) out.tag = Regime::Subcritical;
    else if (a_max == g_inv) out.tag = Regime::Critical;
    else out.tag = Regime::Supercritical;

    if (out.tag == Regime::Supercritical) {
        const double a = a_max;
        out.center = (1.0 + a) * (1.0 + 1.0 / (params.gamma_sq * a));
        out.scale = std::sqrt(edge_m) / ((1.0 + a) * std::sqrt(1.0 - 1.0 / (params.gamma_sq * a * a)));
    } else {
        out.center = (1.0 + g_inv) * (1.0 + g_inv);
        out.scale = gamma * std::pow(edge_m, 2.0 / 3.0) / std::pow(1.0 + gamma, 4.0 / 3.0);
    }
    return out;
}

inline double rescale_max(const Spectrum& spec, const ScalingRegime& regime) {
    return (spec.max() - regime.center) * regime.scale;
}

// Marcenko-Pastur density (gamma^2 / 2 pi t) sqrt((t-b1)(b2-t)) on
// [b1, b2] = [(1-1/gamma)^2, (1+1/gamma)^2].
inline double mp_density(double x, double gamma) {
    if (gamma < 1.0) throw std::domain_error("mp_density: gamma must be >= 1");
    const double b1 = (1.0 - 1.0 / gamma) * (1.0 - 1.0 / gamma);
    const double b2 = (1.0 + 1.0 / gamma) * (1.0 + 1.0 / gamma);
    if (x <= b1 || x >= b2) return 0.0;
    return gamma * gamma / (2.0 * M_PI * x) * std::sqrt((x - b1) * (b2 - x));
}

inline double mp_cdf(double x, double gamma) {
    if (gamma < 1.0) throw std::domain_error("mp_cdf: gamma must be >= 1");
    const double b1 = (1.0 - 1.0 / gamma) * (1.0 - 1.0 / gamma);
    const double b2 = (1.0 + 1.0 / gamma) * (1.0 + 1.0 / gamma);
    if (x <= b1) return 0.0;
    if (x >= b2) return 1.0;
    // t = b1 + (b2-b1) sin^2(theta) removes both square-root edges
    const double th_hi = std::asin(std::sqrt((x - b1) / (b2 - b1)));
    auto f = [&](double th) {
        const double s2 = std::sin(th) * std::sin(th);
        const double t = b1 + (b2 - b1) * s2;
        const double jac = (b2 - b1) * 2.0 * std::sin(th) * std::cos(th);
        return mp_density(t, gamma) * jac;
    };
    return std::min(1.0, integrate_panels(f, 0.0, th_hi, 24));
}

struct Ecdf {
    std::vector<double> sorted;

    explicit Ecdf(std::vector<double> samples) : sorted(std::move(samples)) {
        if (sorted.empty()) throw std::invalid_argument("Ecdf: empty sample set");
        std::sort(sorted.begin(), sorted.end());
    }

    double operator()(double x) const {
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
        return static_cast<double>(it - sorted.begin()) / sorted.size();
    }
};

// KS = sup |ECDF - CDF|, evaluated at both one-sided limits of every jump.
inline double ks_statistic(const Ecdf& ecdf, const std::function<double(double)>& cdf) {
    const std::size_t n = ecdf.sorted.size();
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = cdf(ecdf.sorted[i]);
        ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - c));
        ks = std::max(ks, std::abs(static_cast<double>(i) / n - c));
    }
    return ks;
}

inline int suggested_thread_count() {
    if (const char* env = std::getenv("SPIKED_SPECTRA_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) return cap;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs `count` independent draws of fn(sample_index, rng) in parallel.
// Streams derive from (seed, index), so the result vector is identical for
// every thread count.
template <typename F>
inline auto monte_carlo(std::uint64_t seed, int count, F&& fn)
    -> std::vector<decltype(fn(0, std::declval<Rng&>()))> {
    using R = decltype(fn(0, std::declval<Rng&>()));
    std::vector<R> results(count);
    const int threads = std::min(suggested_thread_count(), std::max(1, count));
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) break;
                Rng rng(seed, static_cast<std::uint64_t>(i));
                results[i] = fn(i, rng);
            }
        });
    }
    for (auto& th : pool) th.join();
    return results;
}

// One draw of the sorted sample spectrum for the given model.
inline Spectrum draw_spectrum(const ModelParams& params, const SpikeSpec& spikes, Rng& rng) {
    const Eigen::VectorXd cov = build_covariance(spikes, params.N);
    const Eigen::MatrixXcd x = sample_data_matrix(params, cov, rng);
    return spectrum(sample_covariance(x, params.M), params);
}

inline Spectrum draw_spectrum(const ModelParams& params, const SpikeSpec& spikes,
                              std::uint64_t seed) {
    Rng rng(seed);
    return draw_spectrum(params, spikes, rng);
}

}  // namespace spiked
