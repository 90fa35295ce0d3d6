#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>

#include "spiked/airy_kernel.hpp"
#include "spiked/contour_fun.hpp"
#include "spiked/fredholm.hpp"
#include "spiked/orthopoly.hpp"
#include "spiked/painleve.hpp"

namespace spiked {

enum class DistTag { F_GUE, F_GOE, F_GSE, F_GUE_t, G_t, F_GSE1 };
enum class Backend { Painleve, Fredholm, FiniteRank };

struct DistributionId {
    DistTag tag;
    int t = 1;  // meaningful for F_GUE_t and G_t
    Backend backend;
};

inline Backend default_backend(DistTag tag) {
    switch (tag) {
        case DistTag::F_GUE:
        case DistTag::F_GOE:
        case DistTag::F_GSE: return Backend::Painleve;
        case DistTag::F_GUE_t: return Backend::Fredholm;
        case DistTag::G_t: return Backend::FiniteRank;
        case DistTag::F_GSE1: return Backend::Fredholm;
    }
    throw std::logic_error("default_backend: unknown tag");
}

inline bool backend_admissible(DistTag tag, Backend backend) {
    switch (tag) {
        case DistTag::F_GUE: return backend == Backend::Painleve || backend == Backend::Fredholm;
        case DistTag::F_GOE: return backend == Backend::Painleve;
        case DistTag::F_GSE: return backend == Backend::Painleve || backend == Backend::Fredholm;
        case DistTag::F_GUE_t: return backend == Backend::Fredholm;
        case DistTag::G_t: return backend == Backend::FiniteRank;
        case DistTag::F_GSE1: return backend == Backend::Fredholm;
    }
    return false;
}

struct DistOptions {
    int quad_order = 60;
    double trunc_len = 16.0;
};

namespace detail {

inline const PainleveSolution& painleve_table() {
    static PainleveSolution sol = solve_painleve(-8.5, 10.0, 0.005);
    return sol;
}

inline void check_range(double T) {
    if (T < -8.0) throw std::out_of_range("distribution argument below tabulated range T >= -8");
    if (!std::isfinite(T)) throw std::invalid_argument("distribution argument must be finite");
}

// process-wide value cache; keyed by everything that influences the value
using CacheKey = std::tuple<int, int, int, int, double, double>;  // tag, backend, t, order, L, T

inline double cache_lookup_or(const CacheKey& key, const std::function<double()>& compute) {
    static std::map<CacheKey, double> cache;
    static std::mutex mutex;
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const double value = compute();
    std::lock_guard<std::mutex> lock(mutex);
    cache.emplace(key, value);
    return value;
}

inline double clamp_probability(double v, const char* what) {
    if (v < -1e-6 || v > 1.0 + 1e-6)
        throw std::runtime_error(std::string(what) + ": value escaped [0,1]: " + std::to_string(v));
    return std::min(1.0, std::max(0.0, v));
}

// sqrt of a matrix-kernel determinant; tiny negative values are quadrature
// noise on an exact zero
inline double sqrt_det(double det, const char* what) {
    if (det < -1e-8)
        throw std::runtime_error(std::string(what) + ": negative determinant " + std::to_string(det));
    return std::sqrt(std::max(0.0, det));
}

inline double f_gue_fredholm(double T, const DistOptions& opt) {
    QuadratureGrid grid = make_grid(T, opt.quad_order, opt.trunc_len);
    return det_scalar([](double x, double y) { return airy_kernel(x, y); }, grid);
}

// F_GSE matrix kernel (S4hat, SD4hat; IS4hat, S4hat^T) built from the Airy
// Gram table on the grid nodes.
inline double f_gse_fredholm(double T, const DistOptions& opt) {
    QuadratureGrid grid = make_grid(T, opt.quad_order, opt.trunc_len);
    auto table = std::make_shared<AiryGramTable>(grid.nodes);
    MatrixKernel2 kernel;
    kernel.k11 = [table](double x, double y) {
        return 0.5 * table->k_airy(x, y) - 0.25 * table->ai_at(x) * table->b_at(y);
    };
    kernel.k12 = [table](double x, double y) {
        return -0.5 * table->dk_dy(x, y) - 0.25 * table->ai_at(x) * table->ai_at(y);
    };
    kernel.k21 = [table](double x, double y) {
        return -0.5 * table->ik(x, y) + 0.25 * table->b_at(x) * table->b_at(y);
    };
    kernel.k22 = [table](double x, double y) {
        return 0.5 * table->k_airy(y, x) - 0.25 * table->ai_at(y) * table->b_at(x);
    };
    return sqrt_det(det_matrix2(kernel, grid), "f_gse");
}

// F_GSE1 blocks add a rank-one constant-in-eta piece to S4hat, which is not
// trace class on [T, inf); conjugating by diag(e^{x/3}, e^{-x/3}) restores
// decay in every block and leaves the determinant unchanged.
inline double f_gse1_fredholm(double T, const DistOptions& opt) {
    QuadratureGrid grid = make_grid(T, opt.quad_order, opt.trunc_len);
    auto table = std::make_shared<AiryGramTable>(grid.nodes);
    MatrixKernel2 kernel;
    kernel.k11 = [table](double x, double y) {
        const double s4 = 0.5 * table->k_airy(x, y) - 0.25 * table->ai_at(x) * table->b_at(y) +
                          0.5 * table->ai_at(x);
        return std::exp((x - y) / 3.0) * s4;
    };
    kernel.k12 = [table](double x, double y) {
        const double sd4 = -0.5 * table->dk_dy(x, y) - 0.25 * table->ai_at(x) * table->ai_at(y);
        return std::exp((x + y) / 3.0) * sd4;
    };
    kernel.k21 = [table](double x, double y) {
        const double is4 = -0.5 * table->ik(x, y) + 0.25 * table->b_at(x) * table->b_at(y) -
                           0.5 * table->b_at(x) + 0.5 * table->b_at(y);
        return std::exp(-(x + y) / 3.0) * is4;
    };
    kernel.k22 = [table](double x, double y) {
        const double s4t = 0.5 * table->k_airy(y, x) - 0.25 * table->ai_at(y) * table->b_at(x) +
                           0.5 * table->ai_at(y);
        return std::exp((y - x) / 3.0) * s4t;
    };
    return sqrt_det(det_matrix2(kernel, grid), "f_gse1");
}

inline double f_gue_t_fredholm(double T, int t, const DistOptions& opt) {
    QuadratureGrid grid = make_grid(T, opt.quad_order, opt.trunc_len);
    // contour functions tabulated on the nodes once; s^(j) is not square
    // integrable on its own, hence the e^{x/3} conjugation
    auto tj = std::make_shared<std::map<double, std::vector<double>>>();
    for (double x : grid.nodes) {
        std::vector<double> vals(2 * t);
        for (int j = 1; j <= t; ++j) {
            vals[j - 1] = airy_t(j, x);
            vals[t + j - 1] = airy_s(j, x);
        }
        (*tj)[x] = std::move(vals);
    }
    auto lookup = [tj, t](double x) -> std::vector<double> {
        auto it = tj->find(x);
        if (it != tj->end()) return it->second;
        std::vector<double> vals(2 * t);
        for (int j = 1; j <= t; ++j) {
            vals[j - 1] = airy_t(j, x);
            vals[t + j - 1] = airy_s(j, x);
        }
        return vals;
    };
    ScalarKernel kernel = [lookup, t](double x, double y) {
        const std::vector<double> vx = lookup(x), vy = lookup(y);
        double acc = airy_kernel(x, y);
        for (int j = 0; j < t; ++j) acc += vx[j] * vy[t + j];
        return std::exp((x - y) / 3.0) * acc;
    };
    return det_scalar(kernel, grid);
}

inline double g_t_finite_rank(double T, int t, const DistOptions& opt) {
    // Gaussian-weighted Hermite pairs; the grid just needs to cover the
    // weight, not the Airy decay scale
    const double L = std::max(opt.trunc_len, 12.0 - T);
    QuadratureGrid grid = make_grid(T, opt.quad_order, L);
    std::vector<std::function<double(double)>> fs, gs;
    for (int j = 0; j < t; ++j) {
        const double norm = 1.0 / std::sqrt(std::exp(log_factorial(j)) * std::sqrt(2.0 * M_PI));
        auto fn = [j, norm](double x) { return norm * hermite(j, x) * std::exp(-x * x / 4.0); };
        fs.push_back(fn);
        gs.push_back(fn);
    }
    return det_finite_rank(fs, gs, grid);
}

}  // namespace detail

inline double f_gue(double T, Backend backend = Backend::Painleve,
                    const DistOptions& opt = {}) {
    detail::check_range(T);
    if (!backend_admissible(DistTag::F_GUE, backend))
        throw std::invalid_argument("f_gue: backend not admissible");
    const detail::CacheKey key{0, static_cast<int>(backend), 0, opt.quad_order, opt.trunc_len, T};
    return detail::cache_lookup_or(key, [&] {
        if (backend == Backend::Painleve)
            return detail::clamp_probability(std::exp(-detail::painleve_table().I1_at(T)), "f_gue");
        return detail::clamp_probability(detail::f_gue_fredholm(T, opt), "f_gue");
    });
}

inline double f_goe(double T, const DistOptions& opt = {}) {
    detail::check_range(T);
    (void)opt;
    const auto& sol = detail::painleve_table();
    return detail::clamp_probability(
        std::exp(-0.5 * sol.I1_at(T)) * std::exp(-0.5 * sol.I2_at(T)), "f_goe");
}

inline double f_gse(double T, Backend backend = Backend::Painleve,
                    const DistOptions& opt = {}) {
    detail::check_range(T);
    if (!backend_admissible(DistTag::F_GSE, backend))
        throw std::invalid_argument("f_gse: backend not admissible");
    const detail::CacheKey key{2, static_cast<int>(backend), 0, opt.quad_order, opt.trunc_len, T};
    return detail::cache_lookup_or(key, [&] {
        if (backend == Backend::Painleve) {
            const auto& sol = detail::painleve_table();
            const double v = std::exp(-0.5 * sol.I1_at(T)) * std::cosh(0.5 * sol.I2_at(T));
            return detail::clamp_probability(v, "f_gse");
        }
        return detail::clamp_probability(detail::f_gse_fredholm(T, opt), "f_gse");
    });
}

inline double f_gue_t(double T, int t, const DistOptions& opt = {}) {
    detail::check_range(T);
    if (t < 1) throw std::domain_error("f_gue_t: t must be >= 1");
    const detail::CacheKey key{3, 1, t, opt.quad_order, opt.trunc_len, T};
    return detail::cache_lookup_or(key, [&] {
        return detail::clamp_probability(detail::f_gue_t_fredholm(T, t, opt), "f_gue_t");
    });
}

inline double g_t(double T, int t, const DistOptions& opt = {}) {
    if (!std::isfinite(T)) throw std::invalid_argument("g_t: argument must be finite");
    if (t < 1) throw std::domain_error("g_t: t must be >= 1");
    const detail::CacheKey key{4, 2, t, opt.quad_order, opt.trunc_len, T};
    return detail::cache_lookup_or(key, [&] {
        return detail::clamp_probability(detail::g_t_finite_rank(T, t, opt), "g_t");
    });
}

inline double f_gse1(double T, const DistOptions& opt = {}) {
    detail::check_range(T);
    const detail::CacheKey key{5, 1, 0, opt.quad_order, opt.trunc_len, T};
    return detail::cache_lookup_or(key, [&] {
        return detail::clamp_probability(detail::f_gse1_fredholm(T, opt), "f_gse1");
    });
}

inline double evaluate(const DistributionId& id, double T, const DistOptions& opt = {}) {
    switch (id.tag) {
        case DistTag::F_GUE: return f_gue(T, id.backend, opt);
        case DistTag::F_GOE: return f_goe(T, opt);
        case DistTag::F_GSE: return f_gse(T, id.backend, opt);
        case DistTag::F_GUE_t: return f_gue_t(T, id.t, opt);
        case DistTag::G_t: return g_t(T, id.t, opt);
        case DistTag::F_GSE1: return f_gse1(T, opt);
    }
    throw std::logic_error("evaluate: unknown tag");
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace spiked
