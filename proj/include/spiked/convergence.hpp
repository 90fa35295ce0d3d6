#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "spiked/complex_kernels.hpp"
#include "spiked/distributions.hpp"
#include "spiked/ensembles.hpp"
#include "spiked/quaternion_kernels.hpp"

namespace spiked {

struct ProbeRow {
    int M = 0;
    int N = 0;
    double sup_distance = 0.0;
};

struct ProbeConfig {
    int beta = 2;
    double gamma_sq = 4.0;
    double a = 0.0;  // 0 = white (beta 2 only)
    std::vector<int> m_values;
    double xi_lo = -4.0, xi_hi = 2.0, xi_step = 0.5;
    int order = 96;
};

// For each M, the sup over a xi-grid of |finite-N gap law - limit law|,
// where the finite-N threshold is T_x = center + xi / scale and the limit is
// routed by the regime of the spike. The table should decrease in M.
inline std::vector<ProbeRow> convergence_probe(const ProbeConfig& cfg) {
    if (cfg.beta != 2 && cfg.beta != 4)
        throw std::invalid_argument("convergence_probe: beta must be 2 or 4");
    if (cfg.beta == 4 && cfg.a == 0.0)
        throw std::invalid_argument("convergence_probe: beta 4 supports only the rank-1 spiked case");
    for (std::size_t i = 1; i < cfg.m_values.size(); ++i)
        if (cfg.m_values[i] <= cfg.m_values[i - 1])
            throw std::invalid_argument("convergence_probe: M list must be increasing");

    std::vector<ProbeRow> rows;
    for (int m : cfg.m_values) {
        const ModelParams params = ModelParams::from_gamma(DivisionAlgebra::from_beta(cfg.beta), m, cfg.gamma_sq);
        const ScalingRegime regime = classify_regime(cfg.a, params);

        auto limit = [&](double xi) -> double {
            switch (regime.tag) {
                case Regime::Subcritical:
                    return cfg.beta == 2 ? f_gue(xi, Backend::Painleve) : f_gse(xi, Backend::Painleve);
                case Regime::Critical:
                    return cfg.beta == 2 ? f_gue_t(xi, 1) : f_gse1(xi);
                case Regime::Supercritical:
                    return normal_cdf(xi);
            }
            throw std::logic_error("convergence_probe: bad regime");
        };

        double sup = 0.0;
        if (cfg.beta == 2) {
            const SpikeSpec spikes = (cfg.a == 0.0) ? SpikeSpec({}, {})
                                                    : SpikeSpec({cfg.a}, {1});
            ComplexSpikedSystem sys(params, spikes);
            for (double xi = cfg.xi_lo; xi <= cfg.xi_hi + 1e-12; xi += cfg.xi_step) {
                const double t_x = regime.center + xi / regime.scale;
                if (t_x <= 0.0) continue;
                const double gap = sys.gap_probability(t_x, cfg.order, 18.0 / regime.scale);
                sup = std::max(sup, std::abs(gap - limit(xi)));
            }
        } else {
            QuaternionSkewSystem sys(params, cfg.a);
            for (double xi = cfg.xi_lo; xi <= cfg.xi_hi + 1e-12; xi += cfg.xi_step) {
                const double t_x = regime.center + xi / regime.scale;
                if (t_x <= 0.0) continue;
                const double gap = sys.gap_probability(t_x, cfg.order, 18.0 / regime.scale);
                sup = std::max(sup, std::abs(gap - limit(xi)));
            }
        }
        rows.push_back({m, params.N, sup});
    }
    return rows;
}

}  // namespace spiked
