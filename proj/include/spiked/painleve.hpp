#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spiked/airy.hpp"

namespace spiked {

// Hastings-McLeod solution of q'' = x q + 2 q^3 with q ~ Ai at +infinity,
// tabulated on a descending grid together with the two cumulative integrals
//   I1(x) = int_x^inf (t - x) q^2(t) dt,   I2(x) = int_x^inf q(t) dt,
// which are the exponents of the Tracy-Widom distribution formulas.
struct PainleveSolution {
    std::vector<double> grid;  // descending: grid[0] = x_max
    std::vector<double> q;
    std::vector<double> qp;
    std::vector<double> I1;
    std::vector<double> I2;

    double x_min() const { return grid.back(); }
    double x_max() const { return grid.front(); }

    double interp(const std::vector<double>& col, double x) const {
        if (x > grid.front() || x < grid.back())
            throw std::out_of_range("PainleveSolution: x outside tabulated range");
        const double step = grid[0] - grid[1];
        // 4-point Lagrange interpolation on the uniform descending grid
        int i = static_cast<int>((grid[0] - x) / step);
        int lo = std::max(0, std::min(static_cast<int>(grid.size()) - 4, i - 1));
        double result = 0.0;
        for (int a = lo; a < lo + 4; ++a) {
            double term = col[a];
            for (int b = lo; b < lo + 4; ++b) {
                if (b == a) continue;
                term *= (x - grid[b]) / (grid[a] - grid[b]);
            }
            result += term;
        }
        return result;
    }

    double q_at(double x) const { return interp(q, x); }
    double qp_at(double x) const { return interp(qp, x); }
    double I1_at(double x) const { return interp(I1, x); }
    double I2_at(double x) const { return interp(I2, x); }

    void save_csv(const std::string& path) const {
        std::ofstream out(path);
        out << "x,q,qp,I1,I2\n";
        char buf[160];
        for (std::size_t i = 0; i < grid.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          grid[i], q[i], qp[i], I1[i], I2[i]);
            out << buf;
        }
    }

    static PainleveSolution load_csv(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("PainleveSolution: cannot open " + path);
        std::string line;
        std::getline(in, line);  // header
        PainleveSolution sol;
        while (std::getline(in, line)) {
            std::istringstream ss(line);
            std::array<double, 5> v{};
            char comma;
            ss >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3] >> comma >> v[4];
            sol.grid.push_back(v[0]);
            sol.q.push_back(v[1]);
            sol.qp.push_back(v[2]);
            sol.I1.push_back(v[3]);
            sol.I2.push_back(v[4]);
        }
        for (std::size_t i = 1; i < sol.grid.size(); ++i)
            if (sol.grid[i] >= sol.grid[i - 1])
                throw std::runtime_error("PainleveSolution: grid not strictly decreasing");
        return sol;
    }
};

namespace detail {

// state: (q, q', J = int_x^inf q^2, I1, I2); all integrals accumulate while
// marching downward, dx < 0.
using PState = std::array<long double, 5>;

inline PState painleve_rhs(long double x, const PState& s) {
    const long double q = s[0], qp = s[1], J = s[2];
    return {qp, x * q + 2.0L * q * q * q, -q * q, -J, -q};
}

inline PState rk4_step(long double x, const PState& s, long double h) {
    auto add = [](const PState& a, const PState& b, long double c) {
        PState r;
        for (int i = 0; i < 5; ++i) r[i] = a[i] + c * b[i];
        return r;
    };
    const PState k1 = painleve_rhs(x, s);
    const PState k2 = painleve_rhs(x + 0.5L * h, add(s, k1, 0.5L * h));
    const PState k3 = painleve_rhs(x + 0.5L * h, add(s, k2, 0.5L * h));
    const PState k4 = painleve_rhs(x + h, add(s, k3, h));
    PState r;
    for (int i = 0; i < 5; ++i)
        r[i] = s[i] + h / 6.0L * (k1[i] + 2.0L * k2[i] + 2.0L * k3[i] + k4[i]);
    return r;
}

}  // namespace detail

// Integrates backward from (q, q') = (Ai, Ai')(x_max). The backward
// direction damps the unstable mode for x > 0; below x ~ -2 roundoff grows
// like exp((2 sqrt(2)/3)|x|^{3/2}), so long double state keeps q(-8) good to
// well under 1e-8. Positivity of q is monitored: losing it means the
// integration fell off the Hastings-McLeod branch.
inline PainleveSolution solve_painleve(double x_min, double x_max, double step,
                                       int substeps_per_node = 0) {
    if (x_max < 8.0) throw std::invalid_argument("solve_painleve: x_max must be >= 8");
    if (x_min < -10.0) throw std::invalid_argument("solve_painleve: x_min must be >= -10");
    if (step <= 0.0 || step > 0.01) throw std::invalid_argument("solve_painleve: step must be in (0, 0.01]");

    const int nodes = static_cast<int>(std::ceil((x_max - x_min) / step)) + 1;
    if (substeps_per_node <= 0)
        substeps_per_node = std::max(1, static_cast<int>(std::ceil(step / 1e-4)));
    const long double h = -static_cast<long double>(step) / substeps_per_node;

    PainleveSolution sol;
    sol.grid.reserve(nodes);
    sol.q.reserve(nodes);
    sol.qp.reserve(nodes);
    sol.I1.reserve(nodes);
    sol.I2.reserve(nodes);

    detail::PState s = {airy_ai(x_max), airy_ai_prime(x_max), 0.0L, 0.0L, 0.0L};
    long double x = x_max;
    for (int i = 0; i < nodes; ++i) {
        sol.grid.push_back(static_cast<double>(x));
        sol.q.push_back(static_cast<double>(s[0]));
        sol.qp.push_back(static_cast<double>(s[1]));
        sol.I1.push_back(static_cast<double>(s[3]));
        sol.I2.push_back(static_cast<double>(s[4]));
        if (i + 1 == nodes) break;
        for (int k = 0; k < substeps_per_node; ++k) {
            s = detail::rk4_step(x, s, h);
            x += h;
            if (!std::isfinite(static_cast<double>(s[0])) || s[0] <= 0.0L) {
                std::ostringstream msg;
                msg << "solve_painleve: solution left the positive branch at x = "
                    << static_cast<double>(x);
                throw std::runtime_error(msg.str());
            }
        }
    }
    return sol;
}

}  // namespace spiked
