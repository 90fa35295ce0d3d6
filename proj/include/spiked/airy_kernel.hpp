#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <unordered_map>
#include <vector>

#include "spiked/airy.hpp"
#include "spiked/quadrature.hpp"

namespace spiked {

// K_Airy(x, y) = int_0^inf Ai(x+t) Ai(y+t) dt, evaluated in the equivalent
// Christoffel-Darboux form (Ai(x)Ai'(y) - Ai'(x)Ai(y)) / (x - y), with a
// Taylor expansion about the midpoint once x and y are close enough for the
// quotient to cancel.
inline double airy_kernel(double x, double y) {
    if (std::abs(x - y) > 1e-3) {
        return (airy_ai(x) * airy_ai_prime(y) - airy_ai_prime(x) * airy_ai(y)) / (x - y);
    }
    const double m = 0.5 * (x + y), d = 0.5 * (x - y);
    const double a = airy_ai(m), ap = airy_ai_prime(m);
    const double diag = ap * ap - m * a * a;
    const double curv = a * ap / 3.0 + (2.0 / 3.0) * m * ap * ap - (2.0 / 3.0) * m * m * a * a;
    return diag + d * d * curv;
}

namespace detail {

// B = int_x^inf Ai on a fine grid with quintic Hermite interpolation
// (B' = -Ai and B'' = -Ai' are known at the nodes); built once, then every
// kernel-table construction reads it instead of re-integrating Ai.
class AiryTailTable {
public:
    static const AiryTailTable& instance() {
        static AiryTailTable table;
        return table;
    }

    double eval(double x) const {
        if (x >= x_hi_) return 0.0;
        if (x < x_lo_) throw std::out_of_range("AiryTailTable: argument below tabulated range");
        const int i = std::min(static_cast<int>((x - x_lo_) / h_), n_ - 2);
        const double x0 = x_lo_ + i * h_;
        const double t = (x - x0) / h_;
        // quintic Hermite with value/first/second derivative data at both ends
        const double b0 = b_[i], b1 = b_[i + 1];
        const double d0 = -ai_[i] * h_, d1 = -ai_[i + 1] * h_;
        const double c0 = -aip_[i] * h_ * h_, c1 = -aip_[i + 1] * h_ * h_;
        const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
        const double h00 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
        const double h10 = t - 6 * t3 + 8 * t4 - 3 * t5;
        const double h20 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
        const double h01 = 10 * t3 - 15 * t4 + 6 * t5;
        const double h11 = -4 * t3 + 7 * t4 - 3 * t5;
        const double h21 = 0.5 * t3 - t4 + 0.5 * t5;
        return h00 * b0 + h10 * d0 + h20 * c0 + h01 * b1 + h11 * d1 + h21 * c1;
    }

private:
    AiryTailTable() : x_lo_(-14.0), x_hi_(14.0), h_(0.01) {
        n_ = static_cast<int>(std::round((x_hi_ - x_lo_) / h_)) + 1;
        ai_.resize(n_);
        aip_.resize(n_);
        b_.resize(n_);
        for (int i = 0; i < n_; ++i) {
            const double x = x_lo_ + i * h_;
            ai_[i] = airy_ai(x);
            aip_[i] = airy_ai_prime(x);
        }
        b_[n_ - 1] = 0.0;
        QuadRule rule = gauss_legendre(8);
        for (int i = n_ - 2; i >= 0; --i) {
            const double x0 = x_lo_ + i * h_;
            double seg = 0.0;
            for (std::size_t q = 0; q < rule.nodes.size(); ++q)
                seg += rule.weights[q] * airy_ai(x0 + 0.5 * h_ * (1.0 + rule.nodes[q]));
            b_[i] = b_[i + 1] + seg * 0.5 * h_;
        }
    }

    double x_lo_, x_hi_, h_;
    int n_;
    std::vector<double> ai_, aip_, b_;
};

}  // namespace detail

inline double airy_tail_fast(double x) { return detail::AiryTailTable::instance().eval(x); }

// Tabulates Ai, Ai' and B at {x_i + s_k} over a shared s-grid, so that
//   K(x_i, x_j)        = sum_k w_k Ai(x_i+s_k) Ai(x_j+s_k)
//   d/dy K(x_i, x_j)   = sum_k w_k Ai(x_i+s_k) Ai'(x_j+s_k)
//   int_x^inf K(t,y)dt = sum_k w_k B(x_i+s_k) Ai(x_j+s_k)
// become plain dot products. This is what the 2x2 matrix kernels are
// assembled from.
class AiryGramTable {
public:
    explicit AiryGramTable(const std::vector<double>& points) {
        const double min_pt = *std::min_element(points.begin(), points.end());
        const double s_max = std::max(8.0, 13.5 - min_pt);
        const int panels = static_cast<int>(std::ceil(s_max / 0.75));
        QuadRule base = gauss_legendre(12);
        const double h = s_max / panels;
        for (int p = 0; p < panels; ++p) {
            for (std::size_t q = 0; q < base.nodes.size(); ++q) {
                s_.push_back(p * h + 0.5 * h * (1.0 + base.nodes[q]));
                w_.push_back(0.5 * h * base.weights[q]);
            }
        }
        for (std::size_t i = 0; i < points.size(); ++i) {
            index_.emplace(points[i], static_cast<int>(i));
            rows_.push_back(make_row(points[i]));
        }
    }

    struct Row {
        std::vector<double> ai, aip, b;
        double ai0 = 0.0, b0 = 0.0;  // Ai and B at the point itself
    };

    Row make_row(double x) const {
        Row row;
        row.ai.resize(s_.size());
        row.aip.resize(s_.size());
        row.b.resize(s_.size());
        for (std::size_t k = 0; k < s_.size(); ++k) {
            row.ai[k] = airy_ai(x + s_[k]);
            row.aip[k] = airy_ai_prime(x + s_[k]);
            row.b[k] = airy_tail_fast(x + s_[k]);
        }
        row.ai0 = airy_ai(x);
        row.b0 = airy_tail_fast(x);
        return row;
    }

    // K_Airy(x, y)
    double k_airy(double x, double y) const { return pairwise(&AiryGramTable::dot_k, x, y); }
    // d/dy K_Airy(x, y)
    double dk_dy(double x, double y) const { return pairwise(&AiryGramTable::dot_dk, x, y); }
    // int_x^inf K_Airy(t, y) dt
    double ik(double x, double y) const { return pairwise(&AiryGramTable::dot_ik, x, y); }

    double ai_at(double x) const {
        const Row* r = find(x);
        return r ? r->ai0 : airy_ai(x);
    }
    double b_at(double x) const {
        const Row* r = find(x);
        return r ? r->b0 : airy_tail_fast(x);
    }

private:
    const Row* find(double x) const {
        auto it = index_.find(x);
        return it == index_.end() ? nullptr : &rows_[it->second];
    }

    double dot_k(const Row& rx, const Row& ry) const {
        double acc = 0.0;
        for (std::size_t k = 0; k < s_.size(); ++k) acc += w_[k] * rx.ai[k] * ry.ai[k];
        return acc;
    }
    double dot_dk(const Row& rx, const Row& ry) const {
        double acc = 0.0;
        for (std::size_t k = 0; k < s_.size(); ++k) acc += w_[k] * rx.ai[k] * ry.aip[k];
        return acc;
    }
    double dot_ik(const Row& rx, const Row& ry) const {
        double acc = 0.0;
        for (std::size_t k = 0; k < s_.size(); ++k) acc += w_[k] * rx.b[k] * ry.ai[k];
        return acc;
    }

    template <typename Dot>
    double pairwise(Dot dot, double x, double y) const {
        const Row* rx = find(x);
        const Row* ry = find(y);
        Row lx, ly;
        if (!rx) { lx = make_row(x); rx = &lx; }
        if (!ry) { ly = make_row(y); ry = &ly; }
        return (this->*dot)(*rx, *ry);
    }

    std::vector<double> s_, w_;
    std::unordered_map<double, int> index_;
    std::vector<Row> rows_;
};

}  // namespace spiked
