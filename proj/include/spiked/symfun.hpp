#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

#include "spiked/partition.hpp"

namespace spiked {

using ExactVec = std::vector<ExactScalar>;

namespace detail {

// dense symmetric-polynomial workhorse: exponent vector -> coefficient
using Poly = std::map<std::vector<int>, ExactScalar>;

inline void poly_add(Poly& p, const std::vector<int>& mono, const ExactScalar& c) {
    if (c == 0) return;
    auto [it, fresh] = p.emplace(mono, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) p.erase(it);
    }
}

// m_mu in n variables: sum over distinct permutations of mu padded with zeros
inline Poly monomial_symmetric(const Partition& mu, int n) {
    Poly out;
    if (mu.length() > n) return out;
    std::vector<int> exps(n, 0);
    for (int i = 0; i < mu.length(); ++i) exps[i] = mu.parts[i];
    std::sort(exps.begin(), exps.end());
    do {
        out[exps] = 1;
    } while (std::next_permutation(exps.begin(), exps.end()));
    return out;
}

inline ExactScalar poly_eval(const Poly& p, const ExactVec& x) {
    ExactScalar total(0);
    for (const auto& [mono, coeff] : p) {
        ExactScalar term = coeff;
        for (std::size_t i = 0; i < mono.size(); ++i)
            for (int e = 0; e < mono[i]; ++e) term *= x[i];
        total += term;
    }
    return total;
}

// exact division of a bivariate polynomial by (X - Y); throws if not divisible
inline std::map<std::pair<int, int>, ExactScalar> divide_x_minus_y(
    const std::map<std::pair<int, int>, ExactScalar>& num) {
    int deg_x = 0;
    for (const auto& [ab, c] : num) deg_x = std::max(deg_x, ab.first);
    // coefficients of X^a as polynomials in Y
    std::vector<std::map<int, ExactScalar>> p(deg_x + 1);
    for (const auto& [ab, c] : num) p[ab.first][ab.second] += c;
    std::vector<std::map<int, ExactScalar>> q(std::max(deg_x, 1));
    std::map<int, ExactScalar> carry;  // q_a, descending a
    for (int a = deg_x; a >= 1; --a) {
        // q_{a-1} = p_a + Y * q_a
        std::map<int, ExactScalar> next;
        for (const auto& [b, c] : p[a]) next[b] += c;
        for (const auto& [b, c] : carry) next[b + 1] += c;
        q[a - 1] = next;
        carry = next;
    }
    // remainder p_0 + Y * q_0 must vanish
    std::map<int, ExactScalar> rem;
    for (const auto& [b, c] : p[0]) rem[b] += c;
    for (const auto& [b, c] : carry) rem[b + 1] += c;
    for (const auto& [b, c] : rem)
        if (c != 0) throw std::logic_error("divide_x_minus_y: not divisible");
    std::map<std::pair<int, int>, ExactScalar> out;
    for (int a = 0; a < static_cast<int>(q.size()); ++a)
        for (const auto& [b, c] : q[a])
            if (c != 0) out[{a, b}] = c;
    return out;
}

// Sekiguchi-type Laplacian with pair coefficient c:
//   D = sum_j x_j^2 d^2/dx_j^2 + c * sum_{i<j} (x_j^2 d_j - x_i^2 d_i)/(x_j - x_i),
// applied exactly to a symmetric polynomial. c = 1, 2, 4 for the real,
// complex and quaternionic cases (Jack parameter alpha = 2/c).
inline Poly apply_laplacian(const Poly& f, int n, const ExactScalar& c) {
    Poly out;
    // diagonal part
    for (const auto& [mono, coeff] : f) {
        ExactScalar acc(0);
        for (int j = 0; j < n; ++j) acc += ExactScalar(mono[j]) * (mono[j] - 1);
        poly_add(out, mono, coeff * acc);
    }
    // pair part
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            // group monomials by the exponents away from (i, j)
            std::map<std::vector<int>, std::map<std::pair<int, int>, ExactScalar>> groups;
            for (const auto& [mono, coeff] : f) {
                std::vector<int> rest = mono;
                const int a = rest[j], b = rest[i];
                rest[i] = rest[j] = 0;
                auto& grp = groups[rest];
                // x_j^2 d_j - x_i^2 d_i applied to x_j^a x_i^b
                grp[{a + 1, b}] += coeff * a;
                grp[{a, b + 1}] -= coeff * b;
            }
            for (auto& [rest, numerator] : groups) {
                auto quotient = divide_x_minus_y(numerator);
                for (const auto& [ab, q] : quotient) {
                    std::vector<int> mono = rest;
                    mono[j] += ab.first;
                    mono[i] += ab.second;
                    poly_add(out, mono, c * q);
                }
            }
        }
    }
    return out;
}

struct JackBasis {
    std::vector<Partition> kappas;                 // largest-first
    std::vector<std::map<std::size_t, ExactScalar>> coeffs;  // kappa index -> m-basis coeffs
};

inline ExactScalar action_at(const std::vector<std::map<std::size_t, ExactScalar>>& action,
                             std::size_t row, std::size_t col) {
    auto it = action[col].find(row);
    return it == action[col].end() ? ExactScalar(0) : it->second;
}

inline std::vector<int> orbit_representative(const std::vector<int>& sorted_desc, int n) {
    std::vector<int> rep(n, 0);
    for (std::size_t i = 0; i < sorted_desc.size(); ++i) rep[i] = sorted_desc[i];
    std::sort(rep.begin(), rep.end());
    return rep;
}

// Builds all Jack polynomials of degree k in n variables for the parameter
// alpha, in the normalization with sum_kappa J_kappa = (x_1 + ... + x_n)^k.
// Each J_kappa is found as the eigenfunction of the Laplacian that is
// dominance-triangular with top term m_kappa; the decomposition identity
// then fixes the scale of every member at once.
inline JackBasis jack_basis(const ExactScalar& alpha, int k, int n) {
    if (alpha == 0) throw std::domain_error("jack_basis: alpha must be nonzero");
    const ExactScalar c = ExactScalar(2) / alpha;
    JackBasis basis;
    basis.kappas = partitions_of(k, n);
    std::sort(basis.kappas.begin(), basis.kappas.end(),
              [](const Partition& a, const Partition& b) { return b < a; });  // largest first
    const std::size_t count = basis.kappas.size();

    // matrix of D on the m-basis: column mu lists D m_mu
    std::vector<std::map<std::size_t, ExactScalar>> action(count);
    std::map<std::vector<int>, std::size_t> index;
    for (std::size_t i = 0; i < count; ++i) index[basis.kappas[i].parts] = i;
    for (std::size_t mu = 0; mu < count; ++mu) {
        Poly m = monomial_symmetric(basis.kappas[mu], n);
        Poly dm = apply_laplacian(m, n, c);
        // collect back into the m-basis: every orbit is represented by its
        // sorted-descending exponent vector
        std::map<std::size_t, ExactScalar> column;
        for (const auto& [mono, coeff] : dm) {
            std::vector<int> sorted = mono;
            std::sort(sorted.begin(), sorted.end(), std::greater<int>());
            while (!sorted.empty() && sorted.back() == 0) sorted.pop_back();
            auto it = index.find(sorted);
            if (it == index.end()) throw std::logic_error("jack_basis: stray monomial degree");
            if (mono == orbit_representative(sorted, n)) column[it->second] += coeff;
        }
        action[mu] = std::move(column);
    }

    // triangular eigen-solve: P_kappa = m_kappa + lower dominance terms
    basis.coeffs.resize(count);
    for (std::size_t ki = 0; ki < count; ++ki) {
        const ExactScalar rho = action_at(action, ki, ki);
        std::map<std::size_t, ExactScalar> coeff;
        coeff[ki] = 1;
        for (std::size_t mu = ki + 1; mu < count; ++mu) {
            ExactScalar rhs(0);
            for (const auto& [nu, cval] : coeff) {
                rhs += action_at(action, mu, nu) * cval;
            }
            if (rhs == 0) continue;
            const ExactScalar dmu = action_at(action, mu, mu);
            if (rho == dmu)
                throw std::runtime_error("jack_basis: degenerate Laplacian eigenvalue");
            coeff[mu] = rhs / (rho - dmu);
        }
        basis.coeffs[ki] = std::move(coeff);
    }

    // scale so that sum_kappa theta_kappa P_kappa = (sum x)^k; the power sum
    // expands over the m-basis with multinomial coefficients
    std::vector<ExactScalar> target(count, 0);
    for (std::size_t i = 0; i < count; ++i) {
        const Partition& mu = basis.kappas[i];
        ExactScalar multinomial = exact_factorial(k);
        for (int p : mu.parts) multinomial /= exact_factorial(p);
        target[i] = multinomial;
    }
    std::vector<ExactScalar> theta(count, 0);
    for (std::size_t mu = 0; mu < count; ++mu) {
        ExactScalar acc = target[mu];
        for (std::size_t ki = 0; ki < mu; ++ki) {
            auto it = basis.coeffs[ki].find(mu);
            if (it != basis.coeffs[ki].end()) acc -= theta[ki] * it->second;
        }
        theta[mu] = acc;  // coeff of m_mu in P_mu is 1
    }
    for (std::size_t ki = 0; ki < count; ++ki)
        for (auto& [mu, cval] : basis.coeffs[ki]) cval *= theta[ki];
    return basis;
}

}  // namespace detail

// complete homogeneous symmetric polynomials h_0..h_max by variable DP
inline ExactVec complete_homogeneous(const ExactVec& x, int max_degree) {
    ExactVec h(max_degree + 1, 0);
    h[0] = 1;
    for (const ExactScalar& xi : x) {
        for (int d = 1; d <= max_degree; ++d) h[d] += xi * h[d - 1];
    }
    return h;
}

// exact determinant by fraction-free-safe rational elimination
inline ExactScalar exact_det(std::vector<ExactVec> m) {
    const std::size_t n = m.size();
    ExactScalar det(1);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && m[pivot][col] == 0) ++pivot;
        if (pivot == n) return 0;
        if (pivot != col) {
            std::swap(m[pivot], m[col]);
            det = -det;
        }
        det *= m[col][col];
        for (std::size_t row = col + 1; row < n; ++row) {
            if (m[row][col] == 0) continue;
            const ExactScalar f = m[row][col] / m[col][col];
            for (std::size_t j = col; j < n; ++j) m[row][j] -= f * m[col][j];
        }
    }
    return det;
}

// Schur polynomial s_kappa(x), exact. Distinct inputs go through the
// bialternant ratio; coincident values fall back to Jacobi-Trudi.
inline ExactScalar schur(const Partition& kappa, const ExactVec& x) {
    const int n = static_cast<int>(x.size());
    if (kappa.length() > n) return 0;  // highest-weight monomial needs l(kappa) variables
    bool distinct = true;
    for (int i = 0; i < n && distinct; ++i)
        for (int j = i + 1; j < n; ++j)
            if (x[i] == x[j]) {
                distinct = false;
                break;
            }
    if (distinct && n > 0) {
        std::vector<ExactVec> num(n, ExactVec(n)), den(n, ExactVec(n));
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const int pow_num = n - 1 - i + kappa.part(i);
                ExactScalar vn(1), vd(1);
                for (int e = 0; e < pow_num; ++e) vn *= x[j];
                for (int e = 0; e < n - 1 - i; ++e) vd *= x[j];
                num[i][j] = vn;
                den[i][j] = vd;
            }
        }
        return exact_det(num) / exact_det(den);
    }
    // Jacobi-Trudi: s_kappa = det(h_{kappa_i - i + j})
    const int l = std::max(1, kappa.length());
    int max_h = 0;
    for (int i = 0; i < l; ++i) max_h = std::max(max_h, kappa.part(i) + l);
    const ExactVec h = complete_homogeneous(x, max_h);
    std::vector<ExactVec> jt(l, ExactVec(l));
    for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j) {
            const int idx = kappa.part(i) - (i + 1) + (j + 1);
            jt[i][j] = (idx < 0) ? ExactScalar(0) : h[idx];
        }
    return exact_det(jt);
}

// C_kappa = k!/H(kappa) s_kappa
inline ExactScalar complex_zonal(const Partition& kappa, const ExactVec& x) {
    return exact_factorial(kappa.weight()) / hook_product(kappa) * schur(kappa, x);
}

// Q_(j)(lambda) = s_(j)(lambda doubled) / (j+1)
inline ExactScalar quaternionic_zonal_row(int j, const ExactVec& lambda) {
    if (j < 0) throw std::domain_error("quaternionic_zonal_row: j must be >= 0");
    if (j == 0) return 1;
    ExactVec doubled;
    doubled.reserve(2 * lambda.size());
    for (const ExactScalar& v : lambda) {
        doubled.push_back(v);
        doubled.push_back(v);
    }
    // s_(j) = h_j
    const ExactVec h = complete_homogeneous(doubled, j);
    return h[j] / ExactScalar(j + 1);
}

// Confluent-determinant route to s_(j)(lambda doubled): the 2N x 2N matrix
// whose odd columns are powers of lambda_j (last row jumping to 2N+j-1) and
// whose even columns are the derivatives of the odd ones, divided by
// V(lambda)^4.
inline ExactScalar ssj_confluent(int j, const ExactVec& lambda) {
    const int n = static_cast<int>(lambda.size());
    if (j < 0) throw std::domain_error("ssj_confluent: j must be >= 0");
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (lambda[a] == lambda[b])
                throw std::domain_error("ssj_confluent: lambda values must be distinct");
    auto power = [](const ExactScalar& v, int e) {
        ExactScalar r(1);
        for (int i = 0; i < e; ++i) r *= v;
        return r;
    };
    std::vector<ExactVec> m(2 * n, ExactVec(2 * n));
    for (int row = 0; row < 2 * n; ++row) {
        const int e = (row + 1 != 2 * n) ? row : 2 * n + j - 1;
        for (int col = 0; col < n; ++col) {
            m[row][2 * col] = power(lambda[col], e);
            m[row][2 * col + 1] = (e == 0) ? ExactScalar(0) : ExactScalar(e) * power(lambda[col], e - 1);
        }
    }
    ExactScalar v(1);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) v *= lambda[a] - lambda[b];
    return exact_det(m) / (v * v * v * v);
}

inline double ssj_confluent(int j, const std::vector<double>& lambda) {
    ExactVec exact;
    for (double v : lambda) exact.emplace_back(v);
    for (auto& e : exact) e.canonicalize();
    return ssj_confluent(j, exact).get_d();
}

// Jack polynomial value in the decomposition normalization; degree capped at
// 6 so the triangular solves stay small.
inline ExactScalar jack(const ExactScalar& alpha, const Partition& kappa, const ExactVec& x) {
    const int k = kappa.weight();
    const int n = static_cast<int>(x.size());
    if (k > 6) throw std::domain_error("jack: degree capped at 6");
    if (n > 4) throw std::domain_error("jack: at most 4 variables");
    if (kappa.length() > n) return 0;
    detail::JackBasis basis = detail::jack_basis(alpha, k, n);
    for (std::size_t ki = 0; ki < basis.kappas.size(); ++ki) {
        if (!(basis.kappas[ki] == kappa)) continue;
        ExactScalar total(0);
        for (const auto& [mu, coeff] : basis.coeffs[ki]) {
            detail::Poly m = detail::monomial_symmetric(basis.kappas[mu], n);
            total += coeff * detail::poly_eval(m, x);
        }
        return total;
    }
    return 0;
}

}  // namespace spiked
