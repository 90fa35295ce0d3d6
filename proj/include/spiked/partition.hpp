#pragma once

#include <stdexcept>
#include <vector>

#include <gmpxx.h>

namespace spiked {

using ExactScalar = mpq_class;

// Weakly decreasing positive parts; kappa = (kappa_1 >= kappa_2 >= ... > 0).
struct Partition {
    std::vector<int> parts;

    Partition() = default;
    explicit Partition(std::vector<int> p) : parts(std::move(p)) {
        while (!parts.empty() && parts.back() == 0) parts.pop_back();
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (parts[i] <= 0) throw std::invalid_argument("Partition: parts must be positive");
            if (i > 0 && parts[i] > parts[i - 1])
                throw std::invalid_argument("Partition: parts must be weakly decreasing");
        }
    }

    int weight() const {
        int k = 0;
        for (int p : parts) k += p;
        return k;
    }
    int length() const { return static_cast<int>(parts.size()); }
    int part(int i) const { return i < length() ? parts[i] : 0; }

    int arm(int i, int j) const { return parts[i] - 1 - j; }   // cells strictly right of (i, j)
    int leg(int i, int j) const {                              // cells strictly below (i, j)
        int count = 0;
        for (int r = i + 1; r < length(); ++r)
            if (parts[r] >= j + 1) ++count;
        return count;
    }
    int hook(int i, int j) const { return arm(i, j) + leg(i, j) + 1; }

    bool operator==(const Partition& o) const { return parts == o.parts; }
    // lexicographic on the part sequences; refines dominance order
    bool operator<(const Partition& o) const {
        const int l = std::max(length(), o.length());
        for (int i = 0; i < l; ++i) {
            if (part(i) != o.part(i)) return part(i) < o.part(i);
        }
        return false;
    }
};

// All partitions of k with length <= max_len, in reverse-lexicographic
// (largest-first) order: (k), (k-1,1), ..., matching the dominance listing.
inline std::vector<Partition> partitions_of(int k, int max_len = -1) {
    if (max_len < 0) max_len = k;
    std::vector<Partition> out;
    std::vector<int> current;
    const auto recurse = [&](auto&& self, int remaining, int max_part) -> void {
        if (remaining == 0) {
            out.emplace_back(Partition{current});
            return;
        }
        if (static_cast<int>(current.size()) >= max_len) return;
        for (int p = std::min(remaining, max_part); p >= 1; --p) {
            current.push_back(p);
            self(self, remaining - p, p);
            current.pop_back();
        }
    };
    if (k == 0) {
        out.emplace_back();
        return out;
    }
    recurse(recurse, k, k);
    return out;
}

inline ExactScalar hook_product(const Partition& kappa) {
    ExactScalar h(1);
    for (int i = 0; i < kappa.length(); ++i)
        for (int j = 0; j < kappa.parts[i]; ++j) h *= kappa.hook(i, j);
    return h;
}

inline ExactScalar exact_factorial(int n) {
    ExactScalar f(1);
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace spiked
