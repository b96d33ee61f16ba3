#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "endstretch/spectral.hpp"

namespace testgen {

// Random irreducible matrix, n <= max_n, entries <= max_entry, by rejection.
inline endstretch::IntMatrix irreducible(std::mt19937_64& rng, std::size_t max_n = 4, int max_entry = 2) {
    std::uniform_int_distribution<std::size_t> dim(1, max_n);
    std::uniform_int_distribution<int> entry(0, max_entry);
    for (;;) {
        std::size_t n = dim(rng);
        endstretch::IntMatrix m(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m.set(i, j, entry(rng));
        if (m.total() == 0) continue;
        if (endstretch::is_irreducible(m)) {
            // A single loop [[1]] has spectral radius 1: no expansion, reject.
            if (n == 1 && m(0, 0) < 2) continue;
            bool permutation = true;
            for (std::size_t i = 0; i < n; ++i) permutation = permutation && m.row_sum(i) == 1 && m.column_sum(i) == 1;
            if (permutation) continue;
            return m;
        }
    }
}

inline std::vector<endstretch::IntMatrix> suite(std::uint64_t seed, std::size_t count) {
    std::mt19937_64 rng(seed);
    std::vector<endstretch::IntMatrix> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(irreducible(rng));
    return out;
}

// Signed cofactor expansion, independent of the library's elimination.
inline long long cofactor_det(const std::vector<std::vector<long long>>& a) {
    const std::size_t n = a.size();
    if (n == 0) return 1;
    if (n == 1) return a[0][0];
    long long s = 0;
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<std::vector<long long>> minor;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<long long> row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != c) row.push_back(a[r][k]);
            minor.push_back(row);
        }
        s += (c % 2 ? -1 : 1) * a[0][c] * cofactor_det(minor);
    }
    return s;
}

inline endstretch::IntMatrix running_example() {
    return endstretch::IntMatrix::from_rows({{0, 0, 1, 0}, {1, 0, 0, 1}, {0, 0, 0, 1}, {1, 2, 0, 0}});
}

}  // namespace testgen
