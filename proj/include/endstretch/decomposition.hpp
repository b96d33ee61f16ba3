#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "endstretch/spectral.hpp"

namespace endstretch {

enum class Orientation { vertical, horizontal };

// V^(rect)_{source,copy} or H^(rect)_{source,copy}; all indices 0-based.
struct StripLabel {
    Orientation orientation = Orientation::vertical;
    std::size_t rect = 0;
    std::size_t source = 0;
    std::size_t copy = 0;

    std::string name() const;  // 1-based, e.g. "V1_2,1"
    auto operator<=>(const StripLabel&) const = default;
};

enum class Basis { width, height };

// Sum_i c_i * lambda^-1 * omega_i (width) or * eta_i (height).
struct SymbolicLength {
    Basis basis = Basis::width;
    std::vector<std::int64_t> coefficients;

    static SymbolicLength zero(Basis b, std::size_t n) { return {b, std::vector<std::int64_t>(n, 0)}; }
    static SymbolicLength unit(Basis b, std::size_t n, std::size_t i);
    bool is_zero() const;
    SymbolicLength& operator+=(const SymbolicLength& o);
    friend SymbolicLength operator+(SymbolicLength a, const SymbolicLength& b) { return a += b; }
    friend bool operator==(const SymbolicLength&, const SymbolicLength&) = default;
};

double evaluate_length(const SymbolicLength& l, const PerronData& eigen);

// perm[a] = b: label index a maps to label index b within one rectangle's ordered list.
using Permutation = std::vector<std::size_t>;

struct StripDecomposition {
    IntMatrix matrix;
    PerronData eigen;
    std::vector<double> rect_widths;
    std::vector<double> rect_heights;
    std::vector<std::vector<StripLabel>> vertical_order;
    std::vector<std::vector<StripLabel>> horizontal_order;
    std::vector<Permutation> sigma;
    std::vector<Permutation> tau;
    std::vector<std::vector<SymbolicLength>> vertical_bounds;    // slots + 1 per rectangle
    std::vector<std::vector<SymbolicLength>> horizontal_bounds;  // slots + 1 per rectangle

    std::size_t size() const { return matrix.size(); }
    std::size_t vertical_count(std::size_t k) const { return vertical_order[k].size(); }
    std::size_t horizontal_count(std::size_t k) const { return horizontal_order[k].size(); }

    // Label carried by the strip at a physical slot (tau / sigma^-1 applied).
    const StripLabel& vertical_occupant(std::size_t k, std::size_t slot) const;
    const StripLabel& horizontal_occupant(std::size_t k, std::size_t slot) const;
    // Physical slot carrying a label.
    std::size_t vertical_slot(const StripLabel& v) const;
    std::size_t horizontal_slot(const StripLabel& h) const;

    double vertical_bound(std::size_t k, std::size_t s) const { return evaluate_length(vertical_bounds[k][s], eigen); }
    double horizontal_bound(std::size_t k, std::size_t q) const { return evaluate_length(horizontal_bounds[k][q], eigen); }
    // eta_k / omega_k as symbolic sums (full edge length).
    SymbolicLength full_height(std::size_t k) const { return horizontal_bounds[k].back(); }
    SymbolicLength full_width(std::size_t k) const { return vertical_bounds[k].back(); }
};

std::vector<StripLabel> vertical_labels(const IntMatrix& m, std::size_t k);
std::vector<StripLabel> horizontal_labels(const IntMatrix& m, std::size_t k);
std::size_t label_index(const std::vector<StripLabel>& order, const StripLabel& l);

StripDecomposition build_decomposition(const IntMatrix& m, const PerronData& eigen,
                                       const std::optional<std::vector<Permutation>>& sigma = std::nullopt,
                                       const std::optional<std::vector<Permutation>>& tau = std::nullopt);

// One affine piece of f0: the vertical slot (source_rect, source_slot) onto the
// horizontal slot (target_rect, target_slot); x scales by lambda, y by lambda^-1.
struct Branch {
    StripLabel label;  // V^(k)_{i,j}
    std::size_t source_rect = 0;
    std::size_t source_slot = 0;
    std::size_t target_rect = 0;
    std::size_t target_slot = 0;
    double source_left = 0, source_width = 0;
    double target_top = 0, target_height = 0;
};

struct PieceMap {
    StripDecomposition decomposition;
    std::vector<Branch> branches;  // sorted by (source_rect, source_slot)
    std::vector<std::size_t> first_branch;  // per rectangle offset into branches

    const Branch& at(std::size_t rect, std::size_t slot) const { return branches[first_branch[rect] + slot]; }
    const Branch& into(std::size_t rect, std::size_t horizontal_slot) const;
    // Apply f0 to (x, y) in the chart of Q_rect; returns target rect and coordinates.
    struct Point {
        std::size_t rect;
        double x, y;
    };
    Point apply(std::size_t rect, double x, double y) const;
};

PieceMap piece_map(const StripDecomposition& d);

struct CornerSelection {
    std::vector<Permutation> sigma;
    std::vector<Permutation> tau;
    std::vector<std::size_t> cycle;  // s_1 = 0, s_2, ..., s_k
};

CornerSelection corner_selection(const IntMatrix& m);

}  // namespace endstretch
