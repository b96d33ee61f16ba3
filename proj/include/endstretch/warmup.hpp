#pragma once

#include <string>
#include <utility>
#include <vector>

#include "endstretch/markov.hpp"

namespace endstretch {

// Chart-independent data of the integer construction.
struct IntegerSummary {
    std::size_t vertical_strips = 0;
    std::size_t horizontal_strips = 0;
    double strip_width_ratio = 0;   // strip width / rectangle width
    double strip_height_ratio = 0;  // strip height / rectangle height
    std::size_t infinite_strips = 0;
    std::vector<double> attachment_ratios;  // attachment length / edge length, one per strip
    std::vector<double> switch_ratios;      // switch interval length / edge length
    std::size_t escape_depth = 0;
    std::uint64_t nesting_period = 0;
    std::size_t attracting_ends = 0;
    std::size_t repelling_ends = 0;
    std::size_t line_classes = 0;
    IntMatrix incidence;
    std::int64_t stretch_factor = 0;  // exact
};

struct IntegerCase {
    int d = 2;
    IntegerSummary direct;    // closed-form values of the unit-square construction
    IntegerSummary pipeline;  // the general construction on the 1x1 matrix [[d]]
};

// Unit-square piece map on the k-th vertical strip (1-based), y measured upward; x = k/d is read in V_k.
// Orientation preserving: the top of V_k lands on the top of the k-th horizontal strip from the top.
std::pair<double, double> integer_piece_map(int d, double x, double y);

IntegerCase build_integer_case(int d);

struct CrossValidation {
    bool agree = false;
    std::vector<std::string> differences;
};

CrossValidation cross_validate(int d);

}  // namespace endstretch
