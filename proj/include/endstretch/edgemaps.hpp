#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "endstretch/decomposition.hpp"

namespace endstretch {

// f_L, f_R, f_T^-1, f_B^-1 in that order.
enum class MapKind { left = 0, right = 1, top = 2, bottom = 3 };
enum class Side { left = 0, right = 1, top = 2, bottom = 3 };

constexpr std::array<MapKind, 4> all_map_kinds{MapKind::left, MapKind::right, MapKind::top, MapKind::bottom};

const char* map_name(MapKind k);  // "L", "R", "T", "B"
inline Side side_of(MapKind k) { return static_cast<Side>(static_cast<int>(k)); }
// L/R live on vertical sides (height basis), T/B on horizontal sides (width basis).
inline bool is_vertical_kind(MapKind k) { return k == MapKind::left || k == MapKind::right; }

struct EdgeCoordinate {
    std::size_t rect = 0;
    Side side = Side::left;
    double offset = 0;  // downward from top on vertical sides, rightward from left on horizontal sides
    std::optional<SymbolicLength> symbolic_offset;
};

// Affine branch on one slot edge: t in [0, source length] -> offset + t / lambda in the target rectangle.
struct EdgeBranch {
    std::size_t source_rect = 0;
    std::size_t source_slot = 0;
    std::size_t target_rect = 0;
    std::size_t target_slot = 0;
    SymbolicLength symbolic_offset;
    double offset = 0;
};

struct EdgeMap {
    MapKind kind = MapKind::left;
    double lambda = 1;
    std::vector<std::vector<EdgeBranch>> slots;  // [rect][slot]: slot edges of this kind
    std::vector<std::size_t> digraph;            // rect -> rect carried by the full rectangle edge
    std::vector<double> edge_length;             // eta_k or omega_k
    std::vector<SymbolicLength> symbolic_length;
    std::vector<std::vector<std::size_t>> cycles;  // each starts at its least vertex, in map order
    std::vector<std::size_t> tail_depth;           // steps to reach a cycle vertex
    std::vector<std::size_t> cycle_of;             // index into cycles for the eventual cycle

    const EdgeBranch& rect_branch(std::size_t k) const;
    std::size_t slot_count(std::size_t k) const { return slots[k].size(); }
    // Last target slot index available in rectangle k for images of this map.
    std::size_t last_target_slot(std::size_t k) const { return target_slot_count[k] - 1; }
    std::vector<std::size_t> target_slot_count;

    double apply(std::size_t rect, double t, std::size_t& target) const;
};

struct EdgeMapSystem {
    std::array<EdgeMap, 4> maps;
    const EdgeMap& operator[](MapKind k) const { return maps[static_cast<int>(k)]; }
};

EdgeMapSystem build_edge_maps(const PieceMap& p);

enum class CornerType { none, start, end };  // start = top (L/R) or left (T/B) end of the edge

struct PeriodicPoint {
    MapKind map = MapKind::left;
    EdgeCoordinate location;
    std::size_t period = 1;
    std::size_t orbit_id = 0;
    std::size_t orbit_position = 0;
    bool is_corner = false;
    CornerType corner = CornerType::none;
    std::optional<std::size_t> corner_partner;  // index into PeriodicCensus::points
    bool is_initial = false;
};

struct Orbit {
    MapKind map = MapKind::left;
    std::vector<std::size_t> points;  // census indices by orbit_position
    std::size_t period() const { return points.size(); }
};

struct PeriodicCensus {
    std::vector<PeriodicPoint> points;
    std::vector<Orbit> orbits;

    std::optional<std::size_t> on_edge(MapKind map, std::size_t rect) const;
    std::size_t initial_of(std::size_t orbit) const;
};

std::vector<PeriodicPoint> periodic_points(const EdgeMap& e);
// All four maps, orbit ids made global and corner partners linked.
PeriodicCensus periodic_census(const EdgeMapSystem& maps);
void choose_initial_points(PeriodicCensus& census);

struct EscapeBound {
    std::size_t tail = 0;        // k
    std::size_t max_period = 0;  // max p
    std::size_t depth = 0;       // N = k + 2 max p
};

EscapeBound max_escape_depth(const EdgeMapSystem& maps);
std::uint64_t nesting_period(const EdgeMapSystem& maps);

// One arc per line, "k j" with 1-based vertices.
std::string export_digraph(const EdgeMap& e);

}  // namespace endstretch
