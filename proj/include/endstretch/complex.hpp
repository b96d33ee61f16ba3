#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "endstretch/edgemaps.hpp"

namespace endstretch {

// Which boundary ray of an infinite strip: the one at the start (top for L/R,
// left for T/B) or at the end of its attachment interval.
enum class RaySide { start = 0, end = 1 };

struct InfiniteStrip {
    std::size_t id = 0;
    MapKind kind = MapKind::left;
    std::size_t point = 0;  // census index of the base periodic point
    std::size_t orbit = 0;
    std::size_t step = 0;          // orbit position counted from the arrival point of the shift
    std::size_t anchor_rect = 0;   // attachment = g^exponent(full edge of anchor_rect)
    std::size_t exponent = 0;      // 2p + step
    std::size_t host_rect = 0;
    Side side = Side::left;
    double attach_start = 0, attach_end = 0;  // attachment interval on the host edge
    double switch_start = 0, switch_end = 0;  // g^(p+step)(full edge): boundary of the switch region
    bool shift_on_entry = false;              // f1 adds the unit shift when mapping into this strip
    bool start_ray_active = true;             // ray belongs to the edge set (false on corner lines)
    bool end_ray_active = true;
    std::size_t next = 0;  // strip of the image base point

    // z coordinate of a ray: z = 0 is the bottom (L/R) or left (T/B) ray.
    int z_of(RaySide r) const;
};

enum class SwitchConstruction { noncorner_vertical, noncorner_horizontal, corner };

// Opaque path W: endpoints plus the obligation that its interior stays in V0 cap H0
// for the required iterates.
struct PathW {
    std::size_t id = 0;
    EdgeCoordinate from, to;
    bool interior_disjoint_obligation = true;
};

struct SwitchRegion {
    std::size_t id = 0;
    std::size_t point = 0;
    std::size_t strip = 0;
    SwitchConstruction construction = SwitchConstruction::noncorner_vertical;
    PathW path;
    std::vector<std::string> boundary;
    std::size_t composition_steps = 0;  // 2p
    bool maps_to_initial = false;       // switch map lands in the shifted unit square
};

enum class CaseKind { piece_map, switch_map, translate, translate_shift };

struct CaseEntry {
    CaseKind kind = CaseKind::piece_map;
    std::optional<std::size_t> strip;
    std::optional<std::size_t> target_strip;
    std::optional<std::size_t> switch_region;
    int shift = 0;  // +1 for L/R, -1 for T/B in the forward direction
    std::string description;
};

struct ExtendedPieceMap {
    PieceMap base;
    EdgeMapSystem maps;
    PeriodicCensus census;
    std::vector<InfiniteStrip> strips;
    std::vector<SwitchRegion> switch_regions;
    std::vector<CaseEntry> case_table;
    EscapeBound escape;
    std::uint64_t nesting_period = 1;

    std::optional<std::size_t> strip_on(MapKind kind, std::size_t rect) const;
    double edge_length(MapKind kind, std::size_t rect) const { return maps[kind].edge_length[rect]; }
};

std::vector<InfiniteStrip> attach_strips(const PieceMap& p, const EdgeMapSystem& maps, const PeriodicCensus& census);
ExtendedPieceMap build_extended_map(const PieceMap& p, const EdgeMapSystem& maps, const PeriodicCensus& census,
                                    std::vector<InfiniteStrip> strips);
// Convenience: edge maps, census, initial points, strips and extended map from a piece map.
ExtendedPieceMap extend(const PieceMap& p);

// A point of the boundary of the expanded rectangles seen by one family of edge maps.
struct BoundaryPoint {
    bool on_ray = false;
    std::size_t index = 0;  // rectangle (edge point) or strip (ray point)
    RaySide ray = RaySide::start;
    double position = 0;  // edge parameter or w
};

// One application of the extended edge map of the given kind (f_{1,L}, f_{1,R}, f_{1,T}^-1, f_{1,B}^-1).
BoundaryPoint extended_step(const ExtendedPieceMap& e, MapKind kind, const BoundaryPoint& x);
// Inside a switch interval or on a strip ray: the future orbit stays in strip boundaries.
bool captured(const ExtendedPieceMap& e, MapKind kind, const BoundaryPoint& x);

enum class Relation { vertical, horizontal };  // X = L1 cap R1, Y = T1 cap B1

struct Generator {
    std::size_t id = 0;
    Relation relation = Relation::vertical;
    std::size_t rect = 0;
    std::size_t slot = 0;  // left edge of vertical slot / top edge of horizontal slot, slot >= 1
    double length = 0;
};

struct SegmentRef {
    bool on_ray = false;
    std::size_t index = 0;
    RaySide ray = RaySide::start;
    double from = 0, to = 0;  // positions at u0 and u1
};

struct IdentificationPair {
    std::size_t generator = 0;
    std::size_t depth = 0;
    double u0 = 0, u1 = 0;
    SegmentRef first;   // L or T image
    SegmentRef second;  // R or B image
};

struct PeriodicTail {
    std::size_t generator = 0;
    std::size_t ray_depth = 0;  // first depth with both images inside strip rays
    std::size_t first_orbit = 0, second_orbit = 0;
    std::size_t period = 0;  // lcm of the two orbit periods
    std::size_t first_shift = 0, second_shift = 0;
    bool verified = false;
};

struct IdentificationSchema {
    std::size_t depth_cap = 0;
    std::size_t escape_depth = 0;
    std::vector<Generator> generators;
    std::vector<IdentificationPair> pairs;  // ordered by generator, depth, u
    std::vector<PeriodicTail> tails;
};

std::size_t default_depth_cap(const ExtendedPieceMap& e);
IdentificationSchema enumerate_identifications(const ExtendedPieceMap& e, std::size_t depth_cap);

enum class LinkType { line, countable_circles, undetermined };
const char* link_name(LinkType t);

struct InfiniteClass {
    std::string representative;
    std::size_t depth = 0;           // shallowest generator depth touching the class
    std::size_t points = 0;          // distinct points seen up to the depth cap
    std::size_t points_earlier = 0;  // distinct points seen one nesting period earlier
    LinkType link = LinkType::undetermined;
    std::vector<std::size_t> end_orbits;  // strip orbits reached by the open ends of the link
    bool touches_corner_line = false;
};

struct ClassCensus {
    std::size_t finite_singletons = 0;  // free boundary segments (corner-line rays)
    std::size_t finite_pairs = 0;       // identified segment pairs
    std::size_t max_finite_class_size = 0;  // over generic points of boundary segments
    std::size_t segment_overlaps = 0;      // boundary segments glued more than once
    // Finite classes made of images of strip corners: closed germ cycles, circle links.
    std::size_t vertex_classes = 0;
    std::size_t max_vertex_class_size = 0;
    std::size_t germ_conflicts = 0;
    std::size_t unresolved = 0;  // open components that are neither rooted nor closed
    std::vector<InfiniteClass> infinite_classes;
};

ClassCensus classify_classes(const ExtendedPieceMap& e, const IdentificationSchema& s);

// Number of points in the class of a point at segment granularity, as seen by the schema.
// Interior points of rectangles are singletons.
std::size_t class_size(const ExtendedPieceMap& e, const IdentificationSchema& s, const BoundaryPoint& p,
                       MapKind family);

enum class EndSign { attracting, repelling };
enum class Tristate { yes, no, undetermined };
const char* tristate_name(Tristate t);

struct End {
    EndSign sign = EndSign::attracting;
    std::vector<std::size_t> orbits;
    bool merged_with_mirror = false;
};

struct WeakPerronGluing {
    std::size_t k = 1;
    std::vector<std::size_t> a_rays;  // corner-line rays in left strips, one per corner
    std::vector<std::size_t> b_rays;  // corner-line rays in top strips
    std::vector<std::pair<std::size_t, std::size_t>> a_glue;  // A_i to A_i'
    std::vector<std::pair<std::size_t, std::size_t>> b_glue;  // B_i to B_{i+1}'
    std::size_t components_before = 0;
    std::size_t components_after = 0;
};

struct SurfaceOptions {
    bool insert_genus = false;
    std::optional<std::size_t> weak_perron_k;
};

struct SurfaceReport {
    std::vector<End> ends;
    bool infinite_type = false;
    bool genus_insertion_applied = false;
    std::string genus_point;
    Tristate connected = Tristate::undetermined;
    std::string connected_reason;
    std::size_t identification_components = 0;
    bool doubled = true;
    std::optional<WeakPerronGluing> weak_perron_gluing;
    std::uint64_t nesting_period = 1;
    std::size_t escape_depth = 0;
    double stretch_factor = 0;

    std::size_t count(EndSign s) const;
};

SurfaceReport assemble_surface(const ExtendedPieceMap& e, const IdentificationSchema& s, const ClassCensus& census,
                               const SurfaceOptions& options);

}  // namespace endstretch
