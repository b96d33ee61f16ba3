#include "endstretch/complex.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace endstretch {

namespace {

constexpr double split_eps = 1e-12;
constexpr double match_eps = 1e-9;

std::size_t period_of(const ExtendedPieceMap& e, const InfiniteStrip& s) { return e.census.orbits[s.orbit].period(); }

bool at_switch_step(const ExtendedPieceMap& e, const InfiniteStrip& s) { return s.step + 1 == period_of(e, s); }

struct Interval {
    std::size_t rect;
    long double lo, hi;
};

// g^count applied to the full edge of `rect`.
Interval iterate_edge(const EdgeMap& g, std::size_t rect, std::size_t count) {
    Interval iv{rect, 0.0L, static_cast<long double>(g.edge_length[rect])};
    for (std::size_t i = 0; i < count; ++i) {
        const auto& b = g.rect_branch(iv.rect);
        iv = {b.target_rect, b.offset + iv.lo / g.lambda, b.offset + iv.hi / g.lambda};
    }
    return iv;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

int InfiniteStrip::z_of(RaySide r) const {
    // z = 0 sits at the bottom of vertical edges and at the left of horizontal ones.
    if (is_vertical_kind(kind)) return r == RaySide::start ? 1 : 0;
    return r == RaySide::start ? 0 : 1;
}

std::optional<std::size_t> ExtendedPieceMap::strip_on(MapKind kind, std::size_t rect) const {
    for (const auto& s : strips)
        if (s.kind == kind && s.host_rect == rect) return s.id;
    return std::nullopt;
}

// ------------------------------------------------------------------ strips

std::vector<InfiniteStrip> attach_strips(const PieceMap& p, const EdgeMapSystem& maps, const PeriodicCensus& census) {
    (void)p;
    std::vector<InfiniteStrip> strips;
    std::map<std::size_t, std::size_t> strip_of_point;
    if (census.orbits.empty()) fail(ErrorCode::internal, "edge maps without periodic orbits");
    for (std::size_t o = 0; o < census.orbits.size(); ++o) {
        const Orbit& orbit = census.orbits[o];
        const EdgeMap& g = maps[orbit.map];
        const std::size_t per = orbit.period();
        const std::size_t init_pos = census.points[census.initial_of(o)].orbit_position;
        // The shift is applied when arriving at the initial point (L/R) or when
        // leaving it under the inverse maps (T/B).
        const std::size_t arrival = is_vertical_kind(orbit.map) ? init_pos : (init_pos + 1) % per;
        const std::size_t anchor = census.points[orbit.points[arrival]].location.rect;
        for (std::size_t pos = 0; pos < per; ++pos) {
            const PeriodicPoint& pt = census.points[orbit.points[pos]];
            InfiniteStrip s;
            s.id = strips.size();
            s.kind = orbit.map;
            s.point = orbit.points[pos];
            s.orbit = o;
            s.step = (pos + per - arrival) % per;
            s.anchor_rect = anchor;
            s.exponent = 2 * per + s.step;
            s.host_rect = pt.location.rect;
            s.side = side_of(orbit.map);
            auto a = iterate_edge(g, anchor, s.exponent);
            auto i = iterate_edge(g, anchor, per + s.step);
            if (a.rect != s.host_rect || i.rect != s.host_rect)
                fail(ErrorCode::internal, "strip attachment lands on the wrong rectangle");
            s.attach_start = static_cast<double>(a.lo);
            s.attach_end = static_cast<double>(a.hi);
            s.switch_start = static_cast<double>(i.lo);
            s.switch_end = static_cast<double>(i.hi);
            const double len = g.edge_length[s.host_rect];
            if (pt.corner == CornerType::start) {
                s.attach_start = s.switch_start = 0;
                s.start_ray_active = false;
            } else if (pt.corner == CornerType::end) {
                s.attach_end = s.switch_end = len;
                s.end_ray_active = false;
            }
            const double tol = coordinate_tolerance * len;
            bool ok = s.switch_start <= s.attach_start + tol && s.attach_end <= s.switch_end + tol &&
                      s.attach_start < s.attach_end && s.switch_start >= -tol && s.switch_end <= len + tol &&
                      pt.location.offset >= s.attach_start - tol && pt.location.offset <= s.attach_end + tol;
            if (pt.corner != CornerType::start) ok = ok && s.attach_start - s.switch_start > tol;
            if (pt.corner != CornerType::end) ok = ok && s.switch_end - s.attach_end > tol;
            if (!ok) fail(ErrorCode::internal, "strip attachment is not nested inside its switch interval");
            s.shift_on_entry = s.step == 0;
            strip_of_point[s.point] = s.id;
            strips.push_back(s);
        }
    }
    for (auto& s : strips) {
        const Orbit& orbit = census.orbits[s.orbit];
        const std::size_t pos = census.points[s.point].orbit_position;
        s.next = strip_of_point.at(orbit.points[(pos + 1) % orbit.period()]);
    }
    return strips;
}

ExtendedPieceMap build_extended_map(const PieceMap& p, const EdgeMapSystem& maps, const PeriodicCensus& census,
                                    std::vector<InfiniteStrip> strips) {
    ExtendedPieceMap e;
    e.base = p;
    e.maps = maps;
    e.census = census;
    e.strips = std::move(strips);
    e.escape = max_escape_depth(maps);
    e.nesting_period = nesting_period(maps);

    std::vector<std::size_t> prev(e.strips.size());
    for (const auto& s : e.strips) prev[s.next] = s.id;

    for (const auto& s : e.strips) {
        const auto& pt = census.points[s.point];
        const std::size_t per = period_of(e, s);
        const std::string k = map_name(s.kind);
        const std::string j = std::to_string(s.step);
        SwitchRegion r;
        r.id = e.switch_regions.size();
        r.point = s.point;
        r.strip = s.id;
        r.composition_steps = 2 * per;
        r.maps_to_initial = e.strips[s.next].shift_on_entry;
        r.path.id = r.id;
        const std::string w = "f0^" + j + "(W" + std::to_string(r.id) + ")";
        if (pt.is_corner) {
            r.construction = SwitchConstruction::corner;
            bool start_free = pt.corner == CornerType::end;
            r.path.from = {s.host_rect, s.side, start_free ? s.switch_start : s.switch_end, std::nullopt};
            r.path.to = r.path.from;
            std::string partner = "?";
            if (pt.corner_partner) {
                for (const auto& t : e.strips)
                    if (t.point == *pt.corner_partner) {
                        bool t_start_free = census.points[t.point].corner == CornerType::end;
                        r.path.to = {t.host_rect, t.side, t_start_free ? t.attach_start : t.attach_end, std::nullopt};
                        partner = map_name(t.kind);
                    }
            }
            r.boundary = {w, "left, top and right sides of the unit square of E_" + partner + "(x_" + j + ")",
                          "f_" + k + "^" + std::to_string(per + s.step) + "(I)"};
        } else if (is_vertical_kind(s.kind)) {
            r.construction = SwitchConstruction::noncorner_vertical;
            r.path.from = {s.host_rect, s.side, s.switch_start, std::nullopt};
            r.path.to = {s.host_rect, s.side, s.switch_end, std::nullopt};
            r.boundary = {w, "f_" + k + "^" + j + "(I) = [" + fmt(s.switch_start) + ", " + fmt(s.switch_end) + "]"};
        } else {
            r.construction = SwitchConstruction::noncorner_horizontal;
            r.path.from = {s.host_rect, s.side, s.attach_start, std::nullopt};
            r.path.to = {s.host_rect, s.side, s.attach_end, std::nullopt};
            r.boundary = {w, "left, top and right sides of the unit square of E_" + k + "(x_" + j + ")"};
        }
        e.switch_regions.push_back(r);
    }

    e.case_table.push_back({CaseKind::piece_map, std::nullopt, std::nullopt, std::nullopt, 0,
                            "f0 on V0 outside every switch region"});
    for (const auto& r : e.switch_regions) {
        const auto& s = e.strips[r.strip];
        CaseEntry c{CaseKind::switch_map, s.id, std::nullopt, r.id, 0,
                    "switch map h on P(" + std::string(map_name(s.kind)) + " strip " + std::to_string(s.id) + ")"};
        c.target_strip = is_vertical_kind(s.kind) ? s.next : prev[s.id];
        e.case_table.push_back(c);
    }
    for (const auto& s : e.strips) {
        // Forward f1 follows f_L, f_R on L/R strips and f_T, f_B (inverse of the edge map) on T/B strips.
        const bool vertical = is_vertical_kind(s.kind);
        const std::size_t target = vertical ? s.next : prev[s.id];
        const bool into_initial = census.points[e.strips[target].point].is_initial;
        CaseEntry c;
        c.strip = s.id;
        c.target_strip = target;
        c.kind = into_initial ? CaseKind::translate_shift : CaseKind::translate;
        c.shift = into_initial ? (vertical ? 1 : -1) : 0;
        c.description = std::string("(z,w)_") + map_name(s.kind) + "," + std::to_string(s.id) + " -> (z,w" +
                        (c.shift > 0 ? "+1" : (c.shift < 0 ? "-1" : "")) + ")_" + map_name(s.kind) + "," +
                        std::to_string(target);
        e.case_table.push_back(c);
    }
    return e;
}

ExtendedPieceMap extend(const PieceMap& p) {
    auto maps = build_edge_maps(p);
    auto census = periodic_census(maps);
    choose_initial_points(census);
    auto strips = attach_strips(p, maps, census);
    return build_extended_map(p, maps, census, std::move(strips));
}

// ------------------------------------------------------- extended edge maps

BoundaryPoint extended_step(const ExtendedPieceMap& e, MapKind kind, const BoundaryPoint& x) {
    if (x.on_ray) {
        const auto& s = e.strips.at(x.index);
        const auto& t = e.strips[s.next];
        return {true, t.id, x.ray, x.position + (t.shift_on_entry ? 1.0 : 0.0)};
    }
    const EdgeMap& g = e.maps[kind];
    if (auto h = e.strip_on(kind, x.index)) {
        const auto& s = e.strips[*h];
        if (at_switch_step(e, s)) {
            const double t = x.position;
            const double tol = split_eps * g.edge_length[x.index];
            if (t > s.attach_start + tol && t < s.attach_end - tol)
                fail(ErrorCode::internal, "point inside a strip attachment is not on the boundary");
            // Endpoint ties within rounding go to the ray, never to the attachment interior.
            auto unit = [](double w) { return std::clamp(w, 0.0, 1.0); };
            if (s.start_ray_active && t >= s.switch_start - tol && t <= s.attach_start + tol)
                return {true, s.next, RaySide::start, unit((t - s.switch_start) / (s.attach_start - s.switch_start))};
            if (s.end_ray_active && t >= s.attach_end - tol && t <= s.switch_end + tol)
                return {true, s.next, RaySide::end, unit((s.switch_end - t) / (s.switch_end - s.attach_end))};
        }
    }
    std::size_t target = 0;
    double t = g.apply(x.index, x.position, target);
    return {false, target, RaySide::start, t};
}

bool captured(const ExtendedPieceMap& e, MapKind kind, const BoundaryPoint& x) {
    if (x.on_ray) return true;
    auto h = e.strip_on(kind, x.index);
    if (!h) return false;
    const auto& s = e.strips[*h];
    const double tol = split_eps * e.edge_length(kind, x.index);
    return x.position >= s.switch_start - tol && x.position <= s.switch_end + tol;
}

// ------------------------------------------------------------ segment chains

namespace {

struct Piece {
    double u0 = 0, u1 = 0;
    bool on_ray = false;
    std::size_t index = 0;
    RaySide ray = RaySide::start;
    double p0 = 0, p1 = 0;  // position at u0 and u1
};

// Sub-piece where the position lies in [c, d].
std::optional<Piece> restrict_piece(const Piece& pc, double c, double d, double eps) {
    double lo = std::min(pc.p0, pc.p1), hi = std::max(pc.p0, pc.p1);
    double a = std::max(lo, c), b = std::min(hi, d);
    if (b - a <= eps) return std::nullopt;
    auto u_at = [&](double pos) { return pc.u0 + (pos - pc.p0) / (pc.p1 - pc.p0) * (pc.u1 - pc.u0); };
    Piece out = pc;
    double ua = u_at(a), ub = u_at(b);
    if (ua <= ub) {
        out.u0 = ua;
        out.u1 = ub;
        out.p0 = a;
        out.p1 = b;
    } else {
        out.u0 = ub;
        out.u1 = ua;
        out.p0 = b;
        out.p1 = a;
    }
    // Snap to the parent's u endpoints to keep adjacent pieces exactly adjacent.
    if (std::abs(out.u0 - pc.u0) < 1e-14) out.u0 = pc.u0;
    if (std::abs(out.u1 - pc.u1) < 1e-14) out.u1 = pc.u1;
    return out;
}

std::vector<Piece> step_pieces(const ExtendedPieceMap& e, MapKind kind, const std::vector<Piece>& in) {
    const EdgeMap& g = e.maps[kind];
    std::vector<Piece> out;
    auto via_g = [&](Piece pc) {
        const auto& b = g.rect_branch(pc.index);
        pc.index = b.target_rect;
        pc.p0 = b.offset + pc.p0 / g.lambda;
        pc.p1 = b.offset + pc.p1 / g.lambda;
        out.push_back(pc);
    };
    for (const auto& pc : in) {
        if (pc.on_ray) {
            const auto& s = e.strips[pc.index];
            const auto& t = e.strips[s.next];
            Piece q = pc;
            q.index = t.id;
            double shift = t.shift_on_entry ? 1.0 : 0.0;
            q.p0 += shift;
            q.p1 += shift;
            out.push_back(q);
            continue;
        }
        auto h = e.strip_on(kind, pc.index);
        if (!h || !at_switch_step(e, e.strips[*h])) {
            via_g(pc);
            continue;
        }
        const auto& s = e.strips[*h];
        const double len = g.edge_length[pc.index];
        const double eps = split_eps * len;
        if (restrict_piece(pc, s.attach_start, s.attach_end, eps))
            fail(ErrorCode::internal, "boundary segment overlaps a strip attachment");
        if (auto a = restrict_piece(pc, -1.0, s.switch_start, eps)) via_g(*a);
        if (auto u = restrict_piece(pc, s.switch_start, s.attach_start, eps)) {
            Piece q = *u;
            q.on_ray = true;
            q.index = s.next;
            q.ray = RaySide::start;
            double span = s.attach_start - s.switch_start;
            q.p0 = (u->p0 - s.switch_start) / span;
            q.p1 = (u->p1 - s.switch_start) / span;
            out.push_back(q);
        }
        if (auto d = restrict_piece(pc, s.attach_end, s.switch_end, eps)) {
            Piece q = *d;
            q.on_ray = true;
            q.index = s.next;
            q.ray = RaySide::end;
            double span = s.switch_end - s.attach_end;
            q.p0 = (s.switch_end - d->p0) / span;
            q.p1 = (s.switch_end - d->p1) / span;
            out.push_back(q);
        }
        if (auto b = restrict_piece(pc, s.switch_end, len + 1.0, eps)) via_g(*b);
    }
    std::sort(out.begin(), out.end(), [](const Piece& a, const Piece& b) { return a.u0 < b.u0; });
    return out;
}

SegmentRef to_ref(const Piece& p, double u0, double u1) {
    auto at = [&](double u) { return p.p0 + (u - p.u0) / (p.u1 - p.u0) * (p.p1 - p.p0); };
    return {p.on_ray, p.index, p.ray, at(u0), at(u1)};
}

std::vector<IdentificationPair> pair_up(std::size_t gen, std::size_t depth, const std::vector<Piece>& a,
                                        const std::vector<Piece>& b) {
    std::vector<IdentificationPair> out;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        double lo = std::max(a[i].u0, b[j].u0), hi = std::min(a[i].u1, b[j].u1);
        if (hi - lo > 1e-13) out.push_back({gen, depth, lo, hi, to_ref(a[i], lo, hi), to_ref(b[j], lo, hi)});
        if (a[i].u1 < b[j].u1) ++i;
        else ++j;
    }
    return out;
}

bool all_on_rays(const std::vector<Piece>& v) {
    return std::all_of(v.begin(), v.end(), [](const Piece& p) { return p.on_ray; });
}

bool same_shifted(const SegmentRef& a, const SegmentRef& b, double shift) {
    return a.on_ray == b.on_ray && a.index == b.index && a.ray == b.ray && std::abs(a.from + shift - b.from) < match_eps &&
           std::abs(a.to + shift - b.to) < match_eps;
}

}  // namespace

std::size_t default_depth_cap(const ExtendedPieceMap& e) {
    return e.escape.depth + 3 * static_cast<std::size_t>(e.nesting_period);
}

IdentificationSchema enumerate_identifications(const ExtendedPieceMap& e, std::size_t depth_cap) {
    if (depth_cap < e.escape.depth)
        fail(ErrorCode::invalid_input, "depth cap " + std::to_string(depth_cap) + " is below the escape depth " +
                                           std::to_string(e.escape.depth));
    const auto& d = e.base.decomposition;
    IdentificationSchema s;
    s.depth_cap = depth_cap;
    s.escape_depth = e.escape.depth;
    for (std::size_t k = 0; k < d.size(); ++k)
        for (std::size_t slot = 1; slot < d.vertical_count(k); ++slot)
            s.generators.push_back({s.generators.size(), Relation::vertical, k, slot, d.rect_heights[k]});
    for (std::size_t k = 0; k < d.size(); ++k)
        for (std::size_t slot = 1; slot < d.horizontal_count(k); ++slot)
            s.generators.push_back({s.generators.size(), Relation::horizontal, k, slot, d.rect_widths[k]});

    for (const auto& gen : s.generators) {
        const bool vertical = gen.relation == Relation::vertical;
        const MapKind ka = vertical ? MapKind::left : MapKind::top;
        const MapKind kb = vertical ? MapKind::right : MapKind::bottom;
        // First step: the branch of the slot on either side of the generator.
        auto first = [&](MapKind kind, std::size_t slot) {
            const EdgeBranch& b = e.maps[kind].slots[gen.rect][slot];
            Piece pc;
            pc.u0 = 0;
            pc.u1 = 1;
            pc.index = b.target_rect;
            pc.p0 = b.offset;
            pc.p1 = b.offset + gen.length / d.eigen.lambda;
            return std::vector<Piece>{pc};
        };
        std::vector<Piece> a = first(ka, gen.slot), b = first(kb, gen.slot - 1);
        std::vector<std::vector<IdentificationPair>> by_depth;
        std::optional<std::size_t> ray_depth;
        for (std::size_t depth = 1; depth <= depth_cap; ++depth) {
            if (depth > 1) {
                a = step_pieces(e, ka, a);
                b = step_pieces(e, kb, b);
            }
            by_depth.push_back(pair_up(gen.id, depth, a, b));
            if (!ray_depth && all_on_rays(a) && all_on_rays(b)) ray_depth = depth;
        }
        for (const auto& v : by_depth) s.pairs.insert(s.pairs.end(), v.begin(), v.end());

        PeriodicTail tail;
        tail.generator = gen.id;
        if (ray_depth) {
            tail.ray_depth = *ray_depth;
            tail.first_orbit = e.strips[a.front().index].orbit;
            tail.second_orbit = e.strips[b.front().index].orbit;
            const std::size_t pa = e.census.orbits[tail.first_orbit].period();
            const std::size_t pb = e.census.orbits[tail.second_orbit].period();
            tail.period = std::lcm(pa, pb);
            tail.first_shift = tail.period / pa;
            tail.second_shift = tail.period / pb;
            bool ok = *ray_depth + tail.period <= depth_cap;
            for (std::size_t dd = *ray_depth; ok && dd + tail.period <= depth_cap; ++dd) {
                const auto& x = by_depth[dd - 1];
                const auto& y = by_depth[dd - 1 + tail.period];
                ok = x.size() == y.size();
                for (std::size_t i = 0; ok && i < x.size(); ++i)
                    ok = std::abs(x[i].u0 - y[i].u0) < match_eps && std::abs(x[i].u1 - y[i].u1) < match_eps &&
                         same_shifted(x[i].first, y[i].first, static_cast<double>(tail.first_shift)) &&
                         same_shifted(x[i].second, y[i].second, static_cast<double>(tail.second_shift));
            }
            tail.verified = ok;
        }
        s.tails.push_back(tail);
    }
    return s;
}

// ------------------------------------------------------------------ census

const char* link_name(LinkType t) {
    switch (t) {
        case LinkType::line: return "Line";
        case LinkType::countable_circles: return "CountableCircles";
        case LinkType::undetermined: return "Undetermined";
    }
    return "?";
}

namespace {

std::int64_t quantize(double v) { return std::llround(v * 1e9); }

struct PointKey {
    int kind = 0;  // 0: rectangle chart point, 1: ray point with w > 0
    std::int64_t a = 0, b = 0, c = 0;
    auto operator<=>(const PointKey&) const = default;
};

// Edge germs: dir = 2*side + (0 increasing, 1 decreasing); 8/9 along a ray (+w/-w);
// 10 leaves a ray origin, extra = 2*strip + ray side.
struct GermKey {
    PointKey pt;
    int dir = 0;
    std::int64_t extra = 0;
    auto operator<=>(const GermKey&) const = default;
};

class GermGraph {
public:
    explicit GermGraph(const ExtendedPieceMap& e) : e_(e) {}

    double length(Side side, std::size_t rect) const { return e_.edge_length(static_cast<MapKind>(side), rect); }

    PointKey rect_point(Side side, std::size_t rect, double t) const {
        const auto& d = e_.base.decomposition;
        double len = length(side, rect);
        if (std::abs(t) < 1e-9 * len) t = 0;
        if (std::abs(t - len) < 1e-9 * len) t = len;
        double x = 0, y = 0;
        switch (side) {
            case Side::left: x = 0; y = t; break;
            case Side::right: x = d.rect_widths[rect]; y = t; break;
            case Side::top: x = t; y = 0; break;
            case Side::bottom: x = t; y = d.rect_heights[rect]; break;
        }
        return {0, static_cast<std::int64_t>(rect), quantize(x), quantize(y)};
    }

    GermKey ray_origin_germ(std::size_t strip, RaySide r) const {
        const auto& s = e_.strips[strip];
        double t = r == RaySide::start ? s.attach_start : s.attach_end;
        return {rect_point(s.side, s.host_rect, t), 10, static_cast<std::int64_t>(2 * strip + static_cast<int>(r))};
    }

    GermKey edge_germ(Side side, std::size_t rect, double t, bool increasing) const {
        return {rect_point(side, rect, t), 2 * static_cast<int>(side) + (increasing ? 0 : 1), 0};
    }

    GermKey endpoint_germ(MapKind family, const SegmentRef& seg, bool at_from) const {
        double pos = at_from ? seg.from : seg.to, other = at_from ? seg.to : seg.from;
        if (seg.on_ray) {
            if (pos < 1e-12) return ray_origin_germ(seg.index, seg.ray);
            return {PointKey{1, static_cast<std::int64_t>(seg.index), static_cast<int>(seg.ray), quantize(pos)},
                    other > pos ? 8 : 9, 0};
        }
        return edge_germ(side_of(family), seg.index, pos, other > pos);
    }

    // The other germ of the same boundary point.
    GermKey partner(const GermKey& g) const {
        if (g.dir == 8 || g.dir == 9) return {g.pt, g.dir == 8 ? 9 : 8, 0};
        if (g.dir == 10) {
            const auto& s = e_.strips[static_cast<std::size_t>(g.extra / 2)];
            bool start = g.extra % 2 == 0;
            double t = start ? s.attach_start : s.attach_end;
            return edge_germ(s.side, s.host_rect, t, !start);
        }
        const Side side = static_cast<Side>(g.dir / 2);
        const bool increasing = g.dir % 2 == 0;
        const auto rect = static_cast<std::size_t>(g.pt.a);
        const double t = (side == Side::left || side == Side::right) ? g.pt.c / 1e9 : g.pt.b / 1e9;
        const double len = length(side, rect);
        const double tol = 1e-8 * len;
        if (auto h = e_.strip_on(static_cast<MapKind>(side), rect)) {
            const auto& s = e_.strips[*h];
            if (!increasing && std::abs(t - s.attach_start) < tol) return ray_origin_germ(s.id, RaySide::start);
            if (increasing && std::abs(t - s.attach_end) < tol) return ray_origin_germ(s.id, RaySide::end);
        }
        const bool at_start = std::abs(t) < tol, at_end = std::abs(t - len) < tol;
        if ((at_start && increasing) || (at_end && !increasing)) {
            // Rectangle corner: continue along the adjacent side.
            Side other;
            bool other_at_start, other_increasing;
            if (side == Side::left || side == Side::right) {
                other = at_start ? Side::top : Side::bottom;
                other_at_start = side == Side::left;
            } else {
                other = at_start ? Side::left : Side::right;
                other_at_start = side == Side::top;
            }
            other_increasing = other_at_start;
            double ot = other_at_start ? 0.0 : length(other, rect);
            if (auto h = e_.strip_on(static_cast<MapKind>(other), rect)) {
                const auto& s = e_.strips[*h];
                if (other_at_start && s.attach_start <= 0) return ray_origin_germ(s.id, RaySide::start);
                if (!other_at_start && s.attach_end >= ot) return ray_origin_germ(s.id, RaySide::end);
            }
            return edge_germ(other, rect, ot, other_increasing);
        }
        return {g.pt, 2 * static_cast<int>(side) + (increasing ? 1 : 0), 0};
    }

    bool is_rect_corner(const PointKey& p) const {
        if (p.kind != 0) return false;
        const auto& d = e_.base.decomposition;
        const auto r = static_cast<std::size_t>(p.a);
        return (p.b == 0 || p.b == quantize(d.rect_widths[r])) && (p.c == 0 || p.c == quantize(d.rect_heights[r]));
    }

    bool is_free(const GermKey& g) const {
        if (g.dir != 10) return false;
        const auto& s = e_.strips[static_cast<std::size_t>(g.extra / 2)];
        return g.extra % 2 == 0 ? !s.start_ray_active : !s.end_ray_active;
    }

    std::optional<std::size_t> strip_of(const GermKey& g) const {
        if (g.dir == 10) return static_cast<std::size_t>(g.extra / 2);
        if (g.pt.kind == 1) return static_cast<std::size_t>(g.pt.a);
        return std::nullopt;
    }

    std::string describe(const PointKey& p) const {
        std::ostringstream os;
        if (p.kind == 0)
            os << "Q" << (p.a + 1) << " (" << fmt(p.b / 1e9) << ", " << fmt(p.c / 1e9) << ")";
        else
            os << map_name(e_.strips[static_cast<std::size_t>(p.a)].kind) << " strip " << p.a
               << (p.b == 0 ? " start" : " end") << " ray w=" << fmt(p.c / 1e9);
        return os.str();
    }

    std::size_t node(const GermKey& g) {
        auto [it, inserted] = index_.try_emplace(g, keys_.size());
        if (inserted) {
            keys_.push_back(g);
            glue_.push_back(0);
            depth_.push_back(std::numeric_limits<std::size_t>::max());
            parent_.push_back(parent_.size());
        }
        return it->second;
    }

    void glue(const GermKey& a, const GermKey& b, std::size_t depth) {
        std::size_t x = node(a), y = node(b);
        ++glue_[x];
        ++glue_[y];
        depth_[x] = std::min(depth_[x], depth);
        depth_[y] = std::min(depth_[y], depth);
        unite(x, y);
    }

    void close_arcs() {
        const std::size_t count = keys_.size();
        for (std::size_t i = 0; i < count; ++i) unite(i, node(partner(keys_[i])));
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

    std::size_t size() const { return keys_.size(); }
    const GermKey& key(std::size_t i) const { return keys_[i]; }
    std::size_t glue_degree(std::size_t i) const { return glue_[i]; }
    std::size_t depth(std::size_t i) const { return depth_[i]; }

private:
    const ExtendedPieceMap& e_;
    std::map<GermKey, std::size_t> index_;
    std::vector<GermKey> keys_;
    std::vector<std::size_t> glue_, depth_, parent_;
};

MapKind first_family(Relation r) { return r == Relation::vertical ? MapKind::left : MapKind::top; }
MapKind second_family(Relation r) { return r == Relation::vertical ? MapKind::right : MapKind::bottom; }

struct Located {
    bool on_ray;
    int family;
    std::size_t index;
    int ray;
    auto operator<=>(const Located&) const = default;
};

struct OverlapStats {
    std::size_t overlaps = 0;
    std::size_t max_cover = 0;  // most segments over one point
};

OverlapStats count_overlaps(const IdentificationSchema& s) {
    std::map<Located, std::vector<std::pair<double, double>>> by_location;
    for (const auto& p : s.pairs) {
        const auto& g = s.generators[p.generator];
        for (int side = 0; side < 2; ++side) {
            const auto& seg = side == 0 ? p.first : p.second;
            MapKind fam = side == 0 ? first_family(g.relation) : second_family(g.relation);
            by_location[{seg.on_ray, seg.on_ray ? 0 : static_cast<int>(fam), seg.index, static_cast<int>(seg.ray)}]
                .push_back({std::min(seg.from, seg.to), std::max(seg.from, seg.to)});
        }
    }
    OverlapStats st;
    for (auto& [loc, v] : by_location) {
        std::sort(v.begin(), v.end());
        double reach = -1e300;
        for (const auto& iv : v) {
            if (iv.first < reach - 1e-9) ++st.overlaps;
            reach = std::max(reach, iv.second);
        }
        // Sweep with endpoints pulled in so that touching segments do not count.
        std::vector<std::pair<double, int>> events;
        for (const auto& iv : v) {
            events.push_back({iv.first + 1e-9, 1});
            events.push_back({iv.second - 1e-9, -1});
        }
        std::sort(events.begin(), events.end());
        std::size_t cover = 0;
        for (const auto& ev : events) {
            cover = ev.second > 0 ? cover + 1 : cover - 1;
            st.max_cover = std::max(st.max_cover, cover);
        }
    }
    return st;
}

}  // namespace

ClassCensus classify_classes(const ExtendedPieceMap& e, const IdentificationSchema& s) {
    ClassCensus c;
    for (const auto& st : e.strips) c.finite_singletons += !st.start_ray_active + !st.end_ray_active;
    c.finite_pairs = s.pairs.size();
    const auto overlap = count_overlaps(s);
    c.segment_overlaps = overlap.overlaps;
    // Each covering segment contributes its partner; an uncovered point is a singleton.
    c.max_finite_class_size = 1 + overlap.max_cover;

    GermGraph g(e);
    for (const auto& p : s.pairs) {
        const auto rel = s.generators[p.generator].relation;
        const MapKind fa = first_family(rel), fb = second_family(rel);
        g.glue(g.endpoint_germ(fa, p.first, true), g.endpoint_germ(fb, p.second, true), p.depth);
        g.glue(g.endpoint_germ(fa, p.first, false), g.endpoint_germ(fb, p.second, false), p.depth);
    }
    g.close_arcs();

    std::map<std::size_t, std::vector<std::size_t>> components;
    for (std::size_t i = 0; i < g.size(); ++i) components[g.find(i)].push_back(i);

    const std::size_t root_window = e.escape.depth + 1;
    const std::size_t earlier =
        s.depth_cap > e.nesting_period ? s.depth_cap - static_cast<std::size_t>(e.nesting_period) : 0;
    for (const auto& [root, nodes] : components) {
        std::set<PointKey> points, points_earlier;
        std::size_t ends = 0, conflicts = 0, min_depth = std::numeric_limits<std::size_t>::max();
        bool free_end = false;
        std::set<std::size_t> end_orbits;
        // Representative: a rectangle corner when the class has one, else the shallowest point.
        std::optional<std::tuple<bool, std::size_t, PointKey>> rep;
        for (auto i : nodes) {
            const auto& k = g.key(i);
            points.insert(k.pt);
            if (g.depth(i) <= earlier) points_earlier.insert(k.pt);
            if (g.glue_degree(i) == 0) {
                ++ends;
                if (g.is_free(k)) free_end = true;
                if (auto st = g.strip_of(k)) end_orbits.insert(e.strips[*st].orbit);
            }
            if (g.glue_degree(i) > 1) ++conflicts;
            min_depth = std::min(min_depth, g.depth(i));
            std::tuple<bool, std::size_t, PointKey> rank{!g.is_rect_corner(k.pt), g.depth(i), k.pt};
            if (!rep || rank < *rep) rep = rank;
        }
        c.germ_conflicts += conflicts;
        if (ends == 0 && conflicts == 0) {
            // Closed germ cycle: a vertex of the complex whose link is a circle.
            ++c.vertex_classes;
            c.max_vertex_class_size = std::max(c.max_vertex_class_size, points.size());
            continue;
        }
        if (min_depth > root_window) {
            ++c.unresolved;
            continue;
        }
        InfiniteClass ic;
        ic.representative = g.describe(std::get<2>(*rep));
        ic.depth = min_depth;
        ic.points = points.size();
        ic.points_earlier = points_earlier.size();
        ic.end_orbits.assign(end_orbits.begin(), end_orbits.end());
        ic.touches_corner_line = free_end;
        // A single open chain of germs (path graph) is a line; anything else stays undecided.
        ic.link = (conflicts == 0 && ends == 2 && !free_end) ? LinkType::line : LinkType::undetermined;
        c.infinite_classes.push_back(ic);
    }
    std::sort(c.infinite_classes.begin(), c.infinite_classes.end(),
              [](const InfiniteClass& a, const InfiniteClass& b) {
                  return std::tie(a.depth, a.representative) < std::tie(b.depth, b.representative);
              });
    return c;
}

std::size_t class_size(const ExtendedPieceMap& e, const IdentificationSchema& s, const BoundaryPoint& p,
                       MapKind family) {
    (void)e;
    std::set<std::pair<int, std::int64_t>> others;
    for (const auto& pr : s.pairs) {
        const auto rel = s.generators[pr.generator].relation;
        for (int side = 0; side < 2; ++side) {
            const MapKind fam = side == 0 ? first_family(rel) : second_family(rel);
            const auto& seg = side == 0 ? pr.first : pr.second;
            const auto& other = side == 0 ? pr.second : pr.first;
            if (seg.on_ray != p.on_ray || seg.index != p.index) continue;
            if (p.on_ray ? seg.ray != p.ray : fam != family) continue;
            double lo = std::min(seg.from, seg.to), hi = std::max(seg.from, seg.to);
            if (!(p.position > lo + 1e-12 && p.position < hi - 1e-12)) continue;
            double frac = (p.position - seg.from) / (seg.to - seg.from);
            double q = other.from + frac * (other.to - other.from);
            others.insert({static_cast<int>(other.index) * 4 + (other.on_ray ? 2 : 0) + static_cast<int>(other.ray) +
                               (side == 0 ? 0 : 1000000),
                           quantize(q)});
        }
    }
    return 1 + others.size();
}

// ------------------------------------------------------------------ surface

const char* tristate_name(Tristate t) {
    switch (t) {
        case Tristate::yes: return "yes";
        case Tristate::no: return "no";
        case Tristate::undetermined: return "Undetermined";
    }
    return "?";
}

std::size_t SurfaceReport::count(EndSign s) const {
    return static_cast<std::size_t>(std::count_if(ends.begin(), ends.end(), [&](const End& x) { return x.sign == s; }));
}

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
    std::size_t classes() {
        std::set<std::size_t> roots;
        for (std::size_t i = 0; i < parent.size(); ++i) roots.insert(find(i));
        return roots.size();
    }
};

}  // namespace

SurfaceReport assemble_surface(const ExtendedPieceMap& e, const IdentificationSchema& s, const ClassCensus& census,
                               const SurfaceOptions& options) {
    SurfaceReport r;
    r.doubled = true;
    r.nesting_period = e.nesting_period;
    r.escape_depth = e.escape.depth;
    r.stretch_factor = e.base.decomposition.eigen.lambda;
    const auto& m = e.base.decomposition.matrix;
    const std::size_t n = m.size();

    // Components of the identification space: rectangles glued along identified segments.
    UnionFind rects(n);
    auto host = [&](const SegmentRef& seg) { return seg.on_ray ? e.strips[seg.index].host_rect : seg.index; };
    for (const auto& p : s.pairs) rects.unite(host(p.first), host(p.second));
    r.identification_components = rects.classes();

    // Strip orbits glued far out in the strips form one end neighbourhood.
    const std::size_t orbits = e.census.orbits.size();
    UnionFind groups(orbits);
    for (const auto& t : s.tails)
        if (t.ray_depth) groups.unite(t.first_orbit, t.second_orbit);

    // Boundary lines: corner-line rays and infinite classes replaced by their links.
    std::vector<bool> boundary(orbits, false);
    for (const auto& st : e.strips)
        if (!st.start_ray_active || !st.end_ray_active) boundary[groups.find(st.orbit)] = true;
    for (const auto& ic : census.infinite_classes)
        for (auto o : ic.end_orbits) boundary[groups.find(o)] = true;

    // Weak-Perron bookkeeping: A/B corner-line rays of the corner orbit through Q1.
    std::optional<std::vector<std::size_t>> corner_strips_l, corner_strips_t;
    if (options.weak_perron_k) {
        const std::size_t k = *options.weak_perron_k;
        IntMatrix base;
        if (!block_unlift(m, k, base))
            fail(ErrorCode::precondition, "matrix is not a block lift of order " + std::to_string(k));
        if (!is_primitive(base)) fail(ErrorCode::precondition, "block-lift base matrix is not primitive");
        auto start = e.census.on_edge(MapKind::left, 0);
        if (!start || e.census.points[*start].corner != CornerType::start)
            fail(ErrorCode::precondition, "weak-Perron regluing needs the top-left corner of Q1 to be periodic");
        WeakPerronGluing wp;
        wp.k = k;
        const auto& orbit = e.census.orbits[e.census.points[*start].orbit_id];
        const std::size_t first = e.census.points[*start].orbit_position;
        for (std::size_t i = 0; i < orbit.period(); ++i) {
            std::size_t pt = orbit.points[(first + i) % orbit.period()];
            const auto& partner = e.census.points[pt].corner_partner;
            if (!partner) fail(ErrorCode::internal, "corner without a partner on the top edge");
            for (const auto& st : e.strips) {
                if (st.point == pt) wp.a_rays.push_back(st.id);
                if (st.point == *partner) wp.b_rays.push_back(st.id);
            }
        }
        const std::size_t c = wp.a_rays.size();
        for (std::size_t i = 0; i < c; ++i) {
            wp.a_glue.push_back({i, i});
            wp.b_glue.push_back({i, (i + 1) % c});
        }
        // Doubled components before/after regluing.
        UnionFind comp(2 * n);
        auto node = [&](std::size_t rect, int copy) { return 2 * rects.find(rect) + static_cast<std::size_t>(copy); };
        std::set<std::size_t> special(wp.a_rays.begin(), wp.a_rays.end());
        special.insert(wp.b_rays.begin(), wp.b_rays.end());
        for (std::size_t i = 0; i < n; ++i) comp.unite(2 * i, 2 * rects.find(i));
        for (std::size_t i = 0; i < n; ++i) comp.unite(2 * i + 1, 2 * rects.find(i) + 1);
        std::size_t before = 2 * r.identification_components;
        for (const auto& st : e.strips)
            if ((!st.start_ray_active || !st.end_ray_active) && !special.count(st.id))
                comp.unite(node(st.host_rect, 0), node(st.host_rect, 1));
        for (const auto& ic : census.infinite_classes)
            for (auto o : ic.end_orbits) {
                auto h = e.census.points[e.census.orbits[o].points[0]].location.rect;
                comp.unite(node(h, 0), node(h, 1));
            }
        for (std::size_t i = 0; i < c; ++i) {
            std::size_t ha = e.strips[wp.a_rays[i]].host_rect;
            comp.unite(node(ha, 0), node(ha, 1));
            std::size_t hb = e.strips[wp.b_rays[i]].host_rect;
            std::size_t hb_next = e.strips[wp.b_rays[(i + 1) % c]].host_rect;
            comp.unite(node(hb, 0), node(hb_next, 1));
        }
        std::set<std::size_t> roots;
        for (std::size_t i = 0; i < n; ++i) {
            roots.insert(comp.find(node(i, 0)));
            roots.insert(comp.find(node(i, 1)));
        }
        wp.components_before = before;
        wp.components_after = roots.size();
        r.connected = wp.components_after == 1 ? Tristate::yes : Tristate::no;
        r.connected_reason = "A_i glued to A_i' and B_i to B_{i+1}'; " + std::to_string(wp.components_after) +
                             " component(s) after regluing";
        corner_strips_l = wp.a_rays;
        corner_strips_t = wp.b_rays;
        r.weak_perron_gluing = wp;
    } else if (auto k = is_primitive(m) ? positive_column_power(m, 0) : 0; k > 0) {
        r.connected = Tristate::yes;
        r.connected_reason = "first column of M^" + std::to_string(k) + " is positive";
    } else {
        r.connected = Tristate::undetermined;
        r.connected_reason = "matrix is imprimitive and no block-lift order was given";
    }

    // Ends: each group of strip orbits and its mirror copy; boundary gluing merges them.
    UnionFind ends(2 * orbits);
    for (std::size_t o = 0; o < orbits; ++o) {
        ends.unite(2 * o, 2 * groups.find(o));
        ends.unite(2 * o + 1, 2 * groups.find(o) + 1);
    }
    std::set<std::size_t> reglued;
    if (corner_strips_l) {
        const auto& a = *corner_strips_l;
        const auto& b = *corner_strips_t;
        for (std::size_t i = 0; i < a.size(); ++i) {
            std::size_t ga = groups.find(e.strips[a[i]].orbit);
            ends.unite(2 * ga, 2 * ga + 1);
            std::size_t gb = groups.find(e.strips[b[i]].orbit);
            std::size_t gb_next = groups.find(e.strips[b[(i + 1) % b.size()]].orbit);
            ends.unite(2 * gb, 2 * gb_next + 1);
            reglued.insert(b[i]);
        }
    }
    for (const auto& st : e.strips)
        if ((!st.start_ray_active || !st.end_ray_active) && !reglued.count(st.id)) {
            std::size_t gs = groups.find(st.orbit);
            ends.unite(2 * gs, 2 * gs + 1);
        }
    for (const auto& ic : census.infinite_classes)
        for (auto o : ic.end_orbits) {
            std::size_t go = groups.find(o);
            ends.unite(2 * go, 2 * go + 1);
        }
    std::map<std::size_t, End> by_root;
    for (std::size_t o = 0; o < orbits; ++o)
        for (int copy = 0; copy < 2; ++copy) {
            auto root = ends.find(2 * o + static_cast<std::size_t>(copy));
            End& end = by_root[root];
            end.sign = is_vertical_kind(e.census.orbits[o].map) ? EndSign::attracting : EndSign::repelling;
            if (copy == 0 || std::find(end.orbits.begin(), end.orbits.end(), o) == end.orbits.end())
                end.orbits.push_back(o);
            else
                end.merged_with_mirror = true;
        }
    for (auto& [root, end] : by_root) {
        std::sort(end.orbits.begin(), end.orbits.end());
        end.orbits.erase(std::unique(end.orbits.begin(), end.orbits.end()), end.orbits.end());
        for (auto o : end.orbits) {
            bool attracting = is_vertical_kind(e.census.orbits[o].map);
            if (attracting != (end.sign == EndSign::attracting))
                fail(ErrorCode::internal, "an end mixes attracting and repelling strip orbits");
        }
        r.ends.push_back(end);
    }
    std::sort(r.ends.begin(), r.ends.end(), [](const End& a, const End& b) {
        return std::tie(a.sign, a.orbits) < std::tie(b.sign, b.orbits);
    });

    if (options.insert_genus) {
        const InfiniteStrip* corner = nullptr;
        for (const auto& st : e.strips)
            if (!st.start_ray_active || !st.end_ray_active) {
                corner = &st;
                break;
            }
        if (!corner) fail(ErrorCode::precondition, "genus insertion needs a corner periodic point");
        r.genus_insertion_applied = true;
        double t = corner->start_ray_active ? corner->attach_end : corner->attach_start;
        r.genus_point = std::string("corner line of ") + map_name(corner->kind) + " strip " +
                        std::to_string(corner->id) + " at its origin Q" + std::to_string(corner->host_rect + 1) +
                        " edge offset " + fmt(t);
    }
    bool circles = std::any_of(census.infinite_classes.begin(), census.infinite_classes.end(),
                               [](const InfiniteClass& c) { return c.link == LinkType::countable_circles; });
    r.infinite_type = r.genus_insertion_applied || circles;
    return r;
}

}  // namespace endstretch
