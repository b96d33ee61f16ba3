#include "endstretch/edgemaps.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace endstretch {

const char* map_name(MapKind k) {
    switch (k) {
        case MapKind::left: return "L";
        case MapKind::right: return "R";
        case MapKind::top: return "T";
        case MapKind::bottom: return "B";
    }
    return "?";
}

const EdgeBranch& EdgeMap::rect_branch(std::size_t k) const {
    return (kind == MapKind::left || kind == MapKind::top) ? slots[k].front() : slots[k].back();
}

double EdgeMap::apply(std::size_t rect, double t, std::size_t& target) const {
    const auto& b = rect_branch(rect);
    target = b.target_rect;
    return b.offset + t / lambda;
}

namespace {

void analyze_functional_graph(EdgeMap& e) {
    const std::size_t n = e.digraph.size();
    std::vector<int> state(n, 0);  // 0 new, 1 on stack, 2 done
    std::vector<bool> on_cycle(n, false);
    for (std::size_t s = 0; s < n; ++s) {
        if (state[s]) continue;
        std::vector<std::size_t> path;
        std::size_t v = s;
        while (state[v] == 0) {
            state[v] = 1;
            path.push_back(v);
            v = e.digraph[v];
        }
        if (state[v] == 1) {
            auto it = std::find(path.begin(), path.end(), v);
            std::vector<std::size_t> cyc(it, path.end());
            auto least = std::min_element(cyc.begin(), cyc.end());
            std::rotate(cyc.begin(), least, cyc.end());
            for (auto c : cyc) on_cycle[c] = true;
            e.cycles.push_back(cyc);
        }
        for (auto p : path) state[p] = 2;
    }
    std::sort(e.cycles.begin(), e.cycles.end());
    e.tail_depth.assign(n, 0);
    e.cycle_of.assign(n, 0);
    for (std::size_t c = 0; c < e.cycles.size(); ++c)
        for (auto v : e.cycles[c]) e.cycle_of[v] = c;
    for (std::size_t s = 0; s < n; ++s) {
        std::size_t v = s, steps = 0;
        while (!on_cycle[v]) {
            v = e.digraph[v];
            ++steps;
        }
        e.tail_depth[s] = steps;
        e.cycle_of[s] = e.cycle_of[v];
    }
}

}  // namespace

EdgeMapSystem build_edge_maps(const PieceMap& p) {
    const auto& d = p.decomposition;
    const std::size_t n = d.size();
    EdgeMapSystem sys;
    for (auto kind : all_map_kinds) {
        EdgeMap& e = sys.maps[static_cast<int>(kind)];
        e.kind = kind;
        e.lambda = d.eigen.lambda;
        e.slots.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            if (is_vertical_kind(kind)) {
                e.edge_length.push_back(d.rect_heights[k]);
                e.symbolic_length.push_back(d.full_height(k));
                e.target_slot_count.push_back(d.horizontal_count(k));
                for (std::size_t s = 0; s < d.vertical_count(k); ++s) {
                    const Branch& b = p.at(k, s);
                    EdgeBranch eb{k, s, b.target_rect, b.target_slot,
                                  d.horizontal_bounds[b.target_rect][b.target_slot], b.target_top};
                    e.slots[k].push_back(eb);
                }
            } else {
                e.edge_length.push_back(d.rect_widths[k]);
                e.symbolic_length.push_back(d.full_width(k));
                e.target_slot_count.push_back(d.vertical_count(k));
                for (std::size_t q = 0; q < d.horizontal_count(k); ++q) {
                    // The horizontal strip at slot q is the image of the branch it carries.
                    const Branch& b = p.into(k, q);
                    EdgeBranch eb{k, q, b.source_rect, b.source_slot,
                                  d.vertical_bounds[b.source_rect][b.source_slot], b.source_left};
                    e.slots[k].push_back(eb);
                }
            }
        }
        for (std::size_t k = 0; k < n; ++k) e.digraph.push_back(e.rect_branch(k).target_rect);
        analyze_functional_graph(e);
    }
    return sys;
}

// ------------------------------------------------------------ periodic points

std::vector<PeriodicPoint> periodic_points(const EdgeMap& e) {
    std::vector<PeriodicPoint> out;
    for (std::size_t c = 0; c < e.cycles.size(); ++c) {
        const auto& cyc = e.cycles[c];
        // Compose t -> off + t/lambda around the cycle in extended precision.
        long double scale = 1, shift = 0;
        bool start = true, end = true;
        for (auto v : cyc) {
            const auto& b = e.rect_branch(v);
            shift = b.offset + shift / e.lambda;
            scale /= e.lambda;
            start = start && b.target_slot == 0;
            end = end && b.target_slot == e.last_target_slot(b.target_rect);
        }
        if (start && end) fail(ErrorCode::internal, "edge cycle maps a full edge onto a full edge");
        long double fixed = shift / (1 - scale);
        double t = static_cast<double>(fixed);
        for (std::size_t pos = 0; pos < cyc.size(); ++pos) {
            const std::size_t v = cyc[pos];
            PeriodicPoint pt;
            pt.map = e.kind;
            pt.location.rect = v;
            pt.location.side = side_of(e.kind);
            pt.period = cyc.size();
            pt.orbit_id = c;
            pt.orbit_position = pos;
            pt.is_corner = start || end;
            pt.corner = start ? CornerType::start : (end ? CornerType::end : CornerType::none);
            if (start) {
                pt.location.offset = 0;
                pt.location.symbolic_offset = SymbolicLength::zero(e.symbolic_length[v].basis, e.symbolic_length[v].coefficients.size());
            } else if (end) {
                pt.location.offset = e.edge_length[v];
                pt.location.symbolic_offset = e.symbolic_length[v];
            } else {
                pt.location.offset = t;
            }
            out.push_back(pt);
            std::size_t next = 0;
            t = e.apply(v, t, next);
        }
    }
    return out;
}

std::optional<std::size_t> PeriodicCensus::on_edge(MapKind map, std::size_t rect) const {
    for (std::size_t i = 0; i < points.size(); ++i)
        if (points[i].map == map && points[i].location.rect == rect) return i;
    return std::nullopt;
}

std::size_t PeriodicCensus::initial_of(std::size_t orbit) const {
    for (auto idx : orbits[orbit].points)
        if (points[idx].is_initial) return idx;
    fail(ErrorCode::internal, "orbit without an initial point");
}

PeriodicCensus periodic_census(const EdgeMapSystem& maps) {
    PeriodicCensus census;
    for (auto kind : all_map_kinds) {
        auto pts = periodic_points(maps[kind]);
        const std::size_t base = census.orbits.size();
        for (std::size_t c = 0; c < maps[kind].cycles.size(); ++c)
            census.orbits.push_back(Orbit{kind, std::vector<std::size_t>(maps[kind].cycles[c].size())});
        for (auto& p : pts) {
            p.orbit_id += base;
            census.orbits[p.orbit_id].points[p.orbit_position] = census.points.size();
            census.points.push_back(p);
        }
    }
    // Corner partners: the same geometric corner seen by a vertical and a horizontal map.
    struct Pairing {
        MapKind a;
        CornerType ca;
        MapKind b;
        CornerType cb;
    };
    const Pairing pairings[] = {
        {MapKind::left, CornerType::start, MapKind::top, CornerType::start},
        {MapKind::left, CornerType::end, MapKind::bottom, CornerType::start},
        {MapKind::right, CornerType::start, MapKind::top, CornerType::end},
        {MapKind::right, CornerType::end, MapKind::bottom, CornerType::end},
    };
    for (std::size_t i = 0; i < census.points.size(); ++i) {
        auto& p = census.points[i];
        if (!p.is_corner) continue;
        for (const auto& pr : pairings) {
            MapKind other;
            CornerType want;
            if (p.map == pr.a && p.corner == pr.ca) {
                other = pr.b;
                want = pr.cb;
            } else if (p.map == pr.b && p.corner == pr.cb) {
                other = pr.a;
                want = pr.ca;
            } else {
                continue;
            }
            auto j = census.on_edge(other, p.location.rect);
            if (j && census.points[*j].corner == want) p.corner_partner = *j;
        }
    }
    return census;
}

void choose_initial_points(PeriodicCensus& census) {
    for (auto& p : census.points) p.is_initial = false;
    for (auto& orbit : census.orbits) {
        auto best = *std::min_element(orbit.points.begin(), orbit.points.end(), [&](auto a, auto b) {
            const auto& la = census.points[a].location;
            const auto& lb = census.points[b].location;
            return std::tie(la.rect, la.offset) < std::tie(lb.rect, lb.offset);
        });
        census.points[best].is_initial = true;
    }
    for (const auto& p : census.points)
        if (p.is_corner && p.corner_partner && p.is_initial != census.points[*p.corner_partner].is_initial)
            fail(ErrorCode::internal, "initial points violate corner consistency");
}

// ----------------------------------------------------------------- bounds

EscapeBound max_escape_depth(const EdgeMapSystem& maps) {
    EscapeBound b;
    for (const auto& e : maps.maps) {
        for (auto t : e.tail_depth) b.tail = std::max(b.tail, t);
        for (const auto& c : e.cycles) b.max_period = std::max(b.max_period, c.size());
    }
    b.depth = b.tail + 2 * b.max_period;
    return b;
}

std::uint64_t nesting_period(const EdgeMapSystem& maps) {
    std::uint64_t m = 1;
    for (const auto& e : maps.maps)
        for (const auto& c : e.cycles) {
            if (m > std::numeric_limits<std::uint64_t>::max() / c.size())
                fail(ErrorCode::invalid_input, "nesting period overflows 64 bits");
            m *= c.size();
        }
    return m;
}

std::string export_digraph(const EdgeMap& e) {
    std::ostringstream os;
    for (std::size_t k = 0; k < e.digraph.size(); ++k) os << (k + 1) << " " << (e.digraph[k] + 1) << "\n";
    return os.str();
}

}  // namespace endstretch
