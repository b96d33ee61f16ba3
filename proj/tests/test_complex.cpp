#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <string>

#include "endstretch/complex.hpp"
#include "generators.hpp"

using namespace endstretch;

namespace {

ExtendedPieceMap extended(const IntMatrix& m, bool corner) {
    auto pd = perron_eigendata(m);
    if (!corner) return extend(piece_map(build_decomposition(m, pd)));
    auto c = corner_selection(m);
    return extend(piece_map(build_decomposition(m, pd, c.sigma, c.tau)));
}

struct Built {
    ExtendedPieceMap e;
    IdentificationSchema s;
    ClassCensus c;
};

Built run(const IntMatrix& m, bool corner) {
    Built b{extended(m, corner), {}, {}};
    b.s = enumerate_identifications(b.e, default_depth_cap(b.e));
    b.c = classify_classes(b.e, b.s);
    return b;
}

}  // namespace

TEST_CASE("integer case strips and attachments") {
    for (int d = 2; d <= 6; ++d) {
        auto e = extended(IntMatrix::from_rows({{d}}), false);
        REQUIRE(e.strips.size() == 4);
        for (const auto& s : e.strips) {
            CHECK(s.step == 0);
            CHECK(s.exponent == 2);
            CHECK(s.shift_on_entry);
            // Period one: attachment has length 1/d^2, switch interval 1/d, both at the corner.
            CHECK(std::abs((s.attach_end - s.attach_start) - 1.0 / (d * d)) < 1e-12);
            CHECK(std::abs((s.switch_end - s.switch_start) - 1.0 / d) < 1e-12);
            CHECK(s.start_ray_active != s.end_ray_active);
            CHECK(s.next == s.id);
        }
        CHECK(e.switch_regions.size() == 4);
        std::size_t shifts = 0;
        for (const auto& c : e.case_table) shifts += c.kind == CaseKind::translate_shift;
        CHECK(shifts == 4);
        for (const auto& r : e.switch_regions) CHECK(r.construction == SwitchConstruction::corner);
    }
}

TEST_CASE("integer case complex") {
    for (int d = 2; d <= 5; ++d) {
        CAPTURE(d);
        auto b = run(IntMatrix::from_rows({{d}}), false);
        CHECK(b.s.generators.size() == static_cast<std::size_t>(2 * (d - 1)));
        CHECK(b.c.segment_overlaps == 0);
        CHECK(b.c.germ_conflicts == 0);
        CHECK(b.c.max_finite_class_size <= 2);
        CHECK(b.c.finite_singletons == 4);
        for (const auto& t : b.s.tails) {
            CHECK(t.verified);
            CHECK(t.period == 1);
        }
        // Two infinite classes accumulate at the top-right and bottom-left corners.
        REQUIRE(b.c.infinite_classes.size() == 2);
        // Chart y grows downward: these are the bottom-left and top-right corners.
        std::set<std::string> reps;
        for (const auto& ic : b.c.infinite_classes) reps.insert(ic.representative);
        CHECK(reps == std::set<std::string>{"Q1 (0, 1)", "Q1 (1, 0)"});
        for (const auto& ic : b.c.infinite_classes) {
            CHECK(ic.link == LinkType::line);
            CHECK(ic.points > ic.points_earlier);
        }
        auto r = assemble_surface(b.e, b.s, b.c, {});
        CHECK(r.count(EndSign::attracting) == 1);
        CHECK(r.count(EndSign::repelling) == 1);
        CHECK(r.connected == Tristate::yes);
        CHECK(r.identification_components == 1);
        CHECK_FALSE(r.infinite_type);
        auto g = assemble_surface(b.e, b.s, b.c, {true, std::nullopt});
        CHECK(g.infinite_type);
        CHECK(g.genus_insertion_applied);
    }
}

TEST_CASE("integer case generator images follow the three-panel pattern") {
    // d = 3: the left image of the first vertical generator at depth n sits at 1/3^n scale
    // until it is captured; afterwards consecutive images advance by one unit on a ray.
    auto b = run(IntMatrix::from_rows({{3}}), false);
    std::vector<const IdentificationPair*> g0;
    for (const auto& p : b.s.pairs)
        if (p.generator == 0) g0.push_back(&p);
    REQUIRE(!g0.empty());
    CHECK(g0.front()->depth == 1);
    CHECK_FALSE(g0.front()->first.on_ray);
    CHECK(std::abs(std::abs(g0.front()->first.to - g0.front()->first.from) - 1.0 / 3) < 1e-9);
    const auto& t = b.s.tails[0];
    std::vector<const IdentificationPair*> deep;
    for (auto* p : g0)
        if (p->depth >= t.ray_depth) deep.push_back(p);
    for (std::size_t i = 0; i + 1 < deep.size(); ++i) {
        if (deep[i + 1]->depth != deep[i]->depth + 1) continue;
        CHECK(std::abs(deep[i + 1]->first.from - deep[i]->first.from - 1) < 1e-9);
        CHECK(std::abs(deep[i + 1]->second.from - deep[i]->second.from - 1) < 1e-9);
    }
}

TEST_CASE("depth cap below the escape depth is rejected") {
    auto e = extended(testgen::running_example(), true);
    try {
        enumerate_identifications(e, e.escape.depth - 1);
        FAIL("expected invalid input");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::invalid_input);
    }
}

TEST_CASE("running example complex") {
    for (bool corner : {false, true}) {
        CAPTURE(corner);
        auto b = run(testgen::running_example(), corner);
        CHECK(b.c.segment_overlaps == 0);
        CHECK(b.c.germ_conflicts == 0);
        CHECK(b.c.max_finite_class_size <= 2);
        CHECK(b.c.vertex_classes > 0);  // corner images meet in closed germ cycles
        for (const auto& t : b.s.tails) CHECK(t.verified);
        auto r = assemble_surface(b.e, b.s, b.c, {corner, std::nullopt});
        CHECK(r.connected == Tristate::yes);
        CHECK(r.identification_components == 1);
        CHECK(r.escape_depth == b.e.escape.depth);
        CHECK(r.nesting_period % 4 == (corner ? 0 : r.nesting_period % 4));
        if (corner) CHECK(r.infinite_type);
    }
}

TEST_CASE("strip bookkeeping over random matrices") {
    for (const auto& m : testgen::suite(41, 120)) {
        for (bool corner : {false, true}) {
            auto e = extended(m, corner);
            // One strip per periodic point, at most one per rectangle edge.
            CHECK(e.strips.size() == e.census.points.size());
            std::set<std::pair<int, std::size_t>> seen;
            for (const auto& s : e.strips) {
                CHECK(seen.insert({static_cast<int>(s.kind), s.host_rect}).second);
                CHECK(e.strips[s.next].orbit == s.orbit);
            }
            // Every strip appears in exactly one translation case; shifts sit on arrival at the initial point.
            std::vector<int> hits(e.strips.size(), 0);
            for (const auto& c : e.case_table) {
                if (c.kind != CaseKind::translate && c.kind != CaseKind::translate_shift) continue;
                ++hits[*c.strip];
                bool into_initial = e.census.points[e.strips[*c.target_strip].point].is_initial;
                CHECK((c.kind == CaseKind::translate_shift) == into_initial);
                CHECK(c.shift == (into_initial ? (is_vertical_kind(e.strips[*c.strip].kind) ? 1 : -1) : 0));
            }
            for (int h : hits) CHECK(h == 1);
            CHECK(e.switch_regions.size() == e.census.points.size());
        }
    }
}

TEST_CASE("escape law on sampled boundary points") {
    std::mt19937_64 rng(7);
    for (const auto& m : testgen::suite(43, 60)) {
        auto e = extended(m, rng() % 2 == 0);
        const std::size_t n = e.escape.depth;
        const std::size_t until = n + 3 * static_cast<std::size_t>(e.nesting_period);
        for (auto kind : all_map_kinds) {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            for (int i = 0; i < 100; ++i) {
                BoundaryPoint x;
                x.index = rng() % m.size();
                x.position = u(rng) * e.edge_length(kind, x.index);
                // Points inside an attachment are not boundary points.
                if (auto h = e.strip_on(kind, x.index)) {
                    const auto& s = e.strips[*h];
                    if (x.position > s.attach_start && x.position < s.attach_end) continue;
                }
                for (std::size_t d = 1; d <= until; ++d) {
                    x = extended_step(e, kind, x);
                    if (d >= n) {
                        CHECK(captured(e, kind, x));
                        if (!captured(e, kind, x)) break;
                    }
                }
            }
        }
    }
}

TEST_CASE("identification properties over random matrices") {
    for (const auto& m : testgen::suite(47, 40)) {
        for (bool corner : {false, true}) {
            CAPTURE(m.rows());
            CAPTURE(corner);
            auto b = run(m, corner);
            const auto lambda = b.e.base.decomposition.eigen.lambda;
            for (const auto& p : b.s.pairs) {
                // Contraction law before the images reach the strips.
                if (!p.first.on_ray && !p.second.on_ray) {
                    const auto& g = b.s.generators[p.generator];
                    double expect = (p.u1 - p.u0) * g.length * std::pow(lambda, -static_cast<double>(p.depth));
                    CHECK(std::abs(std::abs(p.first.to - p.first.from) / expect - 1) < 1e-6);
                    CHECK(std::abs(std::abs(p.second.to - p.second.from) / expect - 1) < 1e-6);
                }
            }
            for (const auto& t : b.s.tails) {
                CHECK(t.verified);
                // Captured by depth N + 1, then at most one period until the switch step.
                CHECK(t.ray_depth <= b.e.escape.depth + 1 + b.e.escape.max_period);
            }
            CHECK(b.c.segment_overlaps == 0);
            CHECK(b.c.germ_conflicts == 0);
            CHECK(b.c.max_finite_class_size <= 2);
            auto r = assemble_surface(b.e, b.s, b.c, {});
            if (is_primitive(m)) {
                CHECK(r.connected == Tristate::yes);
                CHECK(r.identification_components == 1);
            }
            std::size_t orbits = 0;
            for (const auto& end : r.ends) orbits += end.orbits.size();
            CHECK(orbits >= b.e.census.orbits.size());
        }
    }
}

TEST_CASE("class sizes at segment granularity") {
    auto b = run(IntMatrix::from_rows({{2}}), false);
    const auto& p = b.s.pairs.front();
    BoundaryPoint x{p.first.on_ray, p.first.index, p.first.ray, (p.first.from + p.first.to) / 2};
    CHECK(class_size(b.e, b.s, x, MapKind::left) == 2);
    // Corner-line rays carry no edge map: singletons.
    for (const auto& st : b.e.strips) {
        if (st.start_ray_active && st.end_ray_active) continue;
        BoundaryPoint lone{true, st.id, st.start_ray_active ? RaySide::end : RaySide::start, 0.5};
        CHECK(class_size(b.e, b.s, lone, st.kind) == 1);
    }
    CHECK(b.c.max_finite_class_size == 2);
}

TEST_CASE("weak-Perron lifts reconnect after regluing") {
    for (std::size_t k = 2; k <= 4; ++k) {
        CAPTURE(k);
        auto m = block_lift(IntMatrix::from_rows({{2}}), k);
        auto b = run(m, true);
        CHECK(b.c.segment_overlaps == 0);
        auto r = assemble_surface(b.e, b.s, b.c, {false, k});
        REQUIRE(r.weak_perron_gluing);
        CHECK(r.weak_perron_gluing->a_rays.size() == k);
        CHECK(r.weak_perron_gluing->components_before >= 2);
        CHECK(r.weak_perron_gluing->components_after == 1);
        CHECK(r.connected == Tristate::yes);
        auto plain = assemble_surface(b.e, b.s, b.c, {});
        CHECK(plain.connected == Tristate::undetermined);
    }
    auto prim = extended(testgen::running_example(), true);
    auto s = enumerate_identifications(prim, default_depth_cap(prim));
    auto c = classify_classes(prim, s);
    CHECK_THROWS_AS(assemble_surface(prim, s, c, {false, std::size_t{2}}), Error);
}

TEST_CASE("attachment endpoints reach the rays despite rounding") {
    // Endpoints of an attachment are boundary points; after one period they must not drift inside.
    for (const auto& m : testgen::suite(2026, 120)) {
        auto e = extended(m, false);
        const std::size_t until = e.escape.depth + 3 * static_cast<std::size_t>(e.nesting_period);
        for (const auto& s : e.strips) {
            for (double t : {s.attach_start, s.attach_end}) {
                BoundaryPoint x{false, s.host_rect, RaySide::start, t};
                for (std::size_t d = 1; d <= until; ++d) REQUIRE_NOTHROW(x = extended_step(e, s.kind, x));
                CHECK(captured(e, s.kind, x));
            }
        }
    }
}
