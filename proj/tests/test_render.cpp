#include <doctest.h>

#include <json.hpp>
#include <regex>
#include <set>

#include "endstretch/record.hpp"
#include "endstretch/render.hpp"
#include "generators.hpp"

using namespace endstretch;
using Json = nlohmann::ordered_json;

namespace {

std::size_t count(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
    return n;
}

// Minimal XML well-formedness: balanced elements, quoted unique attributes, one root.
bool well_formed(const std::string& doc) {
    std::vector<std::string> stack;
    std::size_t roots = 0, i = 0;
    static const std::regex attrs(R"((\s+[A-Za-z_:][-\w:.]*="[^"<&]*")*\s*/?)");
    while ((i = doc.find('<', i)) != std::string::npos) {
        auto close = doc.find('>', i);
        if (close == std::string::npos) return false;
        std::string tag = doc.substr(i + 1, close - i - 1);
        i = close + 1;
        if (tag.rfind("?xml", 0) == 0) continue;
        if (tag.front() == '/') {
            if (stack.empty() || stack.back() != tag.substr(1)) return false;
            stack.pop_back();
            continue;
        }
        auto end = tag.find_first_of(" \t\n/");
        std::string name = tag.substr(0, end);
        const std::string rest = tag.substr(name.size());
        if (!std::regex_match(rest, attrs)) return false;
        static const std::regex attr_name(R"(\s([A-Za-z_:][-\w:.]*)=)");
        std::set<std::string> seen;
        for (std::sregex_iterator it(rest.begin(), rest.end(), attr_name), end; it != end; ++it)
            if (!seen.insert((*it)[1]).second) return false;
        if (stack.empty()) ++roots;
        if (tag.back() != '/') stack.push_back(name);
    }
    return stack.empty() && roots == 1;
}

std::string running_record() {
    RunConfig c;
    c.matrix = testgen::running_example();
    c.corner_selection = true;
    static const std::string text = record_json(construct(c), "t");
    return text;
}

}  // namespace

TEST_CASE("every diagram kind is well formed and deterministic") {
    RunConfig d3;
    d3.mode = InputMode::integer;
    d3.integer = 3;
    for (const auto& rec : {running_record(), record_json(construct(d3), "t")}) {
        for (auto kind : all_diagram_kinds()) {
            CAPTURE(diagram_name(kind));
            auto a = render({kind, rec});
            CHECK(well_formed(a));
            CHECK(a.find("xmlns=\"http://www.w3.org/2000/svg\"") != std::string::npos);
            CHECK(a == render({kind, rec}));
            CHECK(a.find("nan") == std::string::npos);
            CHECK(diagram_from_name(diagram_name(kind)) == kind);
        }
    }
    // The timestamp does not reach the figures.
    auto other = Json::parse(running_record());
    other["timestamp"] = "later";
    CHECK(render({DiagramKind::complex_2d, other.dump()}) == render({DiagramKind::complex_2d, running_record()}));
}

TEST_CASE("piece map diagram has one region per branch") {
    auto svg = render({DiagramKind::piece_map, running_record()});
    CHECK(count(svg, "class=\"branch\"") == static_cast<std::size_t>(testgen::running_example().total()));
    CHECK(count(svg, "class=\"image\"") == static_cast<std::size_t>(testgen::running_example().total()));
    for (const auto& m : testgen::suite(61, 10)) {
        RunConfig c;
        c.matrix = m;
        auto s = render({DiagramKind::piece_map, record_json(construct(c), "t")});
        CHECK(count(s, "class=\"branch\"") == static_cast<std::size_t>(m.total()));
    }
}

TEST_CASE("digraph diagram: four panels of black and gray arcs") {
    const auto m = testgen::running_example();
    const std::size_t n = m.size();
    auto svg = render({DiagramKind::digraphs, running_record()});
    CHECK(count(svg, "class=\"vertex\"") == 4 * n);
    CHECK(count(svg, "class=\"arc\"") == 4 * n);
    // Gray: distinct arcs of digraph(M) (twice, L and R) and digraph(M^T) (T and B) not used by the map.
    std::size_t distinct = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) distinct += m(i, j) > 0;
    CHECK(count(svg, "class=\"arc-rest\"") == 4 * distinct - 4 * n);
}

TEST_CASE("orbit diagram arrows and empty orbit list") {
    auto rec = Json::parse(running_record());
    std::size_t points = rec["periodic_points"].size();
    auto svg = render({DiagramKind::orbits, rec.dump()});
    CHECK(count(svg, "class=\"orbit-arrow\"") == points);
    CHECK(count(svg, "class=\"periodic-point\"") == points);
    rec["orbits"] = Json::array();
    rec["periodic_points"] = Json::array();
    auto empty = render({DiagramKind::orbits, rec.dump()});
    CHECK(well_formed(empty));
    CHECK(count(empty, "class=\"orbit-arrow\"") == 0);
}

TEST_CASE("expanded rectangles draw truncated strips and paths") {
    auto rec = Json::parse(running_record());
    auto svg = render({DiagramKind::expanded_rectangles, rec.dump()});
    CHECK(count(svg, "class=\"strip\"") == rec["strips"].size());
    CHECK(count(svg, "class=\"truncation\"") == rec["strips"].size());
    CHECK(count(svg, "class=\"path-w\"") == rec["switch_regions"].size());
    CHECK(count(svg, " Q ") > 0);  // rounded corners
    auto cx = render({DiagramKind::complex_2d, rec.dump()});
    CHECK(count(cx, "class=\"glue\"") > 0);
    CHECK(count(cx, "class=\"infinite-class\"") > 0);
}

TEST_CASE("missing fields are named") {
    auto rec = Json::parse(running_record());
    rec.erase("piece_map");
    try {
        render({DiagramKind::piece_map, rec.dump()});
        FAIL("expected missing data");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::missing_data);
        CHECK(std::string(e.what()).find("piece_map") != std::string::npos);
    }
    auto r2 = Json::parse(running_record());
    r2["decomposition"].erase("rect_widths");
    try {
        render({DiagramKind::orbits, r2.dump()});
        FAIL("expected missing data");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::missing_data);
        CHECK(std::string(e.what()).find("decomposition.rect_widths") != std::string::npos);
    }
    CHECK_THROWS_AS(render({DiagramKind::digraphs, "{"}), Error);
    CHECK_THROWS_AS(diagram_from_name("raster"), Error);
}

TEST_CASE("palette is a pure function of the key") {
    CHECK(palette_color("strip0") == palette_color("strip0"));
    CHECK(palette_color("strip0") != palette_color("strip1"));
    CHECK(std::regex_match(palette_color("H1.0"), std::regex("#[0-9a-f]{6}")));
}
