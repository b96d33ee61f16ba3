#include "endstretch/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>

#include <json.hpp>

#include "endstretch/error.hpp"

namespace endstretch {

using Json = nlohmann::ordered_json;

namespace {

constexpr double margin = 30;
constexpr double rect_span = 160;    // largest rectangle side in px
constexpr double strip_len = 60;     // three unit periods
constexpr double unit_len = strip_len / 3;
constexpr double gap = 40;
constexpr std::size_t max_glue_pairs = 400;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s = buf;
    if (s == "-0.00") s = "0.00";
    return s;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Field lookup by dotted path; absent fields are reported by name.
const Json& need(const Json& root, const std::string& path) {
    const Json* cur = &root;
    std::size_t start = 0;
    while (start <= path.size()) {
        auto dot = path.find('.', start);
        auto key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (!cur->is_object() || !cur->contains(key) || (*cur)[key].is_null())
            fail(ErrorCode::missing_data, "record field '" + path + "' is missing");
        cur = &(*cur)[key];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    return *cur;
}

template <class T>
T need_as(const Json& root, const std::string& path) {
    try {
        return need(root, path).get<T>();
    } catch (const nlohmann::json::exception&) {
        fail(ErrorCode::parse, "record field '" + path + "' has the wrong type");
    }
}

class Svg {
public:
    Svg(double w, double h) : w_(w), h_(h) {}

    void raw(const std::string& s) { body_ += s + "\n"; }
    void defs(const std::string& s) { defs_ += s + "\n"; }

    void rect(double x, double y, double w, double h, const std::string& attrs) {
        raw("<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) + "\" " +
            attrs + "/>");
    }
    void line(double x1, double y1, double x2, double y2, const std::string& attrs) {
        raw("<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) + "\" " +
            attrs + "/>");
    }
    void circle(double x, double y, double r, const std::string& attrs) {
        raw("<circle cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"" + num(r) + "\" " + attrs + "/>");
    }
    void text(double x, double y, const std::string& s, const std::string& attrs = "") {
        std::string size = attrs.find("font-size") == std::string::npos ? " font-size=\"10\"" : "";
        raw("<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\"" + size +
            (attrs.empty() ? "" : " " + attrs) + ">" + escape(s) + "</text>");
    }
    void path(const std::string& d, const std::string& attrs) { raw("<path d=\"" + d + "\" " + attrs + "/>"); }

    std::string str() const {
        std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w_) + "\" height=\"" + num(h_) +
               "\" viewBox=\"0 0 " + num(w_) + " " + num(h_) + "\">\n";
        out += "<defs>\n" + arrow_marker("arrow-black", "#000000") + arrow_marker("arrow-gray", "#bbbbbb") +
               arrow_marker("arrow-orbit", "#333333") + defs_ + "</defs>\n";
        out += "<rect x=\"0\" y=\"0\" width=\"" + num(w_) + "\" height=\"" + num(h_) + "\" fill=\"#ffffff\"/>\n";
        return out + body_ + "</svg>\n";
    }

private:
    static std::string arrow_marker(const std::string& id, const std::string& color) {
        return "<marker id=\"" + id +
               "\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" "
               "orient=\"auto-start-reverse\"><path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"" +
               color + "\"/></marker>\n";
    }

    double w_, h_;
    std::string defs_, body_;
};

// Rectangles side by side with room for truncated strips on every side.
struct Layout {
    std::vector<double> w, h, x;
    double y0 = 0, scale = 1, width = 0, height = 0;

    Layout(const Json& rec, double top) {
        w = need_as<std::vector<double>>(rec, "decomposition.rect_widths");
        h = need_as<std::vector<double>>(rec, "decomposition.rect_heights");
        if (w.size() != h.size() || w.empty())
            fail(ErrorCode::missing_data, "record field 'decomposition.rect_widths' is empty or mismatched");
        double big = std::max(*std::max_element(w.begin(), w.end()), *std::max_element(h.begin(), h.end()));
        scale = rect_span / big;
        double cx = margin + strip_len;
        for (double wk : w) {
            x.push_back(cx);
            cx += wk * scale + 2 * strip_len + gap;
        }
        y0 = top + strip_len;
        width = cx - gap - strip_len + margin;
        double hmax = *std::max_element(h.begin(), h.end());
        height = y0 + hmax * scale + strip_len + margin;
    }

    std::size_t size() const { return w.size(); }

    void check_rect(std::size_t k) const {
        if (k >= size()) fail(ErrorCode::parse, "rectangle index " + std::to_string(k) + " out of range");
    }

    // Point on a rectangle side; offsets run downward on vertical sides, rightward on horizontal ones.
    std::pair<double, double> edge_point(std::size_t k, const std::string& side, double t) const {
        check_rect(k);
        if (side == "L") return {x[k], y0 + t * scale};
        if (side == "R") return {x[k] + w[k] * scale, y0 + t * scale};
        if (side == "T") return {x[k] + t * scale, y0};
        if (side == "B") return {x[k] + t * scale, y0 + h[k] * scale};
        fail(ErrorCode::parse, "unknown side '" + side + "'");
    }

    static std::pair<double, double> outward(const std::string& side) {
        if (side == "L") return {-1, 0};
        if (side == "R") return {1, 0};
        if (side == "T") return {0, -1};
        return {0, 1};
    }

    void draw_rects(Svg& svg) const {
        for (std::size_t k = 0; k < size(); ++k) {
            svg.rect(x[k], y0, w[k] * scale, h[k] * scale,
                     "class=\"rectangle\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"");
            svg.text(x[k] + 2, y0 + h[k] * scale + 12, "Q" + std::to_string(k + 1));
        }
    }
};

struct StripGeom {
    std::string side;
    std::size_t host = 0;
    double a0 = 0, a1 = 0, s0 = 0, s1 = 0;
    bool start_active = true, end_active = true;
};

std::vector<StripGeom> read_strips(const Json& rec) {
    std::vector<StripGeom> out;
    for (const auto& s : need(rec, "strips")) {
        StripGeom g;
        try {
            g.side = s.at("map").get<std::string>();
            g.host = s.at("host_rect").get<std::size_t>();
            g.a0 = s.at("attachment")[0].get<double>();
            g.a1 = s.at("attachment")[1].get<double>();
            g.s0 = s.at("switch_interval")[0].get<double>();
            g.s1 = s.at("switch_interval")[1].get<double>();
            g.start_active = s.at("start_ray_active").get<bool>();
            g.end_active = s.at("end_ray_active").get<bool>();
        } catch (const nlohmann::json::exception&) {
            fail(ErrorCode::missing_data, "record field 'strips' entry is incomplete");
        }
        out.push_back(g);
    }
    return out;
}

// Position of a point at distance w (in unit periods) out along a strip ray.
std::pair<double, double> ray_point(const Layout& lay, const StripGeom& g, bool start_ray, double w) {
    auto [px, py] = lay.edge_point(g.host, g.side, start_ray ? g.a0 : g.a1);
    auto [dx, dy] = Layout::outward(g.side);
    return {px + dx * w * unit_len, py + dy * w * unit_len};
}

void draw_strips(Svg& svg, const Layout& lay, const std::vector<StripGeom>& strips) {
    for (std::size_t i = 0; i < strips.size(); ++i) {
        const auto& g = strips[i];
        auto color = palette_color("strip" + std::to_string(i));
        auto [dx, dy] = Layout::outward(g.side);
        auto p0 = lay.edge_point(g.host, g.side, g.a0);
        auto p1 = lay.edge_point(g.host, g.side, g.a1);
        // Fade along the outward direction.
        std::string gid = "fade" + std::to_string(i);
        auto q0 = p0;
        auto q1 = std::pair{p0.first + dx * strip_len, p0.second + dy * strip_len};
        svg.defs("<linearGradient id=\"" + gid + "\" gradientUnits=\"userSpaceOnUse\" x1=\"" + num(q0.first) +
                 "\" y1=\"" + num(q0.second) + "\" x2=\"" + num(q1.first) + "\" y2=\"" + num(q1.second) +
                 "\"><stop offset=\"0\" stop-color=\"" + color + "\" stop-opacity=\"0.85\"/><stop offset=\"1\" " +
                 "stop-color=\"" + color + "\" stop-opacity=\"0\"/></linearGradient>");
        std::string d = "M " + num(p0.first) + " " + num(p0.second) + " L " + num(p1.first) + " " +
                        num(p1.second) + " L " + num(p1.first + dx * strip_len) + " " +
                        num(p1.second + dy * strip_len) + " L " + num(p0.first + dx * strip_len) + " " +
                        num(p0.second + dy * strip_len) + " Z";
        svg.path(d, "class=\"strip\" fill=\"url(#" + gid + ")\" stroke=\"none\"");
        for (int r = 0; r < 2; ++r) {
            bool active = r == 0 ? g.start_active : g.end_active;
            auto p = r == 0 ? p0 : p1;
            svg.line(p.first, p.second, p.first + dx * strip_len, p.second + dy * strip_len,
                     active ? "class=\"ray\" stroke=\"" + color + "\" stroke-width=\"1\""
                            : std::string("class=\"corner-line\" stroke=\"#888888\" stroke-width=\"1\" "
                                          "stroke-dasharray=\"2 2\""));
        }
        // Truncation marker three periods out.
        double ox = dx * strip_len, oy = dy * strip_len;
        svg.line(p0.first + ox - dy * 4, p0.second + oy - dx * 4, p1.first + ox + dy * 4, p1.second + oy + dx * 4,
                 "class=\"truncation\" stroke=\"#888888\" stroke-width=\"1\" stroke-dasharray=\"3 2\"");
        auto s0 = lay.edge_point(g.host, g.side, g.s0);
        auto s1 = lay.edge_point(g.host, g.side, g.s1);
        svg.line(s0.first, s0.second, s1.first, s1.second,
                 "class=\"switch\" stroke=\"" + color + "\" stroke-width=\"3\" stroke-opacity=\"0.6\"");
    }
}

// Polyline from one edge point into the rectangle and over to the other, corners rounded.
std::string rounded_path(const std::vector<std::pair<double, double>>& pts, double radius) {
    std::string d = "M " + num(pts[0].first) + " " + num(pts[0].second);
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        auto [ax, ay] = pts[i - 1];
        auto [bx, by] = pts[i];
        auto [cx, cy] = pts[i + 1];
        double l1 = std::hypot(bx - ax, by - ay), l2 = std::hypot(cx - bx, cy - by);
        double r = std::min({radius, l1 / 2, l2 / 2});
        if (l1 == 0 || l2 == 0 || r <= 0) {
            d += " L " + num(bx) + " " + num(by);
            continue;
        }
        d += " L " + num(bx - (bx - ax) / l1 * r) + " " + num(by - (by - ay) / l1 * r);
        d += " Q " + num(bx) + " " + num(by) + " " + num(bx + (cx - bx) / l2 * r) + " " +
             num(by + (cy - by) / l2 * r);
    }
    d += " L " + num(pts.back().first) + " " + num(pts.back().second);
    return d;
}

void draw_paths_w(Svg& svg, const Layout& lay, const Json& rec) {
    std::size_t i = 0;
    for (const auto& sr : need(rec, "switch_regions")) {
        const auto& p = sr.at("path");
        auto from = p.at("from"), to = p.at("to");
        auto fs = from.at("side").get<std::string>(), ts = to.at("side").get<std::string>();
        auto a = lay.edge_point(from.at("rect").get<std::size_t>(), fs, from.at("offset").get<double>());
        auto b = lay.edge_point(to.at("rect").get<std::size_t>(), ts, to.at("offset").get<double>());
        // Step inside, off the sides, then meet with one axis-parallel turn.
        double inset = 6 + 2 * static_cast<double>(i % 3);
        auto [adx, ady] = Layout::outward(fs);
        auto [bdx, bdy] = Layout::outward(ts);
        std::pair a1{a.first - adx * inset, a.second - ady * inset};
        std::pair b1{b.first - bdx * inset, b.second - bdy * inset};
        std::pair corner{adx != 0 ? a1.first : b1.first, adx != 0 ? b1.second : a1.second};
        svg.path(rounded_path({a, a1, corner, b1, b}, 4),
                 "class=\"path-w\" fill=\"none\" stroke=\"#555555\" stroke-width=\"0.8\"");
        ++i;
    }
}

// ------------------------------------------------------------------ kinds

std::string render_piece_map(const Json& rec) {
    const double panel_gap = 40;
    Layout top(rec, margin);
    Layout bottom(rec, top.height + panel_gap - strip_len);
    Svg svg(top.width, bottom.height);
    auto vb = need_as<std::vector<std::vector<double>>>(rec, "decomposition.vertical_bounds");
    auto hb = need_as<std::vector<std::vector<double>>>(rec, "decomposition.horizontal_bounds");
    svg.text(margin, margin - 10, "vertical strips V (source)", "font-size=\"12\"");
    svg.text(margin, bottom.y0 - strip_len + 30, "horizontal strips H (image)", "font-size=\"12\"");
    for (const auto& b : need(rec, "piece_map")) {
        std::size_t sr = b.at("source")[0], ss = b.at("source")[1];
        std::size_t tr = b.at("target")[0], ts = b.at("target")[1];
        top.check_rect(sr);
        top.check_rect(tr);
        if (ss + 1 >= vb.at(sr).size() || ts + 1 >= hb.at(tr).size())
            fail(ErrorCode::parse, "branch slot out of range");
        auto color = palette_color("H" + std::to_string(tr) + "." + std::to_string(ts));
        auto label = b.at("label").get<std::string>();
        double x0 = top.x[sr] + vb[sr][ss] * top.scale, x1 = top.x[sr] + vb[sr][ss + 1] * top.scale;
        svg.rect(x0, top.y0, x1 - x0, top.h[sr] * top.scale,
                 "class=\"branch\" fill=\"" + color + "\" stroke=\"#000000\" stroke-width=\"0.5\"");
        svg.text((x0 + x1) / 2, top.y0 + top.h[sr] * top.scale / 2, label,
                 "text-anchor=\"middle\" font-size=\"8\"");
        double y0 = bottom.y0 + hb[tr][ts] * bottom.scale, y1 = bottom.y0 + hb[tr][ts + 1] * bottom.scale;
        svg.rect(bottom.x[tr], y0, bottom.w[tr] * bottom.scale, y1 - y0,
                 "class=\"image\" fill=\"" + color + "\" stroke=\"#000000\" stroke-width=\"0.5\"");
        svg.text(bottom.x[tr] + bottom.w[tr] * bottom.scale / 2, (y0 + y1) / 2 + 3, label,
                 "text-anchor=\"middle\" font-size=\"8\"");
    }
    top.draw_rects(svg);
    bottom.draw_rects(svg);
    return svg.str();
}

std::string render_digraphs(const Json& rec) {
    auto m = need_as<std::vector<std::vector<std::int64_t>>>(rec, "matrix");
    const std::size_t n = m.size();
    const double radius = 60, panel = 2 * radius + 60;
    Svg svg(4 * panel + margin, panel + 2 * margin);
    const char* names[] = {"L", "R", "T", "B"};
    for (int p = 0; p < 4; ++p) {
        auto dg = need_as<std::vector<std::size_t>>(rec, std::string("edge_maps.") + names[p] + ".digraph");
        if (dg.size() != n) fail(ErrorCode::parse, std::string("digraph of ") + names[p] + " has the wrong size");
        const bool vertical = p < 2;
        const double cx = margin + p * panel + panel / 2, cy = margin + panel / 2;
        auto pos = [&](std::size_t k) {
            double a = -M_PI / 2 + 2 * M_PI * static_cast<double>(k) / static_cast<double>(n);
            return std::pair{cx + radius * std::cos(a), cy + radius * std::sin(a)};
        };
        svg.text(cx - 20, margin + 4, std::string("f_") + names[p], "font-size=\"12\"");
        auto arc = [&](std::size_t i, std::size_t j, bool black) {
            std::string attrs = black ? "class=\"arc\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.2\" "
                                        "marker-end=\"url(#arrow-black)\""
                                      : "class=\"arc-rest\" fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"1\" "
                                        "marker-end=\"url(#arrow-gray)\"";
            auto [x1, y1] = pos(i);
            if (i == j) {
                double ox = (x1 - cx) / radius * 14, oy = (y1 - cy) / radius * 14;
                svg.path("M " + num(x1) + " " + num(y1) + " C " + num(x1 + ox * 2 - oy) + " " +
                             num(y1 + oy * 2 + ox) + " " + num(x1 + ox * 2 + oy) + " " + num(y1 + oy * 2 - ox) +
                             " " + num(x1) + " " + num(y1),
                         attrs);
                return;
            }
            auto [x2, y2] = pos(j);
            double mx = (x1 + x2) / 2, my = (y1 + y2) / 2, len = std::hypot(x2 - x1, y2 - y1);
            double bend = 0.15 * len;
            // Shorten toward the target so the arrow head clears the vertex disc.
            double ex = x2 - (x2 - x1) / len * 7, ey = y2 - (y2 - y1) / len * 7;
            svg.path("M " + num(x1) + " " + num(y1) + " Q " + num(mx - (y2 - y1) / len * bend) + " " +
                         num(my + (x2 - x1) / len * bend) + " " + num(ex) + " " + num(ey),
                     attrs);
        };
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                auto entry = vertical ? m.at(j).at(i) : m.at(i).at(j);  // digraph(M) has j -> i for m_ij
                if (entry > 0 && dg[i] != j) arc(i, j, false);
            }
        for (std::size_t i = 0; i < n; ++i) {
            if (dg[i] >= n) fail(ErrorCode::parse, "digraph arc out of range");
            arc(i, dg[i], true);
        }
        for (std::size_t k = 0; k < n; ++k) {
            auto [x, y] = pos(k);
            svg.circle(x, y, 6, "class=\"vertex\" fill=\"#ffffff\" stroke=\"#000000\"");
            svg.text(x, y + 3, std::to_string(k + 1), "text-anchor=\"middle\" font-size=\"8\"");
        }
    }
    return svg.str();
}

std::string render_orbits(const Json& rec) {
    Layout lay(rec, margin);
    Svg svg(lay.width, lay.height);
    lay.draw_rects(svg);
    const auto& pts = need(rec, "periodic_points");
    std::vector<std::pair<double, double>> where;
    for (const auto& p : pts)
        where.push_back(lay.edge_point(p.at("rect").get<std::size_t>(), p.at("map").get<std::string>(),
                                       p.at("offset").get<double>()));
    std::size_t id = 0;
    for (const auto& o : need(rec, "orbits")) {
        auto members = o.at("points").get<std::vector<std::size_t>>();
        auto color = palette_color("orbit" + std::to_string(id++));
        for (std::size_t i = 0; i < members.size(); ++i) {
            std::size_t a = members[i], b = members[(i + 1) % members.size()];
            if (a >= where.size() || b >= where.size()) fail(ErrorCode::parse, "orbit point out of range");
            auto [x1, y1] = where[a];
            auto [x2, y2] = where[b];
            std::string attrs = "class=\"orbit-arrow\" fill=\"none\" stroke=\"" + color +
                                "\" stroke-width=\"1\" marker-end=\"url(#arrow-orbit)\"";
            if (a == b) {
                svg.path("M " + num(x1) + " " + num(y1) + " c -12 -18 12 -18 0 0", attrs);
                continue;
            }
            double mx = (x1 + x2) / 2, my = (y1 + y2) / 2 - 0.2 * std::abs(x2 - x1) - 10;
            svg.path("M " + num(x1) + " " + num(y1) + " Q " + num(mx) + " " + num(my) + " " + num(x2) + " " +
                         num(y2),
                     attrs);
        }
    }
    for (std::size_t i = 0; i < where.size(); ++i) {
        bool corner = pts[i].value("corner", "none") != "none";
        bool initial = pts[i].value("initial", false);
        auto color = palette_color("orbit" + std::to_string(pts[i].value("orbit", std::size_t{0})));
        svg.circle(where[i].first, where[i].second, initial ? 4 : 3,
                   "class=\"periodic-point\" fill=\"" + (corner ? color : std::string("#ffffff")) + "\" stroke=\"" +
                       color + "\" stroke-width=\"1.2\"");
    }
    return svg.str();
}

std::string render_expanded(const Json& rec, bool with_glue) {
    Layout lay(rec, margin);
    Svg svg(lay.width, lay.height);
    auto strips = read_strips(rec);
    draw_strips(svg, lay, strips);
    lay.draw_rects(svg);
    draw_paths_w(svg, lay, rec);
    if (!with_glue) return svg.str();

    const auto& pairs = need(rec, "schema.pairs");
    const auto& gens = need(rec, "schema.generators");
    auto segment = [&](const Json& s, const std::string& side,
                       bool& ok) -> std::pair<std::pair<double, double>, std::pair<double, double>> {
        double from = s.at("from").get<double>(), to = s.at("to").get<double>();
        std::size_t index = s.at("index").get<std::size_t>();
        if (!s.at("on_ray").get<bool>()) {
            ok = true;
            return {lay.edge_point(index, side, from), lay.edge_point(index, side, to)};
        }
        if (index >= strips.size()) fail(ErrorCode::parse, "strip index out of range");
        // Past the truncation the ray is not drawn.
        ok = std::max(from, to) <= 3;
        bool start = s.at("ray").get<std::string>() == "start";
        return {ray_point(lay, strips[index], start, from), ray_point(lay, strips[index], start, to)};
    };
    std::size_t drawn = 0;
    for (const auto& p : pairs) {
        if (drawn >= max_glue_pairs) break;
        std::size_t g = p.at("generator").get<std::size_t>();
        if (g >= gens.size()) fail(ErrorCode::parse, "generator index out of range");
        bool vertical = gens[g].at("relation").get<std::string>() == "vertical";
        bool ok1 = false, ok2 = false;
        auto a = segment(p.at("first"), vertical ? "L" : "T", ok1);
        auto b = segment(p.at("second"), vertical ? "R" : "B", ok2);
        if (!ok1 || !ok2) continue;
        auto color = palette_color("gen" + std::to_string(g));
        for (auto s : {a, b})
            svg.line(s.first.first, s.first.second, s.second.first, s.second.second,
                     "class=\"glue\" stroke=\"" + color + "\" stroke-width=\"2.5\"");
        double ax = (a.first.first + a.second.first) / 2, ay = (a.first.second + a.second.second) / 2;
        double bx = (b.first.first + b.second.first) / 2, by = (b.first.second + b.second.second) / 2;
        svg.path("M " + num(ax) + " " + num(ay) + " Q " + num((ax + bx) / 2) + " " +
                     num(std::min(ay, by) - 20) + " " + num(bx) + " " + num(by),
                 "class=\"glue-link\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"0.4\" stroke-opacity=\"0.5\"");
        ++drawn;
    }
    for (const auto& ic : need(rec, "census.infinite_classes")) {
        auto rep = ic.at("representative").get<std::string>();
        unsigned r = 0;
        double x = 0, y = 0;
        if (std::sscanf(rep.c_str(), "Q%u (%lf, %lf)", &r, &x, &y) != 3 || r == 0 || r > lay.size()) continue;
        double px = lay.x[r - 1] + x * lay.scale, py = lay.y0 + y * lay.scale;
        svg.circle(px, py, 4, "class=\"infinite-class\" fill=\"#000000\"");
        svg.text(px + 5, py - 5, ic.at("link").get<std::string>(), "font-size=\"8\"");
    }
    return svg.str();
}

}  // namespace

const char* diagram_name(DiagramKind k) {
    switch (k) {
        case DiagramKind::piece_map: return "piece_map";
        case DiagramKind::digraphs: return "digraphs";
        case DiagramKind::orbits: return "orbits";
        case DiagramKind::expanded_rectangles: return "expanded_rectangles";
        case DiagramKind::complex_2d: return "complex_2d";
    }
    return "?";
}

DiagramKind diagram_from_name(const std::string& name) {
    static const std::map<std::string, DiagramKind> names = {
        {"piece_map", DiagramKind::piece_map},
        {"pieces", DiagramKind::piece_map},
        {"digraphs", DiagramKind::digraphs},
        {"digraph", DiagramKind::digraphs},
        {"orbits", DiagramKind::orbits},
        {"orbit", DiagramKind::orbits},
        {"expanded_rectangles", DiagramKind::expanded_rectangles},
        {"strips", DiagramKind::expanded_rectangles},
        {"complex_2d", DiagramKind::complex_2d},
        {"complex", DiagramKind::complex_2d},
    };
    auto it = names.find(name);
    if (it == names.end()) fail(ErrorCode::invalid_input, "unknown figure kind '" + name + "'");
    return it->second;
}

const std::vector<DiagramKind>& all_diagram_kinds() {
    static const std::vector<DiagramKind> kinds = {DiagramKind::piece_map, DiagramKind::digraphs,
                                                   DiagramKind::orbits, DiagramKind::expanded_rectangles,
                                                   DiagramKind::complex_2d};
    return kinds;
}

std::string palette_color(const std::string& key) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : key) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    // HSL with fixed saturation and lightness bands keeps colors readable.
    double hue = static_cast<double>(h % 360);
    double sat = 0.55 + 0.2 * static_cast<double>((h >> 16) % 100) / 100.0;
    double light = 0.55 + 0.15 * static_cast<double>((h >> 32) % 100) / 100.0;
    double c = (1 - std::abs(2 * light - 1)) * sat;
    double hp = hue / 60.0;
    double x = c * (1 - std::abs(std::fmod(hp, 2.0) - 1));
    double r = 0, g = 0, b = 0;
    switch (static_cast<int>(hp)) {
        case 0: r = c, g = x; break;
        case 1: r = x, g = c; break;
        case 2: g = c, b = x; break;
        case 3: g = x, b = c; break;
        case 4: r = x, b = c; break;
        default: r = c, b = x; break;
    }
    double mm = light - c / 2;
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround((r + mm) * 255)),
                  static_cast<int>(std::lround((g + mm) * 255)), static_cast<int>(std::lround((b + mm) * 255)));
    return buf;
}

std::string render(const DiagramSpec& spec) {
    Json rec;
    try {
        rec = Json::parse(spec.record_json);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::parse, std::string("record JSON: ") + e.what());
    }
    try {
        switch (spec.kind) {
            case DiagramKind::piece_map: return render_piece_map(rec);
            case DiagramKind::digraphs: return render_digraphs(rec);
            case DiagramKind::orbits: return render_orbits(rec);
            case DiagramKind::expanded_rectangles: return render_expanded(rec, false);
            case DiagramKind::complex_2d: return render_expanded(rec, true);
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::missing_data, std::string("record slice incomplete: ") + e.what());
    }
    fail(ErrorCode::internal, "unknown diagram kind");
}

}  // namespace endstretch
