#include "endstretch/warmup.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace endstretch {

namespace {

void require_d(int d) {
    if (d < 2) fail(ErrorCode::invalid_input, "integer case needs d >= 2, got " + std::to_string(d));
}

IntegerSummary direct_summary(int d) {
    IntegerSummary s;
    const double inv = 1.0 / d;
    s.vertical_strips = s.horizontal_strips = static_cast<std::size_t>(d);
    s.strip_width_ratio = s.strip_height_ratio = inv;
    // One fixed corner per edge map: (0,1) for f_L and f_T^-1, (1,0) for f_R and f_B^-1.
    s.infinite_strips = 4;
    s.attachment_ratios.assign(4, inv * inv);  // f^2 of a full edge
    s.switch_ratios.assign(4, inv);
    s.escape_depth = 2;  // no tails, period 1
    s.nesting_period = 1;
    s.attracting_ends = s.repelling_ends = 1;
    s.line_classes = 2;  // [(0,0)] and [(1,1)]
    s.incidence = IntMatrix::from_rows({{d, 0}, {0, d}});
    s.stretch_factor = d;
    return s;
}

IntegerSummary pipeline_summary(int d) {
    const auto m = IntMatrix::from_rows({{d}});
    const auto pd = perron_eigendata(m);
    const auto dec = build_decomposition(m, pd);
    const auto e = extend(piece_map(dec));
    const auto schema = enumerate_identifications(e, default_depth_cap(e));
    const auto census = classify_classes(e, schema);
    const auto report = assemble_surface(e, schema, census, {});
    const auto inc = verify_stretch(m, report);

    IntegerSummary s;
    s.vertical_strips = dec.vertical_count(0);
    s.horizontal_strips = dec.horizontal_count(0);
    s.strip_width_ratio = (dec.vertical_bound(0, 1) - dec.vertical_bound(0, 0)) / dec.rect_widths[0];
    s.strip_height_ratio = (dec.horizontal_bound(0, 1) - dec.horizontal_bound(0, 0)) / dec.rect_heights[0];
    s.infinite_strips = e.strips.size();
    for (const auto& st : e.strips) {
        const double len = e.edge_length(st.kind, st.host_rect);
        s.attachment_ratios.push_back((st.attach_end - st.attach_start) / len);
        s.switch_ratios.push_back((st.switch_end - st.switch_start) / len);
    }
    s.escape_depth = e.escape.depth;
    s.nesting_period = e.nesting_period;
    s.attracting_ends = report.count(EndSign::attracting);
    s.repelling_ends = report.count(EndSign::repelling);
    for (const auto& c : census.infinite_classes) s.line_classes += c.link == LinkType::line;
    s.incidence = inc.incidence;
    if (!inc.exact_root) fail(ErrorCode::verification, "integer stretch factor is not an exact integer root");
    s.stretch_factor = *inc.exact_root;
    return s;
}

template <class T>
void compare(std::vector<std::string>& out, const char* what, const T& a, const T& b) {
    if (a == b) return;
    std::ostringstream os;
    os << what << ": direct " << a << ", pipeline " << b;
    out.push_back(os.str());
}

void compare_ratio(std::vector<std::string>& out, const char* what, double a, double b) {
    if (std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a))) return;
    std::ostringstream os;
    os.precision(15);
    os << what << ": direct " << a << ", pipeline " << b;
    out.push_back(os.str());
}

}  // namespace

std::pair<double, double> integer_piece_map(int d, double x, double y) {
    require_d(d);
    if (x < 0 || x > 1 || y < 0 || y > 1) fail(ErrorCode::invalid_input, "point outside the unit square");
    // Strip index k in 1..d; a shared edge x = k/d is taken as a limit from inside V_k.
    int k = std::clamp(static_cast<int>(std::ceil(x * d)), 1, d);
    return {d * x - k + 1, 1 - (k - y) / d};
}

IntegerCase build_integer_case(int d) {
    require_d(d);
    return {d, direct_summary(d), pipeline_summary(d)};
}

CrossValidation cross_validate(int d) {
    const auto c = build_integer_case(d);
    const auto& a = c.direct;
    const auto& b = c.pipeline;
    CrossValidation v;
    auto& diff = v.differences;
    compare(diff, "vertical strips", a.vertical_strips, b.vertical_strips);
    compare(diff, "horizontal strips", a.horizontal_strips, b.horizontal_strips);
    compare_ratio(diff, "strip width ratio", a.strip_width_ratio, b.strip_width_ratio);
    compare_ratio(diff, "strip height ratio", a.strip_height_ratio, b.strip_height_ratio);
    compare(diff, "infinite strips", a.infinite_strips, b.infinite_strips);
    if (a.attachment_ratios.size() == b.attachment_ratios.size()) {
        for (std::size_t i = 0; i < a.attachment_ratios.size(); ++i) {
            compare_ratio(diff, "attachment ratio", a.attachment_ratios[i], b.attachment_ratios[i]);
            compare_ratio(diff, "switch ratio", a.switch_ratios[i], b.switch_ratios[i]);
        }
    }
    compare(diff, "escape depth", a.escape_depth, b.escape_depth);
    compare(diff, "nesting period", a.nesting_period, b.nesting_period);
    compare(diff, "attracting ends", a.attracting_ends, b.attracting_ends);
    compare(diff, "repelling ends", a.repelling_ends, b.repelling_ends);
    compare(diff, "Line classes", a.line_classes, b.line_classes);
    compare(diff, "incidence", format_matrix(a.incidence), format_matrix(b.incidence));
    compare(diff, "stretch factor", a.stretch_factor, b.stretch_factor);

    // Pointwise piece map: the pipeline chart has y downward, unit rectangle since eta = omega = 1.
    const auto dec = build_decomposition(IntMatrix::from_rows({{d}}), perron_eigendata(IntMatrix::from_rows({{d}})));
    const auto p = piece_map(dec);
    for (int k = 1; k <= d; ++k)
        for (double fx : {0.25, 0.5, 0.75})
            for (double fy : {0.1, 0.5, 0.9}) {
                const double x = (k - 1 + fx) / d, y = fy;
                auto [dx, dy] = integer_piece_map(d, x, y);
                auto img = p.apply(0, x, 1 - y);
                if (std::abs(img.x - dx) > 1e-9 || std::abs((1 - img.y) - dy) > 1e-9) {
                    std::ostringstream os;
                    os << "piece map at (" << x << ", " << y << "): direct (" << dx << ", " << dy << "), pipeline ("
                       << img.x << ", " << 1 - img.y << ")";
                    diff.push_back(os.str());
                }
            }
    v.agree = diff.empty();
    return v;
}

}  // namespace endstretch
