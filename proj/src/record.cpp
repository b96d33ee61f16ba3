#include "endstretch/record.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#include <json.hpp>

namespace endstretch {

using Json = nlohmann::ordered_json;

namespace {

const char* mode_name(InputMode m) {
    switch (m) {
        case InputMode::matrix: return "matrix";
        case InputMode::integer: return "integer";
        case InputMode::lift: return "lift";
    }
    return "?";
}

InputMode mode_from(const std::string& s) {
    if (s == "matrix") return InputMode::matrix;
    if (s == "integer") return InputMode::integer;
    if (s == "lift") return InputMode::lift;
    fail(ErrorCode::parse, "unknown input mode: " + s);
}

const char* corner_name(CornerType c) {
    switch (c) {
        case CornerType::none: return "none";
        case CornerType::start: return "start";
        case CornerType::end: return "end";
    }
    return "?";
}

const char* case_name(CaseKind k) {
    switch (k) {
        case CaseKind::piece_map: return "piece_map";
        case CaseKind::switch_map: return "switch_map";
        case CaseKind::translate: return "translate";
        case CaseKind::translate_shift: return "translate_shift";
    }
    return "?";
}

const char* construction_name(SwitchConstruction c) {
    switch (c) {
        case SwitchConstruction::noncorner_vertical: return "noncorner_vertical";
        case SwitchConstruction::noncorner_horizontal: return "noncorner_horizontal";
        case SwitchConstruction::corner: return "corner";
    }
    return "?";
}

template <class T>
Json optional_json(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

Json matrix_json(const IntMatrix& m) { return Json(m.rows()); }

IntMatrix matrix_from(const Json& j) {
    if (!j.is_array()) fail(ErrorCode::parse, "matrix must be an array of rows");
    std::vector<std::vector<std::int64_t>> rows;
    for (const auto& row : j) {
        if (!row.is_array()) fail(ErrorCode::parse, "matrix must be an array of rows");
        std::vector<std::int64_t> r;
        for (const auto& v : row) {
            if (!v.is_number_integer()) fail(ErrorCode::parse, "matrix entries must be integers");
            r.push_back(v.get<std::int64_t>());
        }
        rows.push_back(r);
    }
    return IntMatrix::from_rows(rows);
}

Json edge_json(const EdgeCoordinate& c) {
    return Json{{"rect", c.rect}, {"side", map_name(static_cast<MapKind>(c.side))}, {"offset", c.offset}};
}

Json segment_json(const SegmentRef& s) {
    Json j;
    j["on_ray"] = s.on_ray;
    j["index"] = s.index;
    if (s.on_ray) j["ray"] = s.ray == RaySide::start ? "start" : "end";
    j["from"] = s.from;
    j["to"] = s.to;
    return j;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::parse, std::string("record JSON: ") + e.what());
    }
}

// ------------------------------------------------------------ certificates

Certificate escape_certificate(const ExtendedPieceMap& e) {
    // Fixed-seed sample of 100 boundary points per map, followed to N + 3m.
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = e.escape.depth;
    const std::size_t until = n + 3 * static_cast<std::size_t>(e.nesting_period);
    const std::size_t rects = e.base.decomposition.size();
    std::size_t sampled = 0;
    for (auto kind : all_map_kinds) {
        for (int i = 0; i < 100; ++i) {
            BoundaryPoint x;
            x.index = static_cast<std::size_t>(rng() % rects);
            x.position = u(rng) * e.edge_length(kind, x.index);
            if (auto h = e.strip_on(kind, x.index)) {
                const auto& s = e.strips[*h];
                if (x.position > s.attach_start && x.position < s.attach_end) x.position = s.switch_start;
            }
            ++sampled;
            for (std::size_t d = 1; d <= until; ++d) {
                x = extended_step(e, kind, x);
                if (d >= n && !captured(e, kind, x))
                    return {"escape_law", false,
                            std::string(map_name(kind)) + " sample escaped strip boundaries at depth " +
                                std::to_string(d)};
            }
        }
    }
    return {"escape_law", true,
            std::to_string(sampled) + " boundary points in strip boundaries from depth " + std::to_string(n) +
                " to " + std::to_string(until)};
}

Certificate periodic_point_certificate(const ExtendedPieceMap& e) {
    std::set<std::pair<int, std::size_t>> seen;
    double worst = 0;
    for (const auto& pt : e.census.points) {
        if (!seen.insert({static_cast<int>(pt.map), pt.location.rect}).second)
            return {"periodic_points", false, "two periodic points on one rectangle edge"};
        const auto& g = e.maps[pt.map];
        double t = pt.location.offset;
        std::size_t r = pt.location.rect;
        for (std::size_t i = 0; i < pt.period; ++i) t = g.apply(r, t, r);
        if (r != pt.location.rect) return {"periodic_points", false, "orbit does not close"};
        worst = std::max(worst, std::abs(t - pt.location.offset));
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%zu points, max fixed-point residual %.3g", e.census.points.size(), worst);
    return {"periodic_points", worst <= 1e-9, buf};
}

Certificate digraph_certificate(const ConstructionRecord& r) {
    auto g = Digraph::of(r.matrix);
    auto gt = Digraph::of(r.matrix.transpose());
    for (auto kind : all_map_kinds) {
        const auto& e = r.extended->maps[kind];
        if (e.digraph.size() != r.matrix.size()) return {"edge_digraphs", false, "digraph is not functional"};
        for (std::size_t k = 0; k < e.digraph.size(); ++k)
            if ((is_vertical_kind(kind) ? g : gt).edges(k, e.digraph[k]) <= 0)
                return {"edge_digraphs", false, std::string(map_name(kind)) + " digraph uses a missing arc"};
    }
    return {"edge_digraphs", true, "four functional digraphs inside digraph(M) and digraph(M^T)"};
}

}  // namespace

// ------------------------------------------------------------------ config

IntMatrix effective_matrix(const RunConfig& c) {
    switch (c.mode) {
        case InputMode::matrix: return c.matrix;
        case InputMode::integer: return IntMatrix::from_rows({{c.integer}});
        case InputMode::lift: return block_lift(c.matrix, c.lift_k);
    }
    fail(ErrorCode::internal, "unknown input mode");
}

std::optional<std::size_t> effective_weak_perron(const RunConfig& c) {
    if (c.weak_perron_k) return c.weak_perron_k;
    if (c.mode == InputMode::lift && c.lift_k > 1) return c.lift_k;
    return std::nullopt;
}

bool effective_corner_selection(const RunConfig& c) {
    return c.corner_selection || c.insert_genus || effective_weak_perron(c).has_value();
}

bool ConstructionRecord::passed() const {
    return std::all_of(certificates.begin(), certificates.end(), [](const Certificate& c) { return c.passed; });
}

ConstructionRecord construct(const RunConfig& cfg) {
    if (!(cfg.tol > 0)) fail(ErrorCode::invalid_input, "tolerance must be positive");
    if (cfg.mode == InputMode::integer && cfg.integer < 2)
        fail(ErrorCode::invalid_input, "integer case needs d >= 2, got " + std::to_string(cfg.integer));
    if (cfg.mode != InputMode::integer && cfg.matrix.empty()) fail(ErrorCode::invalid_input, "no input matrix");
    if (cfg.mode == InputMode::lift && cfg.lift_k == 0) fail(ErrorCode::invalid_input, "lift order must be >= 1");

    ConstructionRecord r;
    r.config = cfg;
    r.matrix = effective_matrix(cfg);
    r.irreducible = is_irreducible(r.matrix);
    if (!r.irreducible) fail(ErrorCode::precondition, "matrix is not irreducible");
    r.primitive = is_primitive(r.matrix);
    r.char_poly = char_poly(r.matrix);
    r.determinant = determinant(r.matrix);
    r.eigen = perron_eigendata(r.matrix, cfg.tol);
    auto& certs = r.certificates;
    {
        char buf[128];
        std::snprintf(buf, sizeof buf, "residual %.3g, gap to exact root %.3g", r.eigen.residual, r.eigen.root_gap);
        certs.push_back({"perron_eigendata", r.eigen.residual <= cfg.tol && r.eigen.root_gap <= std::max(cfg.tol, 1e-12),
                         buf});
    }

    std::optional<std::vector<Permutation>> sigma, tau;
    if (effective_corner_selection(cfg)) {
        r.corners = corner_selection(r.matrix);
        sigma = r.corners->sigma;
        tau = r.corners->tau;
    }
    r.pieces = piece_map(build_decomposition(r.matrix, r.eigen, sigma, tau));
    r.extended = extend(*r.pieces);
    const auto& e = *r.extended;

    if (r.corners) {
        auto idx = e.census.on_edge(MapKind::left, 0);
        bool ok = idx && e.census.points[*idx].corner == CornerType::start &&
                  e.census.points[*idx].period == r.corners->cycle.size();
        certs.push_back({"corner_periodic", ok,
                         ok ? "top-left corner of Q1 has period " + std::to_string(r.corners->cycle.size()) +
                                  " under f_L"
                            : "top-left corner of Q1 is not periodic with the selected cycle length"});
    }
    certs.push_back(digraph_certificate(r));
    certs.push_back(periodic_point_certificate(e));
    certs.push_back(escape_certificate(e));

    r.schema = enumerate_identifications(e, cfg.depth.value_or(default_depth_cap(e)));
    {
        std::size_t bad = 0;
        for (const auto& t : r.schema->tails) bad += !t.verified;
        certs.push_back({"periodic_tails", bad == 0,
                         std::to_string(r.schema->tails.size() - bad) + " of " +
                             std::to_string(r.schema->tails.size()) + " generator tails repeat with unit shift"});
    }
    r.census = classify_classes(e, *r.schema);
    certs.push_back({"segment_classes", r.census->segment_overlaps == 0 && r.census->max_finite_class_size <= 2,
                     "max class size " + std::to_string(r.census->max_finite_class_size) + " at segment granularity, " +
                         std::to_string(r.census->segment_overlaps) + " overlaps"});
    certs.push_back({"vertex_links", r.census->germ_conflicts == 0,
                     std::to_string(r.census->vertex_classes) + " corner-image vertices with circle links, " +
                         std::to_string(r.census->germ_conflicts) + " conflicts"});

    SurfaceOptions opts;
    opts.insert_genus = cfg.insert_genus;
    opts.weak_perron_k = effective_weak_perron(cfg);
    r.surface = assemble_surface(e, *r.schema, *r.census, opts);
    certs.push_back({"connected", r.surface->connected != Tristate::no,
                     std::string(tristate_name(r.surface->connected)) + ": " + r.surface->connected_reason});

    r.incidence = incidence_report(incidence_matrix(r.matrix, r.surface->doubled), r.eigen.lambda);
    {
        char buf[128];
        std::snprintf(buf, sizeof buf, "rho(incidence) = %.15g, lambda = %.15g, relative error %.3g",
                      r.incidence->spectral_radius, r.incidence->target_lambda, r.incidence->relative_error);
        certs.push_back({"incidence_stretch", r.incidence->relative_error <= 1e-9, buf});
    }
    return r;
}

// -------------------------------------------------------------------- JSON

std::string config_json(const RunConfig& c) {
    Json j;
    j["mode"] = mode_name(c.mode);
    j["matrix"] = c.mode == InputMode::integer ? Json(nullptr) : matrix_json(c.matrix);
    j["source"] = c.source;
    j["integer"] = c.integer;
    j["lift_k"] = c.lift_k;
    j["tol"] = c.tol;
    j["depth"] = optional_json(c.depth);
    j["corner_selection"] = c.corner_selection;
    j["insert_genus"] = c.insert_genus;
    j["weak_perron_k"] = optional_json(c.weak_perron_k);
    return j.dump();
}

RunConfig config_from_json(const std::string& text) {
    Json j = parse_json(text);
    RunConfig c;
    try {
        c.mode = mode_from(j.at("mode").get<std::string>());
        if (!j.at("matrix").is_null()) c.matrix = matrix_from(j.at("matrix"));
        c.source = j.value("source", "");
        c.integer = j.at("integer").get<int>();
        c.lift_k = j.at("lift_k").get<std::size_t>();
        c.tol = j.at("tol").get<double>();
        if (!j.at("depth").is_null()) c.depth = j.at("depth").get<std::size_t>();
        c.corner_selection = j.at("corner_selection").get<bool>();
        c.insert_genus = j.at("insert_genus").get<bool>();
        if (!j.at("weak_perron_k").is_null()) c.weak_perron_k = j.at("weak_perron_k").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::parse, std::string("config JSON: ") + e.what());
    }
    return c;
}

std::string record_hash(const std::string& json_text) {
    Json j = parse_json(json_text);
    j.erase("timestamp");
    j.erase("hash");
    return hex64(fnv1a(j.dump()));
}

std::string record_json(const ConstructionRecord& r, const std::string& timestamp) {
    Json j;
    j["version"] = record_version;
    j["timestamp"] = timestamp;
    j["hash"] = "";
    j["config"] = Json::parse(config_json(r.config));
    j["matrix"] = matrix_json(r.matrix);
    j["irreducible"] = r.irreducible;
    j["primitive"] = r.primitive;
    {
        Json coeffs = Json::array();
        for (const auto& c : r.char_poly.coefficients) coeffs.push_back(c.str());
        j["char_poly"] = {{"text", r.char_poly.to_string()}, {"coefficients", coeffs}};
    }
    j["determinant"] = r.determinant.str();
    j["eigen"] = {{"lambda", r.eigen.lambda},       {"eta", r.eigen.eta},
                  {"omega", r.eigen.omega},         {"residual", r.eigen.residual},
                  {"root_gap", r.eigen.root_gap},   {"iterations", r.eigen.iterations}};
    if (r.corners)
        j["corner_selection"] = {{"cycle", r.corners->cycle}, {"sigma", r.corners->sigma}, {"tau", r.corners->tau}};
    else
        j["corner_selection"] = nullptr;

    if (r.pieces) {
        const auto& d = r.pieces->decomposition;
        Json dec;
        dec["rect_widths"] = d.rect_widths;
        dec["rect_heights"] = d.rect_heights;
        Json vo = Json::array(), ho = Json::array(), vb = Json::array(), hb = Json::array();
        for (std::size_t k = 0; k < d.size(); ++k) {
            Json v = Json::array(), h = Json::array(), vbs = Json::array(), hbs = Json::array();
            for (std::size_t s = 0; s < d.vertical_count(k); ++s) v.push_back(d.vertical_occupant(k, s).name());
            for (std::size_t q = 0; q < d.horizontal_count(k); ++q) h.push_back(d.horizontal_occupant(k, q).name());
            for (std::size_t s = 0; s <= d.vertical_count(k); ++s) vbs.push_back(d.vertical_bound(k, s));
            for (std::size_t q = 0; q <= d.horizontal_count(k); ++q) hbs.push_back(d.horizontal_bound(k, q));
            vo.push_back(v);
            ho.push_back(h);
            vb.push_back(vbs);
            hb.push_back(hbs);
        }
        dec["vertical_slots"] = vo;
        dec["horizontal_slots"] = ho;
        dec["vertical_bounds"] = vb;
        dec["horizontal_bounds"] = hb;
        dec["sigma"] = d.sigma;
        dec["tau"] = d.tau;
        j["decomposition"] = dec;
        Json branches = Json::array();
        for (const auto& b : r.pieces->branches)
            branches.push_back({{"label", b.label.name()},
                                {"source", {b.source_rect, b.source_slot}},
                                {"target", {b.target_rect, b.target_slot}}});
        j["piece_map"] = branches;
    }

    if (r.extended) {
        const auto& e = *r.extended;
        Json maps;
        for (auto kind : all_map_kinds) {
            const auto& m = e.maps[kind];
            maps[map_name(kind)] = {{"digraph", m.digraph}, {"cycles", m.cycles}, {"tail_depth", m.tail_depth}};
        }
        j["edge_maps"] = maps;
        Json pts = Json::array();
        for (const auto& p : e.census.points)
            pts.push_back({{"map", map_name(p.map)},
                           {"rect", p.location.rect},
                           {"offset", p.location.offset},
                           {"period", p.period},
                           {"orbit", p.orbit_id},
                           {"position", p.orbit_position},
                           {"corner", corner_name(p.corner)},
                           {"partner", optional_json(p.corner_partner)},
                           {"initial", p.is_initial}});
        j["periodic_points"] = pts;
        Json orbits = Json::array();
        for (const auto& o : e.census.orbits) orbits.push_back({{"map", map_name(o.map)}, {"points", o.points}});
        j["orbits"] = orbits;
        j["escape"] = {{"tail", e.escape.tail}, {"max_period", e.escape.max_period}, {"depth", e.escape.depth}};
        j["nesting_period"] = e.nesting_period;
        Json strips = Json::array();
        for (const auto& s : e.strips)
            strips.push_back({{"id", s.id},
                              {"map", map_name(s.kind)},
                              {"point", s.point},
                              {"orbit", s.orbit},
                              {"step", s.step},
                              {"anchor_rect", s.anchor_rect},
                              {"exponent", s.exponent},
                              {"host_rect", s.host_rect},
                              {"attachment", {s.attach_start, s.attach_end}},
                              {"switch_interval", {s.switch_start, s.switch_end}},
                              {"shift_on_entry", s.shift_on_entry},
                              {"start_ray_active", s.start_ray_active},
                              {"end_ray_active", s.end_ray_active},
                              {"next", s.next}});
        j["strips"] = strips;
        Json regions = Json::array();
        for (const auto& sr : e.switch_regions)
            regions.push_back({{"id", sr.id},
                               {"point", sr.point},
                               {"strip", sr.strip},
                               {"construction", construction_name(sr.construction)},
                               {"path", {{"from", edge_json(sr.path.from)},
                                         {"to", edge_json(sr.path.to)},
                                         {"interior_disjoint", sr.path.interior_disjoint_obligation}}},
                               {"boundary", sr.boundary},
                               {"composition_steps", sr.composition_steps},
                               {"maps_to_initial", sr.maps_to_initial}});
        j["switch_regions"] = regions;
        Json cases = Json::array();
        for (const auto& c : e.case_table)
            cases.push_back({{"kind", case_name(c.kind)},
                             {"strip", optional_json(c.strip)},
                             {"target_strip", optional_json(c.target_strip)},
                             {"switch_region", optional_json(c.switch_region)},
                             {"shift", c.shift},
                             {"description", c.description}});
        j["case_table"] = cases;
    }

    if (r.schema) {
        const auto& s = *r.schema;
        Json gens = Json::array(), pairs = Json::array(), tails = Json::array();
        for (const auto& g : s.generators)
            gens.push_back({{"id", g.id},
                            {"relation", g.relation == Relation::vertical ? "vertical" : "horizontal"},
                            {"rect", g.rect},
                            {"slot", g.slot},
                            {"length", g.length}});
        for (const auto& p : s.pairs)
            pairs.push_back({{"generator", p.generator},
                             {"depth", p.depth},
                             {"u", {p.u0, p.u1}},
                             {"first", segment_json(p.first)},
                             {"second", segment_json(p.second)}});
        for (const auto& t : s.tails)
            tails.push_back({{"generator", t.generator},
                             {"ray_depth", t.ray_depth},
                             {"first_orbit", t.first_orbit},
                             {"second_orbit", t.second_orbit},
                             {"period", t.period},
                             {"first_shift", t.first_shift},
                             {"second_shift", t.second_shift},
                             {"verified", t.verified}});
        j["schema"] = {{"depth_cap", s.depth_cap}, {"escape_depth", s.escape_depth}, {"generators", gens},
                       {"pairs", pairs},          {"tails", tails}};
    }

    if (r.census) {
        const auto& c = *r.census;
        Json inf = Json::array();
        for (const auto& ic : c.infinite_classes)
            inf.push_back({{"representative", ic.representative},
                           {"depth", ic.depth},
                           {"points", ic.points},
                           {"points_earlier", ic.points_earlier},
                           {"link", link_name(ic.link)},
                           {"end_orbits", ic.end_orbits},
                           {"touches_corner_line", ic.touches_corner_line}});
        j["census"] = {{"finite_singletons", c.finite_singletons},
                       {"finite_pairs", c.finite_pairs},
                       {"max_finite_class_size", c.max_finite_class_size},
                       {"segment_overlaps", c.segment_overlaps},
                       {"vertex_classes", c.vertex_classes},
                       {"max_vertex_class_size", c.max_vertex_class_size},
                       {"germ_conflicts", c.germ_conflicts},
                       {"unresolved", c.unresolved},
                       {"infinite_classes", inf}};
    }

    if (r.surface) {
        const auto& s = *r.surface;
        Json ends = Json::array();
        for (const auto& e : s.ends)
            ends.push_back({{"sign", e.sign == EndSign::attracting ? "attracting" : "repelling"},
                            {"orbits", e.orbits},
                            {"merged_with_mirror", e.merged_with_mirror}});
        Json sj;
        sj["ends"] = ends;
        sj["attracting"] = s.count(EndSign::attracting);
        sj["repelling"] = s.count(EndSign::repelling);
        sj["infinite_type"] = s.infinite_type;
        sj["genus_insertion_applied"] = s.genus_insertion_applied;
        sj["genus_point"] = s.genus_point;
        sj["connected"] = tristate_name(s.connected);
        sj["connected_reason"] = s.connected_reason;
        sj["identification_components"] = s.identification_components;
        sj["doubled"] = s.doubled;
        if (s.weak_perron_gluing) {
            const auto& w = *s.weak_perron_gluing;
            sj["weak_perron_gluing"] = {{"k", w.k},
                                        {"a_rays", w.a_rays},
                                        {"b_rays", w.b_rays},
                                        {"a_glue", w.a_glue},
                                        {"b_glue", w.b_glue},
                                        {"components_before", w.components_before},
                                        {"components_after", w.components_after}};
        } else {
            sj["weak_perron_gluing"] = nullptr;
        }
        sj["nesting_period"] = s.nesting_period;
        sj["escape_depth"] = s.escape_depth;
        sj["stretch_factor"] = s.stretch_factor;
        j["surface"] = sj;
    }

    if (r.incidence) {
        const auto& i = *r.incidence;
        j["incidence"] = {{"matrix", matrix_json(i.incidence)},
                          {"spectral_radius", i.spectral_radius},
                          {"target_lambda", i.target_lambda},
                          {"relative_error", i.relative_error},
                          {"exact_root", optional_json(i.exact_root)}};
    }

    Json certs = Json::array();
    for (const auto& c : r.certificates) certs.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    j["certificates"] = certs;
    j["passed"] = r.passed();

    Json hashed = j;
    hashed.erase("timestamp");
    hashed.erase("hash");
    j["hash"] = hex64(fnv1a(hashed.dump()));
    return j.dump(2) + "\n";
}

// ----------------------------------------------------------- verification

bool VerificationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const VerificationCheck& c) { return c.passed; });
}

bool VerificationReport::precondition_failed() const {
    return std::any_of(checks.begin(), checks.end(), [](const VerificationCheck& c) {
        return !c.passed && c.category == ErrorCode::precondition;
    });
}

std::string VerificationReport::to_json() const {
    Json j;
    j["passed"] = passed();
    Json list = Json::array();
    for (const auto& c : checks)
        list.push_back({{"name", c.name},
                        {"passed", c.passed},
                        {"category", error_code_name(c.category)},
                        {"detail", c.detail}});
    j["checks"] = list;
    return j.dump(2) + "\n";
}

namespace {

struct Checker {
    VerificationReport report;

    // Runs one named check; a thrown exception (missing field, bad type) fails it.
    template <class F>
    void run(const std::string& name, F&& f, ErrorCode category = ErrorCode::verification) {
        VerificationCheck c;
        c.name = name;
        c.category = category;
        try {
            c.detail = f(c.passed);
        } catch (const std::exception& e) {
            c.passed = false;
            c.detail = std::string("unreadable: ") + e.what();
        }
        report.checks.push_back(c);
    }
};

std::string fmt_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

VerificationReport verify_record(const std::string& json_text) {
    const Json j = parse_json(json_text);
    if (!j.is_object() || !j.contains("version")) fail(ErrorCode::schema_version, "record has no version field");
    const std::string version = j.at("version").is_string() ? j.at("version").get<std::string>() : "";
    if (version != record_version)
        fail(ErrorCode::schema_version, "record version '" + version + "' is not " + record_version);

    Checker ck;
    const IntMatrix m = matrix_from(j.at("matrix"));
    const double tol = j.at("config").at("tol").get<double>();

    ck.run("record_hash", [&](bool& ok) {
        auto expect = record_hash(json_text);
        ok = j.at("hash").get<std::string>() == expect;
        return ok ? "hash " + expect : "stored " + j.at("hash").get<std::string>() + ", content " + expect;
    });
    ck.run("matrix_irreducible", [&](bool& ok) {
        ok = is_irreducible(m) == true && j.at("irreducible").get<bool>();
        return ok ? std::string("strongly connected digraph") : std::string("matrix is not irreducible");
    });
    ck.run("char_poly", [&](bool& ok) {
        auto p = char_poly(m);
        std::vector<std::string> coeffs;
        for (const auto& c : p.coefficients) coeffs.push_back(c.str());
        ok = coeffs == j.at("char_poly").at("coefficients").get<std::vector<std::string>>() &&
             determinant(m).str() == j.at("determinant").get<std::string>();
        return p.to_string() + ", det " + determinant(m).str();
    });
    ck.run("perron_eigendata", [&](bool& ok) {
        const auto& e = j.at("eigen");
        const double lambda = e.at("lambda").get<double>();
        const auto eta = e.at("eta").get<std::vector<double>>();
        const auto omega = e.at("omega").get<std::vector<double>>();
        const std::size_t n = m.size();
        if (eta.size() != n || omega.size() != n) {
            ok = false;
            return std::string("eigenvector dimension mismatch");
        }
        double res = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double a = -lambda * eta[i], b = -lambda * omega[i];
            for (std::size_t k = 0; k < n; ++k) {
                a += static_cast<double>(m(i, k)) * eta[k];
                b += omega[k] * static_cast<double>(m(k, i));
            }
            res = std::max({res, std::abs(a), std::abs(b)});
        }
        bool positive = std::all_of(eta.begin(), eta.end(), [](double v) { return v > 0; }) &&
                        std::all_of(omega.begin(), omega.end(), [](double v) { return v > 0; });
        double root = largest_real_root(char_poly(m));
        ok = positive && eta.back() == 1.0 && omega.back() == 1.0 && res <= 10 * tol &&
             std::abs(root - lambda) <= std::max(tol, 1e-9);
        return "lambda " + fmt_num(lambda) + ", residual " + fmt_num(res) + ", exact root " + fmt_num(root);
    });
    ck.run("decomposition_bounds", [&](bool& ok) {
        const auto& d = j.at("decomposition");
        const auto w = d.at("rect_widths").get<std::vector<double>>();
        const auto h = d.at("rect_heights").get<std::vector<double>>();
        const auto vb = d.at("vertical_bounds").get<std::vector<std::vector<double>>>();
        const auto hb = d.at("horizontal_bounds").get<std::vector<std::vector<double>>>();
        ok = vb.size() == m.size() && hb.size() == m.size();
        for (std::size_t k = 0; ok && k < m.size(); ++k) {
            ok = vb[k].size() == static_cast<std::size_t>(m.column_sum(k)) + 1 &&
                 hb[k].size() == static_cast<std::size_t>(m.row_sum(k)) + 1;
            for (std::size_t s = 1; ok && s < vb[k].size(); ++s) ok = vb[k][s] > vb[k][s - 1];
            for (std::size_t s = 1; ok && s < hb[k].size(); ++s) ok = hb[k][s] > hb[k][s - 1];
            ok = ok && std::abs(vb[k].back() - w[k]) < coordinate_tolerance &&
                 std::abs(hb[k].back() - h[k]) < coordinate_tolerance;
        }
        return std::string(ok ? "strip slots partition every rectangle" : "strip slots do not partition a rectangle");
    });
    ck.run("piece_map_bijective", [&](bool& ok) {
        std::set<std::pair<std::size_t, std::size_t>> targets;
        const auto& b = j.at("piece_map");
        for (const auto& x : b) targets.insert({x.at("target")[0].get<std::size_t>(), x.at("target")[1].get<std::size_t>()});
        ok = targets.size() == b.size() && static_cast<std::int64_t>(b.size()) == m.total();
        return std::to_string(b.size()) + " branches, " + std::to_string(targets.size()) + " distinct targets";
    });
    ck.run("edge_digraphs", [&](bool& ok) {
        auto g = Digraph::of(m);
        auto gt = Digraph::of(m.transpose());
        ok = true;
        for (auto kind : all_map_kinds) {
            auto dg = j.at("edge_maps").at(map_name(kind)).at("digraph").get<std::vector<std::size_t>>();
            ok = ok && dg.size() == m.size();
            for (std::size_t k = 0; ok && k < dg.size(); ++k)
                ok = dg[k] < m.size() && (is_vertical_kind(kind) ? g : gt).edges(k, dg[k]) > 0;
        }
        return std::string(ok ? "functional and inside digraph(M), digraph(M^T)" : "digraph arc missing from M");
    });
    std::size_t escape = 0;
    ck.run("escape_depth", [&](bool& ok) {
        std::size_t tail = 0, period = 0;
        std::uint64_t nest = 1;
        for (auto kind : all_map_kinds) {
            const auto& em = j.at("edge_maps").at(map_name(kind));
            for (auto t : em.at("tail_depth").get<std::vector<std::size_t>>()) tail = std::max(tail, t);
            for (const auto& c : em.at("cycles")) {
                period = std::max(period, c.size());
                nest *= c.size();
            }
        }
        escape = tail + 2 * period;
        ok = escape == j.at("escape").at("depth").get<std::size_t>() &&
             nest == j.at("nesting_period").get<std::uint64_t>();
        return "N = " + std::to_string(escape) + ", m = " + std::to_string(nest);
    });
    ck.run(
        "schema_depth",
        [&](bool& ok) {
            auto cap = j.at("schema").at("depth_cap").get<std::size_t>();
            std::size_t deepest = 0;
            for (const auto& p : j.at("schema").at("pairs")) deepest = std::max(deepest, p.at("depth").get<std::size_t>());
            ok = cap >= escape && deepest <= cap && j.at("schema").at("escape_depth").get<std::size_t>() == escape;
            return "depth cap " + std::to_string(cap) + ", escape depth " + std::to_string(escape) +
                   ", deepest pair " + std::to_string(deepest);
        },
        ErrorCode::precondition);
    ck.run("periodic_tails", [&](bool& ok) {
        std::size_t bad = 0, total = 0;
        for (const auto& t : j.at("schema").at("tails")) {
            ++total;
            bad += !t.at("verified").get<bool>();
        }
        ok = bad == 0;
        return std::to_string(total - bad) + " of " + std::to_string(total) + " tails verified";
    });
    ck.run("segment_classes", [&](bool& ok) {
        const auto& c = j.at("census");
        ok = c.at("segment_overlaps").get<std::size_t>() == 0 && c.at("max_finite_class_size").get<std::size_t>() <= 2;
        return "max class size " + std::to_string(c.at("max_finite_class_size").get<std::size_t>());
    });
    ck.run("vertex_links", [&](bool& ok) {
        ok = j.at("census").at("germ_conflicts").get<std::size_t>() == 0;
        return std::to_string(j.at("census").at("germ_conflicts").get<std::size_t>()) + " germ conflicts";
    });
    ck.run("end_signs", [&](bool& ok) {
        const auto& orbits = j.at("orbits");
        ok = true;
        for (const auto& e : j.at("surface").at("ends")) {
            bool attracting = e.at("sign").get<std::string>() == "attracting";
            for (auto o : e.at("orbits").get<std::vector<std::size_t>>()) {
                auto map = orbits.at(o).at("map").get<std::string>();
                ok = ok && attracting == (map == "L" || map == "R");
            }
        }
        return std::string(ok ? "L/R orbits attracting, T/B repelling" : "an end mixes signs");
    });
    ck.run("incidence_blockdiag", [&](bool& ok) {
        const IntMatrix inc = matrix_from(j.at("incidence").at("matrix"));
        ok = inc == incidence_matrix(m, j.at("surface").at("doubled").get<bool>());
        return std::string(ok ? "incidence equals blockdiag(M, M)" : "incidence differs from blockdiag(M, M)");
    });
    ck.run("incidence_stretch", [&](bool& ok) {
        const IntMatrix inc = matrix_from(j.at("incidence").at("matrix"));
        const double lambda = j.at("eigen").at("lambda").get<double>();
        auto rep = incidence_report(inc, lambda);
        ok = rep.relative_error <= 1e-9 &&
             std::abs(j.at("surface").at("stretch_factor").get<double>() - lambda) <= 1e-9 * lambda;
        return "rho " + fmt_num(rep.spectral_radius) + " vs lambda " + fmt_num(lambda);
    });
    ck.run("stored_certificates", [&](bool& ok) {
        ok = true;
        std::string failed;
        for (const auto& c : j.at("certificates"))
            if (!c.at("passed").get<bool>()) {
                ok = false;
                failed += (failed.empty() ? "" : ", ") + c.at("name").get<std::string>();
            }
        return ok ? std::string("all construction certificates passed") : "failed: " + failed;
    });
    return ck.report;
}

std::string spectral_json(const IntMatrix& m, double tol) {
    if (m.empty()) fail(ErrorCode::invalid_input, "empty matrix");
    Json j;
    j["matrix"] = matrix_json(m);
    j["irreducible"] = is_irreducible(m);
    j["primitive"] = is_primitive(m);
    auto p = char_poly(m);
    Json coeffs = Json::array();
    for (const auto& c : p.coefficients) coeffs.push_back(c.str());
    j["char_poly"] = {{"text", p.to_string()}, {"coefficients", coeffs}};
    j["determinant"] = determinant(m).str();
    j["spectral_radius"] = largest_real_root(p);
    BigInt root;
    j["exact_root"] = largest_root_is_integer(p, root) ? Json(root.str()) : Json(nullptr);
    if (j["irreducible"].get<bool>()) {
        auto e = perron_eigendata(m, tol);
        j["eigen"] = {{"lambda", e.lambda},     {"eta", e.eta},           {"omega", e.omega},
                      {"residual", e.residual}, {"root_gap", e.root_gap}, {"iterations", e.iterations}};
    } else {
        j["eigen"] = nullptr;
    }
    return j.dump(2) + "\n";
}

std::string cross_validation_json(int d) {
    auto cv = cross_validate(d);
    auto c = build_integer_case(d);
    auto summary = [](const IntegerSummary& s) {
        return Json{{"vertical_strips", s.vertical_strips},
                    {"horizontal_strips", s.horizontal_strips},
                    {"strip_width_ratio", s.strip_width_ratio},
                    {"strip_height_ratio", s.strip_height_ratio},
                    {"infinite_strips", s.infinite_strips},
                    {"attachment_ratios", s.attachment_ratios},
                    {"switch_ratios", s.switch_ratios},
                    {"escape_depth", s.escape_depth},
                    {"nesting_period", s.nesting_period},
                    {"attracting_ends", s.attracting_ends},
                    {"repelling_ends", s.repelling_ends},
                    {"line_classes", s.line_classes},
                    {"incidence", matrix_json(s.incidence)},
                    {"stretch_factor", s.stretch_factor}};
    };
    Json j{{"d", d},
           {"agree", cv.agree},
           {"differences", cv.differences},
           {"direct", summary(c.direct)},
           {"pipeline", summary(c.pipeline)}};
    return j.dump(2) + "\n";
}

}  // namespace endstretch
