#include <doctest.h>

#include <json.hpp>

#include "endstretch/record.hpp"
#include "generators.hpp"

using namespace endstretch;
using Json = nlohmann::ordered_json;

namespace {

RunConfig matrix_config(const IntMatrix& m) {
    RunConfig c;
    c.matrix = m;
    c.source = "inline";
    return c;
}

const VerificationCheck& check_named(const VerificationReport& r, const std::string& name) {
    for (const auto& c : r.checks)
        if (c.name == name) return c;
    FAIL("missing check " << name);
    throw;
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    throw;
}

}  // namespace

TEST_CASE("running example record passes its certificates and re-verification") {
    auto cfg = matrix_config(testgen::running_example());
    cfg.corner_selection = true;
    auto r = construct(cfg);
    for (const auto& c : r.certificates) {
        CAPTURE(c.name);
        CAPTURE(c.detail);
        CHECK(c.passed);
    }
    auto text = record_json(r, "2026-01-01T00:00:00Z");
    auto report = verify_record(text);
    for (const auto& c : report.checks) {
        CAPTURE(c.name);
        CAPTURE(c.detail);
        CHECK(c.passed);
    }
    CHECK(report.passed());
    // Verification does not alter the record and gives the same answer twice.
    CHECK(verify_record(text).to_json() == report.to_json());
}

TEST_CASE("records are deterministic up to the timestamp") {
    auto cfg = matrix_config(testgen::running_example());
    auto a = record_json(construct(cfg), "t0");
    auto b = record_json(construct(cfg), "t0");
    auto c = record_json(construct(cfg), "t1");
    CHECK(a == b);
    CHECK(a != c);
    CHECK(record_hash(a) == record_hash(c));
    CHECK(Json::parse(a)["hash"] == Json::parse(c)["hash"]);
}

TEST_CASE("mutated incidence entry is caught by name") {
    auto text = record_json(construct(matrix_config(testgen::running_example())), "t");
    auto j = Json::parse(text);
    j["incidence"]["matrix"][0][0] = j["incidence"]["matrix"][0][0].get<int>() + 1;
    auto report = verify_record(j.dump(2));
    CHECK_FALSE(report.passed());
    CHECK_FALSE(check_named(report, "incidence_blockdiag").passed);
    CHECK_FALSE(check_named(report, "incidence_stretch").passed);
    CHECK_FALSE(check_named(report, "record_hash").passed);
    CHECK(check_named(report, "char_poly").passed);
    CHECK_FALSE(report.precondition_failed());
}

TEST_CASE("mutated eigenvalue and tails are caught") {
    auto text = record_json(construct(matrix_config(testgen::running_example())), "t");
    auto j = Json::parse(text);
    j["eigen"]["lambda"] = j["eigen"]["lambda"].get<double>() + 1e-6;
    CHECK_FALSE(check_named(verify_record(j.dump()), "perron_eigendata").passed);
    auto k = Json::parse(text);
    k["schema"]["tails"][0]["verified"] = false;
    CHECK_FALSE(check_named(verify_record(k.dump()), "periodic_tails").passed);
}

TEST_CASE("truncated depth") {
    auto cfg = matrix_config(testgen::running_example());
    auto r = construct(cfg);
    const auto n = r.extended->escape.depth;
    cfg.depth = n - 1;
    CHECK(code_of([&] { construct(cfg); }) == ErrorCode::invalid_input);
    // A stored record claiming a cap below the escape depth fails as a precondition.
    auto j = Json::parse(record_json(r, "t"));
    j["schema"]["depth_cap"] = n - 1;
    auto report = verify_record(j.dump());
    CHECK_FALSE(check_named(report, "schema_depth").passed);
    CHECK(check_named(report, "schema_depth").category == ErrorCode::precondition);
    CHECK(report.precondition_failed());
    // The smallest admissible cap builds, but is too shallow to confirm the periodic tails.
    cfg.depth = n;
    auto shallow = construct(cfg);
    for (const auto& c : shallow.certificates) CHECK(c.passed == (c.name != "periodic_tails"));
    CHECK_FALSE(check_named(verify_record(record_json(shallow, "t")), "periodic_tails").passed);
}

TEST_CASE("foreign and unreadable records") {
    auto j = Json::parse(record_json(construct(matrix_config(IntMatrix::from_rows({{2}}))), "t"));
    j["version"] = "endstretch-record/0";
    CHECK(code_of([&] { verify_record(j.dump()); }) == ErrorCode::schema_version);
    j.erase("version");
    CHECK(code_of([&] { verify_record(j.dump()); }) == ErrorCode::schema_version);
    CHECK(code_of([&] { verify_record("{not json"); }) == ErrorCode::parse);
    // Missing sections fail the checks that need them instead of aborting.
    auto k = Json::parse(record_json(construct(matrix_config(IntMatrix::from_rows({{2}}))), "t"));
    k.erase("incidence");
    auto report = verify_record(k.dump());
    CHECK_FALSE(check_named(report, "incidence_blockdiag").passed);
}

TEST_CASE("input validation") {
    CHECK(code_of([] { construct(matrix_config(IntMatrix::from_rows({{1, 1}, {0, 1}}))); }) ==
          ErrorCode::precondition);
    CHECK(code_of([] { construct(matrix_config(IntMatrix::from_rows({{0, 1}, {1, 0}}))); }) ==
          ErrorCode::precondition);
    RunConfig c;
    c.mode = InputMode::integer;
    c.integer = 1;
    CHECK(code_of([&] { construct(c); }) == ErrorCode::invalid_input);
    CHECK(code_of([] { construct(RunConfig{}); }) == ErrorCode::invalid_input);
    auto t = matrix_config(IntMatrix::from_rows({{2}}));
    t.tol = 0;
    CHECK(code_of([&] { construct(t); }) == ErrorCode::invalid_input);
}

TEST_CASE("integer and lift modes") {
    RunConfig c;
    c.mode = InputMode::integer;
    c.integer = 3;
    auto r = construct(c);
    CHECK(r.passed());
    CHECK(r.incidence->exact_root == 3);
    CHECK(r.surface->count(EndSign::attracting) == 1);
    CHECK(verify_record(record_json(r, "t")).passed());

    RunConfig l;
    l.mode = InputMode::lift;
    l.matrix = IntMatrix::from_rows({{2}});
    l.lift_k = 3;
    CHECK(effective_corner_selection(l));
    auto lr = construct(l);
    CHECK(lr.passed());
    CHECK(lr.matrix.size() == 3);
    CHECK_FALSE(lr.primitive);
    REQUIRE(lr.surface->weak_perron_gluing);
    CHECK(lr.surface->connected == Tristate::yes);
    CHECK(verify_record(record_json(lr, "t")).passed());
}

TEST_CASE("config round trip") {
    auto c = matrix_config(testgen::running_example());
    c.depth = 40;
    c.insert_genus = true;
    c.weak_perron_k = 2;
    c.tol = 1e-11;
    auto back = config_from_json(config_json(c));
    CHECK(back.matrix == c.matrix);
    CHECK(back.depth == c.depth);
    CHECK(back.insert_genus);
    CHECK(back.weak_perron_k == c.weak_perron_k);
    CHECK(back.tol == c.tol);
    CHECK(config_json(back) == config_json(c));
    CHECK(code_of([] { config_from_json("{\"mode\":\"spiral\"}"); }) == ErrorCode::parse);
}

TEST_CASE("random matrices produce verifiable records") {
    for (const auto& m : testgen::suite(53, 25)) {
        CAPTURE(m.rows());
        auto r = construct(matrix_config(m));
        CHECK(r.passed());
        CHECK(verify_record(record_json(r, "t")).passed());
    }
}
