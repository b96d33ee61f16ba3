#include <doctest.h>

#include <cmath>

#include "endstretch/warmup.hpp"

using namespace endstretch;

TEST_CASE("integer piece map values") {
    auto [x, y] = integer_piece_map(2, 0.5, 0.5);
    CHECK(x == doctest::Approx(1.0));
    CHECK(y == doctest::Approx(0.75));
    // Corners of V_1 accumulate at the fixed corners (0,1) and (1,0) of the square.
    auto tl = integer_piece_map(3, 0.0, 1.0);
    CHECK(tl.first == 0);
    CHECK(tl.second == doctest::Approx(1.0));
    auto br = integer_piece_map(3, 1.0, 0.0);
    CHECK(br.first == doctest::Approx(1.0));
    CHECK(br.second == doctest::Approx(0.0));
    // Horizontal expansion by d, vertical contraction by 1/d.
    auto a = integer_piece_map(4, 0.30, 0.2), b = integer_piece_map(4, 0.31, 0.6);
    CHECK((b.first - a.first) / 0.01 == doctest::Approx(4));
    CHECK((b.second - a.second) / 0.4 == doctest::Approx(0.25));
}

TEST_CASE("integer case routes agree for d = 2..10") {
    for (int d = 2; d <= 10; ++d) {
        CAPTURE(d);
        auto v = cross_validate(d);
        for (const auto& diff : v.differences) INFO(diff);
        CHECK(v.agree);
        auto c = build_integer_case(d);
        CHECK(c.pipeline.incidence == IntMatrix::from_rows({{d, 0}, {0, d}}));
        CHECK(c.pipeline.stretch_factor == d);
        CHECK(c.pipeline.attracting_ends == 1);
        CHECK(c.pipeline.repelling_ends == 1);
    }
}

TEST_CASE("integer case rejects d below 2") {
    for (int d : {-1, 0, 1}) {
        try {
            build_integer_case(d);
            FAIL("expected invalid input");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::invalid_input);
        }
    }
}
