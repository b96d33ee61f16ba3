#include <doctest.h>

#include <cmath>
#include <set>

#include "endstretch/decomposition.hpp"
#include "generators.hpp"

using namespace endstretch;

namespace {

StripDecomposition running(bool corner) {
    auto m = testgen::running_example();
    auto pd = perron_eigendata(m);
    if (!corner) return build_decomposition(m, pd);
    auto c = corner_selection(m);
    return build_decomposition(m, pd, c.sigma, c.tau);
}

std::vector<std::string> names(const std::vector<StripLabel>& v) {
    std::vector<std::string> out;
    for (const auto& l : v) out.push_back(l.name());
    return out;
}

}  // namespace

TEST_CASE("running example strip orders") {
    auto d = running(false);
    CHECK(names(d.vertical_order[0]) == std::vector<std::string>{"V1_2,1", "V1_4,1"});
    CHECK(names(d.horizontal_order[0]) == std::vector<std::string>{"H1_3,1"});
    CHECK(names(d.horizontal_order[3]) == std::vector<std::string>{"H4_1,1", "H4_2,1", "H4_2,2"});
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(std::abs(d.vertical_bound(k, d.vertical_count(k)) - d.rect_widths[k]) < coordinate_tolerance);
        CHECK(std::abs(d.horizontal_bound(k, d.horizontal_count(k)) - d.rect_heights[k]) < coordinate_tolerance);
    }
}

TEST_CASE("integer case decomposition") {
    for (int dd = 2; dd <= 5; ++dd) {
        auto m = IntMatrix::from_rows({{dd}});
        auto d = build_decomposition(m, perron_eigendata(m));
        CHECK(d.vertical_count(0) == static_cast<std::size_t>(dd));
        CHECK(d.horizontal_count(0) == static_cast<std::size_t>(dd));
        auto p = piece_map(d);
        for (int k = 0; k < dd; ++k) {
            const auto& b = p.at(0, static_cast<std::size_t>(k));
            CHECK(b.label.copy == static_cast<std::size_t>(k));
            CHECK(b.target_slot == static_cast<std::size_t>(k));  // V_{1,k} onto H_{1,k}
        }
    }
}

TEST_CASE("symbolic lengths") {
    PerronData pd;
    pd.lambda = 2;
    pd.eta = {1, 3};
    pd.omega = {4, 1};
    CHECK(evaluate_length(SymbolicLength::zero(Basis::width, 2), pd) == 0);
    CHECK(evaluate_length(SymbolicLength::unit(Basis::width, 2, 0), pd) == 2.0);
    CHECK(evaluate_length(SymbolicLength::unit(Basis::height, 2, 1), pd) == 1.5);
    auto s = SymbolicLength::unit(Basis::width, 2, 0) + SymbolicLength::unit(Basis::width, 2, 1);
    CHECK(s.coefficients == std::vector<std::int64_t>{1, 1});
    CHECK_THROWS_AS(SymbolicLength::unit(Basis::width, 2, 0) + SymbolicLength::unit(Basis::height, 2, 0), Error);
}

TEST_CASE("running example piece map") {
    auto p = piece_map(running(false));
    const auto& b = p.at(0, 0);
    CHECK(b.label.name() == "V1_2,1");
    CHECK(b.target_rect == 1);
    CHECK(b.target_slot == 0);  // H2_1,1 is the top strip of Q2
    CHECK(p.branches.size() == static_cast<std::size_t>(testgen::running_example().total()));
}

TEST_CASE("corner selection on the running example") {
    auto m = testgen::running_example();
    auto c = corner_selection(m);
    CHECK(c.cycle == std::vector<std::size_t>{0, 1, 3, 2});
    // tau_4 sends V4_2,1 (the minimum) to V4_3,1; sigma_4 sends H4_2,1 to H4_1,1.
    CHECK(c.tau[3] == Permutation{1, 0});
    CHECK(c.sigma[3] == Permutation{1, 0, 2});
    auto d = running(true);
    auto p = piece_map(d);
    // Following slot 0 to slot 0 around the cycle returns to Q1.
    std::size_t k = 0;
    for (int step = 0; step < 4; ++step) {
        const auto& b = p.at(k, 0);
        CHECK(b.target_slot == 0);
        k = b.target_rect;
    }
    CHECK(k == 0);
}

TEST_CASE("corner selection with a loop at the first vertex") {
    auto m = IntMatrix::from_rows({{2, 1}, {1, 0}});
    auto c = corner_selection(m);
    CHECK(c.cycle == std::vector<std::size_t>{0});
    auto d = build_decomposition(m, perron_eigendata(m), c.sigma, c.tau);
    CHECK(d.vertical_occupant(0, 0).name() == "V1_1,1");
    CHECK(d.horizontal_slot({Orientation::horizontal, 0, 0, 0}) == 0);
}

TEST_CASE("invalid permutations are rejected") {
    auto m = testgen::running_example();
    auto pd = perron_eigendata(m);
    auto c = corner_selection(m);
    auto bad = c.tau;
    bad[0] = {0, 0};
    try {
        build_decomposition(m, pd, c.sigma, bad);
        FAIL("expected invalid input");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::invalid_input);
    }
    auto short_sigma = c.sigma;
    short_sigma.pop_back();
    CHECK_THROWS_AS(build_decomposition(m, pd, short_sigma, c.tau), Error);
}

TEST_CASE("piece map properties over random matrices") {
    std::mt19937_64 rng(21);
    for (const auto& m : testgen::suite(22, 150)) {
        auto pd = perron_eigendata(m);
        for (bool corner : {false, true}) {
            std::optional<std::vector<Permutation>> sg, tu;
            if (corner) {
                auto c = corner_selection(m);
                sg = c.sigma;
                tu = c.tau;
            }
            auto d = build_decomposition(m, pd, sg, tu);
            auto p = piece_map(d);
            std::set<std::pair<std::size_t, std::size_t>> hit;
            for (const auto& b : p.branches) {
                hit.insert({b.target_rect, b.target_slot});
                // Width expands by lambda onto the full target width; height contracts by lambda.
                CHECK(std::abs(b.source_width * pd.lambda / d.rect_widths[b.target_rect] - 1) < 1e-6);
                CHECK(std::abs(b.target_height * pd.lambda / d.rect_heights[b.source_rect] - 1) < 1e-6);
            }
            std::size_t total_h = 0;
            for (std::size_t k = 0; k < m.size(); ++k) {
                total_h += d.horizontal_count(k);
                for (std::size_t s = 0; s < d.vertical_count(k); ++s)
                    CHECK(d.vertical_bound(k, s + 1) > d.vertical_bound(k, s));
                for (std::size_t q = 0; q < d.horizontal_count(k); ++q)
                    CHECK(d.horizontal_bound(k, q + 1) > d.horizontal_bound(k, q));
                CHECK(std::abs(d.vertical_bound(k, d.vertical_count(k)) - d.rect_widths[k]) < coordinate_tolerance);
                CHECK(std::abs(d.horizontal_bound(k, d.horizontal_count(k)) - d.rect_heights[k]) <
                      coordinate_tolerance);
            }
            CHECK(hit.size() == p.branches.size());
            CHECK(hit.size() == total_h);
            // Point evaluation lands inside the announced horizontal strip.
            std::uniform_real_distribution<double> u(0.01, 0.99);
            const auto& b = p.branches[rng() % p.branches.size()];
            double x = b.source_left + u(rng) * b.source_width, y = u(rng) * d.rect_heights[b.source_rect];
            auto img = p.apply(b.source_rect, x, y);
            CHECK(img.rect == b.target_rect);
            CHECK(img.y >= b.target_top - 1e-12);
            CHECK(img.y <= b.target_top + b.target_height + 1e-12);
        }
    }
}

TEST_CASE("permutation matrices have no expansion") {
    auto m = IntMatrix::from_rows({{0, 1}, {1, 0}});
    try {
        build_decomposition(m, perron_eigendata(m));
        FAIL("expected precondition error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::precondition);
    }
}
