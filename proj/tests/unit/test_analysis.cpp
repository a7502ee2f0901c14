#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "hmobo/analysis.hpp"
#include "hmobo/error.hpp"
#include "hmobo/random.hpp"
#include "hmobo/session.hpp"

using namespace hmobo;

TEST_CASE("hypercube coverage examples") {
    const std::vector<UnitPoint> one{UnitPoint::Constant(0.1)};
    CHECK(hypercube_coverage(one, 2).covered == 1);
    const std::vector<UnitPoint> two{UnitPoint::Constant(0.1), UnitPoint(0.9, 0.1, 0.1, 0.1)};
    CHECK(hypercube_coverage(two, 2).covered == 2);
    const std::vector<UnitPoint> top{UnitPoint::Constant(1.0)};
    const auto r = hypercube_coverage(top, 2);
    CHECK(r.covered == 1);
    CHECK(r.total == 16);
    REQUIRE(r.covered_cells.size() == 1);
    CHECK(r.covered_cells[0] == std::array<int, 4>{1, 1, 1, 1});
}

TEST_CASE("cell boundaries are lower-inclusive") {
    for (int m = 2; m <= 5; ++m) {
        for (int c = 0; c < m; ++c) {
            const std::vector<UnitPoint> at{UnitPoint(static_cast<double>(c) / m, 0, 0, 1)};
            const auto r = hypercube_coverage(at, m);
            CHECK(r.covered_cells[0] == std::array<int, 4>{c, 0, 0, m - 1});
        }
    }
}

TEST_CASE("the 16 corners fill every m=2 cell") {
    std::vector<UnitPoint> corners;
    for (int mask = 0; mask < 16; ++mask) corners.emplace_back(mask & 1, (mask >> 1) & 1, (mask >> 2) & 1, (mask >> 3) & 1);
    CHECK(hypercube_coverage(corners, 2).covered == 16);
}

TEST_CASE("coverage matches an independent cell count") {
    Rng rng(3);
    for (int m = 2; m <= 5; ++m) {
        std::vector<UnitPoint> pts;
        std::set<std::array<int, 4>> cells;
        for (int i = 0; i < 60; ++i) {
            UnitPoint u(rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform());
            if (i % 7 == 0) u[i % 4] = 1.0;
            pts.push_back(u);
            std::array<int, 4> cell{};
            for (int d = 0; d < 4; ++d) cell[d] = u[d] == 1.0 ? m - 1 : static_cast<int>(u[d] * m);
            cells.insert(cell);
        }
        CHECK(hypercube_coverage(pts, m).covered == static_cast<int>(cells.size()));
    }
}

TEST_CASE("coverage rejects bad inputs") {
    const std::vector<UnitPoint> outside{UnitPoint(1.2, 0, 0, 0)};
    CHECK_THROWS_AS(hypercube_coverage(outside, 2), Error);
    CHECK_THROWS_AS(hypercube_coverage({}, 0), Error);
}

TEST_CASE("successive distance examples") {
    const std::vector<UnitPoint> single{UnitPoint::Zero()};
    CHECK(total_successive_distance(single) == 0.0);
    const std::vector<UnitPoint> diagonal{UnitPoint::Zero(), UnitPoint::Ones()};
    CHECK(total_successive_distance(diagonal) == doctest::Approx(2.0).epsilon(1e-15));
    const std::vector<UnitPoint> steps{UnitPoint::Zero(), UnitPoint(0.5, 0, 0, 0), UnitPoint(1, 0, 0, 0)};
    CHECK(total_successive_distance(steps) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("normalized successive distance") {
    const std::vector<UnitPoint> diagonal{UnitPoint::Zero(), UnitPoint::Ones()};
    CHECK(normalized_successive_distance(diagonal) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(normalized_successive_distance(diagonal, DistanceDenominator::Transitions) == doctest::Approx(2.0).epsilon(1e-15));
    const std::vector<UnitPoint> single{UnitPoint::Ones()};
    CHECK(normalized_successive_distance(single) == 0.0);
    CHECK(normalized_successive_distance(single, DistanceDenominator::Transitions) == 0.0);
    const std::vector<UnitPoint> same(40, UnitPoint::Constant(0.3));
    CHECK(normalized_successive_distance(same) == 0.0);
}

TEST_CASE("welch t statistic") {
    const std::vector<double> a{1, 2, 3, 4, 5};
    CHECK(welch_t(a, a).t == 0.0);
    const std::vector<double> b{2, 3, 4, 5, 6};
    const auto r = welch_t(a, b);
    CHECK(r.t == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(r.df == doctest::Approx(8.0).epsilon(1e-12));
    const std::vector<double> zeros{0, 0, 0, 0};
    const std::vector<double> ones{1, 1 + 1e-9, 1 - 1e-9, 1};
    CHECK(std::abs(welch_t(zeros, ones).t) > 1e6);
    const std::vector<double> lone{1};
    CHECK_THROWS_AS(welch_t(lone, a), Error);
}

TEST_CASE("welch degrees of freedom match the Welch-Satterthwaite formula") {
    const std::vector<double> a{1.2, 3.4, 2.2, 5.1, 0.3, 2.9};
    const std::vector<double> b{7.7, 6.1, 9.4};
    const auto sa = summarize(a);
    const auto sb = summarize(b);
    const double va = sa.sd * sa.sd / 6, vb = sb.sd * sb.sd / 3;
    const auto r = welch_t(a, b);
    CHECK(r.t == doctest::Approx((sa.mean - sb.mean) / std::sqrt(va + vb)).epsilon(1e-12));
    CHECK(r.df == doctest::Approx((va + vb) * (va + vb) / (va * va / 5 + vb * vb / 2)).epsilon(1e-12));
}

TEST_CASE("summary statistics") {
    const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
    const auto s = summarize(v);
    CHECK(s.mean == 5.0);
    CHECK(s.sd == doctest::Approx(std::sqrt(32.0 / 7.0)).epsilon(1e-12));
    const std::vector<double> one{3};
    CHECK(summarize(one).sd == 0.0);
    CHECK_THROWS_AS(summarize({}), Error);
}

TEST_CASE("session report for a single evaluation") {
    SessionConfig cfg;
    auto s = Session::create("r1", Mode::DesignerLed, cfg, counting_clock());
    s.submit_evaluation({0.2, 0.3, 5, 1}, EvaluationSource::Manual, std::pair{1100.0, 0.2});
    const std::vector<int> ms{2, 3, 4, 5};
    const auto report = session_report(s.state(), ms);
    for (const auto& c : report.at("coverage")) CHECK(c.at("covered") == 1);
    CHECK(report.at("total_successive_distance") == 0.0);
    CHECK(report.at("normalized_successive_distance") == 0.0);
    CHECK(report.at("evaluation_count") == 1);
    CHECK(report.dump() == session_report(replay(s.log()), ms).dump());
}

TEST_CASE("informal tests count as visited designs") {
    auto s = Session::create("r2", Mode::DesignerLed, SessionConfig{}, counting_clock());
    s.record_informal_test({0, 0, -5, 0});
    s.submit_evaluation({1, 0.5, 15, 2.6}, EvaluationSource::Manual, std::pair{1000.0, 0.1});
    const std::vector<int> ms{2};
    const auto report = session_report(s.state(), ms);
    CHECK(report.at("visited_count") == 2);
    CHECK(report.at("coverage")[0].at("covered") == 2);
    CHECK(report.at("pareto_coverage")[0].at("covered") == 1);
    CHECK(report.at("total_successive_distance") == doctest::Approx(2.0));
}
