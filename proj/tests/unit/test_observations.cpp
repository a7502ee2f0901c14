#include <doctest.h>

#include <sstream>
#include <string>

#include "hmobo/error.hpp"
#include "hmobo/observations.hpp"

using namespace hmobo;

namespace {

std::string error_text(const std::string& csv) {
    std::istringstream in(csv);
    try {
        read_observations_csv(in);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Validation);
        return e.what();
    }
    FAIL("expected a validation error");
    return {};
}

}  // namespace

TEST_CASE("reads rows and recomputes objectives") {
    std::istringstream in(std::string(kObservationHeader) + "\n0.5,0.25,5,1.3,1250,0.5\n\n0,0,-5,0,900,0\n");
    const auto rows = read_observations_csv(in);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].design == DesignParams{0.5, 0.25, 5, 1.3});
    CHECK(rows[0].speed == 0.0);
    CHECK(rows[0].accuracy == 0.0);
    CHECK(rows[1].speed == 1.0);
    CHECK(rows[1].accuracy == 1.0);
}

TEST_CASE("header only and empty input give no rows") {
    std::istringstream header(std::string(kObservationHeader) + "\n");
    CHECK(read_observations_csv(header).empty());
    std::istringstream empty("");
    CHECK(read_observations_csv(empty).empty());
}

TEST_CASE("errors name the row and column") {
    const std::string h = std::string(kObservationHeader) + "\n";
    CHECK(error_text(h + "0.5,0.25,5,abc,1250,0.5\n").find("row 2, column 4 (design.A)") != std::string::npos);
    CHECK(error_text(h + "0.5,0.25,5,1\n").find("row 2") != std::string::npos);
    CHECK(error_text("D,k,G,A,t,e\n").find("row 1, column 1") != std::string::npos);
    CHECK(error_text(h + "0.5,0.25,5,1,1250,0.5\n0.5,0.9,5,1,1250,0.5\n").find("row 3") != std::string::npos);
    CHECK(error_text(h + "0.5,0.25,5,1,1250,\n").find("column 6 (mean_error_cm)") != std::string::npos);
}

TEST_CASE("write then read is lossless") {
    std::vector<EvaluationResult> rows{evaluation_from_metrics({0.123456789, 0.3, -2.5, 2.6}, 1111.111111, 0.3333333),
                                       evaluation_from_metrics({1, 0.5, 15, 0}, 2999.5, 0)};
    std::istringstream in(write_observations_csv(rows));
    const auto back = read_observations_csv(in);
    REQUIRE(back.size() == 2);
    CHECK(back[0] == rows[0]);
    CHECK(back[1] == rows[1]);
}
