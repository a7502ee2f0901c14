#include "hmobo/observations.hpp"

#include <array>
#include <cerrno>
#include <cstdlib>
#include <istream>
#include <sstream>

#include "hmobo/error.hpp"

namespace hmobo {

namespace {

constexpr std::array<const char*, 6> kColumns{"design.D", "design.k", "design.G", "design.A", "mean_time_ms", "mean_error_cm"};

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

[[noreturn]] void bad(std::size_t row, std::size_t column, const std::string& why) {
    std::string where = "row " + std::to_string(row);
    if (column > 0) where += ", column " + std::to_string(column) + " (" + kColumns[column - 1] + ")";
    fail(ErrorKind::Validation, where + ": " + why);
}

}  // namespace

std::vector<EvaluationResult> read_observations_csv(std::istream& in) {
    std::vector<EvaluationResult> out;
    std::string line;
    std::size_t row = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto cells = split(line);
        if (!header_seen) {
            header_seen = true;
            if (cells.size() != kColumns.size()) bad(row, 0, "header must be " + std::string(kObservationHeader));
            for (std::size_t c = 0; c < kColumns.size(); ++c) {
                if (cells[c] != kColumns[c]) bad(row, c + 1, "expected header '" + std::string(kColumns[c]) + "', got '" + cells[c] + "'");
            }
            continue;
        }
        if (cells.size() != kColumns.size()) {
            bad(row, 0, "expected " + std::to_string(kColumns.size()) + " columns, got " + std::to_string(cells.size()));
        }
        std::array<double, 6> v{};
        for (std::size_t c = 0; c < kColumns.size(); ++c) {
            const char* begin = cells[c].c_str();
            char* end = nullptr;
            errno = 0;
            v[c] = std::strtod(begin, &end);
            if (cells[c].empty() || *end != '\0' || errno == ERANGE) bad(row, c + 1, "not a number: '" + cells[c] + "'");
        }
        const DesignParams design{v[0], v[1], v[2], v[3]};
        try {
            out.push_back(evaluation_from_metrics(design, v[4], v[5]));
        } catch (const Error& e) {
            bad(row, 0, e.what());
        }
    }
    return out;
}

std::string write_observations_csv(const std::vector<EvaluationResult>& evaluations) {
    std::ostringstream os;
    os.precision(17);
    os << kObservationHeader << '\n';
    for (const auto& e : evaluations) {
        os << e.design.D << ',' << e.design.k << ',' << e.design.G << ',' << e.design.A << ',' << e.mean_time_ms << ','
           << e.mean_error_cm << '\n';
    }
    return os.str();
}

}  // namespace hmobo
