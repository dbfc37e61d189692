#ifndef BDARMA_CSV_HPP
#define BDARMA_CSV_HPP

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bdarma/errors.hpp"
#include "bdarma/model.hpp"

namespace bdarma {

// Shortest-exact decimal form: 17 significant digits round-trip for doubles.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace dates {

// Days since 1970-01-01 (Howard Hinnant's civil-days algorithm).
inline long days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

inline void civil_from_days(long z, int& y, int& m, int& d) {
    z += 719468;
    const long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long yy = static_cast<long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

inline long parse_iso(const std::string& s) {
    int y, m, d;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-' ||
        std::sscanf(s.c_str(), "%4d-%2d-%2d", &y, &m, &d) != 3 || m < 1 || m > 12 || d < 1 ||
        d > 31)
        throw data_error("cannot parse ISO-8601 date: " + s);
    return days_from_civil(y, m, d);
}

inline std::string format_iso(long days) {
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
    return buf;
}

// Daily labels starting at an ISO date.
inline std::vector<std::string> daily_sequence(const std::string& start, int n) {
    const long d0 = parse_iso(start);
    std::vector<std::string> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(format_iso(d0 + i));
    return out;
}

} // namespace dates

namespace csv_detail {

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        cell.erase(0, cell.find_first_not_of(" \t\r"));
        cell.erase(cell.find_last_not_of(" \t\r") + 1);
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

} // namespace csv_detail

// Layout: header `date,component_1,...,component_J`, one ISO-dated row per
// time point.
inline void write_series_csv(const std::string& path, const CompositionalSeries& series,
                             const std::string& start_date = "2000-01-01") {
    std::ofstream out(path);
    if (!out) throw data_error("cannot open " + path + " for writing");
    const int J = series.J();
    out << "date";
    for (int j = 1; j <= J; ++j) out << ",component_" << j;
    out << "\n";
    const std::vector<std::string> dates =
        series.dates().empty() ? dates::daily_sequence(start_date, series.T()) : series.dates();
    for (int t = 0; t < series.T(); ++t) {
        out << dates[t];
        for (int j = 0; j < J; ++j) out << "," << fmt17(series.values()(t, j));
        out << "\n";
    }
    if (!out) throw data_error("failed while writing " + path);
}

inline CompositionalSeries read_series_csv(const std::string& path,
                                           ZeroPolicy policy = ZeroPolicy::Reject) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw data_error(path + " is empty");
    const auto header = csv_detail::split_line(line);
    if (header.size() < 3 || header[0] != "date")
        throw data_error(path + ": expected header date,component_1,...");
    const int J = static_cast<int>(header.size()) - 1;
    for (int j = 0; j < J; ++j)
        if (header[j + 1] != "component_" + std::to_string(j + 1))
            throw data_error(path + ": unexpected column name " + header[j + 1]);

    std::vector<std::string> dates;
    std::vector<double> flat;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto cells = csv_detail::split_line(line);
        if (static_cast<int>(cells.size()) != J + 1)
            throw data_error(path + " row " + std::to_string(rows + 2) + ": expected " +
                             std::to_string(J + 1) + " cells, found " +
                             std::to_string(cells.size()));
        dates::parse_iso(cells[0]);
        dates.push_back(cells[0]);
        for (int j = 0; j < J; ++j) {
            try {
                flat.push_back(std::stod(cells[j + 1]));
            } catch (const std::exception&) {
                throw data_error(path + " row " + std::to_string(rows + 2) +
                                 ": cannot parse value " + cells[j + 1]);
            }
        }
        ++rows;
    }
    if (rows == 0) throw data_error(path + " has no data rows");
    MatrixXd values(rows, J);
    for (int t = 0; t < rows; ++t)
        for (int j = 0; j < J; ++j) values(t, j) = flat[t * J + j];
    return CompositionalSeries::from_matrix(std::move(values), policy, std::move(dates));
}

// Minimal writer for rectangular result tables.
inline void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                            const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot open " + path + " for writing");
    for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
    if (!out) throw data_error("failed while writing " + path);
}

} // namespace bdarma

#endif
