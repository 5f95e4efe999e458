#include "shiftest/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "shiftest/error.hpp"

namespace shiftest {
namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_number(const std::string& text, int line, std::size_t column) {
    const std::string s = trim(text);
    double v = 0.0;
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(v))
        throw InputError(fmt::format("line {}, column {}: '{}' is not a finite number", line,
                                     column + 1, s));
    return v;
}

}  // namespace

std::optional<double> CurveTable::inferred_period() const {
    if (!time || time->size() < 2) return std::nullopt;
    return ((*time)[1] - (*time)[0]) * static_cast<double>(time->size());
}

CurveTable parse_curve_table(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InputError("input is empty");
    std::vector<std::string> header = split(line);
    for (auto& h : header) h = trim(h);
    if (header.empty()) throw InputError("header row is empty");

    const bool has_time = header.front() == "t";
    CurveTable table;
    table.names.assign(header.begin() + (has_time ? 1 : 0), header.end());
    if (table.names.empty()) throw InputError("no curve columns in header");

    std::vector<double> time;
    std::vector<std::vector<double>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        if (fields.size() != header.size())
            throw InputError(fmt::format("line {}: expected {} fields, found {}", line_no,
                                         header.size(), fields.size()));
        std::vector<double> row;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const double v = parse_number(fields[c], line_no, c);
            if (has_time && c == 0)
                time.push_back(v);
            else
                row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError("no data rows");

    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto J = static_cast<Eigen::Index>(table.names.size());
    table.values.resize(J, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < J; ++j) table.values(j, i) = rows[i][j];

    if (has_time) {
        if (time.size() >= 2) {
            const double dt = time[1] - time[0];
            if (!(dt > 0.0)) throw InputError("t column must be strictly increasing");
            for (std::size_t i = 0; i < time.size(); ++i) {
                const double expected = time[0] + static_cast<double>(i) * dt;
                if (std::abs(time[i] - expected) > 1e-6 * dt)
                    throw InputError(fmt::format("t column is not equispaced at row {}", i + 1));
            }
        }
        table.time = std::move(time);
    }
    return table;
}

CurveTable read_curve_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
    return parse_curve_table(in);
}

std::string format_double(double v) {
    if (v == 0.0) return "0";
    return fmt::format("{}", v);
}

void write_curve_table(const std::filesystem::path& path, const std::vector<std::string>& names,
                       const std::vector<double>& time, const Eigen::MatrixXd& values) {
    std::ofstream out(path);
    if (!out) throw InputError(fmt::format("cannot write {}", path.string()));
    out << "t";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (Eigen::Index i = 0; i < values.cols(); ++i) {
        out << format_double(time[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < values.rows(); ++j) out << ',' << format_double(values(j, i));
        out << '\n';
    }
}

}  // namespace shiftest
