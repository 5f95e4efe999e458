#pragma once

// Curve tables on disk: a header row, an optional leading `t` column that must
// be equispaced, then one column per curve. Comma separated, '.' decimals.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace shiftest {

struct CurveTable {
    std::vector<std::string> names;
    /// The `t` column when present.
    std::optional<std::vector<double>> time;
    /// One row per curve, one column per sample.
    Eigen::MatrixXd values;

    int curves() const { return static_cast<int>(values.rows()); }
    int length() const { return static_cast<int>(values.cols()); }
    /// n * dt when a time column is present.
    std::optional<double> inferred_period() const;
};

/// Throws InputError with a line number on malformed input.
CurveTable parse_curve_table(std::istream& in);
CurveTable read_curve_table(const std::filesystem::path& path);

/// Writes `t` plus one column per row of `values`.
void write_curve_table(const std::filesystem::path& path, const std::vector<std::string>& names,
                       const std::vector<double>& time, const Eigen::MatrixXd& values);

/// Shortest representation that reads back to the same double.
std::string format_double(double v);

}  // namespace shiftest
