#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "flr/curve.hpp"

namespace flr::io {

enum class Header { absent, present, detect };

/// Rows of decimal fields. Blank lines and lines starting with '#' are skipped.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table read_table(std::istream& in, Header header);
Table read_table(const std::filesystem::path& path, Header header);

/// Dataset layout: columns c_1..c_d, y.
FunctionalSample read_dataset(const std::filesystem::path& path, Header header = Header::detect);
FunctionalSample read_dataset(std::istream& in, Header header = Header::detect);
void write_dataset(std::ostream& out, const FunctionalSample& sample, bool with_header = true);

/// A single curve stored either as one row or as one column.
Curve read_curve(const std::filesystem::path& path);
void write_curve(std::ostream& out, const Curve& x);

/// Single-column list of reals (e.g. ||X_i - x0|| samples).
std::vector<double> read_column(const std::filesystem::path& path);
void write_column(std::ostream& out, const std::vector<double>& values, const std::string& name);

/// Shortest round-trip decimal text for a double.
std::string format_real(double v);

}  // namespace flr::io
