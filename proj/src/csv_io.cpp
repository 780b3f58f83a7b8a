#include "flr/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "flr/errors.hpp"

namespace flr::io {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_real(const std::string& text, double& value) {
  if (text.empty()) return false;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc() && ptr == end;
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
  return in;
}

}  // namespace

Table read_table(std::istream& in, Header header) {
  Table table;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = split_fields(t);
    if (first) {
      first = false;
      bool numeric = true;
      double scratch = 0.0;
      for (const auto& f : fields) numeric = numeric && parse_real(f, scratch);
      const bool is_header =
          header == Header::present || (header == Header::detect && !numeric);
      if (is_header) {
        table.header = std::move(fields);
        continue;
      }
    }
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (!parse_real(fields[j], row[j])) {
        throw InputError(
            fmt::format("line {}: field {} ('{}') is not a number", line_no, j + 1, fields[j]));
      }
    }
    if (!table.rows.empty() && row.size() != table.rows.front().size()) {
      throw InputError(fmt::format("line {}: expected {} fields, found {}", line_no,
                                   table.rows.front().size(), row.size()));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table read_table(const std::filesystem::path& path, Header header) {
  auto in = open(path);
  return read_table(in, header);
}

FunctionalSample read_dataset(std::istream& in, Header header) {
  Table t = read_table(in, header);
  if (t.rows.empty()) throw InputError("dataset has no rows");
  if (t.rows.front().size() < 2) throw InputError("dataset needs at least c_1 and y columns");
  std::vector<Curve> xs;
  std::vector<double> ys;
  xs.reserve(t.rows.size());
  ys.reserve(t.rows.size());
  for (auto& row : t.rows) {
    ys.push_back(row.back());
    row.pop_back();
    xs.emplace_back(std::move(row));
  }
  return FunctionalSample(std::move(xs), std::move(ys));
}

FunctionalSample read_dataset(const std::filesystem::path& path, Header header) {
  auto in = open(path);
  return read_dataset(in, header);
}

void write_dataset(std::ostream& out, const FunctionalSample& sample, bool with_header) {
  const std::size_t d = sample.dim();
  if (with_header) {
    for (std::size_t k = 0; k < d; ++k) out << "c_" << (k + 1) << ',';
    out << "y\n";
  }
  for (std::size_t i = 0; i < sample.size(); ++i) {
    for (double c : sample.input(i).coeffs()) out << format_real(c) << ',';
    out << format_real(sample.output(i)) << '\n';
  }
}

Curve read_curve(const std::filesystem::path& path) {
  Table t = read_table(path, Header::detect);
  std::vector<double> coeffs;
  for (const auto& row : t.rows) coeffs.insert(coeffs.end(), row.begin(), row.end());
  if (t.rows.size() > 1 && t.rows.front().size() > 1) {
    throw InputError(fmt::format("'{}': a curve must be a single row or a single column",
                                 path.string()));
  }
  if (coeffs.empty()) throw InputError(fmt::format("'{}' holds no coefficients", path.string()));
  return Curve(std::move(coeffs));
}

void write_curve(std::ostream& out, const Curve& x) {
  for (std::size_t k = 0; k < x.dim(); ++k) out << (k ? "," : "") << format_real(x[k]);
  out << '\n';
}

std::vector<double> read_column(const std::filesystem::path& path) {
  Table t = read_table(path, Header::detect);
  std::vector<double> values;
  values.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    if (row.size() != 1) throw InputError("expected a single-column file");
    values.push_back(row.front());
  }
  return values;
}

void write_column(std::ostream& out, const std::vector<double>& values, const std::string& name) {
  out << name << '\n';
  for (double v : values) out << format_real(v) << '\n';
}

std::string format_real(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace flr::io
