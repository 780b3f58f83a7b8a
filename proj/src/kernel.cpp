#include "flr/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "flr/csv_io.hpp"
#include "flr/errors.hpp"

namespace flr {

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::naive:
      return "naive";
    case KernelFamily::linear_downweight:
      return "linear_downweight";
    case KernelFamily::custom_table:
      return "custom_table";
  }
  return "unknown";
}

Kernel::Kernel(KernelFamily family, std::vector<double> knots, std::vector<double> values)
    : family_(family), knots_(std::move(knots)), values_(std::move(values)) {
  if (family_ == KernelFamily::custom_table) {
    value_at_one_ = values_.back();
    sup_ = *std::max_element(values_.begin(), values_.end());
  } else if (family_ == KernelFamily::naive) {
    value_at_one_ = 1.0;
    sup_ = 1.0;
  } else {
    value_at_one_ = 2.0 / 3.0;
    sup_ = 4.0 / 3.0;
  }
}

Kernel Kernel::naive() { return Kernel(KernelFamily::naive, {}, {}); }

Kernel Kernel::linear_downweight() { return Kernel(KernelFamily::linear_downweight, {}, {}); }

Kernel Kernel::from_table(std::vector<double> knots, std::vector<double> values) {
  if (knots.size() != values.size()) throw DimensionMismatch(knots.size(), values.size());
  if (knots.size() < 2) throw InputError("kernel table needs at least two knots");
  if (knots.front() != 0.0 || knots.back() != 1.0) {
    throw InputError("kernel table must span exactly [0, 1]");
  }
  for (std::size_t j = 0; j < knots.size(); ++j) {
    if (!std::isfinite(values[j]) || values[j] < 0.0) {
      throw InputError(fmt::format("kernel table value at s = {} must be finite and >= 0",
                                   knots[j]));
    }
    if (j > 0 && !(knots[j] > knots[j - 1])) {
      throw InputError("kernel table knots must be strictly increasing");
    }
  }
  // Trapezoid is exact for the piecewise-linear interpolant.
  double mass = 0.0;
  for (std::size_t j = 1; j < knots.size(); ++j) {
    mass += 0.5 * (values[j] + values[j - 1]) * (knots[j] - knots[j - 1]);
  }
  if (!(mass > 0.0)) throw InputError("kernel table has zero mass");
  for (double& v : values) v /= mass;
  return Kernel(KernelFamily::custom_table, std::move(knots), std::move(values));
}

Kernel Kernel::from_csv(const std::filesystem::path& path) {
  io::Table t = io::read_table(path, io::Header::detect);
  std::vector<double> s, k;
  for (const auto& row : t.rows) {
    if (row.size() != 2) throw InputError("kernel table must have two columns (s, K(s))");
    s.push_back(row[0]);
    k.push_back(row[1]);
  }
  return from_table(std::move(s), std::move(k));
}

Kernel Kernel::parse(const std::string& name) {
  if (name == "naive") return naive();
  if (name == "linear_downweight" || name == "linear") return linear_downweight();
  return from_csv(name);
}

std::string Kernel::name() const { return to_string(family_); }

double Kernel::eval(double s) const {
  if (!(s >= 0.0)) throw DomainError(fmt::format("kernel argument must be >= 0, got {}", s));
  if (s > 1.0) return 0.0;
  switch (family_) {
    case KernelFamily::naive:
      return 1.0;
    case KernelFamily::linear_downweight:
      return (4.0 - 2.0 * s) / 3.0;
    case KernelFamily::custom_table: {
      auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
      if (it == knots_.end()) return values_.back();
      const std::size_t j = static_cast<std::size_t>(it - knots_.begin());
      const double t = (s - knots_[j - 1]) / (knots_[j] - knots_[j - 1]);
      return values_[j - 1] + t * (values_[j] - values_[j - 1]);
    }
  }
  return 0.0;
}

double integrate(const Kernel& k, int intervals) {
  if (intervals % 2) ++intervals;
  const double step = 1.0 / intervals;
  double acc = k(0.0) + k(1.0);
  for (int j = 1; j < intervals; ++j) acc += (j % 2 ? 4.0 : 2.0) * k(j * step);
  return acc * step / 3.0;
}

A1Report check_a1(const Kernel& k) {
  A1Report r;
  r.integral = integrate(k);
  r.bounded = std::isfinite(k.sup());
  r.positive_at_one = k.value_at_one() > 0.0;

  // Total variation on a fine grid equals the L1 norm of K' for the
  // piecewise-smooth kernels handled here.
  constexpr int grid = 100000;
  double tv = 0.0;
  double prev = k(0.0);
  for (int j = 1; j <= grid; ++j) {
    const double cur = k(static_cast<double>(j) / grid);
    tv += std::abs(cur - prev);
    prev = cur;
  }
  r.derivative_l1 = tv;
  r.derivative_integrable = std::isfinite(tv);
  r.derivative_identically_zero = tv == 0.0;
  r.naive_exception = k.family() == KernelFamily::naive;
  return r;
}

}  // namespace flr
