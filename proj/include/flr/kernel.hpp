#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace flr {

enum class KernelFamily { naive, linear_downweight, custom_table };

std::string to_string(KernelFamily family);

/// One-sided kernel on [0, 1], zero beyond 1, integrating to one.
///
/// Built-ins are the naive kernel 1{0 <= s <= 1} and the linear
/// down-weighting kernel (4 - 2s)/3, which has K(1) = 2/3 > 0 and a constant
/// derivative. Custom kernels are sampled tables on [0, 1], linearly
/// interpolated and rescaled to unit integral.
class Kernel {
 public:
  static Kernel naive();
  static Kernel linear_downweight();
  /// Knots must be strictly increasing, start at 0 and end at 1; values >= 0.
  static Kernel from_table(std::vector<double> knots, std::vector<double> values);
  /// Two-column CSV (s, K(s)).
  static Kernel from_csv(const std::filesystem::path& path);
  /// "naive", "linear_downweight", or a path to a table.
  static Kernel parse(const std::string& name);

  KernelFamily family() const noexcept { return family_; }
  std::string name() const;

  /// K(s). Throws DomainError for s < 0.
  double eval(double s) const;
  double operator()(double s) const { return eval(s); }

  double value_at_one() const noexcept { return value_at_one_; }
  /// sup of K over [0, 1].
  double sup() const noexcept { return sup_; }

 private:
  Kernel(KernelFamily family, std::vector<double> knots, std::vector<double> values);

  KernelFamily family_;
  std::vector<double> knots_;
  std::vector<double> values_;
  double value_at_one_ = 0.0;
  double sup_ = 0.0;
};

/// Diagnostics for the one-sided kernel assumption (bounded, K(1) > 0,
/// integrable derivative). The naive kernel is reported as the accepted
/// exception: it has K' == 0 yet may be used.
struct A1Report {
  bool bounded = false;
  bool positive_at_one = false;
  bool derivative_integrable = false;
  bool derivative_identically_zero = false;
  bool naive_exception = false;
  double integral = 0.0;
  double derivative_l1 = 0.0;

  bool passes() const noexcept {
    return naive_exception || (bounded && positive_at_one && derivative_integrable);
  }
};

A1Report check_a1(const Kernel& k);

/// Composite Simpson rule for the kernel over [0, 1].
double integrate(const Kernel& k, int intervals = 20000);

}  // namespace flr
