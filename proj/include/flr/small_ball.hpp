#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "flr/curve.hpp"
#include "flr/kernel.hpp"

namespace flr {

using RealFn = std::function<double(double)>;

enum class SbpKind {
  polynomial_exponential,  ///< C1 h^alpha exp(-C2 / h^beta)
  log_squared,             ///< C1 (log 1/h)^{-1/2} exp(-C2 (log h)^2)
};

struct SbpFamily {
  SbpKind kind = SbpKind::polynomial_exponential;
  double c1 = 1.0;
  double c2 = 1.0;
  double alpha = 0.0;  ///< polynomial exponent, polynomial_exponential only
  double beta = 1.0;   ///< polynomial_exponential only
  /// Constant in front of the auxiliary function rho.
  double rho_scale = 1.0;
};

/// F(h) for the family. Throws DomainError for h <= 0, or h >= 1 with log_squared.
double family_F(const SbpFamily& f, double h);
/// log F(h), finite where family_F would underflow.
double log_family_F(const SbpFamily& f, double h);

/// Auxiliary function: C s^{1+beta} or C s / |log s|, for s in (0, 1).
double rho(const SbpFamily& f, double s);

/// rho_scale for which F(s + x rho(s)) / F(s) tends to e^x: 1/(C2 beta) or
/// 1/(2 C2). Throws DomainError when C2 = 0.
double matched_rho_scale(const SbpFamily& f);

/// Sorted sample of ||X_i - x0||.
class EmpiricalF {
 public:
  explicit EmpiricalF(std::vector<double> norms);
  EmpiricalF(const FunctionalSample& sample, const Curve& x0);
  static EmpiricalF from_curves(const std::vector<Curve>& xs, const Curve& x0);

  /// #{i : ||X_i - x0|| <= h} / n.
  double operator()(double h) const;
  std::size_t size() const noexcept { return sorted_.size(); }
  const std::vector<double>& sorted_norms() const noexcept { return sorted_; }
  /// Smallest h with F(h) >= p.
  double quantile(double p) const;

 private:
  std::vector<double> sorted_;
};

double empirical_F(const EmpiricalF& e, double h);

struct GammaLimitRow {
  double s = 0.0;
  double x = 0.0;
  double ratio = 0.0;     ///< F(s + x rho(s)) / F(s)
  double expected = 0.0;  ///< e^x
  double relative_deviation = 0.0;
};

struct GammaLimitReport {
  std::vector<GammaLimitRow> rows;
  double smallest_s = 0.0;
  double max_relative_deviation = 0.0;  ///< over x, at the smallest s
};

/// Tabulates F(s + x rho(s)) / F(s) against e^x. F is passed as log F so
/// that very small probabilities do not underflow.
GammaLimitReport check_gamma_limit(const RealFn& log_F, const RealFn& rho_fn,
                                   const std::vector<double>& s_grid,
                                   const std::vector<double>& x_grid);

struct FamilyFitOptions {
  /// Fit C1 h^alpha only (C2 = 0).
  bool freeze_c2_zero = false;
  double quantile_lo = 0.05;
  double quantile_hi = 0.5;
  std::size_t levels = 19;
};

struct FamilyFit {
  SbpFamily family;
  double residual_norm = 0.0;
  std::size_t points = 0;
};

/// Least squares in log space on a fixed quantile grid: h_p is the empirical
/// p-quantile and F(h_p) = j/n. For polynomial_exponential beta is scanned
/// on a log grid with (log C1, alpha, C2 >= 0) solved linearly. Needs n >= 50.
FamilyFit fit_family(const EmpiricalF& e, SbpKind kind, const FamilyFitOptions& opts = {});

/// Plug-in v(h) = (1/n) sum_i K_i ||Z_i|| rho(||Z_i||).
double estimate_v(const FunctionalSample& sample, const Curve& x0, const Kernel& k, double h,
                  const RealFn& rho_fn);
double estimate_v(const std::vector<double>& norms, const Kernel& k, double h,
                  const RealFn& rho_fn);

/// mean(K_i ||Z_i||^2) / (K(1) F(h) h^2), which tends to one as h -> 0.
double local_moment_ratio(const EmpiricalF& e, const Kernel& k, double h);

}  // namespace flr
