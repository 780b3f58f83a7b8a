#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "flr/curve.hpp"
#include "flr/kernel.hpp"
#include "flr/local_operator.hpp"
#include "flr/regularized_inverse.hpp"

namespace flr {

struct FitReport {
  double estimate = 0.0;
  /// omega_i for every observation; zero wherever K_i = 0. May be negative.
  std::vector<double> weights;
  double weight_sum = 0.0;
  /// sum_i K_i
  double kernel_sum = 0.0;
  std::optional<Curve> gradient;
  std::size_t active_count = 0;
  /// Empty for the Nadaraya-Watson fit.
  std::optional<RegScheme> scheme;
  double h = 0.0;
  std::vector<std::string> warnings;
};

struct FitOptions {
  FactorOptions factor;
  bool compute_gradient = false;
};

/// Local linear estimate of m(x0):
///   m = sum_i y_i w_i / sum_i w_i,  w_i = K_i (1 - <Z_i, Gamma^dagger zbar>).
/// Throws EmptyNeighborhood, or DegenerateDenominator when
/// |sum w_i| <= 1e-10 max(1, sum K_i).
FitReport local_linear_fit(const FunctionalSample& sample, const Curve& x0, const Kernel& k,
                           double h, const RegScheme& scheme, const FitOptions& opts = {});

/// Same, reusing a factorisation built on this sample.
FitReport local_linear_fit(const FunctionalSample& sample, const LocalFactorization& f,
                           const RegScheme& scheme, bool compute_gradient = false);

/// Kernel-weighted mean sum y_i K_i / sum K_i.
FitReport nadaraya_watson_fit(const FunctionalSample& sample, const Curve& x0, const Kernel& k,
                              double h);
FitReport nadaraya_watson_fit(const FunctionalSample& sample, const LocalFactorization& f);

/// Weights for an arbitrary direction g in place of Gamma^dagger zbar;
/// g = 0 gives the Nadaraya-Watson weights.
FitReport fit_with_direction(const FunctionalSample& sample, const LocalFactorization& f,
                             const Curve& direction);

/// phi* = Gamma^dagger((1/n) sum_i y_i K_i Z_i - m zbar).
Curve gradient_estimate(const FunctionalSample& sample, const LocalFactorization& f,
                        const RegScheme& scheme, double estimate);

struct ProgramSolution {
  double intercept = 0.0;  ///< a*
  Curve gradient;          ///< phi*, in the range of the local operator
};

/// Minimises sum_i (y_i - a - <phi, Z_i>)^2 K_i + n alpha ||phi||^2 by
/// solving the normal equations in the basis {1} u {u_j}. The projections
/// <Z_i, u_j> are taken from the data directly. alpha = 0 is accepted; a
/// singular system then raises NumericalSingularity.
ProgramSolution direct_program_solve(const FunctionalSample& sample, const Curve& x0,
                                     const Kernel& k, double h, double alpha,
                                     const FactorOptions& opts = {});

}  // namespace flr
