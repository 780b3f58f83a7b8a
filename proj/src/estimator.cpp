#include "flr/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "flr/errors.hpp"
#include "flr/linalg.hpp"

namespace flr {

namespace {

double denominator_guard(double kernel_sum) { return 1e-10 * std::max(1.0, kernel_sum); }

}  // namespace

FitReport fit_with_direction(const FunctionalSample& sample, const LocalFactorization& f,
                             const Curve& direction) {
  if (f.sample_size() != sample.size()) {
    throw DimensionMismatch(f.sample_size(), sample.size());
  }
  FitReport r;
  r.h = f.bandwidth();
  r.active_count = f.active_count();
  r.kernel_sum = f.weight_total();
  r.weights.assign(sample.size(), 0.0);
  const bool zero_direction = squared_norm(direction) == 0.0;
  // Outputs are centred on the first active y so constants cancel exactly.
  std::optional<double> ref;
  double numerator = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double ki = f.weights()[i];
    if (ki == 0.0) continue;
    if (!ref) ref = sample.output(i);
    const double shrink =
        zero_direction ? 0.0 : inner(sample.input(i) - f.x0(), direction);
    const double w = ki * (1.0 - shrink);
    r.weights[i] = w;
    r.weight_sum += w;
    numerator += w * (sample.output(i) - *ref);
  }
  if (!(std::abs(r.weight_sum) > denominator_guard(r.kernel_sum))) {
    throw DegenerateDenominator(r.weight_sum);
  }
  r.estimate = *ref + numerator / r.weight_sum;
  return r;
}

FitReport local_linear_fit(const FunctionalSample& sample, const LocalFactorization& f,
                           const RegScheme& scheme, bool compute_gradient) {
  std::vector<std::string> warnings;
  const Curve direction = apply_dagger_on_range(f, scheme, f.zbar(), &warnings);
  FitReport r = fit_with_direction(sample, f, direction);
  r.scheme = scheme;
  r.warnings = std::move(warnings);
  if (compute_gradient) r.gradient = gradient_estimate(sample, f, scheme, r.estimate);
  return r;
}

FitReport local_linear_fit(const FunctionalSample& sample, const Curve& x0, const Kernel& k,
                           double h, const RegScheme& scheme, const FitOptions& opts) {
  const auto f = build_factorization(sample, x0, k, h, opts.factor);
  return local_linear_fit(sample, f, scheme, opts.compute_gradient);
}

FitReport nadaraya_watson_fit(const FunctionalSample& sample, const LocalFactorization& f) {
  return fit_with_direction(sample, f, Curve(f.dim()));
}

FitReport nadaraya_watson_fit(const FunctionalSample& sample, const Curve& x0, const Kernel& k,
                              double h) {
  auto weights = kernel_weights(sample, x0, k, h);
  FitReport r;
  r.h = h;
  r.weights = std::move(weights);
  std::optional<double> ref;
  double numerator = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (r.weights[i] == 0.0) continue;
    if (!ref) ref = sample.output(i);
    ++r.active_count;
    r.kernel_sum += r.weights[i];
    numerator += r.weights[i] * (sample.output(i) - *ref);
  }
  r.weight_sum = r.kernel_sum;
  r.estimate = *ref + numerator / r.weight_sum;
  return r;
}

Curve gradient_estimate(const FunctionalSample& sample, const LocalFactorization& f,
                        const RegScheme& scheme, double estimate) {
  const double inv_n = 1.0 / static_cast<double>(sample.size());
  Curve moment(f.dim());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double ki = f.weights()[i];
    if (ki == 0.0) continue;
    moment = axpy(ki * (sample.output(i) - estimate) * inv_n, sample.input(i) - f.x0(), moment);
  }
  return apply_dagger_on_range(f, scheme, moment);
}

ProgramSolution direct_program_solve(const FunctionalSample& sample, const Curve& x0,
                                     const Kernel& k, double h, double alpha,
                                     const FactorOptions& opts) {
  if (alpha < 0.0) throw DomainError("alpha must be >= 0");
  const auto f = build_factorization(sample, x0, k, h, opts);
  const std::size_t m = f.rank();
  const double n = static_cast<double>(sample.size());

  linalg::Matrix a(m + 1, m + 1);
  std::vector<double> rhs(m + 1, 0.0);
  std::vector<double> p(m);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double ki = f.weights()[i];
    if (ki == 0.0) continue;
    const Curve z = sample.input(i) - x0;
    for (std::size_t j = 0; j < m; ++j) p[j] = inner(z, f.eigenvectors()[j]);
    const double yi = sample.output(i);
    a(0, 0) += ki;
    rhs[0] += ki * yi;
    for (std::size_t j = 0; j < m; ++j) {
      a(0, j + 1) += ki * p[j];
      rhs[j + 1] += ki * yi * p[j];
      for (std::size_t l = 0; l <= j; ++l) a(j + 1, l + 1) += ki * p[j] * p[l];
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    a(j + 1, 0) = a(0, j + 1);
    a(j + 1, j + 1) += n * alpha;
    for (std::size_t l = 0; l < j; ++l) a(l + 1, j + 1) = a(j + 1, l + 1);
  }
  const auto sol = linalg::solve(std::move(a), std::move(rhs));

  ProgramSolution out;
  out.intercept = sol[0];
  out.gradient = Curve(f.dim());
  for (std::size_t j = 0; j < m; ++j) {
    out.gradient = axpy(sol[j + 1], f.eigenvectors()[j], out.gradient);
  }
  return out;
}

}  // namespace flr
