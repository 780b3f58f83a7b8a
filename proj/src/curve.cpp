#include "flr/curve.hpp"

#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "flr/errors.hpp"

namespace flr {

namespace {

void require_finite(std::span<const double> values) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k])) {
      throw InputError(fmt::format("curve coefficient {} is not finite", k));
    }
  }
}

void require_same_dim(const Curve& a, const Curve& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim());
}

}  // namespace

DimensionMismatch::DimensionMismatch(std::size_t lhs, std::size_t rhs)
    : InputError(fmt::format("dimension mismatch: {} vs {}", lhs, rhs)), lhs_(lhs), rhs_(rhs) {}

EmptyNeighborhood::EmptyNeighborhood(double h, double nearest)
    : NumericalError(fmt::format(
          "empty neighbourhood: no observation within h = {:.6g}; nearest distance is {:.6g}", h,
          nearest)),
      nearest_(nearest) {}

DegenerateDenominator::DegenerateDenominator(double weight_sum)
    : NumericalError(fmt::format(
          "degenerate denominator: sum of weights = {:.6g}; try a larger alpha or bandwidth",
          weight_sum)),
      weight_sum_(weight_sum) {}

NonConvergence::NonConvergence(int sweeps, double off_diagonal)
    : NumericalError(fmt::format("Jacobi eigensolver did not converge after {} sweeps "
                                 "(off-diagonal norm {:.3e})",
                                 sweeps, off_diagonal)),
      sweeps_(sweeps) {}

NoRoot::NoRoot(double lo, double f_lo, double hi, double f_hi)
    : NumericalError(fmt::format("no sign change on [{:.6g}, {:.6g}]: f = {:.6g}, {:.6g}", lo, hi,
                                 f_lo, f_hi)) {}

Curve::Curve(std::size_t dim) : coeffs_(dim, 0.0) {}

Curve::Curve(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { require_finite(coeffs_); }

Curve::Curve(std::initializer_list<double> coeffs) : coeffs_(coeffs) { require_finite(coeffs_); }

Curve& Curve::operator+=(const Curve& rhs) {
  require_same_dim(*this, rhs);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += rhs.coeffs_[k];
  return *this;
}

Curve& Curve::operator-=(const Curve& rhs) {
  require_same_dim(*this, rhs);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= rhs.coeffs_[k];
  return *this;
}

Curve& Curve::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

Curve operator+(Curve lhs, const Curve& rhs) { return lhs += rhs; }
Curve operator-(Curve lhs, const Curve& rhs) { return lhs -= rhs; }
Curve operator*(double s, Curve rhs) { return rhs *= s; }

double inner(const Curve& a, const Curve& b) {
  require_same_dim(a, b);
  double acc = 0.0;
  for (std::size_t k = 0; k < a.dim(); ++k) acc += a[k] * b[k];
  return acc;
}

double squared_norm(const Curve& a) {
  double acc = 0.0;
  for (double c : a.coeffs()) acc += c * c;
  return acc;
}

double norm(const Curve& a) { return std::sqrt(squared_norm(a)); }

Curve axpy(double alpha, const Curve& a, const Curve& b) {
  require_same_dim(a, b);
  Curve out = b;
  auto dst = out.mutable_coeffs();
  for (std::size_t k = 0; k < a.dim(); ++k) dst[k] += alpha * a[k];
  return out;
}

FunctionalSample::FunctionalSample(std::vector<Curve> inputs, std::vector<double> outputs)
    : inputs_(std::move(inputs)), outputs_(std::move(outputs)) {
  if (inputs_.empty()) throw InputError("sample must contain at least one observation");
  if (inputs_.size() != outputs_.size()) throw DimensionMismatch(inputs_.size(), outputs_.size());
  const std::size_t d = inputs_.front().dim();
  for (const Curve& x : inputs_) {
    if (x.dim() != d) throw DimensionMismatch(d, x.dim());
  }
  for (std::size_t i = 0; i < outputs_.size(); ++i) {
    if (!std::isfinite(outputs_[i])) {
      throw InputError(fmt::format("response {} is not finite", i));
    }
  }
}

FunctionalSample FunctionalSample::without(std::size_t i) const {
  if (size() < 2) throw InputError("cannot drop the only observation of a sample");
  std::vector<Curve> xs;
  std::vector<double> ys;
  xs.reserve(size() - 1);
  ys.reserve(size() - 1);
  for (std::size_t j = 0; j < size(); ++j) {
    if (j == i) continue;
    xs.push_back(inputs_[j]);
    ys.push_back(outputs_[j]);
  }
  return FunctionalSample(std::move(xs), std::move(ys));
}

FunctionalSample FunctionalSample::with_outputs(std::vector<double> outputs) const {
  return FunctionalSample(inputs_, std::move(outputs));
}

}  // namespace flr
