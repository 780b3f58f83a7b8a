#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace flr {

/// Element of the separable Hilbert space, stored as its first d
/// coordinates in a fixed orthonormal basis. Coefficients are always finite.
class Curve {
 public:
  Curve() = default;
  explicit Curve(std::size_t dim);
  explicit Curve(std::vector<double> coeffs);
  Curve(std::initializer_list<double> coeffs);

  static Curve zeros(std::size_t dim) { return Curve(dim); }

  std::size_t dim() const noexcept { return coeffs_.size(); }
  double operator[](std::size_t k) const { return coeffs_[k]; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }

  /// Mutable access; callers are responsible for keeping values finite.
  std::span<double> mutable_coeffs() noexcept { return coeffs_; }

  Curve& operator+=(const Curve& rhs);
  Curve& operator-=(const Curve& rhs);
  Curve& operator*=(double s);

  friend bool operator==(const Curve&, const Curve&) = default;

 private:
  std::vector<double> coeffs_;
};

Curve operator+(Curve lhs, const Curve& rhs);
Curve operator-(Curve lhs, const Curve& rhs);
Curve operator*(double s, Curve rhs);

double inner(const Curve& a, const Curve& b);
double norm(const Curve& a);
double squared_norm(const Curve& a);
/// alpha * a + b
Curve axpy(double alpha, const Curve& a, const Curve& b);

/// Paired functional inputs and scalar responses (y_i, X_i), i = 1..n.
class FunctionalSample {
 public:
  FunctionalSample(std::vector<Curve> inputs, std::vector<double> outputs);

  std::size_t size() const noexcept { return inputs_.size(); }
  std::size_t dim() const noexcept { return inputs_.front().dim(); }
  const std::vector<Curve>& inputs() const noexcept { return inputs_; }
  const std::vector<double>& outputs() const noexcept { return outputs_; }
  const Curve& input(std::size_t i) const { return inputs_[i]; }
  double output(std::size_t i) const { return outputs_[i]; }

  /// Copy with observation i removed (leave-one-out).
  FunctionalSample without(std::size_t i) const;
  FunctionalSample with_outputs(std::vector<double> outputs) const;

 private:
  std::vector<Curve> inputs_;
  std::vector<double> outputs_;
};

}  // namespace flr
