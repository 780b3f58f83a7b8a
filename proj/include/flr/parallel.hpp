#pragma once

// Data-parallel kernels used by the operator build and the Monte Carlo
// harness. Every kernel has a serial reference path; both paths evaluate each
// output entry with the same operation order, so results are bitwise equal.

#include <cstddef>
#include <exception>
#include <span>
#include <vector>

#include "flr/curve.hpp"
#include "flr/linalg.hpp"

namespace flr::par {

enum class Exec { serial, parallel };

/// ||x_i - x0|| for every input.
std::vector<double> distances(std::span<const Curve> xs, const Curve& x0, Exec exec);

/// G(i, j) = scale * sqrt_w[i] * sqrt_w[j] * <z_i, z_j>.
linalg::Matrix weighted_gram(std::span<const Curve> zs, std::span<const double> sqrt_w,
                             double scale, Exec exec);

/// M(k, l) = scale * sum_i w[i] * z_i[k] * z_i[l]  (d x d).
linalg::Matrix weighted_second_moment(std::span<const Curve> zs, std::span<const double> w,
                                      double scale, Exec exec);

/// out[j] = sum_i coeffs(i, cols[j]) * sqrt_w[i] * z_i.
std::vector<Curve> combine_columns(std::span<const Curve> zs, std::span<const double> sqrt_w,
                                   const linalg::Matrix& coeffs, std::span<const std::size_t> cols,
                                   Exec exec);

int max_threads();

/// Runs body(i) for i in [0, count). Exceptions are captured per index and
/// the one with the smallest index is rethrown after the loop.
template <class Body>
void for_each_index(std::size_t count, Exec exec, Body&& body) {
  std::vector<std::exception_ptr> errors(count);
  const auto n = static_cast<long long>(count);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < n; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  } else {
    for (long long i = 0; i < n; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace flr::par
