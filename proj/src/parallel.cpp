#include "flr/parallel.hpp"

#include <cmath>

#include <omp.h>

#include "flr/errors.hpp"

namespace flr::par {

namespace {

double distance(const Curve& x, const Curve& x0) {
  if (x.dim() != x0.dim()) throw DimensionMismatch(x.dim(), x0.dim());
  double acc = 0.0;
  for (std::size_t k = 0; k < x.dim(); ++k) {
    const double diff = x[k] - x0[k];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

double dot(const Curve& a, const Curve& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.dim(); ++k) acc += a[k] * b[k];
  return acc;
}

}  // namespace

int max_threads() { return omp_get_max_threads(); }

std::vector<double> distances(std::span<const Curve> xs, const Curve& x0, Exec exec) {
  for (const Curve& x : xs)
    if (x.dim() != x0.dim()) throw DimensionMismatch(x.dim(), x0.dim());
  std::vector<double> out(xs.size());
  const auto n = static_cast<long long>(xs.size());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) out[i] = distance(xs[i], x0);
  } else {
    for (long long i = 0; i < n; ++i) out[i] = distance(xs[i], x0);
  }
  return out;
}

linalg::Matrix weighted_gram(std::span<const Curve> zs, std::span<const double> sqrt_w,
                             double scale, Exec exec) {
  const std::size_t m = zs.size();
  if (sqrt_w.size() != m) throw DimensionMismatch(m, sqrt_w.size());
  linalg::Matrix g(m, m);
  auto row = [&](std::size_t i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = scale * sqrt_w[i] * sqrt_w[j] * dot(zs[i], zs[j]);
      g(i, j) = v;
      g(j, i) = v;
    }
  };
  const auto mm = static_cast<long long>(m);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (long long i = 0; i < mm; ++i) row(static_cast<std::size_t>(i));
  } else {
    for (long long i = 0; i < mm; ++i) row(static_cast<std::size_t>(i));
  }
  return g;
}

linalg::Matrix weighted_second_moment(std::span<const Curve> zs, std::span<const double> w,
                                      double scale, Exec exec) {
  if (zs.empty()) throw InputError("no vectors to accumulate");
  if (w.size() != zs.size()) throw DimensionMismatch(zs.size(), w.size());
  const std::size_t d = zs.front().dim();
  linalg::Matrix out(d, d);
  auto row = [&](std::size_t k) {
    for (std::size_t l = 0; l <= k; ++l) {
      double acc = 0.0;
      for (std::size_t i = 0; i < zs.size(); ++i) acc += w[i] * zs[i][k] * zs[i][l];
      out(k, l) = scale * acc;
      out(l, k) = scale * acc;
    }
  };
  const auto dd = static_cast<long long>(d);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long long k = 0; k < dd; ++k) row(static_cast<std::size_t>(k));
  } else {
    for (long long k = 0; k < dd; ++k) row(static_cast<std::size_t>(k));
  }
  return out;
}

std::vector<Curve> combine_columns(std::span<const Curve> zs, std::span<const double> sqrt_w,
                                   const linalg::Matrix& coeffs, std::span<const std::size_t> cols,
                                   Exec exec) {
  if (zs.empty()) return {};
  const std::size_t d = zs.front().dim();
  std::vector<Curve> out(cols.size(), Curve(d));
  auto column = [&](std::size_t j) {
    auto dst = out[j].mutable_coeffs();
    for (std::size_t i = 0; i < zs.size(); ++i) {
      const double c = coeffs(i, cols[j]) * sqrt_w[i];
      for (std::size_t k = 0; k < d; ++k) dst[k] += c * zs[i][k];
    }
  };
  const auto nc = static_cast<long long>(cols.size());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (long long j = 0; j < nc; ++j) column(static_cast<std::size_t>(j));
  } else {
    for (long long j = 0; j < nc; ++j) column(static_cast<std::size_t>(j));
  }
  return out;
}

}  // namespace flr::par
