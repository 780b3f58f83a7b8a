#include "flr/local_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "flr/errors.hpp"
#include "flr/linalg.hpp"

namespace flr {

namespace {

void orient(Curve& u) {
  double big = 0.0;
  for (double c : u.coeffs()) big = std::max(big, std::abs(c));
  for (double c : u.coeffs()) {
    if (std::abs(c) > 1e-8 * big) {
      if (c < 0.0) u *= -1.0;
      return;
    }
  }
}

// One modified Gram-Schmidt pass; the vectors are already orthogonal up to
// rounding amplified by 1/mu_j.
void reorthonormalize(std::vector<Curve>& us) {
  for (std::size_t j = 0; j < us.size(); ++j) {
    for (std::size_t l = 0; l < j; ++l) us[j] = axpy(-inner(us[l], us[j]), us[l], us[j]);
    const double nrm = norm(us[j]);
    us[j] *= 1.0 / nrm;
  }
}

}  // namespace

std::vector<double> kernel_weights(const FunctionalSample& sample, const Curve& x0,
                                   const Kernel& k, double h, par::Exec exec) {
  if (!(h > 0.0)) throw DomainError("bandwidth h must be > 0");
  if (sample.dim() != x0.dim()) throw DimensionMismatch(sample.dim(), x0.dim());
  const auto dist = par::distances(sample.inputs(), x0, exec);
  std::vector<double> w(dist.size());
  bool any = false;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    w[i] = dist[i] > h ? 0.0 : k.eval(dist[i] / h);
    any = any || w[i] > 0.0;
  }
  if (!any) throw EmptyNeighborhood(h, *std::min_element(dist.begin(), dist.end()));
  return w;
}

LocalFactorization build_factorization(const FunctionalSample& sample, const Curve& x0,
                                       const Kernel& k, double h, const FactorOptions& opts) {
  return build_factorization(sample, x0, kernel_weights(sample, x0, k, h, opts.exec), h, opts);
}

LocalFactorization build_factorization(const FunctionalSample& sample, const Curve& x0,
                                       std::vector<double> weights, double h,
                                       const FactorOptions& opts) {
  if (weights.size() != sample.size()) throw DimensionMismatch(sample.size(), weights.size());
  if (sample.dim() != x0.dim()) throw DimensionMismatch(sample.dim(), x0.dim());
  const std::size_t n = sample.size();
  const std::size_t d = x0.dim();
  const double inv_n = 1.0 / static_cast<double>(n);

  LocalFactorization f;
  f.x0_ = x0;
  f.h_ = h;
  f.n_ = n;

  std::vector<Curve> zs;
  std::vector<double> w_active;
  f.zbar_ = Curve(d);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(weights[i] >= 0.0)) throw InputError("kernel weights must be >= 0");
    if (weights[i] == 0.0) continue;
    Curve z = sample.input(i) - x0;
    f.zbar_ = axpy(weights[i] * inv_n, z, f.zbar_);
    f.trace_ += weights[i] * squared_norm(z) * inv_n;
    f.weight_total_ += weights[i];
    zs.push_back(std::move(z));
    w_active.push_back(weights[i]);
  }
  f.active_count_ = zs.size();
  if (zs.empty()) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const Curve& x : sample.inputs()) nearest = std::min(nearest, norm(x - x0));
    throw EmptyNeighborhood(h, nearest);
  }
  f.weights_ = std::move(weights);

  const std::size_t m = zs.size();
  FactorRoute route = opts.route;
  if (route == FactorRoute::automatic) route = m <= d ? FactorRoute::gram : FactorRoute::covariance;
  f.route_ = route;

  std::vector<double> values;
  std::vector<Curve> vectors;
  if (route == FactorRoute::gram) {
    std::vector<double> sqrt_w(m);
    for (std::size_t i = 0; i < m; ++i) sqrt_w[i] = std::sqrt(w_active[i]);
    auto eig = linalg::jacobi_eigen(par::weighted_gram(zs, sqrt_w, inv_n, opts.exec));
    f.sweeps_ = eig.sweeps;
    const double top = *std::max_element(eig.values.begin(), eig.values.end());
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < m; ++j)
      if (top > 0.0 && eig.values[j] >= opts.rank_tolerance * top) keep.push_back(j);
    std::stable_sort(keep.begin(), keep.end(),
                     [&](std::size_t a, std::size_t b) { return eig.values[a] > eig.values[b]; });
    vectors = par::combine_columns(zs, sqrt_w, eig.vectors, keep, opts.exec);
    for (std::size_t j : keep) values.push_back(eig.values[j]);
    for (Curve& u : vectors) u *= 1.0 / norm(u);
    reorthonormalize(vectors);
  } else {
    auto eig =
        linalg::jacobi_eigen(par::weighted_second_moment(zs, w_active, inv_n, opts.exec));
    f.sweeps_ = eig.sweeps;
    const double top = *std::max_element(eig.values.begin(), eig.values.end());
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < d; ++j)
      if (top > 0.0 && eig.values[j] >= opts.rank_tolerance * top) keep.push_back(j);
    std::stable_sort(keep.begin(), keep.end(),
                     [&](std::size_t a, std::size_t b) { return eig.values[a] > eig.values[b]; });
    for (std::size_t j : keep) {
      values.push_back(eig.values[j]);
      std::vector<double> col(d);
      for (std::size_t r = 0; r < d; ++r) col[r] = eig.vectors(r, j);
      vectors.emplace_back(std::move(col));
    }
  }
  for (Curve& u : vectors) orient(u);
  f.eigenvalues_ = std::move(values);
  f.eigenvectors_ = std::move(vectors);
  return f;
}

std::vector<double> project(const LocalFactorization& f, const Curve& v) {
  if (v.dim() != f.dim()) throw DimensionMismatch(f.dim(), v.dim());
  std::vector<double> c(f.rank());
  for (std::size_t j = 0; j < f.rank(); ++j) c[j] = inner(v, f.eigenvectors()[j]);
  return c;
}

Curve apply_gamma(const LocalFactorization& f, const Curve& v) {
  const auto c = project(f, v);
  Curve out(f.dim());
  for (std::size_t j = 0; j < f.rank(); ++j)
    out = axpy(f.eigenvalues()[j] * c[j], f.eigenvectors()[j], out);
  return out;
}

NormCertificate operator_norm_certificate(const LocalFactorization& f, const Kernel& k) {
  NormCertificate c;
  c.mu1 = f.top_eigenvalue();
  c.bound = k.sup() * f.bandwidth() * f.bandwidth();
  c.pass = c.mu1 <= c.bound * (1.0 + 1e-12);
  return c;
}

}  // namespace flr
