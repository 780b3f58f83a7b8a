#include "flr/synthetic.hpp"

#include <cmath>

#include <fmt/format.h>

#include "flr/errors.hpp"
#include "flr/parallel.hpp"

namespace flr {

void KLSpec::validate() const {
  if (dim < 1) throw DomainError("KL dimension must be >= 1");
  if (decay == Decay::polynomial && !(rate > 0.5)) {
    throw DomainError(fmt::format("polynomial decay needs r > 1/2, got {}", rate));
  }
  if (decay == Decay::exponential && !(rate > 0.0)) {
    throw DomainError(fmt::format("exponential decay needs c > 0, got {}", rate));
  }
}

double KLSpec::eigenvalue(std::size_t k) const {
  const auto kk = static_cast<double>(k);
  return decay == Decay::polynomial ? std::pow(kk, -2.0 * rate) : std::exp(-2.0 * rate * kk);
}

std::vector<double> KLSpec::eigenvalues() const {
  std::vector<double> out(dim);
  for (std::size_t k = 0; k < dim; ++k) out[k] = eigenvalue(k + 1);
  return out;
}

void RegressionSpec::validate(std::size_t dim) const {
  if (theta.dim() != dim) throw DimensionMismatch(dim, theta.dim());
  if (quad_diag.size() != dim) throw DimensionMismatch(dim, quad_diag.size());
  for (double q : quad_diag)
    if (!(q >= 0.0) || !std::isfinite(q)) throw DomainError("quadratic weights must be >= 0");
  if (!(noise_sigma >= 0.0)) throw DomainError("noise sigma must be >= 0");
  if (!std::isfinite(a0)) throw DomainError("intercept must be finite");
}

std::vector<Curve> sample_kl(const KLSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  const auto sd = [&] {
    std::vector<double> s = spec.eigenvalues();
    for (double& v : s) v = std::sqrt(v);
    return s;
  }();
  const CounterRng root(seed);
  std::vector<Curve> out(n);
  par::for_each_index(n, par::Exec::parallel, [&](std::size_t i) {
    CounterRng rng = root.split(i);
    std::vector<double> c(spec.dim);
    for (std::size_t k = 0; k < spec.dim; ++k) c[k] = sd[k] * rng.normal();
    out[i] = Curve(std::move(c));
  });
  return out;
}

std::vector<Curve> sample_kl(const KLSpec& spec, std::size_t n) {
  return sample_kl(spec, n, spec.seed);
}

double eval_m(const RegressionSpec& spec, const Curve& x) {
  if (x.dim() != spec.theta.dim()) throw DimensionMismatch(spec.theta.dim(), x.dim());
  double out = spec.a0 + inner(spec.theta, x);
  for (std::size_t k = 0; k < x.dim(); ++k) out += spec.quad_diag[k] * x[k] * x[k];
  return out;
}

FunctionalSample gen_dataset(const KLSpec& kl, const RegressionSpec& reg, std::size_t n,
                             std::uint64_t seed) {
  if (n < 1) throw DomainError("dataset size must be >= 1");
  reg.validate(kl.dim);
  const CounterRng root(seed);
  auto xs = sample_kl(kl, n, root.split(0).seed());
  CounterRng noise = root.split(1);
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double eps = reg.noise_sigma > 0.0 ? reg.noise_sigma * noise.normal() : 0.0;
    ys[i] = eval_m(reg, xs[i]) + eps;
  }
  return FunctionalSample(std::move(xs), std::move(ys));
}

double a4_diagnostic(const Curve& x0, const KLSpec& kl) {
  if (x0.dim() != kl.dim) throw DimensionMismatch(kl.dim, x0.dim());
  double acc = 0.0;
  for (std::size_t k = 0; k < kl.dim; ++k) {
    const double lam = kl.eigenvalue(k + 1);
    acc += x0[k] * x0[k] / (lam * lam);
  }
  return acc;
}

Curve smooth_decay_point(const KLSpec& kl, double scale) {
  std::vector<double> c(kl.dim);
  for (std::size_t k = 0; k < kl.dim; ++k) c[k] = scale * std::pow(kl.eigenvalue(k + 1), 1.5);
  return Curve(std::move(c));
}

}  // namespace flr
