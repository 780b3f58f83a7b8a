#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "flr/curve.hpp"
#include "flr/rng.hpp"

namespace flr {

enum class Decay {
  polynomial,   ///< lambda_k = k^{-2r}, r > 1/2
  exponential,  ///< lambda_k = exp(-2ck), c > 0
};

/// Centred Gaussian element X = sum_k sqrt(lambda_k) eta_k e_k, truncated to d terms.
struct KLSpec {
  Decay decay = Decay::exponential;
  double rate = 1.0;  ///< r or c
  std::size_t dim = 50;
  std::uint64_t seed = 1;

  void validate() const;
  /// lambda_k for k = 1..d.
  double eigenvalue(std::size_t k) const;
  std::vector<double> eigenvalues() const;
};

/// m(x) = a0 + <theta, x> + sum_k q_k x_k^2 with noise N(0, sigma^2).
struct RegressionSpec {
  double a0 = 0.0;
  Curve theta;
  std::vector<double> quad_diag;
  double noise_sigma = 0.0;

  void validate(std::size_t dim) const;
};

/// Curves from spec.seed; curve i draws from stream i.
std::vector<Curve> sample_kl(const KLSpec& spec, std::size_t n);
std::vector<Curve> sample_kl(const KLSpec& spec, std::size_t n, std::uint64_t seed);

double eval_m(const RegressionSpec& spec, const Curve& x);

/// y_i = m(X_i) + eps_i; inputs and noise come from separate streams of seed.
FunctionalSample gen_dataset(const KLSpec& kl, const RegressionSpec& reg, std::size_t n,
                             std::uint64_t seed);

/// sum_k <x0, e_k>^2 / lambda_k^2.
double a4_diagnostic(const Curve& x0, const KLSpec& kl);

/// x0 with <x0, e_k> = scale * lambda_k^{3/2}, which keeps the sum above finite.
Curve smooth_decay_point(const KLSpec& kl, double scale);

}  // namespace flr
