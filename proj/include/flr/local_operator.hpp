#pragma once

#include <cstddef>
#include <vector>

#include "flr/curve.hpp"
#include "flr/kernel.hpp"
#include "flr/parallel.hpp"

namespace flr {

/// K_i = K(||X_i - x0|| / h). Throws EmptyNeighborhood when every weight is 0.
std::vector<double> kernel_weights(const FunctionalSample& sample, const Curve& x0,
                                   const Kernel& k, double h,
                                   par::Exec exec = par::Exec::serial);

enum class FactorRoute {
  automatic,   ///< Gram matrix when #active <= d, else the d x d operator
  gram,        ///< always the active-point Gram matrix
  covariance,  ///< always the d x d coordinate matrix
};

struct FactorOptions {
  FactorRoute route = FactorRoute::automatic;
  par::Exec exec = par::Exec::serial;
  /// Eigenvalues below this fraction of the largest are dropped.
  double rank_tolerance = 1e-12;
};

/// Spectral factorisation of the empirical local operator
///   Gamma = (1/n) sum_i K_i (Z_i (x) Z_i),   Z_i = X_i - x0,
/// restricted to its range, together with the local mean
///   zbar = (1/n) sum_i K_i Z_i.
/// Immutable after construction.
class LocalFactorization {
 public:
  /// Decreasing, strictly positive.
  const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }
  /// Orthonormal, paired with eigenvalues().
  const std::vector<Curve>& eigenvectors() const noexcept { return eigenvectors_; }
  std::size_t rank() const noexcept { return eigenvalues_.size(); }
  double top_eigenvalue() const noexcept { return eigenvalues_.empty() ? 0.0 : eigenvalues_[0]; }

  const Curve& zbar() const noexcept { return zbar_; }
  const Curve& x0() const noexcept { return x0_; }
  double bandwidth() const noexcept { return h_; }
  std::size_t sample_size() const noexcept { return n_; }
  std::size_t active_count() const noexcept { return active_count_; }
  std::size_t dim() const noexcept { return x0_.dim(); }
  /// K_i for every observation (zeros outside the support).
  const std::vector<double>& weights() const noexcept { return weights_; }
  double weight_total() const noexcept { return weight_total_; }
  /// (1/n) sum_i K_i ||Z_i||^2, the trace of Gamma.
  double trace() const noexcept { return trace_; }
  /// Route actually used.
  FactorRoute route() const noexcept { return route_; }
  int solver_sweeps() const noexcept { return sweeps_; }

 private:
  friend LocalFactorization build_factorization(const FunctionalSample&, const Curve&,
                                                const Kernel&, double, const FactorOptions&);
  friend LocalFactorization build_factorization(const FunctionalSample&, const Curve&,
                                                std::vector<double>, double,
                                                const FactorOptions&);
  LocalFactorization() = default;

  std::vector<double> eigenvalues_;
  std::vector<Curve> eigenvectors_;
  Curve zbar_;
  Curve x0_;
  std::vector<double> weights_;
  double h_ = 0.0;
  double weight_total_ = 0.0;
  double trace_ = 0.0;
  std::size_t n_ = 0;
  std::size_t active_count_ = 0;
  FactorRoute route_ = FactorRoute::automatic;
  int sweeps_ = 0;
};

LocalFactorization build_factorization(const FunctionalSample& sample, const Curve& x0,
                                       const Kernel& k, double h,
                                       const FactorOptions& opts = {});

/// Same, from precomputed kernel weights (one per observation). The
/// bandwidth is recorded only.
LocalFactorization build_factorization(const FunctionalSample& sample, const Curve& x0,
                                       std::vector<double> weights, double h,
                                       const FactorOptions& opts = {});

/// Gamma v = sum_j mu_j <v, u_j> u_j.
Curve apply_gamma(const LocalFactorization& f, const Curve& v);

/// Coordinates <v, u_j> of v on the eigenvectors.
std::vector<double> project(const LocalFactorization& f, const Curve& v);

struct NormCertificate {
  double mu1 = 0.0;
  double bound = 0.0;  ///< sup(K) * h^2
  bool pass = false;
};

/// ||Gamma|| = mu_1 <= sup(K) h^2, which holds because K_i > 0 forces ||Z_i|| <= h.
NormCertificate operator_norm_certificate(const LocalFactorization& f, const Kernel& k);

}  // namespace flr
