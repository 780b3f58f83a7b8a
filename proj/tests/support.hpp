#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "flr/curve.hpp"
#include "flr/local_operator.hpp"

namespace flr::testing {

inline Curve random_curve(std::mt19937_64& gen, std::size_t d, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> c(d);
  for (auto& v : c) v = u(gen);
  return Curve(c);
}

inline FunctionalSample random_sample(std::mt19937_64& gen, std::size_t n, std::size_t d) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Curve> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < n; ++i) {
    xs.push_back(random_curve(gen, d));
    ys.push_back(g(gen));
  }
  return FunctionalSample(std::move(xs), std::move(ys));
}

/// Bandwidth covering every observation.
inline double covering_h(const FunctionalSample& s, const Curve& x0) {
  double m = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) m = std::max(m, norm(s.input(i) - x0));
  return 1.01 * m + 1e-12;
}

inline Eigen::VectorXd to_eigen(const Curve& c) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(c.dim()));
  for (std::size_t i = 0; i < c.dim(); ++i) v(static_cast<Eigen::Index>(i)) = c[i];
  return v;
}

/// (1/n) sum_i K_i Z_i Z_i^T assembled in coordinates.
inline Eigen::MatrixXd explicit_gamma(const FunctionalSample& s, const Curve& x0,
                                      const std::vector<double>& k) {
  const auto d = static_cast<Eigen::Index>(x0.dim());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Eigen::VectorXd z = to_eigen(s.input(i) - x0);
    g += k[i] * z * z.transpose();
  }
  return g / static_cast<double>(s.size());
}

inline Eigen::VectorXd explicit_zbar(const FunctionalSample& s, const Curve& x0,
                                     const std::vector<double>& k) {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(x0.dim()));
  for (std::size_t i = 0; i < s.size(); ++i) z += k[i] * to_eigen(s.input(i) - x0);
  return z / static_cast<double>(s.size());
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace flr::testing
