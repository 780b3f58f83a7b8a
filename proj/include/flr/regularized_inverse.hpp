#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "flr/curve.hpp"
#include "flr/local_operator.hpp"

namespace flr {

enum class RegKind { truncation, penalization, tikhonov };

std::string to_string(RegKind kind);

/// Choice of regularised inverse of the local operator:
///   truncation(N):    sum_{j<=N} mu_j^{-1} u_j (x) u_j
///   penalization(a):  (Gamma + a I)^{-1}
///   tikhonov(a):      (Gamma^2 + a I)^{-1} Gamma
struct RegScheme {
  RegKind kind = RegKind::penalization;
  std::size_t truncation_level = 1;  ///< N, truncation only
  double alpha = 0.0;                ///< penalization / tikhonov only

  static RegScheme truncation(std::size_t n);
  static RegScheme penalization(double alpha);
  static RegScheme tikhonov(double alpha);
  /// Allows alpha = 0. Reserved for oracle comparisons in tests; production
  /// paths always go through the checked factories above.
  static RegScheme unchecked_for_testing(RegKind kind, std::size_t n, double alpha);

  /// "truncation:N", "penalization:alpha", "tikhonov:alpha".
  static RegScheme parse(const std::string& text);
  std::string to_string() const;
  /// The parameter as a real (N or alpha).
  double parameter() const;

  friend bool operator==(const RegScheme&, const RegScheme&) = default;
};

/// N clipped to the numerical rank of f.
std::size_t effective_truncation(const LocalFactorization& f, const RegScheme& s);

/// Spectral filter value g(mu_j) on eigenvalue j, so dagger = sum_j g_j u_j (x) u_j
/// plus the complement action.
double filter(const LocalFactorization& f, const RegScheme& s, std::size_t j);
/// Action on the orthogonal complement of the range (1/alpha for
/// penalization, 0 otherwise).
double complement_factor(const RegScheme& s);

/// Gamma^dagger v. When truncation N exceeds the rank it is clipped and a
/// message is appended to *warnings (if given). Throws DegenerateTruncation
/// when truncation is requested on a rank-zero operator.
Curve apply_dagger(const LocalFactorization& f, const RegScheme& s, const Curve& v,
                   std::vector<std::string>* warnings = nullptr);

/// Gamma^dagger applied to the projection of v on the retained eigenvectors.
/// Equal to apply_dagger for v in the range; vectors built from the active
/// Z_i are in the range up to rounding, which the 1/alpha complement of
/// penalization would otherwise amplify.
Curve apply_dagger_on_range(const LocalFactorization& f, const RegScheme& s, const Curve& v,
                            std::vector<std::string>* warnings = nullptr);
/// r_n: mu_N/mu_1, alpha/mu_1 or alpha/mu_1^2. Throws DegenerateOperator when mu_1 = 0.
double conditioning_index(const LocalFactorization& f, const RegScheme& s);

/// ||Gamma^dagger|| in closed form.
double dagger_norm(const LocalFactorization& f, const RegScheme& s);

/// Scheme whose conditioning index equals r: truncation keeps every
/// mu_j >= r mu_1, penalization alpha = r mu_1, tikhonov alpha = r mu_1^2.
RegScheme scheme_for_conditioning(const LocalFactorization& f, RegKind kind, double r);

}  // namespace flr
