#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flr/kernel.hpp"
#include "flr/local_operator.hpp"
#include "flr/regularized_inverse.hpp"
#include "flr/synthetic.hpp"

namespace flr {

/// How the regulariser of a grid cell is chosen.
struct SchemeSpec {
  enum class Mode {
    fixed,            ///< the RegScheme as given
    conditioning_h,   ///< conditioning index r_n = factor * h
    rho_inverse,      ///< penalization with alpha = h* F(h*)
    nadaraya_watson,  ///< local constant baseline
  };
  Mode mode = Mode::fixed;
  RegKind kind = RegKind::penalization;
  RegScheme scheme;
  double factor = 1.0;

  static SchemeSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  std::string label() const;
  /// N or alpha for fixed schemes, factor for policies, 0 for NW.
  double parameter() const;
};

/// Regulariser for one fit. Returns nullopt for the Nadaraya-Watson cell.
/// rho_inverse_alpha is h* F(h*) for the sample size at hand.
std::optional<RegScheme> resolve_scheme(const SchemeSpec& spec, const LocalFactorization& f,
                                        double rho_inverse_alpha = 0.0);

struct X0Rule {
  enum class Kind { zero, smooth_decay };
  Kind kind = Kind::zero;
  double scale = 1.0;

  Curve point(const KLSpec& kl) const;
};

/// Bandwidth grid: absolute values, or multiples of a reference h0 chosen so
/// that the smallest multiple keeps about min_active points in the ball.
struct BandwidthGrid {
  std::vector<double> values;
  bool relative = false;
  std::size_t min_active = 50;
};

struct ExperimentConfig {
  KLSpec kl;
  RegressionSpec regression;
  X0Rule x0;
  std::string kernel = "naive";
  std::vector<std::size_t> n_grid;
  BandwidthGrid h_grid;
  std::vector<SchemeSpec> schemes;
  std::size_t replicates = 1;
  std::uint64_t seed = 1;
  std::size_t held_out = 100000;
  double rho_scale = 1.0;
  double bound_constant = 1.0;
  std::filesystem::path output;

  /// The parsed document, kept for hashing and echoing.
  nlohmann::json source;

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::filesystem::path& path);
  void validate() const;
  /// FNV-1a of the canonical JSON dump.
  std::uint64_t hash() const;
  std::string hash_hex() const;
};

}  // namespace flr
