#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "flr/config.hpp"
#include "flr/curve.hpp"
#include "flr/kernel.hpp"
#include "flr/parallel.hpp"
#include "flr/regularized_inverse.hpp"
#include "flr/small_ball.hpp"

namespace flr {

// ---------------------------------------------------------------------------
// Monte Carlo MSE

struct ReplicateOutcome {
  bool ok = false;
  double error = 0.0;          ///< m_hat - m(x0)
  double bias_term = 0.0;      ///< sum w_i (m(X_i) - m(x0)) / sum w_i
  double variance_term = 0.0;  ///< sum w_i eps_i / sum w_i
  double weight_sum = 0.0;
  double parameter = 0.0;      ///< resolved N or alpha, 0 for Nadaraya-Watson
  std::size_t active = 0;
  std::string failure;
};

struct MseRow {
  std::size_t n = 0;
  double h = 0.0;
  std::string scheme;
  double scheme_parameter = 0.0;
  double mean_resolved_parameter = 0.0;
  double mse = 0.0;
  double bias2 = 0.0;
  double variance = 0.0;
  double mean_weight_sum = 0.0;
  double mean_active = 0.0;
  std::size_t replicates = 0;
  std::size_t failures = 0;
  bool valid = false;
};

struct MseCell {
  std::size_t n = 0;
  double h = 0.0;
  SchemeSpec scheme;
  std::vector<ReplicateOutcome> replicates;
};

/// mean, mean square and central second moment of the successful errors.
MseRow aggregate(const MseCell& cell);

/// Cells ordered by (n, h, scheme) as listed in the config; replicate r of
/// every cell with sample size n uses the dataset drawn with seed + r.
std::vector<MseCell> run_mse_cells(const ExperimentConfig& cfg,
                                   par::Exec exec = par::Exec::parallel);
std::vector<MseRow> run_mse(const ExperimentConfig& cfg, par::Exec exec = par::Exec::parallel);

/// Human-readable warnings about the design, e.g. an evaluation point whose
/// A4 sum exceeds the dimension.
std::vector<std::string> config_warnings(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Small-ball helpers shared by the experiments

/// ||X - x0|| for cfg.held_out fresh draws, on a stream disjoint from the
/// replicate datasets.
EmpiricalF held_out_F(const ExperimentConfig& cfg);

/// Small-ball family implied by the eigenvalue decay, used for rho.
SbpFamily implied_family(const KLSpec& kl, double rho_scale = 1.0);

/// h0 such that min_active of the sorted norms fall inside smallest_factor * h0.
double calibrate_h0(const std::vector<double>& sorted_norms, std::size_t min_active,
                    double smallest_factor);

/// Bandwidths of the grid for sample size n; relative grids are scaled by an
/// h0 calibrated on the held-out norms at the fraction min_active / n.
std::vector<double> bandwidths_for(const ExperimentConfig& cfg, std::size_t n,
                                   const EmpiricalF& held_out);

// ---------------------------------------------------------------------------
// Bound and bandwidth equation

struct BoundTerms {
  double bias_line = 0.0;
  double variance_line = 0.0;
  double total = 0.0;
  double n_f = 0.0;
  /// n F(h) >= 10; below that the variance line is not in its asymptotic regime.
  bool asymptotic = false;
};

///   C [h^6/r^2 + h^4 + h^2/(nF) + v^2/F^2] + C/(nF) [1 + h^2/(n r v) + v/(r F)]
BoundTerms theorem_bound(double h, double n, double F, double v, double r, double C = 1.0);

/// Root of h^4 F(h) = 1/n on (0, h_max] by bisection. Throws NoRoot when
/// h_max^4 F(h_max) < 1/n.
double solve_hstar(double n, const RealFn& F, double h_max = 1.0, double rel_tol = 1e-12);

struct BoundRow {
  std::size_t n = 0;
  double h = 0.0;
  std::string scheme;
  double F = 0.0;
  double v = 0.0;
  double r = 0.0;
  BoundTerms terms;
  std::optional<double> mse;
  bool valid = false;
};

struct BoundTable {
  std::vector<BoundRow> rows;
  /// Largest mse / bracket ratio over the valid rows (1 without mse).
  double fitted_constant = 1.0;
};

/// One row per (n, h, scheme) of the config. F and v come from the held-out
/// norms; r = factor * h for conditioning_h schemes and h otherwise.
BoundTable run_bound(const ExperimentConfig& cfg, bool with_mse,
                     par::Exec exec = par::Exec::parallel);

// ---------------------------------------------------------------------------
// Cross-validation

struct CvCell {
  double h = 0.0;
  RegScheme scheme;
  double score = 0.0;  ///< +inf when any fold failed
  std::size_t failed_folds = 0;
};

struct CvResult {
  double h = 0.0;
  RegScheme scheme;
  double score = 0.0;
  std::vector<CvCell> table;  ///< (h, scheme) in grid order
};

struct CvOptions {
  par::Exec exec = par::Exec::parallel;
  /// Only folds with ||X_i - x0|| <= local_radius are scored when set.
  std::optional<double> local_radius;
};

/// Leave-one-out score sum_i (y_i - m_hat^{(-i)}(X_i))^2 over the grid.
/// Ties (relative 1e-12) go to the smaller h, then the smaller alpha or larger N.
/// Needs n >= 10; throws SelectionFailed when every cell is infeasible.
CvResult cv_select(const FunctionalSample& sample, const Curve& x0, const Kernel& k,
                   const std::vector<double>& h_grid, const std::vector<RegScheme>& schemes,
                   const CvOptions& opts = {});

// ---------------------------------------------------------------------------
// Bias slopes

struct SlopeReport {
  double ll_slope = 0.0;  ///< d log|bias| / d log h
  double nw_slope = 0.0;
  double difference = 0.0;
  std::size_t ll_used = 0;
  std::size_t nw_used = 0;
  std::size_t ll_filtered = 0;  ///< zero-bias points dropped
  std::size_t nw_filtered = 0;
};

/// Least-squares slopes of log|bias| on log h. Needs >= 3 bandwidths whose
/// largest/smallest ratio is at least min_span. The slope for bias^2 is twice
/// the reported one.
SlopeReport rate_slopes(const std::vector<double>& h, const std::vector<double>& ll_bias,
                        const std::vector<double>& nw_bias, double min_span = 2.0);

struct RatesRow {
  double h = 0.0;
  std::size_t active = 0;
  double ll_bias = 0.0;
  double nw_bias = 0.0;
  double ll_parameter = 0.0;
};

struct RatesRun {
  std::size_t n = 0;
  double h0 = 0.0;
  std::string scheme;
  std::vector<RatesRow> rows;
  SlopeReport slopes;
};

/// Noiseless single-replicate comparison of local linear (first non-NW
/// scheme of the config) and Nadaraya-Watson on one dataset of size
/// n_grid[0]. Relative grids are scaled by an h0 calibrated on that dataset.
RatesRun run_rates(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// CSV output

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& out, const std::string& comment = {}) const;
};

/// "seed=<seed> config_hash=<hex>"
std::string provenance_comment(const ExperimentConfig& cfg);

CsvTable mse_table(const std::vector<MseRow>& rows);
CsvTable bound_table(const BoundTable& table);
CsvTable rates_table(const RatesRun& run);
CsvTable cv_table(const CvResult& result);

}  // namespace flr
