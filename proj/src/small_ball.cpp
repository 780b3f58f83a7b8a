#include "flr/small_ball.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "flr/errors.hpp"
#include "flr/linalg.hpp"
#include "flr/local_operator.hpp"

namespace flr {

double log_family_F(const SbpFamily& f, double h) {
  if (!(h > 0.0)) throw DomainError("small ball radius must be > 0");
  switch (f.kind) {
    case SbpKind::polynomial_exponential:
      return std::log(f.c1) + f.alpha * std::log(h) - f.c2 / std::pow(h, f.beta);
    case SbpKind::log_squared: {
      if (!(h < 1.0)) throw DomainError("log_squared family needs h < 1");
      const double lh = std::log(h);
      return std::log(f.c1) - 0.5 * std::log(-lh) - f.c2 * lh * lh;
    }
  }
  return 0.0;
}

double family_F(const SbpFamily& f, double h) { return std::exp(log_family_F(f, h)); }

double rho(const SbpFamily& f, double s) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError(fmt::format("rho needs s in (0, 1), got {}", s));
  switch (f.kind) {
    case SbpKind::polynomial_exponential:
      return f.rho_scale * std::pow(s, 1.0 + f.beta);
    case SbpKind::log_squared:
      return f.rho_scale * s / std::abs(std::log(s));
  }
  return 0.0;
}

double matched_rho_scale(const SbpFamily& f) {
  if (!(f.c2 > 0.0)) throw DomainError("a power-law small ball has no exponential-type limit");
  return f.kind == SbpKind::polynomial_exponential ? 1.0 / (f.c2 * f.beta) : 0.5 / f.c2;
}

EmpiricalF::EmpiricalF(std::vector<double> norms) : sorted_(std::move(norms)) {
  if (sorted_.empty()) throw InputError("empirical small ball needs at least one norm");
  for (double v : sorted_)
    if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("norms must be finite and >= 0");
  std::sort(sorted_.begin(), sorted_.end());
}

EmpiricalF::EmpiricalF(const FunctionalSample& sample, const Curve& x0)
    : EmpiricalF(from_curves(sample.inputs(), x0)) {}

EmpiricalF EmpiricalF::from_curves(const std::vector<Curve>& xs, const Curve& x0) {
  return EmpiricalF(par::distances(xs, x0, par::Exec::parallel));
}

double EmpiricalF::operator()(double h) const {
  if (h < 0.0) throw DomainError("small ball radius must be >= 0");
  const auto count = std::upper_bound(sorted_.begin(), sorted_.end(), h) - sorted_.begin();
  return static_cast<double>(count) / static_cast<double>(sorted_.size());
}

double EmpiricalF::quantile(double p) const {
  const auto n = static_cast<double>(sorted_.size());
  auto j = static_cast<std::size_t>(std::ceil(p * n - 1e-9));
  j = std::clamp<std::size_t>(j, 1, sorted_.size());
  return sorted_[j - 1];
}

double empirical_F(const EmpiricalF& e, double h) { return e(h); }

GammaLimitReport check_gamma_limit(const RealFn& log_F, const RealFn& rho_fn,
                                   const std::vector<double>& s_grid,
                                   const std::vector<double>& x_grid) {
  if (s_grid.empty() || x_grid.empty()) throw InputError("gamma limit grids must be non-empty");
  GammaLimitReport r;
  r.smallest_s = *std::min_element(s_grid.begin(), s_grid.end());
  for (double s : s_grid) {
    const double base = log_F(s);
    const double aux = rho_fn(s);
    for (double x : x_grid) {
      GammaLimitRow row;
      row.s = s;
      row.x = x;
      row.ratio = x == 0.0 ? 1.0 : std::exp(log_F(s + x * aux) - base);
      row.expected = std::exp(x);
      row.relative_deviation = std::abs(row.ratio - row.expected) / row.expected;
      if (s == r.smallest_s) {
        r.max_relative_deviation = std::max(r.max_relative_deviation, row.relative_deviation);
      }
      r.rows.push_back(row);
    }
  }
  return r;
}

namespace {

struct LinearFit {
  std::vector<double> coef;
  double residual = 0.0;
};

// Ordinary least squares through the normal equations; columns are few.
LinearFit least_squares(const std::vector<std::vector<double>>& cols,
                        const std::vector<double>& target) {
  const std::size_t p = cols.size();
  linalg::Matrix a(p, p);
  std::vector<double> b(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t l = 0; l < p; ++l)
      for (std::size_t i = 0; i < target.size(); ++i) a(j, l) += cols[j][i] * cols[l][i];
    for (std::size_t i = 0; i < target.size(); ++i) b[j] += cols[j][i] * target[i];
  }
  LinearFit fit;
  fit.coef = linalg::solve(std::move(a), std::move(b), 1e-15);
  for (std::size_t i = 0; i < target.size(); ++i) {
    double pred = 0.0;
    for (std::size_t j = 0; j < p; ++j) pred += fit.coef[j] * cols[j][i];
    fit.residual += (target[i] - pred) * (target[i] - pred);
  }
  fit.residual = std::sqrt(fit.residual);
  return fit;
}

}  // namespace

FamilyFit fit_family(const EmpiricalF& e, SbpKind kind, const FamilyFitOptions& opts) {
  if (e.size() < 50) throw FitError("family fit needs at least 50 norms");
  const auto n = static_cast<double>(e.size());
  std::vector<double> hs, logf;
  for (std::size_t l = 0; l < opts.levels; ++l) {
    const double p = opts.levels == 1
                         ? opts.quantile_lo
                         : opts.quantile_lo + (opts.quantile_hi - opts.quantile_lo) *
                                                  static_cast<double>(l) /
                                                  static_cast<double>(opts.levels - 1);
    auto j = static_cast<std::size_t>(std::ceil(p * n - 1e-9));
    j = std::clamp<std::size_t>(j, 1, e.size());
    const double h = e.sorted_norms()[j - 1];
    if (!(h > 0.0)) continue;
    if (!hs.empty() && h <= hs.back()) continue;  // ties collapse grid points
    if (kind == SbpKind::log_squared && !(h < 1.0)) continue;
    hs.push_back(h);
    logf.push_back(std::log(static_cast<double>(j) / n));
  }
  if (hs.size() < 4) throw FitError("degenerate quantile grid (too many ties)");

  const std::size_t m = hs.size();
  std::vector<double> ones(m, 1.0), logh(m);
  for (std::size_t i = 0; i < m; ++i) logh[i] = std::log(hs[i]);

  FamilyFit best;
  best.points = m;
  best.family.kind = kind;
  if (kind == SbpKind::log_squared) {
    std::vector<double> target(m), sq(m);
    for (std::size_t i = 0; i < m; ++i) {
      target[i] = logf[i] + 0.5 * std::log(-logh[i]);
      sq[i] = -logh[i] * logh[i];
    }
    auto fit = least_squares({ones, sq}, target);
    best.family.c1 = std::exp(fit.coef[0]);
    best.family.c2 = fit.coef[1];
    best.residual_norm = fit.residual;
    return best;
  }

  auto power_law = least_squares({ones, logh}, logf);
  best.family.c1 = std::exp(power_law.coef[0]);
  best.family.alpha = power_law.coef[1];
  best.family.c2 = 0.0;
  best.family.beta = 1.0;
  best.residual_norm = power_law.residual;
  if (opts.freeze_c2_zero) return best;

  constexpr int beta_steps = 600;
  const double log_lo = std::log(0.02), log_hi = std::log(20.0);
  for (int s = 0; s <= beta_steps; ++s) {
    const double beta = std::exp(log_lo + (log_hi - log_lo) * s / beta_steps);
    std::vector<double> inv_pow(m);
    for (std::size_t i = 0; i < m; ++i) inv_pow[i] = -std::pow(hs[i], -beta);
    LinearFit fit;
    try {
      fit = least_squares({ones, logh, inv_pow}, logf);
    } catch (const NumericalSingularity&) {
      continue;
    }
    if (fit.coef[2] < 0.0) continue;  // C2 >= 0; the boundary is the power law above
    if (fit.residual < best.residual_norm) {
      best.family.c1 = std::exp(fit.coef[0]);
      best.family.alpha = fit.coef[1];
      best.family.c2 = fit.coef[2];
      best.family.beta = beta;
      best.residual_norm = fit.residual;
    }
  }
  return best;
}

double estimate_v(const std::vector<double>& norms, const Kernel& k, double h,
                  const RealFn& rho_fn) {
  if (!(h > 0.0)) throw DomainError("bandwidth h must be > 0");
  if (norms.empty()) throw InputError("no norms");
  double acc = 0.0;
  bool any = false;
  double nearest = std::numeric_limits<double>::infinity();
  for (double z : norms) {
    nearest = std::min(nearest, z);
    if (z > h) continue;
    const double kz = k.eval(z / h);
    if (kz == 0.0) continue;
    any = true;
    acc += kz * z * (z > 0.0 ? rho_fn(z) : 0.0);
  }
  if (!any) throw EmptyNeighborhood(h, nearest);
  return acc / static_cast<double>(norms.size());
}

double estimate_v(const FunctionalSample& sample, const Curve& x0, const Kernel& k, double h,
                  const RealFn& rho_fn) {
  if (sample.dim() != x0.dim()) throw DimensionMismatch(sample.dim(), x0.dim());
  return estimate_v(par::distances(sample.inputs(), x0, par::Exec::serial), k, h, rho_fn);
}

double local_moment_ratio(const EmpiricalF& e, const Kernel& k, double h) {
  double acc = 0.0;
  for (double z : e.sorted_norms()) {
    if (z > h) break;
    acc += k.eval(z / h) * z * z;
  }
  const double f = e(h);
  if (f == 0.0) throw EmptyNeighborhood(h, e.sorted_norms().front());
  acc /= static_cast<double>(e.size());
  return acc / (k.value_at_one() * f * h * h);
}

}  // namespace flr
