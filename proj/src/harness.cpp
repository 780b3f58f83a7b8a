#include "flr/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "flr/csv_io.hpp"
#include "flr/errors.hpp"
#include "flr/estimator.hpp"
#include "flr/local_operator.hpp"
#include "flr/rng.hpp"
#include "flr/synthetic.hpp"

namespace flr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kHeldOutStream = 0x68656c645f6f7574ULL;

bool needs_held_out(const ExperimentConfig& cfg) {
  if (cfg.h_grid.relative) return true;
  return std::any_of(cfg.schemes.begin(), cfg.schemes.end(), [](const SchemeSpec& s) {
    return s.mode == SchemeSpec::Mode::rho_inverse;
  });
}

bool uses_rho_inverse(const ExperimentConfig& cfg) {
  return std::any_of(cfg.schemes.begin(), cfg.schemes.end(), [](const SchemeSpec& s) {
    return s.mode == SchemeSpec::Mode::rho_inverse;
  });
}

double rho_inverse_alpha(std::size_t n, const EmpiricalF& F) {
  const double h_max = F.sorted_norms().back();
  const double h = solve_hstar(static_cast<double>(n), [&](double t) { return F(t); }, h_max);
  return h * F(h);
}

double resolved_parameter(const std::optional<RegScheme>& s) { return s ? s->parameter() : 0.0; }

struct Plan {
  std::size_t n = 0;
  std::vector<double> hs;
  double rho_alpha = 0.0;
  std::size_t first_cell = 0;
};

void fit_replicate(const ExperimentConfig& cfg, const Kernel& k, const Curve& x0, double m0,
                   const Plan& plan, std::size_t r, std::vector<MseCell>& cells) {
  const FunctionalSample data = gen_dataset(cfg.kl, cfg.regression, plan.n, cfg.seed + r);
  std::vector<double> m_at(plan.n);
  for (std::size_t i = 0; i < plan.n; ++i) m_at[i] = eval_m(cfg.regression, data.input(i));

  const std::size_t n_schemes = cfg.schemes.size();
  for (std::size_t hi = 0; hi < plan.hs.size(); ++hi) {
    const double h = plan.hs[hi];
    const std::size_t base = plan.first_cell + hi * n_schemes;
    std::optional<LocalFactorization> f;
    std::string failure;
    try {
      f.emplace(build_factorization(data, x0, k, h));
    } catch (const NumericalError& e) {
      failure = e.what();
    }
    for (std::size_t si = 0; si < n_schemes; ++si) {
      ReplicateOutcome& out = cells[base + si].replicates[r];
      if (!f) {
        out.failure = failure;
        continue;
      }
      try {
        const auto scheme = resolve_scheme(cfg.schemes[si], *f, plan.rho_alpha);
        const FitReport fit =
            scheme ? local_linear_fit(data, *f, *scheme) : nadaraya_watson_fit(data, *f);
        double tb = 0.0;
        double tv = 0.0;
        for (std::size_t i = 0; i < plan.n; ++i) {
          const double w = fit.weights[i];
          if (w == 0.0) continue;
          tb += w * (m_at[i] - m0);
          tv += w * (data.output(i) - m_at[i]);
        }
        out.ok = true;
        out.error = fit.estimate - m0;
        out.bias_term = tb / fit.weight_sum;
        out.variance_term = tv / fit.weight_sum;
        out.weight_sum = fit.weight_sum;
        out.parameter = resolved_parameter(scheme);
        out.active = fit.active_count;
      } catch (const NumericalError& e) {
        out.failure = e.what();
      }
    }
  }
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto m = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

std::string fmt_size(std::size_t v) { return std::to_string(v); }

}  // namespace

// ---------------------------------------------------------------------------

MseRow aggregate(const MseCell& cell) {
  MseRow row;
  row.n = cell.n;
  row.h = cell.h;
  row.scheme = cell.scheme.label();
  row.scheme_parameter = cell.scheme.parameter();

  double sum_e = 0.0;
  double sum_e2 = 0.0;
  double sum_w = 0.0;
  double sum_active = 0.0;
  double sum_param = 0.0;
  std::size_t ok = 0;
  for (const auto& r : cell.replicates) {
    if (!r.ok) {
      ++row.failures;
      continue;
    }
    ++ok;
    sum_e += r.error;
    sum_e2 += r.error * r.error;
    sum_w += r.weight_sum;
    sum_active += static_cast<double>(r.active);
    sum_param += r.parameter;
  }
  row.replicates = ok;
  row.valid = ok > 0;
  if (!row.valid) {
    row.mse = row.bias2 = row.variance = kNaN;
    row.mean_weight_sum = row.mean_active = row.mean_resolved_parameter = kNaN;
    return row;
  }
  const auto m = static_cast<double>(ok);
  const double mean = sum_e / m;
  double central = 0.0;
  for (const auto& r : cell.replicates)
    if (r.ok) central += (r.error - mean) * (r.error - mean);
  row.mse = sum_e2 / m;
  row.bias2 = mean * mean;
  row.variance = central / m;
  row.mean_weight_sum = sum_w / m;
  row.mean_active = sum_active / m;
  row.mean_resolved_parameter = sum_param / m;
  const auto first_ok = std::find_if(cell.replicates.begin(), cell.replicates.end(),
                                     [](const ReplicateOutcome& r) { return r.ok; });
  if (std::all_of(cell.replicates.begin(), cell.replicates.end(), [&](const ReplicateOutcome& r) {
        return !r.ok || r.parameter == first_ok->parameter;
      })) {
    row.mean_resolved_parameter = first_ok->parameter;
  }
  return row;
}

std::vector<MseCell> run_mse_cells(const ExperimentConfig& cfg, par::Exec exec) {
  cfg.validate();
  const Kernel k = Kernel::parse(cfg.kernel);
  const Curve x0 = cfg.x0.point(cfg.kl);
  const double m0 = eval_m(cfg.regression, x0);

  std::optional<EmpiricalF> held;
  if (needs_held_out(cfg)) held.emplace(held_out_F(cfg));

  std::vector<Plan> plans;
  std::vector<MseCell> cells;
  for (std::size_t n : cfg.n_grid) {
    Plan p;
    p.n = n;
    p.hs = cfg.h_grid.relative ? bandwidths_for(cfg, n, *held) : cfg.h_grid.values;
    if (uses_rho_inverse(cfg)) p.rho_alpha = rho_inverse_alpha(n, *held);
    p.first_cell = cells.size();
    for (double h : p.hs) {
      for (const auto& s : cfg.schemes) {
        MseCell c;
        c.n = n;
        c.h = h;
        c.scheme = s;
        c.replicates.resize(cfg.replicates);
        cells.push_back(std::move(c));
      }
    }
    plans.push_back(std::move(p));
  }

  const std::size_t R = cfg.replicates;
  par::for_each_index(plans.size() * R, exec, [&](std::size_t t) {
    fit_replicate(cfg, k, x0, m0, plans[t / R], t % R, cells);
  });
  return cells;
}

std::vector<MseRow> run_mse(const ExperimentConfig& cfg, par::Exec exec) {
  const auto cells = run_mse_cells(cfg, exec);
  std::vector<MseRow> rows;
  rows.reserve(cells.size());
  for (const auto& c : cells) rows.push_back(aggregate(c));
  return rows;
}

std::vector<std::string> config_warnings(const ExperimentConfig& cfg) {
  std::vector<std::string> out;
  const double a4 = a4_diagnostic(cfg.x0.point(cfg.kl), cfg.kl);
  if (a4 > static_cast<double>(cfg.kl.dim)) {
    out.push_back(fmt::format("x0 is rough for this decay: sum <x0,e_k>^2/lambda_k^2 = {:.3g} > d = {}",
                              a4, cfg.kl.dim));
  }
  return out;
}

// ---------------------------------------------------------------------------

EmpiricalF held_out_F(const ExperimentConfig& cfg) {
  const std::uint64_t seed = CounterRng(cfg.seed).split(kHeldOutStream).seed();
  return EmpiricalF::from_curves(sample_kl(cfg.kl, cfg.held_out, seed), cfg.x0.point(cfg.kl));
}

SbpFamily implied_family(const KLSpec& kl, double rho_scale) {
  SbpFamily f;
  f.rho_scale = rho_scale;
  if (kl.decay == Decay::exponential) {
    f.kind = SbpKind::log_squared;
  } else {
    f.kind = SbpKind::polynomial_exponential;
    f.beta = 2.0 / (2.0 * kl.rate - 1.0);
  }
  return f;
}

double calibrate_h0(const std::vector<double>& sorted_norms, std::size_t min_active,
                    double smallest_factor) {
  if (sorted_norms.empty()) throw InputError("calibrate_h0 needs at least one norm");
  if (!(smallest_factor > 0.0)) throw DomainError("smallest bandwidth factor must be > 0");
  const std::size_t idx = std::min(std::max<std::size_t>(min_active, 1), sorted_norms.size()) - 1;
  return sorted_norms[idx] / smallest_factor * (1.0 + 1e-12);
}

std::vector<double> bandwidths_for(const ExperimentConfig& cfg, std::size_t n,
                                   const EmpiricalF& held_out) {
  if (!cfg.h_grid.relative) return cfg.h_grid.values;
  const double smallest = *std::min_element(cfg.h_grid.values.begin(), cfg.h_grid.values.end());
  const double p = std::min(1.0, static_cast<double>(cfg.h_grid.min_active) / static_cast<double>(n));
  const double h0 = held_out.quantile(p) / smallest * (1.0 + 1e-12);
  std::vector<double> hs;
  hs.reserve(cfg.h_grid.values.size());
  for (double f : cfg.h_grid.values) hs.push_back(f * h0);
  return hs;
}

// ---------------------------------------------------------------------------

BoundTerms theorem_bound(double h, double n, double F, double v, double r, double C) {
  for (double a : {h, n, F, v, r, C}) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw DomainError(fmt::format(
          "theorem_bound needs positive finite arguments (h={}, n={}, F={}, v={}, r={}, C={})", h,
          n, F, v, r, C));
    }
  }
  BoundTerms t;
  const double h2 = h * h;
  const double h4 = h2 * h2;
  t.n_f = n * F;
  t.bias_line = C * (h4 * h2 / (r * r) + h4 + h2 / t.n_f + (v * v) / (F * F));
  t.variance_line = C / t.n_f * (1.0 + h2 / (n * r * v) + v / (r * F));
  t.total = t.bias_line + t.variance_line;
  t.asymptotic = t.n_f >= 10.0;
  return t;
}

double solve_hstar(double n, const RealFn& F, double h_max, double rel_tol) {
  if (!(n > 0.0)) throw DomainError(fmt::format("solve_hstar needs n > 0, got {}", n));
  if (!(h_max > 0.0)) throw DomainError(fmt::format("solve_hstar needs h_max > 0, got {}", h_max));
  const auto g = [&](double h) { return h * h * h * h * F(h) * n - 1.0; };
  const double g_hi = g(h_max);
  if (!(g_hi >= 0.0)) throw NoRoot(0.0, -1.0, h_max, g_hi);
  double lo = 0.0;
  double hi = h_max;
  for (int it = 0; it < 300 && hi - lo > rel_tol * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

BoundTable run_bound(const ExperimentConfig& cfg, bool with_mse, par::Exec exec) {
  cfg.validate();
  const Kernel k = Kernel::parse(cfg.kernel);
  const EmpiricalF held = held_out_F(cfg);
  const SbpFamily fam = implied_family(cfg.kl, cfg.rho_scale);
  const RealFn rho_fn = [&](double s) { return rho(fam, s); };

  std::vector<MseRow> mse;
  if (with_mse) mse = run_mse(cfg, exec);

  BoundTable table;
  std::size_t idx = 0;
  double fitted = 0.0;
  for (std::size_t n : cfg.n_grid) {
    for (double h : bandwidths_for(cfg, n, held)) {
      const double F = held(h);
      double v = kNaN;
      try {
        v = estimate_v(held.sorted_norms(), k, h, rho_fn);
      } catch (const DomainError&) {
      } catch (const EmptyNeighborhood&) {
      }
      for (const auto& s : cfg.schemes) {
        BoundRow row;
        row.n = n;
        row.h = h;
        row.scheme = s.label();
        row.F = F;
        row.v = v;
        row.r = s.mode == SchemeSpec::Mode::conditioning_h ? s.factor * h : h;
        row.valid = F > 0.0 && v > 0.0 && std::isfinite(v);
        if (row.valid) row.terms = theorem_bound(h, static_cast<double>(n), F, v, row.r, 1.0);
        if (with_mse && mse[idx].valid) {
          row.mse = mse[idx].mse;
          if (row.valid) fitted = std::max(fitted, *row.mse / row.terms.total);
        }
        ++idx;
        table.rows.push_back(std::move(row));
      }
    }
  }
  table.fitted_constant = with_mse && fitted > 0.0 ? fitted : cfg.bound_constant;
  return table;
}

// ---------------------------------------------------------------------------

namespace {

bool near_tie(double a, double b) {
  if (a == b) return true;
  return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

/// True when cell a should replace the current best b.
bool preferred(const CvCell& a, const CvCell& b) {
  if (!std::isfinite(a.score)) return false;
  if (!std::isfinite(b.score)) return true;
  if (!near_tie(a.score, b.score)) return a.score < b.score;
  if (a.h != b.h) return a.h < b.h;
  if (a.scheme.kind != b.scheme.kind) return false;
  if (a.scheme.kind == RegKind::truncation)
    return a.scheme.truncation_level > b.scheme.truncation_level;
  return a.scheme.alpha < b.scheme.alpha;
}

}  // namespace

CvResult cv_select(const FunctionalSample& sample, const Curve& x0, const Kernel& k,
                   const std::vector<double>& h_grid, const std::vector<RegScheme>& schemes,
                   const CvOptions& opts) {
  if (sample.size() < 10) {
    throw InputError(fmt::format("cross-validation needs n >= 10, got {}", sample.size()));
  }
  if (h_grid.empty() || schemes.empty()) throw InputError("cross-validation grid is empty");

  std::vector<std::size_t> folds;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (!opts.local_radius || norm(sample.input(i) - x0) <= *opts.local_radius) folds.push_back(i);
  }
  if (folds.empty()) throw SelectionFailed("no observation lies within the CV radius");

  const std::size_t S = schemes.size();
  CvResult result;
  for (double h : h_grid) {
    std::vector<double> residual(folds.size() * S, kInf);
    par::for_each_index(folds.size(), opts.exec, [&](std::size_t fi) {
      const std::size_t i = folds[fi];
      const FunctionalSample rest = sample.without(i);
      std::optional<LocalFactorization> f;
      try {
        f.emplace(build_factorization(rest, sample.input(i), k, h));
      } catch (const NumericalError&) {
        return;
      }
      for (std::size_t s = 0; s < S; ++s) {
        try {
          const double pred = local_linear_fit(rest, *f, schemes[s]).estimate;
          const double e = sample.output(i) - pred;
          residual[fi * S + s] = e * e;
        } catch (const NumericalError&) {
        }
      }
    });
    for (std::size_t s = 0; s < S; ++s) {
      CvCell cell;
      cell.h = h;
      cell.scheme = schemes[s];
      for (std::size_t fi = 0; fi < folds.size(); ++fi) {
        const double r = residual[fi * S + s];
        if (std::isfinite(r)) {
          cell.score += r;
        } else {
          ++cell.failed_folds;
        }
      }
      if (cell.failed_folds > 0) cell.score = kInf;
      result.table.push_back(cell);
    }
  }

  const CvCell* best = nullptr;
  for (const auto& c : result.table)
    if (std::isfinite(c.score) && (!best || preferred(c, *best))) best = &c;
  if (!best) throw SelectionFailed("every cross-validation cell failed on at least one fold");
  result.h = best->h;
  result.scheme = best->scheme;
  result.score = best->score;
  return result;
}

// ---------------------------------------------------------------------------

SlopeReport rate_slopes(const std::vector<double>& h, const std::vector<double>& ll_bias,
                        const std::vector<double>& nw_bias, double min_span) {
  if (h.size() != ll_bias.size() || h.size() != nw_bias.size()) {
    throw DimensionMismatch(h.size(), h.size() != ll_bias.size() ? ll_bias.size() : nw_bias.size());
  }
  if (h.size() < 3) throw InputError("rate_slopes needs at least 3 bandwidths");
  for (double v : h)
    if (!(v > 0.0)) throw DomainError("bandwidths must be > 0");
  const auto [lo, hi] = std::minmax_element(h.begin(), h.end());
  if (*hi / *lo < min_span) {
    throw InputError(fmt::format("bandwidths span a factor {} < {}", *hi / *lo, min_span));
  }

  SlopeReport rep;
  const auto fit = [&](const std::vector<double>& bias, std::size_t& used, std::size_t& filtered) {
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < h.size(); ++i) {
      const double b = std::abs(bias[i]);
      if (b > 0.0 && std::isfinite(b)) {
        x.push_back(std::log(h[i]));
        y.push_back(std::log(b));
      } else {
        ++filtered;
      }
    }
    used = x.size();
    return x.size() >= 2 ? ls_slope(x, y) : kNaN;
  };
  rep.ll_slope = fit(ll_bias, rep.ll_used, rep.ll_filtered);
  rep.nw_slope = fit(nw_bias, rep.nw_used, rep.nw_filtered);
  rep.difference = rep.ll_slope - rep.nw_slope;
  return rep;
}

RatesRun run_rates(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto ll = std::find_if(cfg.schemes.begin(), cfg.schemes.end(), [](const SchemeSpec& s) {
    return s.mode != SchemeSpec::Mode::nadaraya_watson;
  });
  if (ll == cfg.schemes.end()) throw ConfigError("rates needs a local linear scheme");
  if (ll->mode == SchemeSpec::Mode::rho_inverse) {
    throw ConfigError("rates does not support the rho_inverse policy");
  }

  RegressionSpec reg = cfg.regression;
  reg.noise_sigma = 0.0;
  const Kernel k = Kernel::parse(cfg.kernel);
  const Curve x0 = cfg.x0.point(cfg.kl);
  const double m0 = eval_m(reg, x0);

  RatesRun run;
  run.n = cfg.n_grid.front();
  run.scheme = ll->label();
  const FunctionalSample data = gen_dataset(cfg.kl, reg, run.n, cfg.seed);
  std::vector<double> hs = cfg.h_grid.values;
  run.h0 = 1.0;
  if (cfg.h_grid.relative) {
    const EmpiricalF e(data, x0);
    run.h0 = calibrate_h0(e.sorted_norms(), cfg.h_grid.min_active,
                          *std::min_element(hs.begin(), hs.end()));
    for (double& h : hs) h *= run.h0;
  }

  FactorOptions fo;
  fo.exec = par::Exec::parallel;
  std::vector<double> llb;
  std::vector<double> nwb;
  for (double h : hs) {
    const LocalFactorization f = build_factorization(data, x0, k, h, fo);
    const RegScheme s = *resolve_scheme(*ll, f);
    RatesRow row;
    row.h = h;
    row.active = f.active_count();
    row.ll_bias = local_linear_fit(data, f, s).estimate - m0;
    row.nw_bias = nadaraya_watson_fit(data, f).estimate - m0;
    row.ll_parameter = s.parameter();
    llb.push_back(row.ll_bias);
    nwb.push_back(row.nw_bias);
    run.rows.push_back(row);
  }
  run.slopes = rate_slopes(hs, llb, nwb);
  return run;
}

// ---------------------------------------------------------------------------

void CsvTable::write(std::ostream& out, const std::string& comment) const {
  if (!comment.empty()) out << "# " << comment << '\n';
  for (std::size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << columns[j];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
    out << '\n';
  }
}

std::string provenance_comment(const ExperimentConfig& cfg) {
  return fmt::format("seed={} config_hash={}", cfg.seed, cfg.hash_hex());
}

CsvTable mse_table(const std::vector<MseRow>& rows) {
  using io::format_real;
  CsvTable t;
  t.columns = {"n",        "h",         "scheme",          "scheme_parameter",
               "resolved_parameter",    "mse",             "bias2",
               "variance", "mean_weight_sum", "mean_active", "replicates",
               "failures", "valid"};
  for (const auto& r : rows) {
    t.rows.push_back({fmt_size(r.n), format_real(r.h), r.scheme, format_real(r.scheme_parameter),
                      format_real(r.mean_resolved_parameter), format_real(r.mse),
                      format_real(r.bias2), format_real(r.variance),
                      format_real(r.mean_weight_sum), format_real(r.mean_active),
                      fmt_size(r.replicates), fmt_size(r.failures), r.valid ? "1" : "0"});
  }
  return t;
}

CsvTable bound_table(const BoundTable& table) {
  using io::format_real;
  CsvTable t;
  t.columns = {"n",          "h",          "scheme",        "F",     "v",
               "r",          "bias_line",  "variance_line", "bracket", "asymptotic",
               "mse",        "ratio",      "fitted_C",      "fitted_bound", "valid"};
  for (const auto& r : table.rows) {
    const bool ok = r.valid;
    const double ratio = ok && r.mse ? *r.mse / r.terms.total : kNaN;
    t.rows.push_back({fmt_size(r.n), format_real(r.h), r.scheme, format_real(r.F),
                      format_real(r.v), format_real(r.r),
                      ok ? format_real(r.terms.bias_line) : "",
                      ok ? format_real(r.terms.variance_line) : "",
                      ok ? format_real(r.terms.total) : "", ok && r.terms.asymptotic ? "1" : "0",
                      r.mse ? format_real(*r.mse) : "", std::isnan(ratio) ? "" : format_real(ratio),
                      format_real(table.fitted_constant),
                      ok ? format_real(table.fitted_constant * r.terms.total) : "",
                      ok ? "1" : "0"});
  }
  return t;
}

CsvTable rates_table(const RatesRun& run) {
  using io::format_real;
  CsvTable t;
  t.columns = {"h", "active", "ll_bias", "nw_bias", "ll_parameter"};
  for (const auto& r : run.rows) {
    t.rows.push_back({format_real(r.h), fmt_size(r.active), format_real(r.ll_bias),
                      format_real(r.nw_bias), format_real(r.ll_parameter)});
  }
  return t;
}

CsvTable cv_table(const CvResult& result) {
  using io::format_real;
  CsvTable t;
  t.columns = {"h", "scheme", "parameter", "score", "failed_folds", "selected"};
  for (const auto& c : result.table) {
    const bool sel = c.h == result.h && c.scheme.kind == result.scheme.kind &&
                     c.scheme.parameter() == result.scheme.parameter();
    t.rows.push_back({format_real(c.h), to_string(c.scheme.kind),
                      format_real(c.scheme.parameter()), format_real(c.score),
                      fmt_size(c.failed_folds), sel ? "1" : "0"});
  }
  return t;
}

}  // namespace flr
