#include <fstream>
#include <limits>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "flr/config.hpp"
#include "flr/csv_io.hpp"
#include "flr/errors.hpp"
#include "flr/estimator.hpp"
#include "flr/harness.hpp"
#include "flr/small_ball.hpp"
#include "flr/synthetic.hpp"

namespace {

using nlohmann::json;

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

/// Writes to the file when a path is given, to stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw flr::ConfigError(fmt::format("cannot write '{}'", path));
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string output_path(const std::string& flag, const flr::ExperimentConfig& cfg) {
  return flag.empty() ? cfg.output.string() : flag;
}


struct FitArgs {
  std::string data;
  std::string x0_file;
  double h = 0.0;
  std::string kernel = "naive";
  std::string scheme = "penalization:1e-3";
  std::string eigen_out;
  bool gradient = false;
};

int cmd_fit(const FitArgs& a) {
  const auto sample = flr::io::read_dataset(a.data);
  const auto x0 = flr::io::read_curve(a.x0_file);
  const auto k = flr::Kernel::parse(a.kernel);
  const auto f = flr::build_factorization(sample, x0, k, a.h);

  json out;
  flr::FitReport fit;
  if (a.scheme == "nw" || a.scheme == "nadaraya_watson") {
    fit = flr::nadaraya_watson_fit(sample, f);
    out["scheme"] = "nadaraya_watson";
  } else {
    const auto scheme = flr::RegScheme::parse(a.scheme);
    fit = flr::local_linear_fit(sample, f, scheme, a.gradient);
    out["scheme"] = scheme.to_string();
    out["conditioning_index"] = flr::conditioning_index(f, scheme);
    out["dagger_norm"] = flr::dagger_norm(f, scheme);
  }
  out["estimate"] = fit.estimate;
  out["weight_sum"] = fit.weight_sum;
  out["kernel_sum"] = fit.kernel_sum;
  out["active_count"] = fit.active_count;
  out["rank"] = f.rank();
  out["top_eigenvalue"] = f.top_eigenvalue();
  out["h"] = a.h;
  out["kernel"] = k.name();
  out["warnings"] = fit.warnings;
  if (fit.gradient) out["gradient"] = fit.gradient->coeffs();
  std::cout << out.dump(2) << '\n';

  if (!a.eigen_out.empty()) {
    Output eig(a.eigen_out);
    flr::io::write_column(eig.stream(), f.eigenvalues(), "eigenvalue");
  }
  return kOk;
}

struct CvArgs {
  std::string data;
  std::string x0_file;
  std::string kernel = "naive";
  std::vector<double> h_grid;
  std::vector<std::string> schemes;
  std::optional<double> radius;
  std::string out;
};

int cmd_cv(const CvArgs& a) {
  const auto sample = flr::io::read_dataset(a.data);
  const auto x0 = flr::io::read_curve(a.x0_file);
  std::vector<flr::RegScheme> schemes;
  for (const auto& s : a.schemes) schemes.push_back(flr::RegScheme::parse(s));
  flr::CvOptions opts;
  opts.local_radius = a.radius;
  const auto res = flr::cv_select(sample, x0, flr::Kernel::parse(a.kernel), a.h_grid, schemes, opts);
  Output out(a.out);
  flr::cv_table(res).write(out.stream(), fmt::format("selected h={} scheme={} score={}",
                                                     flr::io::format_real(res.h),
                                                     res.scheme.to_string(),
                                                     flr::io::format_real(res.score)));
  return kOk;
}

int cmd_simulate(const std::string& config, std::optional<std::size_t> n,
                 std::optional<std::uint64_t> seed, const std::string& out_path,
                 const std::string& x0_out) {
  auto cfg = flr::ExperimentConfig::load(config);
  if (seed) cfg.seed = *seed;
  const std::size_t size = n.value_or(cfg.n_grid.front());
  const auto sample = flr::gen_dataset(cfg.kl, cfg.regression, size, cfg.seed);
  Output out(out_path);
  out.stream() << "# " << flr::provenance_comment(cfg) << '\n';
  flr::io::write_dataset(out.stream(), sample);
  if (!x0_out.empty()) {
    Output x0(x0_out);
    flr::io::write_curve(x0.stream(), cfg.x0.point(cfg.kl));
  }
  return kOk;
}

flr::ExperimentConfig load_config(const std::string& path) {
  auto cfg = flr::ExperimentConfig::load(path);
  for (const auto& w : flr::config_warnings(cfg)) std::cerr << "warning: " << w << '\n';
  return cfg;
}

int cmd_mse(const std::string& config, const std::string& out_path, bool serial) {
  const auto cfg = load_config(config);
  const auto rows =
      flr::run_mse(cfg, serial ? flr::par::Exec::serial : flr::par::Exec::parallel);
  Output out(output_path(out_path, cfg));
  flr::mse_table(rows).write(out.stream(), flr::provenance_comment(cfg));
  return kOk;
}

int cmd_rates(const std::string& config, const std::string& out_path) {
  const auto cfg = load_config(config);
  const auto run = flr::run_rates(cfg);
  Output out(output_path(out_path, cfg));
  auto& os = out.stream();
  os << "# " << flr::provenance_comment(cfg) << '\n';
  os << fmt::format("# n={} h0={} scheme={} ll_slope={} nw_slope={} difference={}\n", run.n,
                    flr::io::format_real(run.h0), run.scheme,
                    flr::io::format_real(run.slopes.ll_slope),
                    flr::io::format_real(run.slopes.nw_slope),
                    flr::io::format_real(run.slopes.difference));
  flr::rates_table(run).write(os);
  return kOk;
}

int cmd_bound(const std::string& config, const std::string& out_path, bool with_mse) {
  const auto cfg = load_config(config);
  const auto table = flr::run_bound(cfg, with_mse);
  Output out(output_path(out_path, cfg));
  auto& os = out.stream();
  os << "# " << flr::provenance_comment(cfg) << '\n';
  os << fmt::format("# fitted_C={} ({})\n", flr::io::format_real(table.fitted_constant),
                    with_mse ? "largest mse/bracket ratio on this grid" : "bound_C from config");
  flr::bound_table(table).write(os);
  return kOk;
}

struct SmallBallArgs {
  std::string config;
  std::string data;
  std::string x0_file;
  std::string family = "auto";
  std::string out;
};

int cmd_smallball(const SmallBallArgs& a) {
  std::optional<flr::EmpiricalF> e;
  std::string provenance;
  flr::SbpKind kind = flr::SbpKind::polynomial_exponential;
  if (!a.config.empty()) {
    const auto cfg = flr::ExperimentConfig::load(a.config);
    e.emplace(flr::held_out_F(cfg));
    provenance = flr::provenance_comment(cfg);
    kind = flr::implied_family(cfg.kl).kind;
  } else {
    if (a.data.empty() || a.x0_file.empty()) {
      throw flr::ConfigError("smallball needs --config or both --data and --x0-file");
    }
    e.emplace(flr::io::read_dataset(a.data), flr::io::read_curve(a.x0_file));
  }
  if (a.family == "polynomial_exponential") {
    kind = flr::SbpKind::polynomial_exponential;
  } else if (a.family == "log_squared") {
    kind = flr::SbpKind::log_squared;
  } else if (a.family != "auto") {
    throw flr::ConfigError(fmt::format("unknown small-ball family '{}'", a.family));
  }

  auto fit = flr::fit_family(*e, kind);
  std::string limit = "gamma0 unavailable (fitted C2 = 0)";
  if (fit.family.c2 > 0.0) {
    fit.family.rho_scale = flr::matched_rho_scale(fit.family);
    const auto fam = fit.family;
    const auto rep = flr::check_gamma_limit([&](double s) { return flr::log_family_F(fam, s); },
                                            [&](double s) { return flr::rho(fam, s); },
                                            {1e-1, 1e-2, 1e-3}, {-1.0, 0.0, 1.0});
    limit = fmt::format("gamma0 s={} max_relative_deviation={}", rep.smallest_s,
                        flr::io::format_real(rep.max_relative_deviation));
  }

  Output out(a.out);
  auto& os = out.stream();
  if (!provenance.empty()) os << "# " << provenance << '\n';
  const auto& f = fit.family;
  os << fmt::format("# family={} c1={} c2={} alpha={} beta={} residual={} points={}\n",
                    kind == flr::SbpKind::log_squared ? "log_squared" : "polynomial_exponential",
                    flr::io::format_real(f.c1), flr::io::format_real(f.c2),
                    flr::io::format_real(f.alpha), flr::io::format_real(f.beta),
                    flr::io::format_real(fit.residual_norm), fit.points);
  os << "# " << limit << '\n';
  flr::CsvTable t;
  t.columns = {"p", "h", "F_hat", "F_fit"};
  for (int j = 1; j <= 19; ++j) {
    const double p = 0.05 * j;
    const double h = e->quantile(p);
    double fitted = std::numeric_limits<double>::quiet_NaN();
    try {
      fitted = flr::family_F(f, h);
    } catch (const flr::DomainError&) {
    }
    t.rows.push_back({flr::io::format_real(p), flr::io::format_real(h),
                      flr::io::format_real((*e)(h)), flr::io::format_real(fitted)});
  }
  t.write(os);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local linear regression for functional inputs"};
  app.require_subcommand(1);

  std::string config;
  std::string out;

  auto* sim = app.add_subcommand("simulate", "draw a synthetic dataset");
  std::optional<std::size_t> sim_n;
  std::optional<std::uint64_t> sim_seed;
  std::string x0_out;
  sim->add_option("--config", config, "experiment config (JSON)")->required();
  sim->add_option("--n", sim_n, "sample size (default: first of n_grid)");
  sim->add_option("--seed", sim_seed, "override the config seed");
  sim->add_option("--out", out, "dataset CSV (default stdout)");
  sim->add_option("--x0-out", x0_out, "also write the evaluation point");

  auto* fit = app.add_subcommand("fit", "estimate m(x0) from a dataset");
  FitArgs fa;
  fit->set_help_flag("--help", "Print this help message and exit");
  fit->add_option("--data", fa.data, "dataset CSV")->required();
  fit->add_option("--x0-file", fa.x0_file, "evaluation point CSV")->required();
  fit->add_option("--h", fa.h, "bandwidth")->required()->check(CLI::PositiveNumber);
  fit->add_option("--kernel", fa.kernel, "naive, linear_downweight or a table CSV");
  fit->add_option("--scheme", fa.scheme, "truncation:N, penalization:a, tikhonov:a or nw");
  fit->add_option("--eigen-out", fa.eigen_out, "write the local eigenvalues");
  fit->add_flag("--gradient", fa.gradient, "include the gradient estimate");

  auto* cv = app.add_subcommand("cv", "leave-one-out grid selection");
  CvArgs ca;
  cv->add_option("--data", ca.data, "dataset CSV")->required();
  cv->add_option("--x0-file", ca.x0_file, "evaluation point CSV")->required();
  cv->add_option("--kernel", ca.kernel, "kernel");
  cv->add_option("--h-grid", ca.h_grid, "bandwidths")->required()->delimiter(',');
  cv->add_option("--schemes", ca.schemes, "schemes")->required()->delimiter(',');
  cv->add_option("--local-radius", ca.radius, "score only folds within this distance of x0");
  cv->add_option("--out", ca.out, "CSV (default stdout)");

  auto* mse = app.add_subcommand("mse", "Monte Carlo MSE experiment");
  bool serial = false;
  mse->add_option("--config", config, "experiment config (JSON)")->required();
  mse->add_option("--out", out, "CSV (default: config output, else stdout)");
  mse->add_flag("--serial", serial, "run replicates on one thread");

  auto* sb = app.add_subcommand("smallball", "small-ball table, family fit and limit check");
  SmallBallArgs sa;
  sb->add_option("--config", sa.config, "use the held-out draws of this config");
  sb->add_option("--data", sa.data, "dataset CSV");
  sb->add_option("--x0-file", sa.x0_file, "centre of the balls");
  sb->add_option("--family", sa.family, "auto, polynomial_exponential or log_squared");
  sb->add_option("--out", sa.out, "CSV (default stdout)");

  auto* rates = app.add_subcommand("rates", "bias slopes of local linear vs Nadaraya-Watson");
  rates->add_option("--config", config, "experiment config (JSON)")->required();
  rates->add_option("--out", out, "CSV (default: config output, else stdout)");

  auto* bound = app.add_subcommand("bound", "bound table on the config grid");
  bool with_mse = false;
  bound->add_option("--config", config, "experiment config (JSON)")->required();
  bound->add_option("--out", out, "CSV (default: config output, else stdout)");
  bound->add_flag("--with-mse", with_mse, "run the MSE experiment and fit the constant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*sim) return cmd_simulate(config, sim_n, sim_seed, out, x0_out);
    if (*fit) return cmd_fit(fa);
    if (*cv) return cmd_cv(ca);
    if (*mse) return cmd_mse(config, out, serial);
    if (*sb) return cmd_smallball(sa);
    if (*rates) return cmd_rates(config, out);
    if (*bound) return cmd_bound(config, out, with_mse);
  } catch (const flr::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const flr::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  }
  return kOk;
}
