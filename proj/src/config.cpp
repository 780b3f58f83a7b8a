#include "flr/config.hpp"

#include <fstream>

#include <fmt/format.h>

#include "flr/errors.hpp"

namespace flr {

using nlohmann::json;

namespace {

RegKind parse_kind(const std::string& s) {
  if (s == "truncation") return RegKind::truncation;
  if (s == "penalization") return RegKind::penalization;
  if (s == "tikhonov") return RegKind::tikhonov;
  throw ConfigError(fmt::format("unknown regularisation kind '{}'", s));
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

std::vector<double> padded(const json& j, const char* key, std::size_t dim) {
  std::vector<double> v = get_or<std::vector<double>>(j, key, {});
  if (v.size() > dim) {
    throw ConfigError(fmt::format("'{}' has {} entries but dim is {}", key, v.size(), dim));
  }
  v.resize(dim, 0.0);
  return v;
}

}  // namespace

SchemeSpec SchemeSpec::from_json(const json& j) {
  SchemeSpec s;
  if (j.is_string()) {
    const auto text = j.get<std::string>();
    if (text == "nadaraya_watson" || text == "nw") {
      s.mode = Mode::nadaraya_watson;
      return s;
    }
    try {
      s.scheme = RegScheme::parse(text);
    } catch (const InputError& e) {
      throw ConfigError(e.what());
    }
    s.kind = s.scheme.kind;
    return s;
  }
  if (!j.is_object()) throw ConfigError("scheme entries must be strings or objects");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "nadaraya_watson" || kind == "nw") {
    s.mode = Mode::nadaraya_watson;
    return s;
  }
  s.kind = parse_kind(kind);
  const auto policy = get_or<std::string>(j, "policy", "fixed");
  if (policy == "fixed") {
    try {
      if (s.kind == RegKind::truncation) {
        s.scheme = RegScheme::truncation(j.at("N").get<std::size_t>());
      } else if (s.kind == RegKind::penalization) {
        s.scheme = RegScheme::penalization(j.at("alpha").get<double>());
      } else {
        s.scheme = RegScheme::tikhonov(j.at("alpha").get<double>());
      }
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  } else if (policy == "conditioning_h") {
    s.mode = Mode::conditioning_h;
    s.factor = get_or<double>(j, "factor", 1.0);
    if (!(s.factor > 0.0)) throw ConfigError("policy factor must be > 0");
  } else if (policy == "rho_inverse") {
    if (s.kind != RegKind::penalization) {
      throw ConfigError("rho_inverse policy applies to penalization only");
    }
    s.mode = Mode::rho_inverse;
  } else {
    throw ConfigError(fmt::format("unknown scheme policy '{}'", policy));
  }
  return s;
}

json SchemeSpec::to_json() const {
  switch (mode) {
    case Mode::nadaraya_watson:
      return {{"kind", "nadaraya_watson"}};
    case Mode::conditioning_h:
      return {{"kind", to_string(kind)}, {"policy", "conditioning_h"}, {"factor", factor}};
    case Mode::rho_inverse:
      return {{"kind", "penalization"}, {"policy", "rho_inverse"}};
    case Mode::fixed:
      if (kind == RegKind::truncation) return {{"kind", "truncation"}, {"N", scheme.truncation_level}};
      return {{"kind", to_string(kind)}, {"alpha", scheme.alpha}};
  }
  return {};
}

std::string SchemeSpec::label() const {
  switch (mode) {
    case Mode::nadaraya_watson:
      return "nadaraya_watson";
    case Mode::conditioning_h:
      return to_string(kind) + "@conditioning_h";
    case Mode::rho_inverse:
      return "penalization@rho_inverse";
    case Mode::fixed:
      return to_string(kind);
  }
  return {};
}

double SchemeSpec::parameter() const {
  switch (mode) {
    case Mode::fixed:
      return scheme.parameter();
    case Mode::conditioning_h:
      return factor;
    default:
      return 0.0;
  }
}

std::optional<RegScheme> resolve_scheme(const SchemeSpec& spec, const LocalFactorization& f,
                                        double rho_inverse_alpha) {
  switch (spec.mode) {
    case SchemeSpec::Mode::nadaraya_watson:
      return std::nullopt;
    case SchemeSpec::Mode::fixed:
      return spec.scheme;
    case SchemeSpec::Mode::conditioning_h:
      return scheme_for_conditioning(f, spec.kind, spec.factor * f.bandwidth());
    case SchemeSpec::Mode::rho_inverse:
      return RegScheme::penalization(rho_inverse_alpha);
  }
  return std::nullopt;
}

Curve X0Rule::point(const KLSpec& kl) const {
  return kind == Kind::zero ? Curve(kl.dim) : smooth_decay_point(kl, scale);
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  c.source = j;
  try {
    const json& kl = j.at("kl");
    const auto decay = get_or<std::string>(kl, "decay", "exponential");
    if (decay == "exponential") {
      c.kl.decay = Decay::exponential;
    } else if (decay == "polynomial") {
      c.kl.decay = Decay::polynomial;
    } else {
      throw ConfigError(fmt::format("unknown decay '{}'", decay));
    }
    c.kl.rate = get_or<double>(kl, "rate", 1.0);
    c.kl.dim = get_or<std::size_t>(kl, "dim", 50);
    c.kl.seed = get_or<std::uint64_t>(kl, "seed", 1);

    const json reg = get_or<json>(j, "regression", json::object());
    c.regression.a0 = get_or<double>(reg, "a0", 0.0);
    c.regression.theta = Curve(padded(reg, "theta", c.kl.dim));
    c.regression.quad_diag = padded(reg, "quad_diag", c.kl.dim);
    c.regression.noise_sigma = get_or<double>(reg, "noise_sigma", 0.0);

    const json x0 = get_or<json>(j, "x0", json{{"rule", "zero"}});
    const auto rule = get_or<std::string>(x0, "rule", "zero");
    if (rule == "zero") {
      c.x0.kind = X0Rule::Kind::zero;
    } else if (rule == "smooth_decay") {
      c.x0.kind = X0Rule::Kind::smooth_decay;
      c.x0.scale = get_or<double>(x0, "scale", 1.0);
    } else {
      throw ConfigError(fmt::format("unknown x0 rule '{}'", rule));
    }

    c.kernel = get_or<std::string>(j, "kernel", "naive");
    c.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
    const json& hg = j.at("h_grid");
    if (hg.is_array()) {
      c.h_grid.values = hg.get<std::vector<double>>();
    } else {
      c.h_grid.relative = true;
      c.h_grid.values = hg.at("relative").get<std::vector<double>>();
      c.h_grid.min_active = get_or<std::size_t>(hg, "min_active", 50);
    }
    for (const auto& s : j.at("schemes")) c.schemes.push_back(SchemeSpec::from_json(s));
    c.replicates = get_or<std::size_t>(j, "replicates", 1);
    c.seed = get_or<std::uint64_t>(j, "seed", 1);
    c.held_out = get_or<std::size_t>(j, "held_out", 100000);
    c.rho_scale = get_or<double>(j, "rho_scale", 1.0);
    c.bound_constant = get_or<double>(j, "bound_C", 1.0);
    c.output = get_or<std::string>(j, "output", "");
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config: {}", e.what()));
  } catch (const ConfigError&) {
    throw;
  } catch (const InputError& e) {
    throw ConfigError(fmt::format("config: {}", e.what()));
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config '{}' is not valid JSON: {}", path.string(), e.what()));
  }
  return from_json(j);
}

void ExperimentConfig::validate() const {
  try {
    kl.validate();
    regression.validate(kl.dim);
    Kernel::parse(kernel);
  } catch (const InputError& e) {
    throw ConfigError(fmt::format("config: {}", e.what()));
  }
  if (n_grid.empty()) throw ConfigError("n_grid must be non-empty");
  if (h_grid.values.empty()) throw ConfigError("h_grid must be non-empty");
  if (schemes.empty()) throw ConfigError("schemes must be non-empty");
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  for (std::size_t n : n_grid)
    if (n < 1) throw ConfigError("sample sizes must be >= 1");
  for (double h : h_grid.values)
    if (!(h > 0.0)) throw ConfigError("bandwidths must be > 0");
  if (held_out < 100) throw ConfigError("held_out must be >= 100");
}

std::uint64_t ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : source.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string ExperimentConfig::hash_hex() const { return fmt::format("{:016x}", hash()); }

}  // namespace flr
