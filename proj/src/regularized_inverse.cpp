#include "flr/regularized_inverse.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "flr/csv_io.hpp"
#include "flr/errors.hpp"

namespace flr {

std::string to_string(RegKind kind) {
  switch (kind) {
    case RegKind::truncation:
      return "truncation";
    case RegKind::penalization:
      return "penalization";
    case RegKind::tikhonov:
      return "tikhonov";
  }
  return "unknown";
}

RegScheme RegScheme::truncation(std::size_t n) {
  if (n < 1) throw DomainError("truncation level N must be >= 1");
  return {RegKind::truncation, n, 0.0};
}

RegScheme RegScheme::penalization(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("penalization alpha must be > 0");
  return {RegKind::penalization, 1, alpha};
}

RegScheme RegScheme::tikhonov(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("tikhonov alpha must be > 0");
  return {RegKind::tikhonov, 1, alpha};
}

RegScheme RegScheme::unchecked_for_testing(RegKind kind, std::size_t n, double alpha) {
  return {kind, n, alpha};
}

RegScheme RegScheme::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw InputError(fmt::format("scheme '{}' must look like kind:parameter", text));
  }
  const std::string kind = text.substr(0, colon);
  const std::string arg = text.substr(colon + 1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), value);
  if (ec != std::errc() || ptr != arg.data() + arg.size()) {
    throw InputError(fmt::format("scheme parameter '{}' is not a number", arg));
  }
  if (kind == "truncation") {
    if (value < 1.0 || value != std::floor(value)) {
      throw DomainError("truncation level must be a positive integer");
    }
    return truncation(static_cast<std::size_t>(value));
  }
  if (kind == "penalization") return penalization(value);
  if (kind == "tikhonov") return tikhonov(value);
  throw InputError(fmt::format("unknown scheme kind '{}'", kind));
}

std::string RegScheme::to_string() const {
  return flr::to_string(kind) + ":" + io::format_real(parameter());
}

double RegScheme::parameter() const {
  return kind == RegKind::truncation ? static_cast<double>(truncation_level) : alpha;
}

std::size_t effective_truncation(const LocalFactorization& f, const RegScheme& s) {
  return std::min(s.truncation_level, f.rank());
}

double filter(const LocalFactorization& f, const RegScheme& s, std::size_t j) {
  const double mu = f.eigenvalues()[j];
  switch (s.kind) {
    case RegKind::truncation:
      return j < effective_truncation(f, s) ? 1.0 / mu : 0.0;
    case RegKind::penalization:
      return 1.0 / (mu + s.alpha);
    case RegKind::tikhonov:
      return mu / (mu * mu + s.alpha);
  }
  return 0.0;
}

double complement_factor(const RegScheme& s) {
  return s.kind == RegKind::penalization ? 1.0 / s.alpha : 0.0;
}

namespace {

Curve dagger_impl(const LocalFactorization& f, const RegScheme& s, const Curve& v,
                  std::vector<std::string>* warnings, bool with_complement) {
  if (s.kind == RegKind::truncation) {
    if (f.rank() == 0) {
      throw DegenerateTruncation("truncation requested but the local operator has rank 0");
    }
    if (s.truncation_level > f.rank() && warnings) {
      warnings->push_back(fmt::format("truncation level {} clipped to rank {}",
                                      s.truncation_level, f.rank()));
    }
  }
  const auto c = project(f, v);
  Curve out(f.dim());
  Curve in_span(f.dim());
  for (std::size_t j = 0; j < f.rank(); ++j) {
    out = axpy(filter(f, s, j) * c[j], f.eigenvectors()[j], out);
    in_span = axpy(c[j], f.eigenvectors()[j], in_span);
  }
  const double comp = with_complement ? complement_factor(s) : 0.0;
  if (comp != 0.0) out = axpy(comp, v - in_span, out);
  return out;
}

}  // namespace

Curve apply_dagger(const LocalFactorization& f, const RegScheme& s, const Curve& v,
                   std::vector<std::string>* warnings) {
  return dagger_impl(f, s, v, warnings, true);
}

Curve apply_dagger_on_range(const LocalFactorization& f, const RegScheme& s, const Curve& v,
                            std::vector<std::string>* warnings) {
  return dagger_impl(f, s, v, warnings, false);
}

double conditioning_index(const LocalFactorization& f, const RegScheme& s) {
  const double mu1 = f.top_eigenvalue();
  if (!(mu1 > 0.0)) throw DegenerateOperator("conditioning index undefined: mu_1 = 0");
  switch (s.kind) {
    case RegKind::truncation:
      return f.eigenvalues()[effective_truncation(f, s) - 1] / mu1;
    case RegKind::penalization:
      return s.alpha / mu1;
    case RegKind::tikhonov:
      return s.alpha / (mu1 * mu1);
  }
  return 0.0;
}

double dagger_norm(const LocalFactorization& f, const RegScheme& s) {
  switch (s.kind) {
    case RegKind::truncation:
      if (f.rank() == 0) throw DegenerateTruncation("truncation on a rank-0 operator");
      return 1.0 / f.eigenvalues()[effective_truncation(f, s) - 1];
    case RegKind::penalization:
      if (f.rank() < f.dim() || f.rank() == 0) return 1.0 / s.alpha;
      return 1.0 / (f.eigenvalues().back() + s.alpha);
    case RegKind::tikhonov: {
      double best = 0.0;
      for (double mu : f.eigenvalues()) best = std::max(best, mu / (mu * mu + s.alpha));
      return best;
    }
  }
  return 0.0;
}

RegScheme scheme_for_conditioning(const LocalFactorization& f, RegKind kind, double r) {
  const double mu1 = f.top_eigenvalue();
  if (!(mu1 > 0.0)) throw DegenerateOperator("cannot tune a scheme for a zero operator");
  if (!(r > 0.0)) throw DomainError("conditioning index must be > 0");
  switch (kind) {
    case RegKind::truncation: {
      std::size_t n = 1;
      for (std::size_t j = 0; j < f.rank(); ++j)
        if (f.eigenvalues()[j] >= r * mu1) n = j + 1;
      return RegScheme::truncation(n);
    }
    case RegKind::penalization:
      return RegScheme::penalization(r * mu1);
    case RegKind::tikhonov:
      return RegScheme::tikhonov(r * mu1 * mu1);
  }
  return {};
}

}  // namespace flr
