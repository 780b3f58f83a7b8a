#include <doctest.h>

#include <random>

#include "flr/errors.hpp"
#include "flr/regularized_inverse.hpp"
#include "support.hpp"

using namespace flr;

namespace {

LocalFactorization scalar_pair() {
  const FunctionalSample s({Curve{0.5}, Curve{0.25}}, {1.0, 2.0});
  return build_factorization(s, Curve{0.0}, Kernel::naive(), 1.0);
}

/// Rank-deficient instance: n points in d > n dimensions.
LocalFactorization random_factorization(std::mt19937_64& gen, std::size_t n, std::size_t d) {
  const auto s = testing::random_sample(gen, n, d);
  const Curve x0 = testing::random_curve(gen, d, 0.2);
  return build_factorization(s, x0, Kernel::naive(), testing::covering_h(s, x0));
}

std::vector<RegScheme> all_schemes(const LocalFactorization& f) {
  return {RegScheme::truncation(f.rank()), RegScheme::truncation(1),
          RegScheme::penalization(1e-3), RegScheme::penalization(0.5),
          RegScheme::tikhonov(1e-4), RegScheme::tikhonov(0.05)};
}

}  // namespace

TEST_CASE("scheme construction and parsing") {
  CHECK_THROWS_AS(RegScheme::truncation(0), DomainError);
  CHECK_THROWS_AS(RegScheme::penalization(0.0), DomainError);
  CHECK_THROWS_AS(RegScheme::tikhonov(-1.0), DomainError);
  CHECK(RegScheme::parse("truncation:4") == RegScheme::truncation(4));
  CHECK(RegScheme::parse("penalization:1e-3") == RegScheme::penalization(1e-3));
  CHECK(RegScheme::parse("tikhonov:0.5").alpha == 0.5);
  CHECK_THROWS_AS(RegScheme::parse("ridge:1"), InputError);
  CHECK_THROWS_AS(RegScheme::parse("truncation:x"), InputError);
  CHECK_THROWS_AS(RegScheme::parse("penalization"), InputError);
  CHECK(RegScheme::parse(RegScheme::tikhonov(0.125).to_string()) == RegScheme::tikhonov(0.125));
}

TEST_CASE("apply_dagger examples") {
  SUBCASE("penalization on the null space divides by alpha") {
    const FunctionalSample s({Curve{1.0, 0.0}}, {0.0});
    const auto f = build_factorization(s, Curve{0.0, 0.0}, Kernel::naive(), 2.0);
    const Curve v{0.0, 3.0};
    CHECK(norm(apply_dagger(f, RegScheme::penalization(0.1), v) - Curve{0.0, 30.0}) <= 1e-12);
  }
  SUBCASE("full truncation inverts on the range") {
    std::mt19937_64 gen(1);
    for (int t = 0; t < 20; ++t) {
      const auto f = random_factorization(gen, 4, 7);
      Curve u(7);
      for (const auto& e : f.eigenvectors()) u = axpy(std::sin(t + 1.0 + u[0]), e, u);
      const Curve back = apply_dagger(f, RegScheme::truncation(f.rank()), apply_gamma(f, u));
      CHECK(norm(back - u) <= 1e-8 * norm(u));
    }
  }
  SUBCASE("tikhonov scalar case with alpha = 0") {
    const auto f = scalar_pair();
    const auto s = RegScheme::unchecked_for_testing(RegKind::tikhonov, 1, 0.0);
    CHECK(apply_dagger(f, s, f.zbar())[0] == doctest::Approx(2.4).epsilon(1e-14));
  }
}

TEST_CASE("truncation is clipped to the rank with a warning") {
  const auto f = scalar_pair();
  std::vector<std::string> warnings;
  const Curve a = apply_dagger(f, RegScheme::truncation(5), f.zbar(), &warnings);
  CHECK(warnings.size() == 1);
  CHECK(a[0] == doctest::Approx(2.4));
  CHECK(effective_truncation(f, RegScheme::truncation(5)) == 1);
}

TEST_CASE("conditioning index examples") {
  const auto f = scalar_pair();
  const double mu1 = f.top_eigenvalue();
  CHECK(conditioning_index(f, RegScheme::truncation(1)) == 1.0);
  CHECK(conditioning_index(f, RegScheme::penalization(mu1)) == 1.0);

  const FunctionalSample s({Curve{1.0}}, {0.0});
  const auto g = build_factorization(s, Curve{0.0}, Kernel::naive(), 2.0);
  REQUIRE(g.top_eigenvalue() == doctest::Approx(1.0));
  // mu_1 = 1 here; rescale to mu_1 = 0.5 through the weights.
  const auto half = build_factorization(s, Curve{0.0}, std::vector<double>{0.5}, 2.0);
  CHECK(conditioning_index(half, RegScheme::tikhonov(0.01)) == doctest::Approx(0.04));
}

TEST_CASE("dagger_norm examples") {
  const FunctionalSample s({Curve{1.0, 0.0}}, {0.0});
  const auto f = build_factorization(s, Curve{0.0, 0.0}, Kernel::naive(), 2.0);
  CHECK(dagger_norm(f, RegScheme::penalization(0.1)) == doctest::Approx(10.0));

  const auto quarter = build_factorization(FunctionalSample({Curve{0.5}}, {0.0}), Curve{0.0},
                                           Kernel::naive(), 1.0);
  REQUIRE(quarter.top_eigenvalue() == doctest::Approx(0.25));
  CHECK(dagger_norm(quarter, RegScheme::truncation(1)) == doctest::Approx(4.0));

  const auto fifth = build_factorization(FunctionalSample({Curve{1.0}}, {0.0}), Curve{0.0},
                                         std::vector<double>{0.2}, 2.0);
  CHECK(dagger_norm(fifth, RegScheme::tikhonov(0.04)) == doctest::Approx(2.5));
}

TEST_CASE("dagger_norm matches the largest amplification on the spectrum") {
  std::mt19937_64 gen(9);
  for (int t = 0; t < 30; ++t) {
    const auto f = random_factorization(gen, 5, 5 + t % 3);
    for (const auto& s : all_schemes(f)) {
      double amp = complement_factor(s) * (f.dim() > f.rank() ? 1.0 : 0.0);
      for (std::size_t j = 0; j < f.rank(); ++j) {
        amp = std::max(amp, std::abs(norm(apply_dagger(f, s, f.eigenvectors()[j]))));
      }
      CHECK(amp <= dagger_norm(f, s) * (1 + 1e-10));
      if (s.kind != RegKind::tikhonov) CHECK(amp == doctest::Approx(dagger_norm(f, s)).epsilon(1e-10));
    }
  }
}

TEST_CASE("dagger composed with the operator is a contraction") {
  std::mt19937_64 gen(10);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + t % 10;
    const std::size_t d = 1 + t % 8;
    const auto f = random_factorization(gen, n, d);
    for (const auto& s : all_schemes(f)) {
      for (int rep = 0; rep < 4; ++rep) {
        const Curve v = testing::random_curve(gen, d);
        CHECK(norm(apply_dagger(f, s, apply_gamma(f, v))) <= (1 + 1e-10) * norm(v));
      }
    }
  }
}

TEST_CASE("dagger is self-adjoint and positive") {
  std::mt19937_64 gen(12);
  for (int t = 0; t < 40; ++t) {
    const std::size_t d = 2 + t % 6;
    const auto f = random_factorization(gen, 1 + t % 9, d);
    for (const auto& s : all_schemes(f)) {
      const Curve v = testing::random_curve(gen, d);
      const Curve w = testing::random_curve(gen, d);
      const Curve dv = apply_dagger(f, s, v);
      const Curve dw = apply_dagger(f, s, w);
      const double scale = dagger_norm(f, s) * norm(v) * norm(w);
      CHECK(std::abs(inner(dv, w) - inner(v, dw)) <= 1e-10 * scale);
      CHECK(inner(dv, v) >= -1e-10 * dagger_norm(f, s) * squared_norm(v));
    }
  }
}

TEST_CASE("penalization converges on the range as alpha decreases") {
  std::mt19937_64 gen(13);
  for (int t = 0; t < 20; ++t) {
    const auto f = random_factorization(gen, 4, 6);
    Curve v(6);
    for (std::size_t j = 0; j < f.rank(); ++j) v = axpy(1.0 + j, f.eigenvectors()[j], v);
    double prev = std::numeric_limits<double>::infinity();
    for (double alpha : {1e-2, 1e-4, 1e-6}) {
      const double err = norm(apply_dagger(f, RegScheme::penalization(alpha), apply_gamma(f, v)) - v);
      CHECK(err < prev);
      prev = err;
    }
  }
}

TEST_CASE("penalization and tikhonov agree to first order in alpha") {
  std::mt19937_64 gen(14);
  for (int t = 0; t < 20; ++t) {
    const auto f = random_factorization(gen, 3, 3);
    if (f.rank() < 3 || f.eigenvalues().back() < 1e-2 * f.top_eigenvalue()) continue;
    Curve v(3);
    for (const auto& e : f.eigenvectors()) v = axpy(1.0, e, v);
    const auto gv = apply_gamma(f, v);
    const double mu_m = f.eigenvalues().back();
    std::vector<double> ratios;
    for (double a : {1e-4, 1e-5}) {
      const double ep = norm(apply_dagger(f, RegScheme::penalization(a * mu_m), gv) - v);
      const double et = norm(apply_dagger(f, RegScheme::tikhonov(a * mu_m * mu_m), gv) - v);
      ratios.push_back(ep / a);
      ratios.push_back(et / a);
    }
    for (double r : ratios) CHECK(r <= 10.0 * norm(v));
    CHECK(ratios[0] == doctest::Approx(ratios[2]).epsilon(1e-2));
  }
}

TEST_CASE("schemes tuned to a conditioning index") {
  std::mt19937_64 gen(15);
  const auto f = random_factorization(gen, 8, 8);
  const double mu1 = f.top_eigenvalue();
  CHECK(scheme_for_conditioning(f, RegKind::penalization, 0.1).alpha == doctest::Approx(0.1 * mu1));
  CHECK(scheme_for_conditioning(f, RegKind::tikhonov, 0.1).alpha == doctest::Approx(0.1 * mu1 * mu1));
  const auto tr = scheme_for_conditioning(f, RegKind::truncation, 0.1);
  CHECK(conditioning_index(f, tr) >= 0.1);
  if (tr.truncation_level < f.rank()) CHECK(f.eigenvalues()[tr.truncation_level] < 0.1 * mu1);
}
