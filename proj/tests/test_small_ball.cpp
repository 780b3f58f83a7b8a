#include <doctest.h>

#include <cmath>
#include <random>

#include "flr/errors.hpp"
#include "flr/small_ball.hpp"
#include "flr/synthetic.hpp"
#include "support.hpp"

using namespace flr;

TEST_CASE("empirical small-ball probability examples") {
  const EmpiricalF e({3.0, 1.0, 2.0});
  CHECK(e(5.0) == 1.0);
  CHECK(e(0.5) == 0.0);
  CHECK(empirical_F(e, 2.0) == doctest::Approx(2.0 / 3.0));
  CHECK(e(3.0) == 1.0);
  CHECK(e.quantile(0.5) == 2.0);
  CHECK_THROWS_AS(EmpiricalF(std::vector<double>{}), InputError);
  CHECK_THROWS_AS(EmpiricalF(std::vector<double>{1.0, -1.0}), InputError);
}

TEST_CASE("empirical F is a monotone step function hitting j/n at order statistics") {
  std::mt19937_64 gen(41);
  std::exponential_distribution<double> ex(2.0);
  std::vector<double> norms(500);
  for (auto& v : norms) v = ex(gen);
  const EmpiricalF e(norms);
  const auto& sorted = e.sorted_norms();
  CHECK(std::is_sorted(sorted.begin(), sorted.end()));
  for (std::size_t j = 0; j < sorted.size(); j += 37) {
    CHECK(e(sorted[j]) == doctest::Approx(static_cast<double>(j + 1) / 500.0));
  }
  double prev = 0.0;
  for (int i = 0; i <= 300; ++i) {
    const double f = e(i * 0.01);
    CHECK(f >= prev);
    CHECK(f <= 1.0);
    prev = f;
  }
}

TEST_CASE("parametric family examples") {
  SbpFamily pe{SbpKind::polynomial_exponential, 1.0, 1.0, 0.0, 1.0};
  CHECK(family_F(pe, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  double prev = family_F(pe, 0.1);
  for (double h : {0.05, 0.01}) {
    const double f = family_F(pe, h);
    CHECK(f < prev);
    prev = f;
  }
  CHECK(prev < 1e-40);

  SbpFamily ls{SbpKind::log_squared, 1.0, 1.0};
  CHECK(family_F(ls, std::exp(-1.0)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(family_F(ls, 1.0), DomainError);
  CHECK_THROWS_AS(family_F(pe, 0.0), DomainError);
  CHECK_THROWS_AS(family_F(pe, -0.5), DomainError);
  CHECK(log_family_F(pe, 1e-3) == doctest::Approx(-1000.0));
}

TEST_CASE("auxiliary function examples") {
  SbpFamily r1{SbpKind::polynomial_exponential, 1.0, 1.0, 0.0, 1.0};
  SbpFamily r2{SbpKind::log_squared, 1.0, 1.0};
  CHECK(rho(r1, 0.1) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(rho(r2, std::exp(-1.0)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  for (const auto& f : {r1, r2}) {
    double prev = rho(f, 0.1) / 0.1;
    for (double s : {0.01, 0.001}) {
      const double ratio = rho(f, s) / s;
      CHECK(ratio < prev);
      prev = ratio;
    }
    CHECK_THROWS_AS(rho(f, 0.0), DomainError);
    CHECK_THROWS_AS(rho(f, 1.0), DomainError);
  }
}

TEST_CASE("Gamma_0 limit check") {
  const RealFn log_F = [](double s) { return -1.0 / s; };
  const RealFn rho_fn = [](double s) { return s * s; };
  const auto rep = check_gamma_limit(log_F, rho_fn, {1e-1, 1e-2, 1e-3}, {-1.0, 0.0, 1.0});
  for (const auto& row : rep.rows) {
    if (row.x == 0.0) CHECK(row.ratio == 1.0);
    const double closed = std::exp(row.x / (1.0 + row.x * row.s));
    CHECK(row.ratio == doctest::Approx(closed).epsilon(1e-9));
  }
  CHECK(rep.smallest_s == 1e-3);
  CHECK(rep.max_relative_deviation <= 0.002);

  SbpFamily ls{SbpKind::log_squared, 1.0, 0.7};
  ls.rho_scale = matched_rho_scale(ls);
  const auto rep2 = check_gamma_limit([&](double s) { return log_family_F(ls, s); },
                                      [&](double s) { return rho(ls, s); }, {1e-2, 1e-6, 1e-12},
                                      {-1.0, 1.0});
  CHECK(rep2.max_relative_deviation < 0.05);
}

TEST_CASE("family fit recovers a power law") {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> norms(20000);
  for (auto& v : norms) v = std::sqrt(u(gen));
  FamilyFitOptions opts;
  opts.freeze_c2_zero = true;
  const auto fit = fit_family(EmpiricalF(norms), SbpKind::polynomial_exponential, opts);
  CHECK(fit.family.alpha == doctest::Approx(2.0).epsilon(0.15));
  CHECK(fit.family.c2 == 0.0);
}

TEST_CASE("family fit round trip on the family's own distribution") {
  std::mt19937_64 gen(43);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> norms(10000);
  // F(h) = exp(-1/h) inverted: h = -1 / log U.
  for (auto& v : norms) v = -1.0 / std::log(u(gen));
  const auto fit = fit_family(EmpiricalF(norms), SbpKind::polynomial_exponential);
  CHECK(fit.family.beta == doctest::Approx(1.0).epsilon(0.25));
  CHECK(fit.points >= 4);
}

TEST_CASE("family fit preconditions") {
  CHECK_THROWS_AS(fit_family(EmpiricalF(std::vector<double>(49, 1.0)), SbpKind::log_squared),
                  FitError);
  CHECK_THROWS_AS(fit_family(EmpiricalF(std::vector<double>(100, 0.5)),
                             SbpKind::polynomial_exponential),
                  FitError);
}

TEST_CASE("plug-in v examples") {
  std::mt19937_64 gen(44);
  const auto s = testing::random_sample(gen, 200, 3);
  const Curve x0(3);
  const double h = 0.9;
  CHECK(estimate_v(s, x0, Kernel::naive(), h, [](double) { return 0.0; }) == 0.0);

  const double v = estimate_v(s, x0, Kernel::naive(), h, [](double z) { return z; });
  double direct = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double z = norm(s.input(i) - x0);
    if (z <= h) direct += z * z;
  }
  direct /= 200.0;
  CHECK(v == doctest::Approx(direct).epsilon(1e-14));
  const EmpiricalF e(s, x0);
  CHECK(v <= h * h * e(h));

  const RealFn r = [](double z) { return z * z * z; };
  for (double hh : {0.5, 0.7, 0.9}) {
    const double vk = estimate_v(s, x0, Kernel::linear_downweight(), hh, r);
    CHECK(vk <= Kernel::linear_downweight().sup() * hh * r(hh) * e(hh) * (1 + 1e-12));
  }
  CHECK_THROWS_AS(estimate_v(s, x0, Kernel::naive(), 1e-6, r), EmptyNeighborhood);
}

TEST_CASE("local moment ratio rises toward one as h shrinks") {
  KLSpec kl{Decay::exponential, 1.0, 20, 5};
  const auto xs = sample_kl(kl, 20000);
  const auto e = EmpiricalF::from_curves(xs, Curve(20));
  const double scale = e.quantile(0.5);
  double prev = 0.0;
  for (double f : {0.5, 0.3, 0.2}) {
    const double r = local_moment_ratio(e, Kernel::naive(), f * scale);
    CHECK(r >= prev);
    CHECK(r <= 1.0);
    prev = r;
  }
}
