#include <doctest.h>

#include <random>

#include "flr/errors.hpp"
#include "flr/estimator.hpp"
#include "support.hpp"

using namespace flr;

namespace {

FunctionalSample scalar(std::vector<double> xs, std::vector<double> ys) {
  std::vector<Curve> in;
  for (double x : xs) in.push_back(Curve{x});
  return FunctionalSample(std::move(in), std::move(ys));
}

/// argmin sum K_i (y_i - a - <phi, Z_i>)^2 + n alpha ||phi||^2 over (a, phi) in R^{1+d}.
std::pair<double, Eigen::VectorXd> coordinate_oracle(const FunctionalSample& s, const Curve& x0,
                                                     const std::vector<double>& k, double alpha) {
  const auto d = static_cast<Eigen::Index>(x0.dim());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d + 1, d + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d + 1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    Eigen::VectorXd row(d + 1);
    row(0) = 1.0;
    row.tail(d) = testing::to_eigen(s.input(i) - x0);
    a += k[i] * row * row.transpose();
    b += k[i] * s.output(i) * row;
  }
  a.bottomRightCorner(d, d) += static_cast<double>(s.size()) * alpha * Eigen::MatrixXd::Identity(d, d);
  const Eigen::VectorXd sol = a.fullPivLu().solve(b);
  return {sol(0), sol.tail(d)};
}

}  // namespace

TEST_CASE("symmetric two-point design gives the mean") {
  const auto s = scalar({0.5, -0.5}, {1.0, 3.0});
  const auto fit = local_linear_fit(s, Curve{0.0}, Kernel::naive(), 1.0,
                                    RegScheme::penalization(1e-12));
  CHECK(fit.estimate == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("asymmetric two-point design") {
  const auto s = scalar({0.5, 0.25}, {1.0, 2.0});
  const Curve x0{0.0};

  SUBCASE("closed-form weights in the alpha -> 0 limit") {
    const auto exact = RegScheme::unchecked_for_testing(RegKind::tikhonov, 1, 0.0);
    const auto fit = local_linear_fit(s, x0, Kernel::naive(), 1.0, exact, {{}, true});
    CHECK(fit.weights[0] == doctest::Approx(-0.2).epsilon(1e-12));
    CHECK(fit.weights[1] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(fit.estimate == doctest::Approx(3.0).epsilon(1e-12));
    CHECK((*fit.gradient)[0] == doctest::Approx(-4.0).epsilon(1e-12));
  }
  SUBCASE("penalization approaches the line fit") {
    double prev = 1.0;
    for (double alpha : {1e-2, 1e-4, 1e-6, 1e-8}) {
      const double err =
          std::abs(local_linear_fit(s, x0, Kernel::naive(), 1.0, RegScheme::penalization(alpha))
                       .estimate - 3.0);
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev <= 1e-6);
  }
  SUBCASE("Nadaraya-Watson") {
    CHECK(nadaraya_watson_fit(s, x0, Kernel::naive(), 1.0).estimate == doctest::Approx(1.5));
  }
  SUBCASE("program solver") {
    const auto sol = direct_program_solve(s, x0, Kernel::naive(), 1.0, 1e-12);
    CHECK(sol.intercept == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(sol.gradient[0] == doctest::Approx(-4.0).epsilon(1e-9));
  }
}

TEST_CASE("Nadaraya-Watson examples") {
  const auto s = scalar({0.1, 0.3, 2.0}, {5.0, 5.0, 9.0});
  CHECK(nadaraya_watson_fit(s, Curve{0.0}, Kernel::naive(), 1.0).estimate == 5.0);
  CHECK(nadaraya_watson_fit(s, Curve{0.0}, Kernel::naive(), 0.2).estimate == 5.0);
  CHECK_THROWS_AS(nadaraya_watson_fit(s, Curve{10.0}, Kernel::naive(), 0.2), EmptyNeighborhood);
}

TEST_CASE("constant outputs are reproduced exactly") {
  std::mt19937_64 gen(31);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 2 + t % 15;
    const std::size_t d = 1 + t % 9;
    auto s = testing::random_sample(gen, n, d);
    const double c = std::ldexp(1.0 + t, t % 7 - 3);
    s = s.with_outputs(std::vector<double>(n, c));
    const Curve x0 = testing::random_curve(gen, d, 0.2);
    const double h = testing::covering_h(s, x0);
    for (const auto& scheme : {RegScheme::truncation(n), RegScheme::penalization(1e-6),
                               RegScheme::tikhonov(1e-9)}) {
      try {
        const auto fit = local_linear_fit(s, x0, Kernel::naive(), h, scheme, {{}, true});
        CHECK(std::abs(fit.estimate - c) <= 1e-12 * (1 + std::abs(c)));
        CHECK(norm(*fit.gradient) == 0.0);
      } catch (const DegenerateDenominator&) {
      }
    }
  }
}

TEST_CASE("weights vanish outside the ball and sum to the identity") {
  std::mt19937_64 gen(32);
  for (int t = 0; t < 80; ++t) {
    const std::size_t n = 5 + t % 20;
    const std::size_t d = 1 + t % 6;
    const auto s = testing::random_sample(gen, n, d);
    const Curve x0 = testing::random_curve(gen, d, 0.3);
    const double h = 0.8 * testing::covering_h(s, x0);
    std::optional<LocalFactorization> f;
    try {
      f.emplace(build_factorization(s, x0, Kernel::linear_downweight(), h));
    } catch (const EmptyNeighborhood&) {
      continue;
    }
    for (const auto& scheme : {RegScheme::truncation(3), RegScheme::penalization(1e-3),
                               RegScheme::tikhonov(1e-5)}) {
      FitReport fit;
      try {
        fit = local_linear_fit(s, *f, scheme);
      } catch (const DegenerateDenominator&) {
        continue;
      }
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (f->weights()[i] == 0.0) CHECK(fit.weights[i] == 0.0);
        sum += fit.weights[i];
      }
      CHECK(sum == doctest::Approx(fit.weight_sum).epsilon(1e-14));
      const Curve g = apply_dagger(*f, scheme, f->zbar());
      const double identity = f->weight_total() - static_cast<double>(n) * inner(g, f->zbar());
      CHECK(std::abs(fit.weight_sum - identity) <= 1e-10 * std::max(1.0, f->weight_total()));
    }
  }
}

TEST_CASE("affine outputs are reproduced with full truncation") {
  std::mt19937_64 gen(33);
  for (int t = 0; t < 40; ++t) {
    const std::size_t d = 2 + t % 10;
    const std::size_t n = d + 1 + t % 12;
    auto s = testing::random_sample(gen, n, d);
    const Curve x0 = testing::random_curve(gen, d, 0.2);
    const double a = 2.0 * t - 7.0;
    const Curve phi = testing::random_curve(gen, d, 2.0);
    std::vector<double> y;
    for (std::size_t i = 0; i < n; ++i) y.push_back(a + inner(phi, s.input(i) - x0));
    s = s.with_outputs(y);
    const double h = testing::covering_h(s, x0);
    const auto f = build_factorization(s, x0, Kernel::naive(), h);
    const auto fit = local_linear_fit(s, f, RegScheme::truncation(f.rank()), true);
    CHECK(std::abs(fit.estimate - a) <= 1e-8 * (1 + std::abs(a)));
    for (const auto& u : f.eigenvectors()) {
      CHECK(std::abs(inner(*fit.gradient, u) - inner(phi, u)) <= 1e-5 * (1 + norm(phi)));
    }
  }
}

TEST_CASE("penalised fit equals the penalised least-squares program") {
  std::mt19937_64 gen(34);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + t % 9;
    const std::size_t d = 1 + t % 5;
    const auto s = testing::random_sample(gen, n, d);
    const Curve x0 = testing::random_curve(gen, d, 0.2);
    const double h = (t % 2 ? 1.0 : 0.85) * testing::covering_h(s, x0);
    const Kernel k = t % 3 ? Kernel::naive() : Kernel::linear_downweight();
    std::optional<LocalFactorization> f;
    try {
      f.emplace(build_factorization(s, x0, k, h));
    } catch (const EmptyNeighborhood&) {
      continue;
    }
    for (double alpha : {1e-2, 1e-4, 1e-6}) {
      const auto scheme = RegScheme::penalization(alpha);
      const auto fit = local_linear_fit(s, *f, scheme, true);
      const auto prog = direct_program_solve(s, x0, k, h, alpha);
      const auto [a_oracle, phi_oracle] = coordinate_oracle(s, x0, f->weights(), alpha);

      CHECK(testing::rel_diff(fit.estimate, prog.intercept) <= 1e-8);
      CHECK(testing::rel_diff(fit.estimate, a_oracle) <= 1e-8);
      const double scale = 1.0 + phi_oracle.norm();
      CHECK((testing::to_eigen(*fit.gradient) - phi_oracle).norm() <= 1e-8 * scale);
      CHECK(norm(*fit.gradient - prog.gradient) <= 1e-8 * scale);
    }
  }
}

TEST_CASE("zero direction reproduces Nadaraya-Watson exactly") {
  std::mt19937_64 gen(35);
  const auto s = testing::random_sample(gen, 25, 4);
  const Curve x0(4);
  const auto f = build_factorization(s, x0, Kernel::linear_downweight(), 1.2);
  const auto forced = fit_with_direction(s, f, Curve(4));
  const auto nw = nadaraya_watson_fit(s, x0, Kernel::linear_downweight(), 1.2);
  CHECK(forced.estimate == nw.estimate);
  CHECK(forced.weight_sum == nw.weight_sum);
}

TEST_CASE("shifting the outputs shifts the estimate") {
  std::mt19937_64 gen(36);
  for (int t = 0; t < 20; ++t) {
    const auto s = testing::random_sample(gen, 15, 3);
    const Curve x0(3);
    const auto f = build_factorization(s, x0, Kernel::naive(), testing::covering_h(s, x0));
    const auto scheme = RegScheme::penalization(1e-2);
    const double c = 0.5 * t;
    auto shifted = s.outputs();
    for (double& y : shifted) y += c;
    const double base = local_linear_fit(s, f, scheme).estimate;
    const double moved = local_linear_fit(s.with_outputs(shifted), f, scheme).estimate;
    CHECK(moved - base == doctest::Approx(c).epsilon(1e-12));
  }
}

TEST_CASE("degenerate denominator is reported") {
  // Two coincident points: Gamma^dagger zbar = 1/z, so every weight is zero.
  const auto s = scalar({0.5, 0.5}, {1.0, 2.0});
  const auto f = build_factorization(s, Curve{0.0}, Kernel::naive(), 1.0);
  const auto exact = RegScheme::unchecked_for_testing(RegKind::tikhonov, 1, 0.0);
  try {
    local_linear_fit(s, f, exact);
    FAIL("expected DegenerateDenominator");
  } catch (const DegenerateDenominator& e) {
    CHECK(std::abs(e.weight_sum()) <= 1e-10);
  }
}

TEST_CASE("program solver rejects a singular design without penalty") {
  const auto s = scalar({0.5, 0.5}, {1.0, 2.0});
  CHECK_THROWS_AS(direct_program_solve(s, Curve{0.0}, Kernel::naive(), 1.0, 0.0),
                  NumericalSingularity);
}

TEST_CASE("x0 on a data point keeps that point with weight K(0)") {
  const auto s = scalar({0.0, 0.4, -0.3}, {2.0, 1.0, 0.0});
  const auto nw = nadaraya_watson_fit(s, Curve{0.0}, Kernel::linear_downweight(), 1.0);
  CHECK(nw.weights[0] == doctest::Approx(4.0 / 3.0));
  const auto fit = local_linear_fit(s, Curve{0.0}, Kernel::linear_downweight(), 1.0,
                                    RegScheme::penalization(1e-3));
  CHECK(fit.weights[0] == doctest::Approx(4.0 / 3.0));
}
