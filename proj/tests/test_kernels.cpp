#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "flr/errors.hpp"
#include "flr/kernel.hpp"

using namespace flr;

TEST_CASE("kernel evaluation examples") {
  const auto naive = Kernel::naive();
  const auto lin = Kernel::linear_downweight();
  CHECK(naive.eval(0.5) == 1.0);
  CHECK(naive.eval(1.5) == 0.0);
  CHECK(lin.eval(1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(lin.eval(0.0) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(naive.eval(1.0) == 1.0);
}

TEST_CASE("negative kernel argument is rejected") {
  CHECK_THROWS_AS(Kernel::naive().eval(-1e-9), DomainError);
  CHECK_THROWS_AS(Kernel::linear_downweight().eval(-1.0), DomainError);
}

TEST_CASE("A1 diagnostics") {
  const auto naive = check_a1(Kernel::naive());
  CHECK(naive.positive_at_one);
  CHECK(naive.naive_exception);
  CHECK(naive.derivative_identically_zero);
  CHECK(naive.passes());

  const auto lin = check_a1(Kernel::linear_downweight());
  CHECK(lin.bounded);
  CHECK(lin.positive_at_one);
  CHECK(lin.derivative_integrable);
  CHECK_FALSE(lin.naive_exception);
  CHECK(lin.derivative_l1 == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  CHECK(lin.passes());

  const auto vanishing = check_a1(Kernel::from_table({0.0, 1.0}, {2.0, 0.0}));
  CHECK_FALSE(vanishing.positive_at_one);
  CHECK_FALSE(vanishing.passes());
}

TEST_CASE("built-in kernels integrate to one and respect their bounds") {
  for (const auto& k : {Kernel::naive(), Kernel::linear_downweight()}) {
    CHECK(std::abs(integrate(k) - 1.0) <= 1e-6);
    for (int i = 0; i <= 2000; ++i) {
      const double s = i * 1e-3;
      const double v = k.eval(s);
      CHECK(v >= 0.0);
      CHECK(v <= k.sup());
      if (s > 1.0) CHECK(v == 0.0);
    }
  }
}

TEST_CASE("custom table is interpolated and normalised") {
  const auto k = Kernel::from_table({0.0, 0.5, 1.0}, {3.0, 2.0, 1.0});
  CHECK(k.family() == KernelFamily::custom_table);
  CHECK(std::abs(integrate(k) - 1.0) <= 1e-6);
  CHECK(k.eval(0.25) / k.eval(1.0) == doctest::Approx(2.5));
  CHECK(k.eval(1.01) == 0.0);
  CHECK(k.value_at_one() > 0.0);
}

TEST_CASE("custom table validation") {
  CHECK_THROWS_AS(Kernel::from_table({0.0, 0.5, 0.5, 1.0}, {1, 1, 1, 1}), InputError);
  CHECK_THROWS_AS(Kernel::from_table({0.0, 1.5}, {1, 1}), InputError);
  CHECK_THROWS_AS(Kernel::from_table({0.0, 1.0}, {1, -1}), InputError);
  CHECK_THROWS_AS(Kernel::from_table({0.0}, {1}), InputError);
}

TEST_CASE("custom table from csv") {
  const auto path = std::filesystem::temp_directory_path() / "flr_kernel_table.csv";
  {
    std::ofstream out(path);
    out << "s,K\n0,1\n0.5,1\n1,1\n";
  }
  const auto k = Kernel::parse(path.string());
  CHECK(k.eval(0.3) == doctest::Approx(1.0));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(Kernel::parse("no_such_kernel_file.csv"), InputError);
}
