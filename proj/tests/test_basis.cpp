#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pcdfpca/basis.hpp"
#include "pcdfpca/error.hpp"
#include "support.hpp"

using namespace pcdfpca;
using pcdfpca::test::trapezoid;

TEST_CASE("constant basis function evaluates to one") {
  const std::vector<double> grid{0.0, 0.5, 1.0};
  const RealMatrix b = fourier_basis_eval(1, grid);
  REQUIRE(b.cols() == 1);
  for (std::size_t i = 0; i < 3; ++i) CHECK(b(i, 0) == 1.0);
}

TEST_CASE("second basis function is sqrt2 sin") {
  const std::vector<double> grid{0.25};
  const RealMatrix b = fourier_basis_eval(2, grid);
  CHECK(b(0, 0) == 1.0);
  CHECK(b(0, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("Fourier basis is orthonormal under trapezoid quadrature") {
  const std::vector<double> grid = equispaced_grid(1001);
  for (std::size_t K : {5u, 9u}) {
    const RealMatrix b = fourier_basis_eval(K, grid);
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t j = 0; j < K; ++j) {
        std::vector<double> f(grid.size());
        for (std::size_t g = 0; g < grid.size(); ++g) f[g] = b(g, i) * b(g, j);
        CHECK(std::abs(trapezoid(f) - (i == j ? 1.0 : 0.0)) < 1e-6);
      }
  }
}

TEST_CASE("smoothing recovers functions in the span") {
  const std::vector<double> grid = equispaced_grid(64);
  RealMatrix raw(2, grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    raw(0, g) = 3.0;
    raw(1, g) = std::sqrt(2.0) * std::sin(2.0 * std::numbers::pi * grid[g]);
  }
  const FunctionalSeries s = smooth_curves(raw, grid, 7);
  CHECK(s.coeffs(0, 0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(s.coeffs(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t k = 1; k < 7; ++k) CHECK(std::abs(s.coeffs(0, k)) < 1e-10);
  for (std::size_t k = 0; k < 7; ++k)
    if (k != 1) CHECK(std::abs(s.coeffs(1, k)) < 1e-10);
}

TEST_CASE("more basis functions fit u^2 strictly better") {
  const std::vector<double> grid = equispaced_grid(49);
  RealMatrix raw(1, grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) raw(0, g) = grid[g] * grid[g];
  auto rss = [&](std::size_t K) {
    const RealMatrix fitted = evaluate_curves(smooth_curves(raw, grid, K), grid);
    double s = 0.0;
    for (std::size_t g = 0; g < grid.size(); ++g) s += std::pow(raw(0, g) - fitted(0, g), 2);
    return s;
  };
  CHECK(rss(15) < rss(5));
}

TEST_CASE("smoothing is a projection") {
  Rng rng(11);
  const std::vector<double> grid = equispaced_grid(40);
  RealMatrix raw(5, grid.size());
  for (auto& v : raw.data()) v = rng.normal();
  const FunctionalSeries once = smooth_curves(raw, grid, 9);
  const FunctionalSeries twice = smooth_curves(evaluate_curves(once, grid), grid, 9);
  for (std::size_t i = 0; i < once.coeffs.data().size(); ++i)
    CHECK(std::abs(once.coeffs.data()[i] - twice.coeffs.data()[i]) < 1e-10);
}

TEST_CASE("smoothing with fewer grid points than basis functions is underdetermined") {
  const std::vector<double> grid = equispaced_grid(4);
  const RealMatrix raw(1, 4);
  try {
    (void)smooth_curves(raw, grid, 7);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::underdetermined_fit);
  }
}

TEST_CASE("periodic mean") {
  SUBCASE("all zero") {
    const FunctionalSeries s{RealMatrix(10, 3), BasisDescriptor::fourier(3), 2};
    const PeriodicMean m = periodic_mean(s, 2);
    for (double v : m.means.data()) CHECK(v == 0.0);
  }
  SUBCASE("T = 1 is the grand mean") {
    Rng rng(3);
    const FunctionalSeries s = test::iid_series(rng, 17, {1.0, 0.5});
    const PeriodicMean m = periodic_mean(s, 1);
    REQUIRE(m.period() == 1);
    for (std::size_t k = 0; k < 2; ++k) {
      double sum = 0.0;
      for (std::size_t t = 0; t < 17; ++t) sum += s.coeffs(t, k);
      CHECK(m.means(0, k) == doctest::Approx(sum / 17.0).epsilon(1e-14));
    }
  }
  SUBCASE("alternating rows") {
    // Row 0 is observation t = 1, so rows 0, 2, ... hold the odd-t value 2.
    FunctionalSeries s{RealMatrix(8, 3), BasisDescriptor::fourier(3), 2};
    for (std::size_t i = 0; i < 8; ++i) s.coeffs(i, 0) = i % 2 == 0 ? 2.0 : 1.0;
    const PeriodicMean m = periodic_mean(s, 2);
    CHECK(m.means(0, 0) == 2.0);
    CHECK(m.means(1, 0) == 1.0);
    CHECK(m.means(0, 1) == 0.0);
    CHECK(m.means(1, 2) == 0.0);
  }
}

TEST_CASE("centering removes phase-wise means") {
  Rng rng(5);
  FunctionalSeries s = test::iid_series(rng, 31, {1.0, 2.0, 0.3}, 3);
  for (std::size_t t = 0; t < 31; ++t) s.coeffs(t, 0) += static_cast<double>(t % 3) * 10.0;
  const PeriodicMean mean = periodic_mean(s, 3);
  const FunctionalSeries c = center(s, mean);
  const PeriodicMean residual = periodic_mean(c, 3);
  for (double v : residual.means.data()) CHECK(std::abs(v) < 1e-12);
  const FunctionalSeries back = uncenter(c, mean);
  for (std::size_t i = 0; i < s.coeffs.data().size(); ++i)
    CHECK(back.coeffs.data()[i] == doctest::Approx(s.coeffs.data()[i]).epsilon(1e-14));
}

TEST_CASE("inner product" * doctest::test_suite("oracle")) {
  const BasisDescriptor b = BasisDescriptor::fourier(4);
  const std::vector<double> e1{1, 0, 0, 0}, e2{0, 1, 0, 0};
  CHECK(inner_product(e1, e1, b) == 1.0);
  CHECK(inner_product(e1, e2, b) == 0.0);

  Rng rng(9);
  const std::vector<double> grid = equispaced_grid(2001);
  const RealMatrix basis = fourier_basis_eval(4, grid);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> f(4), g(4);
    for (auto& v : f) v = rng.normal();
    for (auto& v : g) v = rng.normal();
    std::vector<double> prod(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double fv = 0.0, gv = 0.0;
      for (std::size_t k = 0; k < 4; ++k) {
        fv += f[k] * basis(i, k);
        gv += g[k] * basis(i, k);
      }
      prod[i] = fv * gv;
    }
    CHECK(std::abs(inner_product(f, g, b) - trapezoid(prod)) < 1e-6);
  }
}

TEST_CASE("slice keeps basis and period") {
  Rng rng(1);
  const FunctionalSeries s = test::iid_series(rng, 10, {1.0, 1.0}, 2);
  const FunctionalSeries part = s.slice(4, 8);
  CHECK(part.size() == 4);
  CHECK(part.period == 2);
  CHECK(part.coeffs(0, 1) == s.coeffs(4, 1));
}
