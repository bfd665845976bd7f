#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pcdfpca/error.hpp"
#include "pcdfpca/io.hpp"
#include "pcdfpca/model.hpp"
#include "pcdfpca/simbench.hpp"
#include "support.hpp"

using namespace pcdfpca;

namespace {

FitOptions options(std::size_t T, std::size_t p, std::size_t window, std::size_t L, std::size_t F = 128) {
  return FitOptions{T, p, window, Kernel::bartlett, F, Truncation::fixed(L)};
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// Score vector of period j: entry d * p + m is Y_{Tj + d, m}.
std::vector<std::vector<double>> stacked_scores(const ScoreSeries& s, std::size_t T) {
  const std::size_t p = s.scores.cols();
  const std::size_t periods = s.size() / T;
  std::vector<std::vector<double>> z(T * p, std::vector<double>(periods));
  for (std::size_t j = 0; j < periods; ++j)
    for (std::size_t d = 0; d < T; ++d)
      for (std::size_t m = 0; m < p; ++m) z[d * p + m][j] = s.scores(j * T + d, m);
  return z;
}

}  // namespace

TEST_CASE("fit validates its inputs") {
  Rng rng(1);
  const FunctionalSeries x = test::iid_series(rng, 60, {1.0, 0.5, 0.2});
  auto kind_of = [&](const FitOptions& o) {
    try {
      (void)fit(x, o);
    } catch (const Error& e) {
      return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::validation;
  };
  CHECK(kind_of(options(1, 4, 3, 2)) == ErrorKind::invalid_argument);
  CHECK(kind_of(options(1, 0, 3, 2)) == ErrorKind::invalid_argument);
  CHECK(kind_of(options(11, 1, 3, 2)) == ErrorKind::insufficient_data);
  CHECK(kind_of(FitOptions{1, 1, 3, Kernel::bartlett, 64, Truncation::energy(1.5)}) == ErrorKind::invalid_argument);
}

TEST_CASE("white noise gives flat eigenvalues and a lag-zero leading filter") {
  Rng rng(404);
  const std::vector<double> sd{2.0, 1.4, 1.0};
  const FunctionalSeries x = test::iid_series(rng, 20000, sd);
  const PcDfpcaModel model = fit(x, options(1, 3, 3, 3));
  for (std::size_t m = 0; m < 3; ++m) {
    const double expect = sd[m] * sd[m] / (2.0 * std::numbers::pi);
    for (std::size_t j = 0; j < model.eigenvalues.rows(); ++j)
      CHECK(std::abs(model.eigenvalues(j, m) - expect) <= 0.1 * expect);
  }
  double e0 = 0.0;
  for (double v : model.filter(0, 0, 0)) e0 += v * v;
  CHECK(e0 >= 0.9 * model.filter_energy(0, 0));
}

// Eigenvectors are phased against a fixed reference that is orthogonal to
// the population eigenvectors of the later components, so their phase follows
// sampling noise across frequencies and the filter energy leaves lag zero.
TEST_CASE("white noise later components at lag zero" * doctest::may_fail()) {
  Rng rng(404);
  const FunctionalSeries x = test::iid_series(rng, 20000, {2.0, 1.4, 1.0});
  const PcDfpcaModel model = fit(x, options(1, 3, 3, 3));
  for (std::size_t m = 1; m < 3; ++m) {
    double e0 = 0.0;
    for (double v : model.filter(0, m, 0)) e0 += v * v;
    CHECK(e0 >= 0.9 * model.filter_energy(0, m));
  }
}

TEST_CASE("scenario A has a dominant first eigenvalue everywhere") {
  const FunctionalSeries x = gen_scenario_a(1).slice(0, 150);
  const PcDfpcaModel model = fit(x, options(1, 2, 3, 2, 512));
  for (std::size_t j = 0; j < model.eigenvalues.rows(); ++j) CHECK(model.eigenvalues(j, 0) > model.eigenvalues(j, 1));
  const PcDfpcaModel periodic = fit(x, options(3, 2, 3, 2, 512));
  for (std::size_t j = 0; j < periodic.eigenvalues.rows(); ++j)
    CHECK(periodic.eigenvalues(j, 0) > periodic.eigenvalues(j, 1));
}

TEST_CASE("filters and scores are finite and real-valued" * doctest::test_suite("property")) {
  Rng rng(5);
  const test::PeriodicMa ma(rng, 4, 3);
  const FunctionalSeries x = ma.sample(rng, 600);
  // fit throws if any filter carries an imaginary residue of 1e-8 or more.
  const PcDfpcaModel model = fit(x, options(3, 2, 4, 3, 256));
  const ScoreSeries s = transform(model, x);
  for (double v : s.scores.data()) CHECK(std::isfinite(v));
}

TEST_CASE("filter energy obeys Parseval" * doctest::test_suite("property")) {
  Rng rng(6);
  const test::PeriodicMa ma(rng, 3, 2);
  const FunctionalSeries x = ma.sample(rng, 800);
  for (double eps : {0.2, 0.05, 0.01}) {
    CAPTURE(eps);
    const PcDfpcaModel model = fit(x, FitOptions{2, 2, 5, Kernel::bartlett, 256, Truncation::energy(eps)});
    const double e = model.filter_energy(0, 0);
    CHECK(e >= 1.0 - eps - 0.05);
    CHECK(e <= 1.0 + 1e-6);
    for (std::size_t d = 0; d < 2; ++d)
      for (std::size_t m = 0; m < 2; ++m) CHECK(model.filter_energy(d, m) <= 1.0 + 1e-6);
  }
  const PcDfpcaModel full = fit(x, options(2, 2, 5, 127, 256));
  CHECK(full.filter_energy(1, 1) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("fixed truncation takes precedence over the energy rule") {
  Rng rng(7);
  const FunctionalSeries x = test::iid_series(rng, 200, {1.0, 0.5});
  const PcDfpcaModel model = fit(x, FitOptions{1, 1, 3, Kernel::bartlett, 64, Truncation{4, 0.3}});
  CHECK(model.lag() == 4);
  CHECK_FALSE(model.epsilon.has_value());
}

TEST_CASE("scores of a zero series are zero") {
  Rng rng(8);
  const FunctionalSeries x = test::iid_series(rng, 120, {1.0, 0.5, 0.25}, 2);
  const PcDfpcaModel model = fit(x, options(2, 2, 3, 2));
  const FunctionalSeries zero{RealMatrix(30, 3), x.basis, 2};
  const ScoreSeries y = scores(model, zero);
  for (double v : y.scores.data()) CHECK(v == 0.0);
}

TEST_CASE("scores of a single curve unroll the filter sum") {
  Rng rng(9);
  const test::PeriodicMa ma(rng, 3, 3);
  const PcDfpcaModel model = fit(ma.sample(rng, 300), options(3, 2, 3, 2));
  const std::size_t n = 40, s = 17;
  FunctionalSeries x{RealMatrix(n, 3), model.basis(), 3};
  x.coeffs(s, 0) = 1.0;
  const ScoreSeries y = scores(model, x);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t m = 0; m < 2; ++m) {
      const auto f = model.filter(t % 3, m, static_cast<long>(t) - static_cast<long>(s));
      const double expect = f.empty() ? 0.0 : f[0];
      CHECK(y.scores(t, m) == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("zero scores reconstruct the periodic mean") {
  Rng rng(10);
  FunctionalSeries x = test::iid_series(rng, 90, {1.0, 0.5}, 3);
  for (std::size_t t = 0; t < 90; ++t) x.coeffs(t, 1) += static_cast<double>(t % 3);
  const PcDfpcaModel model = fit(x, options(3, 1, 3, 2));
  const FunctionalSeries r = reconstruct(model, ScoreSeries{RealMatrix(20, 1), 3}, 20);
  for (std::size_t t = 0; t < 20; ++t)
    for (std::size_t k = 0; k < 2; ++k) CHECK(r.coeffs(t, k) == model.mean().means(t % 3, k));
}

TEST_CASE("NMSE") {
  const BasisDescriptor b = BasisDescriptor::fourier(2);
  FunctionalSeries x{RealMatrix(2, 2), b, 1};
  x.coeffs(0, 0) = 1.0;
  x.coeffs(1, 0) = 2.0;
  CHECK(nmse(x, x) == 0.0);
  CHECK(nmse(x, FunctionalSeries{RealMatrix(2, 2), b, 1}) == 1.0);
  FunctionalSeries xh{RealMatrix(2, 2), b, 1};
  xh.coeffs(0, 0) = 1.0;
  xh.coeffs(1, 0) = 1.0;
  CHECK(nmse(x, xh) == doctest::Approx(0.2).epsilon(1e-15));
  try {
    (void)nmse(FunctionalSeries{RealMatrix(2, 2), b, 1}, x);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::undefined_denominator);
  }
}

TEST_CASE("NMSE is non-increasing in the number of components" * doctest::test_suite("property")) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Rng rng(seed);
    const test::PeriodicMa ma(rng, 5, 2);
    const FunctionalSeries x = ma.sample(rng, 400);
    double prev = 1.0 + 1e-12, first = 0.0;
    for (std::size_t p = 1; p <= 5; ++p) {
      const PcDfpcaModel model = fit(x, options(2, p, 4, 3));
      const double e = nmse(x, reconstruct(model, transform(model, x), x.size()));
      CAPTURE(seed);
      CAPTURE(p);
      CHECK(e <= prev + 1e-12);
      if (p == 1) first = e;
      prev = e;
    }
    CHECK(prev < first);
  }
}

TEST_CASE("period one is the stationary dynamic FPCA" * doctest::test_suite("property")) {
  Rng rng(11);
  const test::PeriodicMa ma(rng, 3, 1);
  const FunctionalSeries x = ma.sample(rng, 200);
  const PcDfpcaModel a = fit(x, options(1, 2, 3, 2));
  const PcDfpcaModel b = dfpca_fit(x, 2, 3, 128, Truncation::fixed(2));
  CHECK(a == b);
  const ScoreSeries sa = transform(a, x), sb = transform(b, x);
  CHECK(sa.scores == sb.scores);
}

TEST_CASE("model JSON round trip preserves scores exactly" * doctest::test_suite("property")) {
  Rng rng(12);
  const test::PeriodicMa ma(rng, 4, 3);
  const FunctionalSeries x = ma.sample(rng, 240);
  for (const Truncation& tr : {Truncation::fixed(2), Truncation::energy(0.1)}) {
    const PcDfpcaModel model = fit(x, FitOptions{3, 2, 3, Kernel::bartlett, 64, tr});
    const PcDfpcaModel loaded = model_from_json(model_to_json(model));
    CHECK(loaded == model);
    CHECK(transform(loaded, x).scores == transform(model, x).scores);
  }
}

TEST_CASE("scores are decorrelated across components, phases and period lags" * doctest::test_suite("property")) {
  Rng rng(2718);
  const test::PeriodicMa ma(rng, 3, 2);
  const FunctionalSeries x = ma.sample(rng, 6000);
  const PcDfpcaModel model = fit(x, options(2, 2, 12, 6, 256));
  const auto z = stacked_scores(transform(model, x), 2);
  const std::size_t periods = z[0].size();
  const std::size_t edge = 10;  // skip boundary-affected periods
  double worst = 0.0;
  for (std::size_t a = 0; a < z.size(); ++a)
    for (std::size_t b = 0; b < z.size(); ++b) {
      if (a == b) continue;
      for (long k = -3; k <= 3; ++k) {
        std::vector<double> u, v;
        for (std::size_t j = edge; j + edge < periods; ++j) {
          const long jj = static_cast<long>(j) + k;
          u.push_back(z[a][j]);
          v.push_back(z[b][static_cast<std::size_t>(jj)]);
        }
        worst = std::max(worst, std::abs(correlation(u, v)));
      }
    }
  CAPTURE(worst);
  CHECK(worst <= 0.1);
}

TEST_CASE("long-run covariance of the scores is close to diagonal" * doctest::test_suite("property")) {
  Rng rng(3141);
  const test::PeriodicMa ma(rng, 3, 2);
  const FunctionalSeries x = ma.sample(rng, 6000);
  const PcDfpcaModel model = fit(x, options(2, 2, 12, 6, 256));
  const auto z = stacked_scores(transform(model, x), 2);
  const std::size_t dim = z.size();
  const std::size_t periods = z[0].size();
  std::vector<double> mean(dim, 0.0);
  for (std::size_t a = 0; a < dim; ++a)
    for (double v : z[a]) mean[a] += v / static_cast<double>(periods);
  // Bartlett-weighted sum of autocovariances, bandwidth 10.
  const long band = 10;
  RealMatrix lr(dim, dim);
  for (long h = -band; h <= band; ++h) {
    const double w = 1.0 - std::abs(static_cast<double>(h)) / static_cast<double>(band + 1);
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t b = 0; b < dim; ++b) {
        double s = 0.0;
        for (std::size_t j = 0; j < periods; ++j) {
          const long jj = static_cast<long>(j) - h;
          if (jj < 0 || jj >= static_cast<long>(periods)) continue;
          s += (z[a][j] - mean[a]) * (z[b][static_cast<std::size_t>(jj)] - mean[b]);
        }
        lr(a, b) += w * s / static_cast<double>(periods);
      }
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b)
      if (a != b) worst = std::max(worst, std::abs(lr(a, b)) / std::sqrt(lr(a, a) * lr(b, b)));
  CAPTURE(worst);
  CHECK(worst <= 0.15);
}

TEST_CASE("held-out NMSE improves with sample size" * doctest::test_suite("property")) {
  Rng proc(161);
  const test::PeriodicMa ma(proc, 4, 2);
  Rng test_rng(162);
  const FunctionalSeries held_out = ma.sample(test_rng, 2000);
  std::vector<double> errs;
  for (std::size_t n : {300u, 1200u, 4800u}) {
    double total = 0.0;
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
      Rng rng = Rng::stream(163, rep * 10 + n);
      const FunctionalSeries train = ma.sample(rng, n);
      const auto window = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n) / 2.0) / 2.0));
      const PcDfpcaModel model = fit(train, options(2, 1, window, 3, 256));
      total += nmse(held_out, reconstruct(model, transform(model, held_out), held_out.size()));
    }
    errs.push_back(total / 5.0);
  }
  CAPTURE(errs[0]);
  CAPTURE(errs[1]);
  CAPTURE(errs[2]);
  const int inversions = (errs[1] > errs[0]) + (errs[2] > errs[1]);
  CHECK(inversions <= 1);
  CHECK(errs[2] < errs[0]);
}

TEST_CASE("periodic model beats one component on a periodic moving average") {
  Rng rng(13);
  const test::PeriodicMa ma(rng, 4, 3);
  const FunctionalSeries x = ma.sample(rng, 900);
  const PcDfpcaModel one = fit(x, options(3, 1, 5, 6));
  const PcDfpcaModel all = fit(x, options(3, 4, 5, 6));
  const double e1 = nmse(x, reconstruct(one, transform(one, x), x.size()));
  const double e4 = nmse(x, reconstruct(all, transform(all, x), x.size()));
  CHECK(e4 < e1);
}

TEST_CASE("static FPCA") {
  SUBCASE("rank one data is reconstructed exactly") {
    Rng rng(14);
    FunctionalSeries x{RealMatrix(50, 4), BasisDescriptor::fourier(4), 1};
    for (std::size_t t = 0; t < 50; ++t) x.coeffs(t, 0) = rng.normal();
    const FpcaModel model = fpca_fit(x, 1);
    CHECK(nmse(x, fpca_reconstruct(model, fpca_scores(model, x))) < 1e-24);
  }
  SUBCASE("eigenvalues sum to the total variance") {
    Rng rng(15);
    const FunctionalSeries x = test::iid_series(rng, 80, {1.0, 0.9, 0.5, 0.1});
    const FpcaModel model = fpca_fit(x, 2);
    double trace = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      double mean = 0.0, sq = 0.0;
      for (std::size_t t = 0; t < 80; ++t) mean += x.coeffs(t, k) / 80.0;
      for (std::size_t t = 0; t < 80; ++t) sq += std::pow(x.coeffs(t, k) - mean, 2) / 80.0;
      trace += sq;
    }
    double sum = 0.0;
    for (double v : model.eigenvalues) sum += v;
    CHECK(std::abs(sum - trace) <= 1e-10);
    CHECK(std::is_sorted(model.eigenvalues.rbegin(), model.eigenvalues.rend()));
  }
  SUBCASE("too many components") {
    Rng rng(16);
    CHECK_THROWS_AS(fpca_fit(test::iid_series(rng, 10, {1.0}), 2), Error);
  }
}

TEST_CASE("mismatched basis is rejected") {
  Rng rng(17);
  const FunctionalSeries x = test::iid_series(rng, 60, {1.0, 0.5});
  const PcDfpcaModel model = fit(x, options(1, 1, 3, 2));
  const FunctionalSeries other = test::iid_series(rng, 60, {1.0, 0.5, 0.2});
  CHECK_THROWS_AS(transform(model, other), Error);
  CHECK_THROWS_AS(reconstruct(model, ScoreSeries{RealMatrix(5, 2), 1}, 5), Error);
}
