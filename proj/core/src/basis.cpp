#include "pcdfpca/basis.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pcdfpca/error.hpp"

namespace pcdfpca {

namespace {

void require_same_basis_dim(std::size_t n, const BasisDescriptor& basis) {
  if (n != basis.K)
    throw Error(ErrorKind::invalid_argument,
                "coefficient vector has " + std::to_string(n) + " entries, basis has K=" + std::to_string(basis.K));
}

// Cholesky solve of the symmetric positive-definite system A x = b, in place.
bool cholesky_solve(RealMatrix a, std::span<double> b) {
  const std::size_t n = a.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (!(d > 1e-14 * std::max(1.0, std::abs(a(j, j))))) return false;
    a(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / a(j, j);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a(i, k) * b[k];
    b[i] = s / a(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a(k, i) * b[k];
    b[i] = s / a(i, i);
  }
  return true;
}

}  // namespace

BasisDescriptor BasisDescriptor::fourier(std::size_t K) {
  if (K < 1) throw Error(ErrorKind::invalid_argument, "basis size K must be at least 1");
  return BasisDescriptor{BasisKind::fourier, K, RealMatrix::identity(K)};
}

FunctionalSeries FunctionalSeries::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size())
    throw Error(ErrorKind::invalid_argument, "slice [" + std::to_string(begin) + ", " + std::to_string(end) +
                                                 ") out of range for series of length " + std::to_string(size()));
  FunctionalSeries out{RealMatrix(end - begin, coeffs.cols()), basis, period};
  for (std::size_t i = begin; i < end; ++i) std::ranges::copy(coeffs.row(i), out.coeffs.row(i - begin).begin());
  return out;
}

RealMatrix fourier_basis_eval(std::size_t K, std::span<const double> grid) {
  if (K < 1) throw Error(ErrorKind::invalid_argument, "basis size K must be at least 1");
  if (grid.empty()) throw Error(ErrorKind::invalid_argument, "evaluation grid is empty");
  RealMatrix out(grid.size(), K);
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double u = grid[g];
    if (!(u >= 0.0 && u <= 1.0))
      throw Error(ErrorKind::invalid_argument, "grid point " + std::to_string(u) + " lies outside [0, 1]");
    out(g, 0) = 1.0;
    for (std::size_t j = 1; j < K; ++j) {
      const double freq = static_cast<double>((j + 1) / 2);
      out(g, j) = (j % 2 == 1) ? std::numbers::sqrt2 * std::sin(two_pi * freq * u)
                               : std::numbers::sqrt2 * std::cos(two_pi * freq * u);
    }
  }
  return out;
}

std::vector<double> equispaced_grid(std::size_t G) {
  if (G < 2) throw Error(ErrorKind::invalid_argument, "equispaced grid needs at least 2 points");
  std::vector<double> grid(G);
  for (std::size_t i = 0; i < G; ++i) grid[i] = static_cast<double>(i) / static_cast<double>(G - 1);
  return grid;
}

FunctionalSeries smooth_curves(const RealMatrix& raw, std::span<const double> grid, std::size_t K,
                               std::size_t period) {
  const std::size_t G = grid.size();
  if (raw.cols() != G)
    throw Error(ErrorKind::invalid_argument, "raw curves have " + std::to_string(raw.cols()) +
                                                 " columns but grid has " + std::to_string(G) + " points");
  if (G < K)
    throw Error(ErrorKind::underdetermined_fit,
                "cannot fit K=" + std::to_string(K) + " basis functions to " + std::to_string(G) + " grid points");
  for (std::size_t g = 1; g < G; ++g)
    if (!(grid[g] > grid[g - 1])) throw Error(ErrorKind::invalid_argument, "grid must be strictly increasing");
  if (period < 1) throw Error(ErrorKind::invalid_argument, "period must be positive");

  const RealMatrix B = fourier_basis_eval(K, grid);
  RealMatrix normal(K, K);
  for (std::size_t g = 0; g < G; ++g)
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t j = 0; j < K; ++j) normal(i, j) += B(g, i) * B(g, j);

  FunctionalSeries out{RealMatrix(raw.rows(), K), BasisDescriptor::fourier(K), period};
  std::vector<double> rhs(K);
  for (std::size_t t = 0; t < raw.rows(); ++t) {
    std::ranges::fill(rhs, 0.0);
    for (std::size_t g = 0; g < G; ++g)
      for (std::size_t j = 0; j < K; ++j) rhs[j] += B(g, j) * raw(t, g);
    if (!cholesky_solve(normal, rhs))
      throw Error(ErrorKind::numerical_failure, "normal equations of the basis fit are singular");
    std::ranges::copy(rhs, out.coeffs.row(t).begin());
  }
  return out;
}

RealMatrix evaluate_curves(const FunctionalSeries& series, std::span<const double> grid) {
  const RealMatrix B = fourier_basis_eval(series.basis.K, grid);
  RealMatrix out(series.size(), grid.size());
  for (std::size_t t = 0; t < series.size(); ++t)
    for (std::size_t g = 0; g < grid.size(); ++g) {
      double s = 0.0;
      for (std::size_t j = 0; j < series.basis.K; ++j) s += series.coeffs(t, j) * B(g, j);
      out(t, g) = s;
    }
  return out;
}

PeriodicMean periodic_mean(const FunctionalSeries& series, std::size_t T) {
  if (T < 1) throw Error(ErrorKind::invalid_argument, "period must be positive");
  const std::size_t n = series.size();
  if (n < T)
    throw Error(ErrorKind::insufficient_data,
                "periodic mean needs at least T=" + std::to_string(T) + " observations, got " + std::to_string(n));
  const std::size_t K = series.coeffs.cols();
  PeriodicMean mean{RealMatrix(T, K)};
  std::vector<std::size_t> counts(T, 0);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t d = t % T;
    ++counts[d];
    for (std::size_t j = 0; j < K; ++j) mean.means(d, j) += series.coeffs(t, j);
  }
  for (std::size_t d = 0; d < T; ++d)
    for (std::size_t j = 0; j < K; ++j) mean.means(d, j) /= static_cast<double>(counts[d]);
  return mean;
}

namespace {

FunctionalSeries shift_by_mean(const FunctionalSeries& series, const PeriodicMean& mean, double sign) {
  if (mean.means.cols() != series.coeffs.cols() || mean.period() < 1)
    throw Error(ErrorKind::invalid_argument, "periodic mean has " + std::to_string(mean.means.cols()) +
                                                 " coefficients, series has " +
                                                 std::to_string(series.coeffs.cols()));
  FunctionalSeries out = series;
  const std::size_t T = mean.period();
  for (std::size_t t = 0; t < series.size(); ++t)
    for (std::size_t j = 0; j < series.coeffs.cols(); ++j) out.coeffs(t, j) += sign * mean.means(t % T, j);
  return out;
}

}  // namespace

FunctionalSeries center(const FunctionalSeries& series, const PeriodicMean& mean) {
  return shift_by_mean(series, mean, -1.0);
}

FunctionalSeries uncenter(const FunctionalSeries& series, const PeriodicMean& mean) {
  return shift_by_mean(series, mean, 1.0);
}

double inner_product(std::span<const double> f, std::span<const double> g, const BasisDescriptor& basis) {
  require_same_basis_dim(f.size(), basis);
  require_same_basis_dim(g.size(), basis);
  double s = 0.0;
  for (std::size_t i = 0; i < basis.K; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < basis.K; ++j) row += basis.gram(i, j) * f[j];
    s += g[i] * row;
  }
  return s;
}

}  // namespace pcdfpca
