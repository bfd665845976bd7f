#include "pcdfpca/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pcdfpca/error.hpp"

namespace pcdfpca {

double kernel_weight(Kernel kernel, double x) noexcept {
  switch (kernel) {
    case Kernel::bartlett: return std::abs(x) <= 1.0 ? 1.0 - std::abs(x) : 0.0;
  }
  return 0.0;
}

std::string_view kernel_name(Kernel kernel) noexcept {
  switch (kernel) {
    case Kernel::bartlett: return "bartlett";
  }
  return "unknown";
}

Kernel parse_kernel(std::string_view name) {
  if (name == "bartlett") return Kernel::bartlett;
  throw Error(ErrorKind::invalid_argument, "unknown kernel '" + std::string(name) + "'");
}

PeriodicCovariance::PeriodicCovariance(std::size_t T, std::size_t K, std::size_t max_lag)
    : T_(T), K_(K), max_lag_(max_lag), blocks_((2 * max_lag + 1) * T * T, RealMatrix(K, K)) {}

std::size_t PeriodicCovariance::index(long h, std::size_t q, std::size_t r) const {
  const long H = static_cast<long>(max_lag_);
  if (h < -H || h > H || q >= T_ || r >= T_)
    throw Error(ErrorKind::invalid_argument, "covariance block (" + std::to_string(h) + ", " + std::to_string(q) +
                                                 ", " + std::to_string(r) + ") out of range");
  return (static_cast<std::size_t>(h + H) * T_ + q) * T_ + r;
}

const RealMatrix& PeriodicCovariance::block(long h, std::size_t q, std::size_t r) const {
  return blocks_[index(h, q, r)];
}

RealMatrix& PeriodicCovariance::block(long h, std::size_t q, std::size_t r) { return blocks_[index(h, q, r)]; }

RealMatrix lag_covariance_block(const FunctionalSeries& series, std::size_t T, long h, std::size_t q,
                                std::size_t r) {
  if (T < 1 || q >= T || r >= T) throw Error(ErrorKind::invalid_argument, "phase index out of range");
  if (h < 0) return lag_covariance_block(series, T, -h, r, q).transpose();

  const long n = static_cast<long>(series.size());
  const std::size_t K = series.coeffs.cols();
  const long Tl = static_cast<long>(T);
  RealMatrix out(K, K);
  // j runs over all integers for which both indices land in [0, n).
  const long j_begin = std::max(0L, h);
  for (long j = j_begin;; ++j) {
    const long a = static_cast<long>(q) + Tl * j;
    const long b = static_cast<long>(r) + Tl * (j - h);
    if (a >= n || b >= n) break;
    if (a < 0 || b < 0) continue;
    const auto ca = series.coeffs.row(static_cast<std::size_t>(a));
    const auto cb = series.coeffs.row(static_cast<std::size_t>(b));
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t k = 0; k < K; ++k) out(i, k) += ca[i] * cb[k];
  }
  const double scale = static_cast<double>(T) / static_cast<double>(n);
  for (auto& v : out.data()) v *= scale;
  return out;
}

PeriodicCovariance periodic_autocov(const FunctionalSeries& series, std::size_t T, std::size_t max_lag) {
  if (T < 1) throw Error(ErrorKind::invalid_argument, "period must be positive");
  if (max_lag * T >= series.size())
    throw Error(ErrorKind::insufficient_data, "lag window " + std::to_string(max_lag) + " times period " +
                                                  std::to_string(T) + " must be below series length " +
                                                  std::to_string(series.size()));
  PeriodicCovariance cov(T, series.coeffs.cols(), max_lag);
  for (std::size_t h = 0; h <= max_lag; ++h)
    for (std::size_t q = 0; q < T; ++q)
      for (std::size_t r = 0; r < T; ++r)
        cov.block(static_cast<long>(h), q, r) = lag_covariance_block(series, T, static_cast<long>(h), q, r);
  for (std::size_t h = 1; h <= max_lag; ++h)
    for (std::size_t q = 0; q < T; ++q)
      for (std::size_t r = 0; r < T; ++r)
        cov.block(-static_cast<long>(h), q, r) = cov.block(static_cast<long>(h), r, q).transpose();
  return cov;
}

RealMatrix assemble_lag_zero(const PeriodicCovariance& cov) {
  const std::size_t T = cov.period();
  const std::size_t K = cov.basis_size();
  RealMatrix out(T * K, T * K);
  for (std::size_t q = 0; q < T; ++q)
    for (std::size_t r = 0; r < T; ++r) {
      const RealMatrix& b = cov.block(0, q, r);
      for (std::size_t i = 0; i < K; ++i)
        for (std::size_t k = 0; k < K; ++k) out(q * K + i, r * K + k) = b(i, k);
    }
  return out;
}

SpectralDensityEstimate spectral_density(const FunctionalSeries& series, std::size_t T, std::size_t window,
                                         Kernel kernel, const FrequencyGrid& grid) {
  if (window < 1) throw Error(ErrorKind::invalid_argument, "lag window must be positive");
  const PeriodicCovariance cov = periodic_autocov(series, T, window);
  const std::size_t K = series.coeffs.cols();
  const std::size_t dim = T * K;
  const long H = static_cast<long>(window);

  // Right factor blockdiag(M_B').
  const RealMatrix gram_t = series.basis.gram.transpose();
  const bool identity_gram = series.basis.gram == RealMatrix::identity(K);

  std::vector<double> weights;
  for (long h = -H; h <= H; ++h)
    weights.push_back(kernel_weight(kernel, static_cast<double>(h) / static_cast<double>(window)));

  SpectralDensityEstimate est{grid, {}, T, K, window, kernel};
  est.matrices.reserve(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    ComplexMatrix m(dim, dim);
    for (long h = -H; h <= H; ++h) {
      const double w = weights[static_cast<std::size_t>(h + H)];
      if (w == 0.0) continue;
      const Complex phase = std::polar(w / (2.0 * std::numbers::pi), -static_cast<double>(h) * grid[j]);
      for (std::size_t q = 0; q < T; ++q)
        for (std::size_t r = 0; r < T; ++r) {
          const RealMatrix& b = cov.block(h, q, r);
          for (std::size_t i = 0; i < K; ++i)
            for (std::size_t k = 0; k < K; ++k) m(q * K + i, r * K + k) += b(i, k) * phase;
        }
    }
    if (!identity_gram) {
      ComplexMatrix scaled(dim, dim);
      for (std::size_t row = 0; row < dim; ++row)
        for (std::size_t r = 0; r < T; ++r)
          for (std::size_t k = 0; k < K; ++k) {
            Complex s = 0.0;
            for (std::size_t i = 0; i < K; ++i) s += m(row, r * K + i) * gram_t(i, k);
            scaled(row, r * K + k) = s;
          }
      m = std::move(scaled);
    }
    est.matrices.emplace_back(m);
  }
  return est;
}

}  // namespace pcdfpca
