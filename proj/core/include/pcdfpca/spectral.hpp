#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "pcdfpca/basis.hpp"
#include "pcdfpca/matrix.hpp"
#include "pcdfpca/numerics.hpp"

namespace pcdfpca {

/// Lag-window weight functions for the spectral estimator.
enum class Kernel { bartlett };

[[nodiscard]] double kernel_weight(Kernel kernel, double x) noexcept;
[[nodiscard]] std::string_view kernel_name(Kernel kernel) noexcept;
[[nodiscard]] Kernel parse_kernel(std::string_view name);

/// Periodic lag covariances C_{h,(q,r)} for |h| <= max_lag. Each block is
/// K x K; block(h, q, r) approximates Cov(X_{Th+q}, X_r).
class PeriodicCovariance {
 public:
  PeriodicCovariance(std::size_t T, std::size_t K, std::size_t max_lag);

  [[nodiscard]] std::size_t period() const noexcept { return T_; }
  [[nodiscard]] std::size_t basis_size() const noexcept { return K_; }
  [[nodiscard]] std::size_t max_lag() const noexcept { return max_lag_; }

  [[nodiscard]] const RealMatrix& block(long h, std::size_t q, std::size_t r) const;
  RealMatrix& block(long h, std::size_t q, std::size_t r);

 private:
  [[nodiscard]] std::size_t index(long h, std::size_t q, std::size_t r) const;

  std::size_t T_;
  std::size_t K_;
  std::size_t max_lag_;
  std::vector<RealMatrix> blocks_;
};

/// Single estimator block
///   (T/n) sum_j c_{q+Tj} c'_{r+Tj-Th}  over indices inside [0, n)
/// for h >= 0, and C_{-h,(q,r)} = C_{h,(r,q)}' for h < 0. Rows of `series`
/// are expected to be centered.
RealMatrix lag_covariance_block(const FunctionalSeries& series, std::size_t T, long h, std::size_t q,
                                std::size_t r);

/// All blocks for |h| <= max_lag. Requires max_lag * T < n.
PeriodicCovariance periodic_autocov(const FunctionalSeries& series, std::size_t T, std::size_t max_lag);

/// Estimated TK x TK spectral density matrices on a frequency grid.
struct SpectralDensityEstimate {
  FrequencyGrid grid;
  std::vector<HermitianMatrix> matrices;
  std::size_t T = 1;
  std::size_t K = 0;
  std::size_t window = 1;
  Kernel kernel = Kernel::bartlett;
};

/// Lag-window estimator: block (q, r) at theta is
///   (1/2pi) sum_{|h| <= window} w(h / window) C_{h,(q,r)} e^{-i h theta},
/// right-multiplied by blockdiag(M_B') and symmetrized.
SpectralDensityEstimate spectral_density(const FunctionalSeries& series, std::size_t T, std::size_t window,
                                         Kernel kernel, const FrequencyGrid& grid);

/// Assembly of the lag-zero blocks into a TK x TK matrix (no 1/2pi factor).
RealMatrix assemble_lag_zero(const PeriodicCovariance& cov);

}  // namespace pcdfpca
