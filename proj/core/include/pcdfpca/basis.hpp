#pragma once

#include <cstddef>
#include <span>

#include "pcdfpca/matrix.hpp"

namespace pcdfpca {

enum class BasisKind { fourier };

/// Basis B_1..B_K together with its Gram matrix M_B = (<B_q, B_r>).
struct BasisDescriptor {
  BasisKind kind = BasisKind::fourier;
  std::size_t K = 0;
  RealMatrix gram;

  /// Orthonormal Fourier basis: gram is the identity.
  static BasisDescriptor fourier(std::size_t K);

  friend bool operator==(const BasisDescriptor&, const BasisDescriptor&) = default;
};

/// n curves stored as basis coefficients. Row i (0-based) is observation
/// t = i + 1 and has phase i mod period.
struct FunctionalSeries {
  RealMatrix coeffs;
  BasisDescriptor basis;
  std::size_t period = 1;

  [[nodiscard]] std::size_t size() const noexcept { return coeffs.rows(); }
  [[nodiscard]] std::size_t phase(std::size_t row) const noexcept { return row % period; }

  /// Rows [begin, end) as a new series with the same basis and period.
  [[nodiscard]] FunctionalSeries slice(std::size_t begin, std::size_t end) const;

  friend bool operator==(const FunctionalSeries&, const FunctionalSeries&) = default;
};

/// Row d holds the coefficient vector of the phase-d mean.
struct PeriodicMean {
  RealMatrix means;

  [[nodiscard]] std::size_t period() const noexcept { return means.rows(); }
  friend bool operator==(const PeriodicMean&, const PeriodicMean&) = default;
};

/// Evaluate the orthonormal Fourier basis on `grid`. Column ordering is
/// 1, sqrt2 sin(2 pi u), sqrt2 cos(2 pi u), sqrt2 sin(4 pi u), ...
RealMatrix fourier_basis_eval(std::size_t K, std::span<const double> grid);

/// Least-squares projection of each discretized curve (row of `raw`) onto the
/// first K Fourier basis functions.
FunctionalSeries smooth_curves(const RealMatrix& raw, std::span<const double> grid, std::size_t K,
                               std::size_t period = 1);

/// Evaluate coefficient rows back onto a grid (n x G).
RealMatrix evaluate_curves(const FunctionalSeries& series, std::span<const double> grid);

/// Equispaced grid of G points on [0, 1].
std::vector<double> equispaced_grid(std::size_t G);

PeriodicMean periodic_mean(const FunctionalSeries& series, std::size_t T);

/// Subtract the phase-matched mean from every observation.
FunctionalSeries center(const FunctionalSeries& series, const PeriodicMean& mean);

/// Inverse of center.
FunctionalSeries uncenter(const FunctionalSeries& series, const PeriodicMean& mean);

/// L2 inner product of two represented functions, g' M_B f.
double inner_product(std::span<const double> f, std::span<const double> g, const BasisDescriptor& basis);

}  // namespace pcdfpca
