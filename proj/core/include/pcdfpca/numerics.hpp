#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "pcdfpca/matrix.hpp"

namespace pcdfpca {

/// Square complex matrix that is Hermitian by construction: the input is
/// replaced by (H + H*) / 2.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const ComplexMatrix& entries);

  [[nodiscard]] std::size_t dim() const noexcept { return entries_.rows(); }
  [[nodiscard]] const ComplexMatrix& entries() const noexcept { return entries_; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return entries_(r, c); }

 private:
  ComplexMatrix entries_;
};

/// Eigenvalues sorted non-increasing; column m of `vectors` pairs with values[m].
struct EigenDecomposition {
  std::vector<double> values;
  ComplexMatrix vectors;

  [[nodiscard]] ComplexVector vector(std::size_t m) const { return vectors.col(m); }
};

/// Midpoint grid theta_j = -pi + 2 pi (j + 1/2) / F on (-pi, pi].
class FrequencyGrid {
 public:
  static constexpr std::size_t default_size = 512;

  explicit FrequencyGrid(std::size_t F = default_size);

  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] double operator[](std::size_t j) const { return points_[j]; }
  [[nodiscard]] std::span<const double> points() const noexcept { return points_; }
  /// Index of -theta_j.
  [[nodiscard]] std::size_t mirror(std::size_t j) const noexcept { return size() - 1 - j; }

  friend bool operator==(const FrequencyGrid&, const FrequencyGrid&) = default;

 private:
  std::vector<double> points_;
};

/// Full eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Throws numerical_failure if the sweep cap is hit or the final
/// residual check fails.
EigenDecomposition hermitian_eig(const HermitianMatrix& H);

/// Midpoint-rule approximation of (1/2pi) \int s(theta) e^{-i l theta} dtheta
/// for each l in [l_min, l_max]. samples[j] is the vector at grid point j.
std::map<long, ComplexVector> inverse_fourier_coeffs(std::span<const ComplexVector> samples,
                                                     const FrequencyGrid& grid, long l_min, long l_max);

}  // namespace pcdfpca
