#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "pcdfpca/basis.hpp"
#include "pcdfpca/matrix.hpp"
#include "pcdfpca/rng.hpp"

namespace pcdfpca::test {

inline FunctionalSeries iid_series(Rng& rng, std::size_t n, const std::vector<double>& sd, std::size_t period = 1) {
  FunctionalSeries s{RealMatrix(n, sd.size()), BasisDescriptor::fourier(sd.size()), period};
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t k = 0; k < sd.size(); ++k) s.coeffs(t, k) = sd[k] * rng.normal();
  return s;
}

/// Periodic MA(1): x_t = e_t + theta_{t mod T} e_{t-1}, with phase-specific
/// K x K coefficient matrices drawn once from `rng`.
struct PeriodicMa {
  std::vector<RealMatrix> theta;
  std::vector<double> sd;

  PeriodicMa(Rng& rng, std::size_t K, std::size_t T, double scale = 0.8) : sd(K) {
    for (std::size_t k = 0; k < K; ++k) sd[k] = std::exp(-0.5 * static_cast<double>(k));
    for (std::size_t d = 0; d < T; ++d) {
      RealMatrix m(K, K);
      for (auto& v : m.data()) v = scale * rng.normal() / std::sqrt(static_cast<double>(K));
      theta.push_back(std::move(m));
    }
  }

  FunctionalSeries sample(Rng& rng, std::size_t n) const {
    const std::size_t K = sd.size();
    const std::size_t T = theta.size();
    std::vector<double> prev(K), cur(K);
    for (std::size_t k = 0; k < K; ++k) prev[k] = sd[k] * rng.normal();
    FunctionalSeries s{RealMatrix(n, K), BasisDescriptor::fourier(K), T};
    for (std::size_t t = 0; t < n; ++t) {
      for (std::size_t k = 0; k < K; ++k) cur[k] = sd[k] * rng.normal();
      for (std::size_t k = 0; k < K; ++k) {
        double v = cur[k];
        for (std::size_t l = 0; l < K; ++l) v += theta[t % T](k, l) * prev[l];
        s.coeffs(t, k) = v;
      }
      prev = cur;
    }
    return s;
  }
};

inline Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
  Eigen::MatrixXcd out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c);
  return out;
}

inline ComplexMatrix random_hermitian(Rng& rng, std::size_t n) {
  ComplexMatrix h(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    h(r, r) = rng.normal();
    for (std::size_t c = r + 1; c < n; ++c) {
      h(r, c) = Complex(rng.normal(), rng.normal());
      h(c, r) = std::conj(h(r, c));
    }
  }
  return h;
}

/// Trapezoid rule on an equispaced grid of [0, 1].
inline double trapezoid(const std::vector<double>& f) {
  const double h = 1.0 / static_cast<double>(f.size() - 1);
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

}  // namespace pcdfpca::test
