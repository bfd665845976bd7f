#include "pcdfpca/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "pcdfpca/error.hpp"

namespace pcdfpca {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffDiagonalTol = 1e-14;
constexpr double kResidualTol = 1e-8;

double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// One two-sided rotation zeroing a(p, q). The unitary is U = D J with
// D = diag(1, conj(e)) taking a(p, q) to |a(p, q)| and J a real Jacobi rotation.
void rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
  const Complex apq = a(p, q);
  const double mag = std::abs(apq);
  if (mag == 0.0) return;
  const Complex e = apq / mag;
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double tau = (aqq - app) / (2.0 * mag);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  const Complex upp = c;
  const Complex upq = s;
  const Complex uqp = -s * std::conj(e);
  const Complex uqq = c * std::conj(e);

  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {  // a <- a U
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = akp * upp + akq * uqp;
    a(k, q) = akp * upq + akq * uqq;
  }
  for (std::size_t k = 0; k < n; ++k) {  // a <- U* a
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
    a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
  }
  for (std::size_t k = 0; k < n; ++k) {  // v <- v U
    const Complex vkp = v(k, p);
    const Complex vkq = v(k, q);
    v(k, p) = vkp * upp + vkq * uqp;
    v(k, q) = vkp * upq + vkq * uqq;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();
}

}  // namespace

HermitianMatrix::HermitianMatrix(const ComplexMatrix& entries) : entries_(entries.rows(), entries.cols()) {
  if (entries.rows() != entries.cols() || entries.rows() == 0)
    throw Error(ErrorKind::invalid_argument, "Hermitian matrix must be square and non-empty, got " +
                                                 std::to_string(entries.rows()) + "x" +
                                                 std::to_string(entries.cols()));
  const std::size_t n = entries.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) entries_(i, j) = 0.5 * (entries(i, j) + std::conj(entries(j, i)));
}

FrequencyGrid::FrequencyGrid(std::size_t F) : points_(F) {
  if (F == 0 || F % 2 != 0)
    throw Error(ErrorKind::invalid_argument, "frequency grid size must be a positive even integer, got " +
                                                 std::to_string(F));
  for (std::size_t j = 0; j < F; ++j)
    points_[j] = -std::numbers::pi + 2.0 * std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(F);
}

EigenDecomposition hermitian_eig(const HermitianMatrix& H) {
  const std::size_t n = H.dim();
  ComplexMatrix a = H.entries();
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double scale = frobenius_norm(a);

  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= kOffDiagonalTol * scale) break;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
  }
  if (sweep == kMaxSweeps && off_diagonal_norm(a) > 1e-10 * scale)
    throw Error(ErrorKind::numerical_failure, "Jacobi eigensolver did not converge: off-diagonal norm " +
                                                  std::to_string(off_diagonal_norm(a)) + " after " +
                                                  std::to_string(kMaxSweeps) + " sweeps");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::ranges::stable_sort(order, [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

  EigenDecomposition out{std::vector<double>(n), ComplexMatrix(n, n)};
  for (std::size_t m = 0; m < n; ++m) {
    out.values[m] = a(order[m], order[m]).real();
    double norm = 0.0;
    for (std::size_t k = 0; k < n; ++k) norm += std::norm(v(k, order[m]));
    norm = std::sqrt(norm);
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, m) = v(k, order[m]) / norm;
  }

  // Residual guard, scaled so that the bound is meaningful for any matrix norm.
  const double residual_scale = std::max(1.0, scale);
  for (std::size_t m = 0; m < n; ++m) {
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Complex hv = 0.0;
      for (std::size_t k = 0; k < n; ++k) hv += H(i, k) * out.vectors(k, m);
      res += std::norm(hv - out.values[m] * out.vectors(i, m));
    }
    res = std::sqrt(res);
    if (res > kResidualTol * (1.0 + std::abs(out.values[m])) * residual_scale)
      throw Error(ErrorKind::numerical_failure, "eigenpair " + std::to_string(m) + " has residual " +
                                                    std::to_string(res));
  }
  return out;
}

std::map<long, ComplexVector> inverse_fourier_coeffs(std::span<const ComplexVector> samples,
                                                     const FrequencyGrid& grid, long l_min, long l_max) {
  if (samples.size() != grid.size())
    throw Error(ErrorKind::invalid_argument, "got " + std::to_string(samples.size()) + " samples for a grid of " +
                                                 std::to_string(grid.size()) + " frequencies");
  if (l_min > l_max) throw Error(ErrorKind::invalid_argument, "empty lag range");
  const std::size_t dim = samples.front().size();
  for (const auto& s : samples)
    if (s.size() != dim) throw Error(ErrorKind::invalid_argument, "samples have inconsistent lengths");

  const double inv_F = 1.0 / static_cast<double>(grid.size());
  std::map<long, ComplexVector> out;
  for (long l = l_min; l <= l_max; ++l) {
    ComplexVector coef(dim);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const Complex w = std::polar(inv_F, -static_cast<double>(l) * grid[j]);
      for (std::size_t k = 0; k < dim; ++k) coef[k] += samples[j][k] * w;
    }
    out.emplace(l, std::move(coef));
  }
  return out;
}

}  // namespace pcdfpca
