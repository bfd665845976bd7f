#include "pcdfpca/model.hpp"

#include <cmath>
#include <string>

#include "pcdfpca/error.hpp"

namespace pcdfpca {

namespace {

constexpr double kImagResidueTol = 1e-8;
constexpr double kOrientationTol = 1e-8;

// Gram-weighted inner product <phi, omega> in H^T for complex phi and real omega.
Complex block_inner(std::span<const Complex> phi, std::span<const double> omega, const BasisDescriptor& basis,
                    std::size_t T) {
  const std::size_t K = basis.K;
  Complex s = 0.0;
  for (std::size_t b = 0; b < T; ++b)
    for (std::size_t i = 0; i < K; ++i) {
      Complex row = 0.0;
      for (std::size_t k = 0; k < K; ++k) row += basis.gram(i, k) * phi[b * K + k];
      s += omega[b * K + i] * row;
    }
  return s;
}

// omega has 1 in the first coordinate of each block, scaled to unit norm.
std::vector<double> orientation_reference(const BasisDescriptor& basis, std::size_t T) {
  std::vector<double> omega(T * basis.K, 0.0);
  const double norm = std::sqrt(static_cast<double>(T) * basis.gram(0, 0));
  for (std::size_t b = 0; b < T; ++b) omega[b * basis.K] = 1.0 / norm;
  return omega;
}

void orient(std::span<Complex> phi, std::span<const double> omega, const BasisDescriptor& basis, std::size_t T) {
  Complex z = block_inner(phi, omega, basis, T);
  if (std::abs(z) < kOrientationTol) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < phi.size(); ++k)
      if (std::abs(phi[k]) > std::abs(phi[best])) best = k;
    z = phi[best];
  }
  if (std::abs(z) == 0.0) return;
  const Complex rot = std::conj(z) / std::abs(z);
  for (auto& v : phi) v *= rot;
}

double gram_norm_sq(std::span<const double> f, const BasisDescriptor& basis) { return inner_product(f, f, basis); }

void require_basis(const BasisDescriptor& expected, const BasisDescriptor& got) {
  if (expected.K != got.K || !(expected.gram == got.gram))
    throw Error(ErrorKind::invalid_argument, "series basis (K=" + std::to_string(got.K) +
                                                 ") does not match model basis (K=" + std::to_string(expected.K) +
                                                 ")");
}

}  // namespace

PcDfpcaModel::PcDfpcaModel(std::size_t T, std::size_t p, std::size_t L, BasisDescriptor basis, PeriodicMean mean)
    : T_(T),
      p_(p),
      L_(L),
      basis_(std::move(basis)),
      mean_(std::move(mean)),
      filters_(T * p * (2 * L + 1) * T * basis_.K, 0.0) {}

std::size_t PcDfpcaModel::offset(std::size_t d, std::size_t m, long b) const {
  const long L = static_cast<long>(L_);
  if (d >= T_ || m >= p_ || b < -L || b > L)
    throw Error(ErrorKind::invalid_argument, "filter index (d=" + std::to_string(d) + ", m=" + std::to_string(m) +
                                                 ", b=" + std::to_string(b) + ") out of range");
  const std::size_t width = T_ * basis_.K;
  return ((d * p_ + m) * (2 * L_ + 1) + static_cast<std::size_t>(b + L)) * width;
}

std::span<const double> PcDfpcaModel::block_filter(std::size_t d, std::size_t m, long b) const {
  return {filters_.data() + offset(d, m, b), T_ * basis_.K};
}

std::span<double> PcDfpcaModel::block_filter(std::size_t d, std::size_t m, long b) {
  return {filters_.data() + offset(d, m, b), T_ * basis_.K};
}

std::span<const double> PcDfpcaModel::filter(std::size_t d, std::size_t m, long l) const {
  // l - d = bT - i with i in [0, T).
  const long T = static_cast<long>(T_);
  const long shifted = l - static_cast<long>(d);
  const long b = shifted >= 0 ? (shifted + T - 1) / T : -((-shifted) / T);
  const long i = b * T - shifted;
  if (b < -static_cast<long>(L_) || b > static_cast<long>(L_)) return {};
  return block_filter(d, m, b).subspan(static_cast<std::size_t>(i) * basis_.K, basis_.K);
}

double PcDfpcaModel::filter_energy(std::size_t d, std::size_t m) const {
  const long L = static_cast<long>(L_);
  const std::size_t K = basis_.K;
  double e = 0.0;
  for (long b = -L; b <= L; ++b) {
    const auto v = block_filter(d, m, b);
    for (std::size_t i = 0; i < T_; ++i) e += gram_norm_sq(v.subspan(i * K, K), basis_);
  }
  return e;
}

PcDfpcaModel fit(const FunctionalSeries& series, const FitOptions& options) {
  const std::size_t T = options.period;
  const std::size_t p = options.components;
  const std::size_t K = series.coeffs.cols();
  if (T < 1) throw Error(ErrorKind::invalid_argument, "period must be positive");
  if (p < 1 || p > K)
    throw Error(ErrorKind::invalid_argument,
                "number of components p=" + std::to_string(p) + " must lie in [1, K=" + std::to_string(K) + "]");
  if (options.window < 1) throw Error(ErrorKind::invalid_argument, "lag window must be positive");
  if (series.basis.K != K) throw Error(ErrorKind::invalid_argument, "series coefficients do not match its basis");
  const std::size_t n = series.size();
  if (n < 2 * T * std::max<std::size_t>(options.window, 2))
    throw Error(ErrorKind::insufficient_data, "series of length " + std::to_string(n) +
                                                  " is too short for period " + std::to_string(T) +
                                                  " and window " + std::to_string(options.window));
  if (options.truncation.epsilon && !options.truncation.lag &&
      !(*options.truncation.epsilon > 0.0 && *options.truncation.epsilon < 1.0))
    throw Error(ErrorKind::invalid_argument, "energy threshold epsilon must lie in (0, 1)");
  if (!options.truncation.lag && !options.truncation.epsilon)
    throw Error(ErrorKind::invalid_argument, "either a fixed lag L or an energy threshold is required");

  const FrequencyGrid grid(options.frequencies);
  const std::size_t F = grid.size();
  const std::size_t dim = T * K;
  if (options.truncation.lag && *options.truncation.lag >= F / 2)
    throw Error(ErrorKind::invalid_argument, "truncation lag L=" + std::to_string(*options.truncation.lag) +
                                                 " must be below half the frequency grid size");

  PeriodicMean mean = periodic_mean(series, T);
  const FunctionalSeries centered = center(series, mean);
  const SpectralDensityEstimate sde = spectral_density(centered, T, options.window, options.kernel, grid);

  // samples[c][j]: oriented eigenvector of component c = d*p + m at grid point j.
  const std::size_t used = T * p;
  std::vector<std::vector<ComplexVector>> samples(used, std::vector<ComplexVector>(F));
  RealMatrix eigenvalues(F, dim);
  const std::vector<double> omega = orientation_reference(series.basis, T);

  for (std::size_t j = F / 2; j < F; ++j) {  // theta_j > 0
    const EigenDecomposition eig = hermitian_eig(sde.matrices[j]);
    const std::size_t jm = grid.mirror(j);
    for (std::size_t k = 0; k < dim; ++k) {
      eigenvalues(j, k) = eig.values[k];
      eigenvalues(jm, k) = eig.values[k];
    }
    for (std::size_t c = 0; c < used; ++c) {
      ComplexVector v = eig.vector(c);
      orient(v, omega, series.basis, T);
      ComplexVector mirrored(dim);
      for (std::size_t k = 0; k < dim; ++k) mirrored[k] = std::conj(v[k]);
      samples[c][j] = std::move(v);
      samples[c][jm] = std::move(mirrored);
    }
  }

  const long max_lag = options.truncation.lag ? static_cast<long>(*options.truncation.lag)
                                              : static_cast<long>(F / 2) - 1;
  std::vector<std::map<long, ComplexVector>> coeffs(used);
  for (std::size_t c = 0; c < used; ++c) coeffs[c] = inverse_fourier_coeffs(samples[c], grid, -max_lag, max_lag);

  std::size_t L = static_cast<std::size_t>(max_lag);
  if (!options.truncation.lag) {
    // Smallest L whose block lags carry at least 1 - epsilon of the energy
    // of the monitored filter (phase 0, first component).
    const double target = 1.0 - *options.truncation.epsilon;
    const auto block_energy = [&](long b) {
      const ComplexVector& v = coeffs[0].at(b);
      double e = 0.0;
      std::vector<double> re(K);
      for (std::size_t blk = 0; blk < T; ++blk) {
        for (std::size_t k = 0; k < K; ++k) re[k] = v[blk * K + k].real();
        e += gram_norm_sq(re, series.basis);
      }
      return e;
    };
    double energy = block_energy(0);
    long chosen = 0;
    while (energy < target && chosen < max_lag) {
      ++chosen;
      energy += block_energy(chosen) + block_energy(-chosen);
    }
    L = static_cast<std::size_t>(chosen);
  }

  PcDfpcaModel model(T, p, L, series.basis, std::move(mean));
  model.eigenvalues = std::move(eigenvalues);
  model.window = options.window;
  model.frequencies = F;
  model.kernel = options.kernel;
  if (!options.truncation.lag) model.epsilon = options.truncation.epsilon;

  for (std::size_t d = 0; d < T; ++d)
    for (std::size_t m = 0; m < p; ++m)
      for (long b = -static_cast<long>(L); b <= static_cast<long>(L); ++b) {
        const ComplexVector& v = coeffs[d * p + m].at(b);
        double imag = 0.0;
        for (const auto& z : v) imag += z.imag() * z.imag();
        if (std::sqrt(imag) >= kImagResidueTol)
          throw Error(ErrorKind::numerical_failure, "filter coefficient has imaginary residue " +
                                                        std::to_string(std::sqrt(imag)));
        auto dst = model.block_filter(d, m, b);
        for (std::size_t k = 0; k < dim; ++k) dst[k] = v[k].real();
      }
  return model;
}

PcDfpcaModel dfpca_fit(const FunctionalSeries& series, std::size_t components, std::size_t window,
                       std::size_t frequencies, Truncation truncation, Kernel kernel) {
  return fit(series, FitOptions{1, components, window, kernel, frequencies, truncation});
}

ScoreSeries scores(const PcDfpcaModel& model, const FunctionalSeries& centered) {
  require_basis(model.basis(), centered.basis);
  const std::size_t T = model.period();
  const std::size_t p = model.components();
  const std::size_t K = model.basis_size();
  const long L = static_cast<long>(model.lag());
  const long n = static_cast<long>(centered.size());
  const BasisDescriptor& basis = model.basis();

  ScoreSeries out{RealMatrix(centered.size(), p), T};
  for (long t = 0; t < n; ++t) {
    const std::size_t d = static_cast<std::size_t>(t) % T;
    for (std::size_t m = 0; m < p; ++m) {
      double y = 0.0;
      for (long b = -L; b <= L; ++b) {
        const auto filt = model.block_filter(d, m, b);
        for (std::size_t i = 0; i < T; ++i) {
          // Block i holds Phi^d_l with l = bT + d - i, applied to X_{t-l}.
          const long src = t - (b * static_cast<long>(T) + static_cast<long>(d) - static_cast<long>(i));
          if (src < 0 || src >= n) continue;
          y += inner_product(centered.coeffs.row(static_cast<std::size_t>(src)), filt.subspan(i * K, K), basis);
        }
      }
      out.scores(static_cast<std::size_t>(t), m) = y;
    }
  }
  return out;
}

ScoreSeries transform(const PcDfpcaModel& model, const FunctionalSeries& series) {
  require_basis(model.basis(), series.basis);
  return scores(model, center(series, model.mean()));
}

FunctionalSeries reconstruct(const PcDfpcaModel& model, const ScoreSeries& sc, std::size_t n) {
  const std::size_t T = model.period();
  const std::size_t p = model.components();
  const std::size_t K = model.basis_size();
  if (sc.scores.cols() != p)
    throw Error(ErrorKind::validation, "scores have " + std::to_string(sc.scores.cols()) +
                                           " columns, model has p=" + std::to_string(p));
  const long L = static_cast<long>(model.lag());
  const long ns = static_cast<long>(sc.size());
  const long Tl = static_cast<long>(T);

  FunctionalSeries out{RealMatrix(n, K), model.basis(), T};
  for (long t = 0; t < static_cast<long>(n); ++t) {
    const long d = t % Tl;
    auto row = out.coeffs.row(static_cast<std::size_t>(t));
    for (std::size_t m = 0; m < p; ++m)
      for (long b = -L; b <= L; ++b)
        for (long j = 0; j < Tl; ++j) {
          // Y_{t + bT - d + j, m} Phi^j_{bT - d + j, m}; the latter is block d of
          // the phase-j filter at block lag b.
          const long s = t + b * Tl - d + j;
          if (s < 0 || s >= ns) continue;
          const double y = sc.scores(static_cast<std::size_t>(s), m);
          if (y == 0.0) continue;
          const auto filt = model.block_filter(static_cast<std::size_t>(j), m, b)
                                .subspan(static_cast<std::size_t>(d) * K, K);
          for (std::size_t k = 0; k < K; ++k) row[k] += y * filt[k];
        }
  }
  return uncenter(out, model.mean());
}

double nmse(const FunctionalSeries& original, const FunctionalSeries& reconstructed) {
  if (original.size() != reconstructed.size())
    throw Error(ErrorKind::invalid_argument, "series lengths differ: " + std::to_string(original.size()) + " vs " +
                                                 std::to_string(reconstructed.size()));
  require_basis(original.basis, reconstructed.basis);
  double num = 0.0;
  double den = 0.0;
  std::vector<double> diff(original.basis.K);
  for (std::size_t t = 0; t < original.size(); ++t) {
    const auto x = original.coeffs.row(t);
    const auto xh = reconstructed.coeffs.row(t);
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = x[k] - xh[k];
    num += gram_norm_sq(diff, original.basis);
    den += gram_norm_sq(x, original.basis);
  }
  if (den == 0.0) throw Error(ErrorKind::undefined_denominator, "NMSE is undefined for an all-zero original series");
  return num / den;
}

FpcaModel fpca_fit(const FunctionalSeries& series, std::size_t components) {
  const std::size_t K = series.coeffs.cols();
  if (components < 1 || components > K)
    throw Error(ErrorKind::invalid_argument, "number of components p=" + std::to_string(components) +
                                                 " must lie in [1, K=" + std::to_string(K) + "]");
  const std::size_t n = series.size();
  if (n < 1) throw Error(ErrorKind::insufficient_data, "FPCA needs at least one observation");

  const PeriodicMean grand = periodic_mean(series, 1);
  RealVector mean(grand.means.row(0).begin(), grand.means.row(0).end());

  RealMatrix cov(K, K);
  for (std::size_t t = 0; t < n; ++t) {
    const auto c = series.coeffs.row(t);
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t k = 0; k < K; ++k) cov(i, k) += (c[i] - mean[i]) * (c[k] - mean[k]);
  }
  for (auto& v : cov.data()) v /= static_cast<double>(n);

  const EigenDecomposition eig = hermitian_eig(HermitianMatrix(to_complex(cov * series.basis.gram.transpose())));
  FpcaModel model{series.basis, std::move(mean), eig.values, RealMatrix(K, components)};
  for (std::size_t m = 0; m < components; ++m) {
    ComplexVector v = eig.vector(m);
    // Real symmetric input yields real vectors up to a global phase; fix it
    // by making the largest entry positive.
    std::size_t best = 0;
    for (std::size_t k = 1; k < K; ++k)
      if (std::abs(v[k]) > std::abs(v[best])) best = k;
    const Complex rot = std::conj(v[best]) / std::abs(v[best]);
    for (std::size_t k = 0; k < K; ++k) model.components(k, m) = (v[k] * rot).real();
  }
  return model;
}

ScoreSeries fpca_scores(const FpcaModel& model, const FunctionalSeries& series) {
  require_basis(model.basis, series.basis);
  const std::size_t K = model.basis.K;
  const std::size_t p = model.components.cols();
  ScoreSeries out{RealMatrix(series.size(), p), 1};
  std::vector<double> centered(K);
  for (std::size_t t = 0; t < series.size(); ++t) {
    for (std::size_t k = 0; k < K; ++k) centered[k] = series.coeffs(t, k) - model.mean[k];
    for (std::size_t m = 0; m < p; ++m) {
      const RealVector v = model.components.col(m);
      out.scores(t, m) = inner_product(centered, v, model.basis);
    }
  }
  return out;
}

FunctionalSeries fpca_reconstruct(const FpcaModel& model, const ScoreSeries& sc) {
  const std::size_t K = model.basis.K;
  const std::size_t p = model.components.cols();
  if (sc.scores.cols() != p)
    throw Error(ErrorKind::validation, "scores have " + std::to_string(sc.scores.cols()) +
                                           " columns, model has p=" + std::to_string(p));
  FunctionalSeries out{RealMatrix(sc.size(), K), model.basis, sc.period};
  for (std::size_t t = 0; t < sc.size(); ++t)
    for (std::size_t k = 0; k < K; ++k) {
      double x = model.mean[k];
      for (std::size_t m = 0; m < p; ++m) x += sc.scores(t, m) * model.components(k, m);
      out.coeffs(t, k) = x;
    }
  return out;
}

}  // namespace pcdfpca
