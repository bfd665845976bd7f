#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pcdfpca/basis.hpp"
#include "pcdfpca/matrix.hpp"
#include "pcdfpca/numerics.hpp"
#include "pcdfpca/spectral.hpp"

namespace pcdfpca {

/// Filter truncation rule. A fixed half-width L (in periods) wins over the
/// energy threshold when both are set.
struct Truncation {
  std::optional<std::size_t> lag;
  std::optional<double> epsilon;

  static Truncation fixed(std::size_t L) { return {L, std::nullopt}; }
  static Truncation energy(double epsilon = 0.05) { return {std::nullopt, epsilon}; }
};

struct FitOptions {
  std::size_t period = 1;      // T
  std::size_t components = 1;  // p, per phase
  std::size_t window = 3;      // q_n
  Kernel kernel = Kernel::bartlett;
  std::size_t frequencies = FrequencyGrid::default_size;  // F
  Truncation truncation = Truncation::fixed(2);
};

/// Fitted periodically correlated dynamic FPCA.
///
/// Filters are kept in the block layout produced by the inverse Fourier
/// transform: for phase d, component m and block lag b in [-L, L] the stored
/// TK-vector holds (Phi^d_{bT+d}, Phi^d_{bT+d-1}, ..., Phi^d_{bT+d-T+1}).
class PcDfpcaModel {
 public:
  PcDfpcaModel() = default;
  PcDfpcaModel(std::size_t T, std::size_t p, std::size_t L, BasisDescriptor basis, PeriodicMean mean);

  [[nodiscard]] std::size_t period() const noexcept { return T_; }
  [[nodiscard]] std::size_t components() const noexcept { return p_; }
  [[nodiscard]] std::size_t lag() const noexcept { return L_; }
  [[nodiscard]] std::size_t basis_size() const noexcept { return basis_.K; }
  [[nodiscard]] const BasisDescriptor& basis() const noexcept { return basis_; }
  [[nodiscard]] const PeriodicMean& mean() const noexcept { return mean_; }

  /// Block-layout filter vector (length T*K) for phase d, component m (0-based)
  /// and block lag b in [-L, L].
  [[nodiscard]] std::span<const double> block_filter(std::size_t d, std::size_t m, long b) const;
  std::span<double> block_filter(std::size_t d, std::size_t m, long b);

  /// Phi^d_{l,m} as K coefficients, or an empty span when l is outside
  /// [-LT+d-T+1, LT+d].
  [[nodiscard]] std::span<const double> filter(std::size_t d, std::size_t m, long l) const;

  /// Sum over the stored lags of ||Phi^d_{l,m}||^2.
  [[nodiscard]] double filter_energy(std::size_t d, std::size_t m) const;

  // Fit diagnostics and configuration echo.
  RealMatrix eigenvalues;  // F x TK
  std::size_t window = 0;
  std::size_t frequencies = 0;
  Kernel kernel = Kernel::bartlett;
  std::optional<double> epsilon;

  friend bool operator==(const PcDfpcaModel&, const PcDfpcaModel&) = default;

 private:
  [[nodiscard]] std::size_t offset(std::size_t d, std::size_t m, long b) const;

  std::size_t T_ = 1;
  std::size_t p_ = 1;
  std::size_t L_ = 0;
  BasisDescriptor basis_;
  PeriodicMean mean_;
  std::vector<double> filters_;
};

/// Row t holds the scores of observation t (phase t mod T).
struct ScoreSeries {
  RealMatrix scores;
  std::size_t period = 1;

  [[nodiscard]] std::size_t size() const noexcept { return scores.rows(); }
};

PcDfpcaModel fit(const FunctionalSeries& series, const FitOptions& options);

/// Same as fit with period 1: the stationary dynamic FPCA.
PcDfpcaModel dfpca_fit(const FunctionalSeries& series, std::size_t components, std::size_t window,
                       std::size_t frequencies, Truncation truncation, Kernel kernel = Kernel::bartlett);

/// Truncated filter sums over an already centered series. Observations
/// outside the series contribute nothing.
ScoreSeries scores(const PcDfpcaModel& model, const FunctionalSeries& centered);

/// Center with the model's periodic mean, then compute scores.
ScoreSeries transform(const PcDfpcaModel& model, const FunctionalSeries& series);

/// Inversion formula truncated at L, with the periodic mean added back.
FunctionalSeries reconstruct(const PcDfpcaModel& model, const ScoreSeries& scores, std::size_t n);

/// sum ||X_t - Xhat_t||^2 / sum ||X_t||^2 using the basis Gram matrix.
double nmse(const FunctionalSeries& original, const FunctionalSeries& reconstructed);

/// Classical (static) functional PCA.
struct FpcaModel {
  BasisDescriptor basis;
  RealVector mean;
  RealVector eigenvalues;  // all K, non-increasing
  RealMatrix components;   // K x p, column m is v_m
};

FpcaModel fpca_fit(const FunctionalSeries& series, std::size_t components);
ScoreSeries fpca_scores(const FpcaModel& model, const FunctionalSeries& series);
FunctionalSeries fpca_reconstruct(const FpcaModel& model, const ScoreSeries& scores);

}  // namespace pcdfpca
