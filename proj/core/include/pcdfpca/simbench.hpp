#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pcdfpca/basis.hpp"
#include "pcdfpca/matrix.hpp"
#include "pcdfpca/rng.hpp"
#include "pcdfpca/spectral.hpp"

namespace pcdfpca {

enum class Scenario {
  deterministic_mixing,  // scenario A: (a_i, b_i, 2a_i - b_i) blocks, T = 3
  periodic_ar,           // scenario B: periodic functional AR(2), T = 2
};

/// Norm used to rescale the random AR operators to 0.9.
enum class OperatorNorm { spectral, frobenius };

[[nodiscard]] std::string_view scenario_name(Scenario s) noexcept;
[[nodiscard]] Scenario parse_scenario(std::string_view name);

struct ScenarioSpec {
  Scenario kind = Scenario::deterministic_mixing;
  std::size_t p = 7;  // basis size of the simulated curves
  std::size_t T = 3;
  std::size_t n = 300;
  std::size_t reps = 100;
  std::uint64_t seed = 1;
  std::size_t lag = 2;     // L
  std::size_t window = 3;  // q_n
  Kernel kernel = Kernel::bartlett;
  std::size_t frequencies = 512;
  std::size_t components = 1;
  OperatorNorm norm = OperatorNorm::spectral;
  std::size_t threads = 0;  // 0: hardware concurrency

  static ScenarioSpec scenario_a();
  static ScenarioSpec scenario_b();

  /// Throws invalid_argument when T/n disagree with the scenario kind and
  /// `allow_override` is false, or when any size is zero.
  void validate(bool allow_override = false) const;
};

/// diag(exp(-2k/p)), k = 1..p, as standard deviations exp(-k/p).
std::vector<double> decaying_sd(std::size_t p);

FunctionalSeries gen_scenario_a(Rng& rng, std::size_t p = 7, std::size_t n = 300);
FunctionalSeries gen_scenario_a(std::uint64_t seed);

/// The four operators Psi_{d,j}, index 2d + j, each rescaled to norm 0.9.
std::array<RealMatrix, 4> draw_ar_operators(Rng& rng, std::size_t p, OperatorNorm norm);

/// c_t = Psi_{d,0} c_{t-1} + Psi_{d,1} c_{t-2} + eps_t for row t with phase d,
/// c_t = 0 before the first row.
FunctionalSeries simulate_periodic_ar(const std::array<RealMatrix, 4>& psi, Rng& rng, std::size_t n);

FunctionalSeries gen_scenario_b(Rng& rng, std::size_t p = 7, std::size_t n = 1000,
                                OperatorNorm norm = OperatorNorm::spectral);
FunctionalSeries gen_scenario_b(std::uint64_t seed);

double spectral_norm(const RealMatrix& a);
double frobenius(const RealMatrix& a);

/// Series for one replication of a spec (shared by run_benchmark and the CLI).
FunctionalSeries generate(const ScenarioSpec& spec, std::size_t replication);

/// Reference mean NMSE for the standard configurations, in method order
/// FPCA, DFPCA, PC-DFPCA, with the tolerance band used for comparison.
struct ReferenceValues {
  std::array<double, 3> mean_nmse;
  double tolerance;
};

/// Reference values when `spec` is one of the two standard configurations
/// (default sizes, L = 2, q_n = 3, one component), otherwise nullopt.
std::optional<ReferenceValues> reference_values(const ScenarioSpec& spec);

struct MethodSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;  // denominator reps - 1
  std::vector<double> values;
};

struct BenchmarkReport {
  ScenarioSpec spec;
  std::vector<MethodSummary> methods;  // FPCA, DFPCA, PC-DFPCA
  std::vector<std::size_t> failed_replications;
  std::vector<std::string> notes;
  std::optional<ReferenceValues> reference;
  /// Methods whose mean lies outside the reference band.
  std::vector<std::string> deviations;

  [[nodiscard]] const MethodSummary& method(std::string_view name) const;
};

/// NMSE on the held-out half for one replication, in method order
/// FPCA, DFPCA, PC-DFPCA.
std::array<double, 3> run_replication(const ScenarioSpec& spec, std::size_t replication);

BenchmarkReport run_benchmark(const ScenarioSpec& spec);

std::string report_to_json(const BenchmarkReport& report);
std::string report_table(const BenchmarkReport& report);
std::string report_replications_csv(const BenchmarkReport& report);

}  // namespace pcdfpca
