#include "pcdfpca/simbench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "pcdfpca/error.hpp"
#include "pcdfpca/model.hpp"
#include "pcdfpca/numerics.hpp"

namespace pcdfpca {

namespace {

constexpr double kOperatorScale = 0.9;
constexpr double kMaxFailureFraction = 0.05;
constexpr std::array<const char*, 3> kMethodNames = {"FPCA", "DFPCA", "PC-DFPCA"};

void draw_scaled(Rng& rng, std::span<const double> sd, std::span<double> out) {
  for (std::size_t k = 0; k < sd.size(); ++k) out[k] = sd[k] * rng.normal();
}

}  // namespace

std::string_view scenario_name(Scenario s) noexcept {
  switch (s) {
    case Scenario::deterministic_mixing: return "a";
    case Scenario::periodic_ar: return "b";
  }
  return "unknown";
}

Scenario parse_scenario(std::string_view name) {
  if (name == "a" || name == "A" || name == "deterministic_mixing") return Scenario::deterministic_mixing;
  if (name == "b" || name == "B" || name == "periodic_ar") return Scenario::periodic_ar;
  throw Error(ErrorKind::invalid_argument, "unknown scenario '" + std::string(name) + "' (expected a or b)");
}

ScenarioSpec ScenarioSpec::scenario_a() { return ScenarioSpec{}; }

ScenarioSpec ScenarioSpec::scenario_b() {
  ScenarioSpec spec;
  spec.kind = Scenario::periodic_ar;
  spec.T = 2;
  spec.n = 1000;
  return spec;
}

void ScenarioSpec::validate(bool allow_override) const {
  if (p < 1 || T < 1 || n < 1 || reps < 1 || window < 1 || frequencies < 2 || components < 1)
    throw Error(ErrorKind::invalid_argument, "scenario sizes must be positive");
  if (components > p) throw Error(ErrorKind::invalid_argument, "components exceed basis size");
  if (allow_override) return;
  if (kind == Scenario::deterministic_mixing && (T != 3 || n != 300))
    throw Error(ErrorKind::invalid_argument, "scenario a uses T=3, n=300");
  if (kind == Scenario::periodic_ar && (T != 2 || n != 1000))
    throw Error(ErrorKind::invalid_argument, "scenario b uses T=2, n=1000");
}

std::vector<double> decaying_sd(std::size_t p) {
  std::vector<double> sd(p);
  for (std::size_t k = 0; k < p; ++k) sd[k] = std::exp(-static_cast<double>(k + 1) / static_cast<double>(p));
  return sd;
}

FunctionalSeries gen_scenario_a(Rng& rng, std::size_t p, std::size_t n) {
  const std::vector<double> sd = decaying_sd(p);
  FunctionalSeries out{RealMatrix(n, p), BasisDescriptor::fourier(p), 3};
  std::vector<double> a(p), b(p);
  for (std::size_t start = 0; start < n; start += 3) {
    draw_scaled(rng, sd, a);
    draw_scaled(rng, sd, b);
    for (std::size_t k = 0; k < p; ++k) {
      out.coeffs(start, k) = a[k];
      if (start + 1 < n) out.coeffs(start + 1, k) = b[k];
      if (start + 2 < n) out.coeffs(start + 2, k) = 2.0 * a[k] - b[k];
    }
  }
  return out;
}

FunctionalSeries gen_scenario_a(std::uint64_t seed) {
  Rng rng(seed);
  return gen_scenario_a(rng);
}

double spectral_norm(const RealMatrix& a) {
  const EigenDecomposition eig = hermitian_eig(HermitianMatrix(to_complex(a.transpose() * a)));
  return std::sqrt(std::max(0.0, eig.values.front()));
}

double frobenius(const RealMatrix& a) { return frobenius_norm(a); }

std::array<RealMatrix, 4> draw_ar_operators(Rng& rng, std::size_t p, OperatorNorm norm) {
  // Entry (k, l) has standard deviation exp(-l/p), l the 1-based column.
  const std::vector<double> sd = decaying_sd(p);
  std::array<RealMatrix, 4> psi;
  for (auto& m : psi) {
    m = RealMatrix(p, p);
    for (std::size_t k = 0; k < p; ++k)
      for (std::size_t l = 0; l < p; ++l) m(k, l) = sd[l] * rng.normal();
    const double scale = norm == OperatorNorm::spectral ? spectral_norm(m) : frobenius(m);
    for (auto& v : m.data()) v *= kOperatorScale / scale;
  }
  return psi;
}

FunctionalSeries simulate_periodic_ar(const std::array<RealMatrix, 4>& psi, Rng& rng, std::size_t n) {
  const std::size_t p = psi[0].rows();
  const std::vector<double> sd = decaying_sd(p);
  FunctionalSeries out{RealMatrix(n, p), BasisDescriptor::fourier(p), 2};
  std::vector<double> eps(p);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t d = t % 2;
    draw_scaled(rng, sd, eps);
    for (std::size_t k = 0; k < p; ++k) {
      double v = eps[k];
      for (std::size_t l = 0; l < p; ++l) {
        if (t >= 1) v += psi[2 * d](k, l) * out.coeffs(t - 1, l);
        if (t >= 2) v += psi[2 * d + 1](k, l) * out.coeffs(t - 2, l);
      }
      out.coeffs(t, k) = v;
    }
  }
  return out;
}

FunctionalSeries gen_scenario_b(Rng& rng, std::size_t p, std::size_t n, OperatorNorm norm) {
  const auto psi = draw_ar_operators(rng, p, norm);
  return simulate_periodic_ar(psi, rng, n);
}

FunctionalSeries gen_scenario_b(std::uint64_t seed) {
  Rng rng(seed);
  return gen_scenario_b(rng);
}

FunctionalSeries generate(const ScenarioSpec& spec, std::size_t replication) {
  Rng rng = Rng::stream(spec.seed, replication);
  FunctionalSeries series = spec.kind == Scenario::deterministic_mixing ? gen_scenario_a(rng, spec.p, spec.n)
                                                                        : gen_scenario_b(rng, spec.p, spec.n, spec.norm);
  series.period = spec.T;
  return series;
}

std::optional<ReferenceValues> reference_values(const ScenarioSpec& spec) {
  if (spec.p != 7 || spec.lag != 2 || spec.window != 3 || spec.components != 1 || spec.kernel != Kernel::bartlett)
    return std::nullopt;
  if (spec.kind == Scenario::deterministic_mixing && spec.T == 3 && spec.n == 300)
    return ReferenceValues{{0.74, 0.76, 0.59}, 0.05};
  if (spec.kind == Scenario::periodic_ar && spec.T == 2 && spec.n == 1000 && spec.norm == OperatorNorm::spectral)
    return ReferenceValues{{0.67, 0.55, 0.51}, 0.06};
  return std::nullopt;
}

const MethodSummary& BenchmarkReport::method(std::string_view name) const {
  for (const auto& m : methods)
    if (m.name == name) return m;
  throw Error(ErrorKind::invalid_argument, "no method named '" + std::string(name) + "' in report");
}

std::array<double, 3> run_replication(const ScenarioSpec& spec, std::size_t replication) {
  const FunctionalSeries series = generate(spec, replication);
  // Training half rounded down to whole periods so test phases stay aligned.
  const std::size_t train_len = (series.size() / 2) / spec.T * spec.T;
  const FunctionalSeries train = series.slice(0, train_len);
  const FunctionalSeries test = series.slice(train_len, series.size());
  const Truncation truncation = Truncation::fixed(spec.lag);

  std::array<double, 3> out{};

  const FpcaModel fpca = fpca_fit(train, spec.components);
  out[0] = nmse(test, fpca_reconstruct(fpca, fpca_scores(fpca, test)));

  const PcDfpcaModel dfpca = dfpca_fit(train, spec.components, spec.window, spec.frequencies, truncation, spec.kernel);
  out[1] = nmse(test, reconstruct(dfpca, transform(dfpca, test), test.size()));

  const PcDfpcaModel pc = fit(train, FitOptions{spec.T, spec.components, spec.window, spec.kernel, spec.frequencies,
                                                truncation});
  out[2] = nmse(test, reconstruct(pc, transform(pc, test), test.size()));
  return out;
}

BenchmarkReport run_benchmark(const ScenarioSpec& spec) {
  spec.validate(true);
  const std::size_t reps = spec.reps;
  std::vector<std::array<double, 3>> results(reps);
  std::vector<char> failed(reps, 0);

  std::size_t workers = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, reps);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t r = next++; r < reps; r = next++) {
      try {
        results[r] = run_replication(spec, r);
        for (double v : results[r])
          if (!std::isfinite(v)) failed[r] = 1;
      } catch (const Error&) {
        failed[r] = 1;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }

  BenchmarkReport report;
  report.spec = spec;
  for (std::size_t r = 0; r < reps; ++r)
    if (failed[r]) report.failed_replications.push_back(r);
  if (static_cast<double>(report.failed_replications.size()) > kMaxFailureFraction * static_cast<double>(reps))
    throw Error(ErrorKind::numerical_failure, std::to_string(report.failed_replications.size()) + " of " +
                                                  std::to_string(reps) + " replications failed");

  for (std::size_t m = 0; m < kMethodNames.size(); ++m) {
    MethodSummary s{kMethodNames[m], 0.0, 0.0, {}};
    for (std::size_t r = 0; r < reps; ++r)
      if (!failed[r]) s.values.push_back(results[r][m]);
    const double count = static_cast<double>(s.values.size());
    for (double v : s.values) s.mean += v;
    s.mean /= count;
    double ss = 0.0;
    for (double v : s.values) ss += (v - s.mean) * (v - s.mean);
    s.sd = s.values.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
    report.methods.push_back(std::move(s));
  }

  if (!report.failed_replications.empty())
    report.notes.push_back(std::to_string(report.failed_replications.size()) +
                           " replication(s) failed and were excluded");
  if (spec.kind == Scenario::periodic_ar)
    report.notes.push_back(
        "scenario b fitting parameters (L, q_n, kernel) and the half/half split are reused from scenario a");
  report.reference = reference_values(spec);
  if (report.reference) {
    for (std::size_t m = 0; m < kMethodNames.size(); ++m) {
      const double ref = report.reference->mean_nmse[m];
      const double got = report.methods[m].mean;
      if (std::abs(got - ref) > report.reference->tolerance) {
        report.deviations.push_back(kMethodNames[m]);
        std::ostringstream os;
        os << std::fixed << std::setprecision(4) << kMethodNames[m] << " mean NMSE " << got
           << " deviates from the reference " << std::setprecision(2) << ref << " by more than "
           << report.reference->tolerance;
        if (spec.kind == Scenario::periodic_ar) os << " (fitting parameters for this scenario are unspecified)";
        report.notes.push_back(os.str());
      }
    }
  }
  report.notes.push_back("each method is centered with its own mean estimate: grand mean for FPCA and DFPCA, "
                         "periodic mean for PC-DFPCA");
  return report;
}

std::string report_to_json(const BenchmarkReport& report) {
  using nlohmann::json;
  const ScenarioSpec& s = report.spec;
  json j;
  j["config"] = {{"scenario", scenario_name(s.kind)},
                 {"p", s.p},
                 {"T", s.T},
                 {"n", s.n},
                 {"reps", s.reps},
                 {"seed", s.seed},
                 {"L", s.lag},
                 {"q_n", s.window},
                 {"kernel", kernel_name(s.kernel)},
                 {"F", s.frequencies},
                 {"components", s.components},
                 {"operator_norm", s.norm == OperatorNorm::spectral ? "spectral" : "frobenius"}};
  j["methods"] = json::array();
  for (const auto& m : report.methods)
    j["methods"].push_back({{"name", m.name}, {"mean_nmse", m.mean}, {"sd_nmse", m.sd}, {"nmse", m.values}});
  if (report.reference) {
    j["reference"] = {{"FPCA", report.reference->mean_nmse[0]},
                      {"DFPCA", report.reference->mean_nmse[1]},
                      {"PC-DFPCA", report.reference->mean_nmse[2]},
                      {"tolerance", report.reference->tolerance}};
  }
  j["deviations"] = report.deviations;
  j["failed_replications"] = report.failed_replications;
  j["notes"] = report.notes;
  return j.dump(2);
}

std::string report_table(const BenchmarkReport& report) {
  std::ostringstream os;
  os << "scenario " << scenario_name(report.spec.kind) << "  T=" << report.spec.T << "  n=" << report.spec.n
     << "  reps=" << report.spec.reps << "  seed=" << report.spec.seed << "  L=" << report.spec.lag
     << "  q=" << report.spec.window << "  p=" << report.spec.components << '\n';
  os << std::left << std::setw(10) << "method" << std::right << std::setw(12) << "mean NMSE" << std::setw(10)
     << "sd" << std::setw(14) << "explained %";
  if (report.reference) os << std::setw(12) << "reference";
  os << '\n' << std::fixed;
  for (std::size_t i = 0; i < report.methods.size(); ++i) {
    const MethodSummary& m = report.methods[i];
    os << std::left << std::setw(10) << m.name << std::right << std::setw(12) << std::setprecision(4) << m.mean
       << std::setw(10) << m.sd << std::setw(14) << std::setprecision(1) << (1.0 - m.mean) * 100.0;
    if (report.reference) os << std::setw(12) << std::setprecision(2) << report.reference->mean_nmse[i];
    os << '\n';
  }
  for (const auto& note : report.notes) os << "note: " << note << '\n';
  return os.str();
}

std::string report_replications_csv(const BenchmarkReport& report) {
  std::ostringstream os;
  os << "replication";
  for (const auto& m : report.methods) os << ',' << m.name;
  os << '\n' << std::setprecision(17);
  std::size_t row = 0;
  for (std::size_t r = 0; r < report.spec.reps; ++r) {
    if (std::ranges::find(report.failed_replications, r) != report.failed_replications.end()) continue;
    os << r;
    for (const auto& m : report.methods) os << ',' << m.values[row];
    os << '\n';
    ++row;
  }
  return os.str();
}

}  // namespace pcdfpca
