#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pcdfpca/basis.hpp"
#include "pcdfpca/error.hpp"
#include "pcdfpca/io.hpp"
#include "pcdfpca/model.hpp"
#include "pcdfpca/simbench.hpp"

namespace pcdfpca::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

/// Options shared by every command that reads functional data.
struct DataOptions {
  std::string input;
  bool coeffs = false;
  std::string grid;
  std::size_t nbasis = 15;
  std::string rows;
};

struct RunConfig {
  DataOptions data;
  std::string output;
  std::string model;
  std::string scores;
  std::string eigen_dump;
  std::size_t period = 1;
  std::size_t ncomp = 1;
  std::size_t window = 0;
  std::optional<std::size_t> lag;
  std::optional<double> epsilon;
  std::size_t freqs = FrequencyGrid::default_size;
  std::string kernel = "bartlett";
  std::string scenario = "a";
  std::uint64_t seed = 1;
  std::size_t reps = 100;
  std::optional<std::size_t> n;
  std::string norm = "spectral";
  std::size_t threads = 0;
  std::string per_rep;
  bool json = false;
};

std::pair<std::size_t, std::size_t> parse_rows(const std::string& spec, std::size_t n) {
  if (spec.empty()) return {0, n};
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw Error(ErrorKind::invalid_argument, "--rows expects START:END");
  try {
    const std::size_t begin = spec.substr(0, colon).empty() ? 0 : std::stoul(spec.substr(0, colon));
    const std::size_t end = spec.substr(colon + 1).empty() ? n : std::stoul(spec.substr(colon + 1));
    if (begin >= end || end > n)
      throw Error(ErrorKind::validation, "--rows " + spec + " is out of range for " + std::to_string(n) + " rows");
    return {begin, end};
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::invalid_argument, "--rows expects START:END with non-negative integers");
  }
}

FunctionalSeries load_series(const DataOptions& opt, std::size_t period, std::optional<std::size_t> model_k) {
  const RealMatrix raw = read_csv(fs::path(opt.input));
  const auto [begin, end] = parse_rows(opt.rows, raw.rows());
  RealMatrix selected(end - begin, raw.cols());
  for (std::size_t r = begin; r < end; ++r) std::ranges::copy(raw.row(r), selected.row(r - begin).begin());

  if (opt.coeffs) {
    if (model_k && *model_k != selected.cols())
      throw Error(ErrorKind::validation, "data has shape " + std::to_string(selected.rows()) + "x" +
                                             std::to_string(selected.cols()) + " but the model expects K=" +
                                             std::to_string(*model_k) + " coefficient columns");
    return FunctionalSeries{std::move(selected), BasisDescriptor::fourier(selected.cols()), period};
  }
  const std::vector<double> grid =
      opt.grid.empty() ? equispaced_grid(selected.cols()) : read_vector_csv(fs::path(opt.grid));
  if (grid.size() != selected.cols())
    throw Error(ErrorKind::validation, "raw curves have " + std::to_string(selected.cols()) +
                                           " columns but the grid has " + std::to_string(grid.size()) + " points");
  return smooth_curves(selected, grid, model_k.value_or(opt.nbasis), period);
}

PcDfpcaModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::validation, "cannot open model file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

std::string csv_string(const RealMatrix& m) {
  std::ostringstream os;
  write_csv(os, m);
  return os.str();
}

void add_data_options(CLI::App& cmd, DataOptions& data, bool with_nbasis) {
  cmd.add_option("--input,-i", data.input, "CSV of raw curves (n x G) or coefficients (n x K)")->required();
  cmd.add_flag("--coeffs", data.coeffs, "Input holds basis coefficients instead of raw curves");
  cmd.add_option("--grid", data.grid, "CSV of G sampling points in [0,1] (default: equispaced)");
  if (with_nbasis)
    cmd.add_option("--nbasis,-K", data.nbasis, "Number of Fourier basis functions for raw curves")
        ->check(CLI::PositiveNumber);
  cmd.add_option("--rows", data.rows, "Use rows START:END (0-based, end exclusive)");
}

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
  if (cfg.window < 1) throw Error(ErrorKind::invalid_argument, "--window must be a positive integer");
  if (!cfg.lag && !cfg.epsilon) throw Error(ErrorKind::invalid_argument, "one of --lag or --epsilon is required");
  const FunctionalSeries series = load_series(cfg.data, cfg.period, std::nullopt);

  FitOptions opts;
  opts.period = cfg.period;
  opts.components = cfg.ncomp;
  opts.window = cfg.window;
  opts.kernel = parse_kernel(cfg.kernel);
  opts.frequencies = cfg.freqs;
  opts.truncation = cfg.lag ? Truncation::fixed(*cfg.lag) : Truncation::energy(*cfg.epsilon);
  const PcDfpcaModel model = fit(series, opts);

  write_file_atomic(cfg.output, model_to_json(model));
  if (!cfg.eigen_dump.empty()) write_file_atomic(cfg.eigen_dump, eigenvalue_curves_json(model));

  const std::size_t T = model.period();
  const std::size_t p = model.components();
  const std::size_t F = model.eigenvalues.rows();
  json summary;
  summary["model"] = cfg.output;
  summary["n"] = series.size();
  summary["T"] = T;
  summary["p"] = p;
  summary["K"] = model.basis_size();
  summary["L"] = model.lag();
  summary["q_n"] = model.window;
  summary["F"] = F;
  summary["components"] = json::array();
  for (std::size_t d = 0; d < T; ++d)
    for (std::size_t m = 0; m < p; ++m) {
      const std::size_t idx = d * p + m;
      double mean_ev = 0.0, min_ev = model.eigenvalues(0, idx), max_ev = min_ev;
      for (std::size_t j = 0; j < F; ++j) {
        const double v = model.eigenvalues(j, idx);
        mean_ev += v;
        min_ev = std::min(min_ev, v);
        max_ev = std::max(max_ev, v);
      }
      mean_ev /= static_cast<double>(F);
      summary["components"].push_back({{"phase", d},
                                       {"component", m + 1},
                                       {"eigenvalue_index", idx + 1},
                                       {"eigenvalue_mean", mean_ev},
                                       {"eigenvalue_min", min_ev},
                                       {"eigenvalue_max", max_ev},
                                       {"filter_energy", model.filter_energy(d, m)}});
    }

  if (cfg.json) {
    out << summary.dump(2) << '\n';
    return kSuccess;
  }
  out << "fitted PC-DFPCA model: n=" << series.size() << " T=" << T << " p=" << p << " K=" << model.basis_size()
      << " q_n=" << model.window << " F=" << F << '\n';
  out << "truncation L=" << model.lag();
  if (model.epsilon) out << " (chosen for energy >= " << 1.0 - *model.epsilon << ")";
  out << '\n';
  out << std::left << std::setw(7) << "phase" << std::setw(11) << "component" << std::right << std::setw(14)
      << "mean eigval" << std::setw(14) << "min" << std::setw(14) << "max" << std::setw(16) << "filter energy"
      << '\n';
  out << std::setprecision(6);
  for (const auto& c : summary["components"])
    out << std::left << std::setw(7) << c["phase"].get<std::size_t>() << std::setw(11)
        << c["component"].get<std::size_t>() << std::right << std::setw(14) << c["eigenvalue_mean"].get<double>()
        << std::setw(14) << c["eigenvalue_min"].get<double>() << std::setw(14) << c["eigenvalue_max"].get<double>()
        << std::setw(16) << c["filter_energy"].get<double>() << '\n';
  out << "model written to " << cfg.output << '\n';
  return kSuccess;
}

int cmd_transform(const RunConfig& cfg, std::ostream& out) {
  const PcDfpcaModel model = load_model(cfg.model);
  const FunctionalSeries series = load_series(cfg.data, model.period(), model.basis_size());
  const ScoreSeries sc = transform(model, series);
  write_file_atomic(cfg.output, csv_string(sc.scores));
  if (cfg.json)
    out << json{{"scores", cfg.output}, {"n", sc.size()}, {"p", sc.scores.cols()}}.dump(2) << '\n';
  else
    out << "wrote " << sc.size() << "x" << sc.scores.cols() << " scores to " << cfg.output << '\n';
  return kSuccess;
}

int cmd_reconstruct(const RunConfig& cfg, std::ostream& out) {
  const PcDfpcaModel model = load_model(cfg.model);
  const RealMatrix raw_scores = read_csv(fs::path(cfg.scores));
  if (raw_scores.cols() != model.components())
    throw Error(ErrorKind::validation, "scores have shape " + std::to_string(raw_scores.rows()) + "x" +
                                           std::to_string(raw_scores.cols()) + " but the model has p=" +
                                           std::to_string(model.components()) + " components");
  const ScoreSeries sc{raw_scores, model.period()};

  std::optional<FunctionalSeries> original;
  if (!cfg.data.input.empty()) {
    original = load_series(cfg.data, model.period(), model.basis_size());
    if (original->size() != sc.size())
      throw Error(ErrorKind::validation, "original data has " + std::to_string(original->size()) +
                                             " rows but scores have " + std::to_string(sc.size()));
  }
  const FunctionalSeries recon = reconstruct(model, sc, sc.size());
  write_file_atomic(cfg.output, csv_string(recon.coeffs));

  json summary{{"curves", cfg.output}, {"n", recon.size()}, {"K", recon.basis.K}};
  if (original) {
    const double err = nmse(*original, recon);
    summary["nmse"] = err;
    summary["variance_explained_percent"] = (1.0 - err) * 100.0;
  }
  if (cfg.json) {
    out << summary.dump(2) << '\n';
    return kSuccess;
  }
  out << "wrote " << recon.size() << " reconstructed curves (" << recon.basis.K << " coefficients) to " << cfg.output
      << '\n';
  if (original)
    out << std::setprecision(17) << "NMSE: " << summary["nmse"].get<double>() << '\n'
        << std::setprecision(4) << std::fixed
        << "variance explained (1 - NMSE): " << summary["variance_explained_percent"].get<double>() << "%\n";
  return kSuccess;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  ScenarioSpec spec = parse_scenario(cfg.scenario) == Scenario::deterministic_mixing ? ScenarioSpec::scenario_a()
                                                                                     : ScenarioSpec::scenario_b();
  spec.seed = cfg.seed;
  spec.norm = cfg.norm == "frobenius" ? OperatorNorm::frobenius : OperatorNorm::spectral;
  if (cfg.n) spec.n = *cfg.n;
  spec.validate(true);
  // Replication 0 of the benchmark stream, so simulate and benchmark agree.
  const FunctionalSeries series = generate(spec, 0);
  write_file_atomic(cfg.output, csv_string(series.coeffs));
  if (cfg.json)
    out << json{{"output", cfg.output}, {"scenario", scenario_name(spec.kind)}, {"n", spec.n}, {"T", spec.T},
                {"K", spec.p}, {"seed", spec.seed}}
               .dump(2)
        << '\n';
  else
    out << "scenario " << scenario_name(spec.kind) << ": wrote " << spec.n << "x" << spec.p << " coefficients (T="
        << spec.T << ", seed=" << spec.seed << ") to " << cfg.output << '\n';
  return kSuccess;
}

int cmd_benchmark(const RunConfig& cfg, std::ostream& out) {
  ScenarioSpec spec = parse_scenario(cfg.scenario) == Scenario::deterministic_mixing ? ScenarioSpec::scenario_a()
                                                                                     : ScenarioSpec::scenario_b();
  spec.seed = cfg.seed;
  spec.reps = cfg.reps;
  spec.threads = cfg.threads;
  spec.frequencies = cfg.freqs;
  spec.kernel = parse_kernel(cfg.kernel);
  spec.components = cfg.ncomp;
  spec.norm = cfg.norm == "frobenius" ? OperatorNorm::frobenius : OperatorNorm::spectral;
  if (cfg.lag) spec.lag = *cfg.lag;
  if (cfg.window) spec.window = cfg.window;
  if (cfg.n) spec.n = *cfg.n;
  spec.validate(true);

  const BenchmarkReport report = run_benchmark(spec);
  if (!cfg.output.empty()) write_file_atomic(cfg.output, report_to_json(report));
  if (!cfg.per_rep.empty()) write_file_atomic(cfg.per_rep, report_replications_csv(report));
  out << (cfg.json ? report_to_json(report) + "\n" : report_table(report));
  return kSuccess;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return kUsage;
    case ErrorKind::numerical_failure:
    case ErrorKind::undefined_denominator: return kNumericalFailure;
    case ErrorKind::underdetermined_fit:
    case ErrorKind::insufficient_data:
    case ErrorKind::parse_error:
    case ErrorKind::validation: return kDataValidation;
  }
  return kDataValidation;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamic functional PCA for periodically correlated functional time series", "pcdfpca"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* fit_cmd = app.add_subcommand("fit", "Fit a PC-DFPCA model and write it as JSON");
  add_data_options(*fit_cmd, cfg.data, true);
  fit_cmd->add_option("--period,-T", cfg.period, "Period T (1 gives stationary DFPCA)")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--ncomp,-p", cfg.ncomp, "Components per phase")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--window,-q", cfg.window, "Lag window q_n of the spectral estimator")
      ->required()
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--lag,-L", cfg.lag, "Filter truncation L in periods (takes precedence over --epsilon)");
  fit_cmd->add_option("--epsilon", cfg.epsilon, "Choose L so filter energy reaches 1 - epsilon")
      ->check(CLI::Range(0.0, 1.0));
  fit_cmd->add_option("--freqs,-F", cfg.freqs, "Frequency grid size (even)")->check(CLI::PositiveNumber);
  fit_cmd->add_option("--kernel", cfg.kernel, "Lag-window kernel")->check(CLI::IsMember({"bartlett"}));
  fit_cmd->add_option("--output,-o", cfg.output, "Model JSON path")->required();
  fit_cmd->add_option("--eigen-dump", cfg.eigen_dump, "Write eigenvalue curves as JSON");

  auto* transform_cmd = app.add_subcommand("transform", "Compute scores of a series under a fitted model");
  transform_cmd->add_option("--model,-m", cfg.model, "Model JSON")->required();
  add_data_options(*transform_cmd, cfg.data, false);
  transform_cmd->add_option("--output,-o", cfg.output, "Scores CSV path")->required();

  auto* recon_cmd = app.add_subcommand("reconstruct", "Reconstruct curves from scores and report NMSE");
  recon_cmd->add_option("--model,-m", cfg.model, "Model JSON")->required();
  recon_cmd->add_option("--scores,-s", cfg.scores, "Scores CSV")->required();
  recon_cmd->add_option("--input,-i", cfg.data.input, "Original data, for the NMSE report");
  recon_cmd->add_flag("--coeffs", cfg.data.coeffs, "Original data holds basis coefficients");
  recon_cmd->add_option("--grid", cfg.data.grid, "CSV of sampling points for raw original curves");
  recon_cmd->add_option("--rows", cfg.data.rows, "Use rows START:END of the original data");
  recon_cmd->add_option("--output,-o", cfg.output, "Reconstructed coefficient CSV path")->required();

  auto* sim_cmd = app.add_subcommand("simulate", "Write a simulated scenario dataset as coefficient CSV");
  sim_cmd->add_option("--scenario", cfg.scenario, "a (deterministic mixing) or b (periodic AR)")
      ->check(CLI::IsMember({"a", "b"}));
  sim_cmd->add_option("--seed", cfg.seed, "Random seed");
  sim_cmd->add_option("--n", cfg.n, "Override the series length")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--norm", cfg.norm, "Operator norm for scenario b")
      ->check(CLI::IsMember({"spectral", "frobenius"}));
  sim_cmd->add_option("--output,-o", cfg.output, "Output CSV path")->required();

  auto* bench_cmd = app.add_subcommand("benchmark", "Compare FPCA, DFPCA and PC-DFPCA on a simulated scenario");
  bench_cmd->add_option("--scenario", cfg.scenario, "a or b")->check(CLI::IsMember({"a", "b"}));
  bench_cmd->add_option("--reps", cfg.reps, "Replications")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", cfg.seed, "Random seed");
  bench_cmd->add_option("--lag,-L", cfg.lag, "Filter truncation L");
  bench_cmd->add_option("--window,-q", cfg.window, "Lag window q_n")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--ncomp,-p", cfg.ncomp, "Components")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--freqs,-F", cfg.freqs, "Frequency grid size (even)")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--kernel", cfg.kernel, "Lag-window kernel")->check(CLI::IsMember({"bartlett"}));
  bench_cmd->add_option("--n", cfg.n, "Override the series length")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--norm", cfg.norm, "Operator norm for scenario b")
      ->check(CLI::IsMember({"spectral", "frobenius"}));
  bench_cmd->add_option("--threads", cfg.threads, "Worker threads (0: all cores)");
  bench_cmd->add_option("--output,-o", cfg.output, "Report JSON path");
  bench_cmd->add_option("--per-rep", cfg.per_rep, "Per-replication NMSE CSV path");

  app.add_flag("--json", cfg.json, "Machine-readable JSON summaries on standard output");
  for (auto* cmd : {fit_cmd, transform_cmd, recon_cmd, sim_cmd, bench_cmd})
    cmd->add_flag("--json", cfg.json, "Machine-readable JSON summaries on standard output");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(cfg, out);
    if (transform_cmd->parsed()) return cmd_transform(cfg, out);
    if (recon_cmd->parsed()) return cmd_reconstruct(cfg, out);
    if (sim_cmd->parsed()) return cmd_simulate(cfg, out);
    if (bench_cmd->parsed()) return cmd_benchmark(cfg, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataValidation;
  }
  return kUsage;
}

}  // namespace pcdfpca::cli
