#include "pcdfpca/io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "pcdfpca/error.hpp"
#include "pcdfpca/numerics.hpp"

namespace pcdfpca {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"'))
    s.remove_suffix(1);
  return s;
}

bool parse_row(std::string_view line, std::vector<double>& out) {
  out.clear();
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    const std::string_view cell = trim(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos));
    double v = 0.0;
    if (cell.empty()) return false;
    const char* first = cell.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) return false;
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return true;
}

json matrix_to_json(const RealMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  return rows;
}

RealMatrix matrix_from_json(const json& j, std::size_t expect_cols) {
  const std::size_t rows = j.size();
  RealMatrix m(rows, expect_cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = j.at(r);
    if (row.size() != expect_cols) throw Error(ErrorKind::parse_error, "matrix row has wrong length in model file");
    for (std::size_t c = 0; c < expect_cols; ++c) m(r, c) = row.at(c).get<double>();
  }
  return m;
}

}  // namespace

RealMatrix read_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (!parse_row(line, values)) {
      if (rows.empty() && lineno == 1) continue;  // header
      throw Error(ErrorKind::parse_error, "line " + std::to_string(lineno) + ": non-numeric cell");
    }
    if (!rows.empty() && values.size() != rows.front().size())
      throw Error(ErrorKind::parse_error, "line " + std::to_string(lineno) + ": expected " +
                                              std::to_string(rows.front().size()) + " columns, found " +
                                              std::to_string(values.size()));
    rows.push_back(values);
  }
  if (rows.empty()) throw Error(ErrorKind::parse_error, "no numeric rows found");
  RealMatrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) std::ranges::copy(rows[r], m.row(r).begin());
  return m;
}

RealMatrix read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::validation, "cannot open '" + path.string() + "'");
  try {
    return read_csv(in);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::vector<double> read_vector_csv(const std::filesystem::path& path) {
  const RealMatrix m = read_csv(path);
  if (m.rows() != 1 && m.cols() != 1)
    throw Error(ErrorKind::parse_error, path.string() + ": expected a single row or column");
  return {m.data().begin(), m.data().end()};
}

void write_csv(std::ostream& out, const RealMatrix& m, const std::string& header) {
  if (!header.empty()) out << header << '\n';
  out << std::setprecision(17);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << m(r, c);
    }
    out << '\n';
  }
}

std::string model_to_json(const PcDfpcaModel& model) {
  const std::size_t T = model.period();
  const std::size_t p = model.components();
  const long L = static_cast<long>(model.lag());
  json j;
  j["format"] = "pcdfpca-model";
  j["version"] = 1;
  j["T"] = T;
  j["p"] = p;
  j["L"] = model.lag();
  j["K"] = model.basis_size();
  j["q_n"] = model.window;
  j["F"] = model.frequencies;
  j["kernel"] = kernel_name(model.kernel);
  j["epsilon"] = model.epsilon ? json(*model.epsilon) : json(nullptr);
  j["basis"] = {{"kind", "fourier"}, {"gram", matrix_to_json(model.basis().gram)}};
  j["periodic_mean"] = matrix_to_json(model.mean().means);
  j["eigenvalues"] = matrix_to_json(model.eigenvalues);
  json filters = json::object();
  for (std::size_t d = 0; d < T; ++d)
    for (std::size_t m = 0; m < p; ++m)
      for (long l = -L * static_cast<long>(T) + static_cast<long>(d) - static_cast<long>(T) + 1;
           l <= L * static_cast<long>(T) + static_cast<long>(d); ++l) {
        const auto f = model.filter(d, m, l);
        filters[std::to_string(d) + "/" + std::to_string(m + 1) + "/" + std::to_string(l)] =
            std::vector<double>(f.begin(), f.end());
      }
  j["filters"] = std::move(filters);
  return j.dump();
}

PcDfpcaModel model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse_error, std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("format", "") != "pcdfpca-model") throw Error(ErrorKind::parse_error, "not a pcdfpca model file");
    const auto T = j.at("T").get<std::size_t>();
    const auto p = j.at("p").get<std::size_t>();
    const auto L = j.at("L").get<std::size_t>();
    const auto K = j.at("K").get<std::size_t>();
    if (T < 1 || p < 1 || K < 1 || p > K) throw Error(ErrorKind::validation, "model dimensions are inconsistent");
    BasisDescriptor basis{BasisKind::fourier, K, matrix_from_json(j.at("basis").at("gram"), K)};
    PeriodicMean mean{matrix_from_json(j.at("periodic_mean"), K)};
    if (mean.period() != T) throw Error(ErrorKind::validation, "periodic mean must have T rows");

    PcDfpcaModel model(T, p, L, std::move(basis), std::move(mean));
    model.window = j.at("q_n").get<std::size_t>();
    model.frequencies = j.at("F").get<std::size_t>();
    model.kernel = parse_kernel(j.at("kernel").get<std::string>());
    if (!j.at("epsilon").is_null()) model.epsilon = j.at("epsilon").get<double>();
    model.eigenvalues = matrix_from_json(j.at("eigenvalues"), T * K);

    const auto& filters = j.at("filters");
    const long Ll = static_cast<long>(L);
    const long Tl = static_cast<long>(T);
    for (std::size_t d = 0; d < T; ++d)
      for (std::size_t m = 0; m < p; ++m)
        for (long b = -Ll; b <= Ll; ++b) {
          auto dst = model.block_filter(d, m, b);
          for (long i = 0; i < Tl; ++i) {
            const long l = b * Tl + static_cast<long>(d) - i;
            const auto& v = filters.at(std::to_string(d) + "/" + std::to_string(m + 1) + "/" + std::to_string(l));
            if (v.size() != K) throw Error(ErrorKind::validation, "filter vector has wrong length");
            for (std::size_t k = 0; k < K; ++k) dst[static_cast<std::size_t>(i) * K + k] = v.at(k).get<double>();
          }
        }
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse_error, std::string("malformed model file: ") + e.what());
  }
}

std::string eigenvalue_curves_json(const PcDfpcaModel& model) {
  const FrequencyGrid grid(model.frequencies);
  json out = json::array();
  for (std::size_t jf = 0; jf < model.eigenvalues.rows(); ++jf)
    for (std::size_t m = 0; m < model.eigenvalues.cols(); ++m)
      out.push_back({{"frequency", grid[jf]}, {"index", m + 1}, {"value", model.eigenvalues(jf, m)}});
  return out.dump();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::validation, "cannot write '" + path.string() + "'");
    out << contents;
    if (!out) throw Error(ErrorKind::validation, "failed writing '" + path.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorKind::validation, "cannot move output into place at '" + path.string() + "': " + ec.message());
  }
}

}  // namespace pcdfpca
