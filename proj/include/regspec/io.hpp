#pragma once

// Text formats: signal and spectrum CSV, spectrum and report JSON.
//
// Every number goes through format_number(): 12 significant digits, `.` as
// decimal separator whatever the locale, so emitted files are byte-stable and
// re-reading then re-writing a file reproduces it exactly.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "regspec/errors.hpp"
#include "regspec/fourier.hpp"
#include "regspec/likelihood.hpp"
#include "regspec/simulate.hpp"

namespace regspec {

inline constexpr int kPrintedDigits = 12;

inline std::string format_number(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, kPrintedDigits);
  return std::string(buffer, result.ptr);
}

/// The double that format_number(value) denotes.
inline double printed_value(double value) {
  const auto text = format_number(value);
  double out = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), out);
  return out;
}

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) return fields;
    start = comma + 1;
  }
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view text, std::size_t line) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  require(!text.empty() && result.ec == std::errc{} && result.ptr == text.data() + text.size(),
          ErrorCode::invalid_input, "line " + std::to_string(line) + ": not a number: '" + std::string(text) + "'");
  require(std::isfinite(value), ErrorCode::invalid_input, "line " + std::to_string(line) + ": non-finite value");
  return value;
}

inline std::size_t parse_index(std::string_view text, std::size_t line) {
  text = trim(text);
  std::size_t value = 0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  require(!text.empty() && result.ec == std::errc{} && result.ptr == text.data() + text.size(),
          ErrorCode::invalid_input, "line " + std::to_string(line) + ": bad index '" + std::string(text) + "'");
  return value;
}

/// Non-empty lines after the header, each with its 1-based line number.
inline std::vector<std::pair<std::size_t, std::string>> csv_body(std::istream& in, std::string_view expected_header,
                                                                 std::string_view optional_suffix, bool& has_suffix) {
  std::string header;
  require(static_cast<bool>(std::getline(in, header)), ErrorCode::invalid_input, "empty file");
  const auto h = trim(header);
  has_suffix = false;
  if (h == expected_header) {
  } else if (!optional_suffix.empty() && h == std::string(expected_header) + std::string(optional_suffix)) {
    has_suffix = true;
  } else {
    throw Error(ErrorCode::invalid_input, "unexpected header '" + std::string(h) + "'");
  }
  std::vector<std::pair<std::size_t, std::string>> rows;
  std::string line;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    rows.emplace_back(number, line);
  }
  return rows;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.is_open(), ErrorCode::invalid_input, "cannot open '" + path.string() + "'");
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.is_open(), ErrorCode::io_failure, "cannot write '" + path.string() + "'");
  return out;
}

inline void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  require(out.good(), ErrorCode::io_failure, "write to '" + path.string() + "' failed");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Signals: `index,re,im` with im optional.

inline TimeSeries read_signal_csv(std::istream& in) {
  bool has_im = false;
  const auto rows = detail::csv_body(in, "index,re", ",im", has_im);
  ComplexVector samples;
  samples.reserve(rows.size());
  for (const auto& [line, text] : rows) {
    const auto fields = detail::split_fields(text);
    detail::require(fields.size() == (has_im ? 3u : 2u), ErrorCode::invalid_input,
                    "line " + std::to_string(line) + ": wrong number of fields");
    detail::require(detail::parse_index(fields[0], line) == samples.size(), ErrorCode::invalid_input,
                    "line " + std::to_string(line) + ": indices must run 0, 1, 2, ...");
    const double re = detail::parse_double(fields[1], line);
    const double im = has_im ? detail::parse_double(fields[2], line) : 0.0;
    samples.emplace_back(re, im);
  }
  detail::require(!samples.empty(), ErrorCode::invalid_input, "signal file has no samples");
  return TimeSeries(std::move(samples));
}

inline TimeSeries read_signal_csv(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return read_signal_csv(in);
}

inline void write_signal_csv(std::ostream& out, const TimeSeries& y) {
  out << "index,re,im\n";
  for (std::size_t n = 0; n < y.size(); ++n)
    out << n << ',' << format_number(y[n].real()) << ',' << format_number(y[n].imag()) << '\n';
}

// ---------------------------------------------------------------------------
// Spectra.

struct SpectrumMeta {
  std::optional<double> lambda;
  std::string window;
  std::string penalty;
  std::optional<std::uint64_t> seed;
};

struct SpectrumRecord {
  RealVector grid;
  ComplexVector values;
  RealVector power;
  SpectrumMeta meta;
};

inline void validate_record(const SpectrumRecord& record) {
  detail::require(!record.grid.empty(), ErrorCode::invalid_input, "spectrum has no rows");
  detail::require(record.values.size() == record.grid.size() && record.power.size() == record.grid.size(),
                  ErrorCode::invalid_input, "spectrum columns differ in length");
  for (std::size_t m = 0; m < record.grid.size(); ++m) {
    detail::require(record.grid[m] >= 0.0 && record.grid[m] < 1.0, ErrorCode::invalid_input,
                    "nu must lie in [0, 1)");
    detail::require(m == 0 || record.grid[m] > record.grid[m - 1], ErrorCode::invalid_input,
                    "nu must be strictly increasing");
  }
}

inline void write_spectrum_csv(std::ostream& out, const SpectrumRecord& record) {
  validate_record(record);
  out << "nu,re,im,power\n";
  for (std::size_t m = 0; m < record.grid.size(); ++m)
    out << format_number(record.grid[m]) << ',' << format_number(record.values[m].real()) << ','
        << format_number(record.values[m].imag()) << ',' << format_number(record.power[m]) << '\n';
}

inline SpectrumRecord read_spectrum_csv(std::istream& in) {
  bool unused = false;
  const auto rows = detail::csv_body(in, "nu,re,im,power", "", unused);
  SpectrumRecord record;
  for (const auto& [line, text] : rows) {
    const auto fields = detail::split_fields(text);
    detail::require(fields.size() == 4, ErrorCode::invalid_input,
                    "line " + std::to_string(line) + ": wrong number of fields");
    record.grid.push_back(detail::parse_double(fields[0], line));
    record.values.emplace_back(detail::parse_double(fields[1], line), detail::parse_double(fields[2], line));
    record.power.push_back(detail::parse_double(fields[3], line));
  }
  validate_record(record);
  return record;
}

namespace detail {

// Numbers pass through printed_value() so JSON text carries at most 12
// significant digits, like the CSV files.
inline nlohmann::json number_array(std::span<const double> values) {
  auto out = nlohmann::json::array();
  for (double v : values) out.push_back(printed_value(v));
  return out;
}

}  // namespace detail

inline nlohmann::json spectrum_to_json(const SpectrumRecord& record) {
  validate_record(record);
  nlohmann::json j;
  j["grid"] = detail::number_array(record.grid);
  auto values = nlohmann::json::array();
  for (const auto& v : record.values) values.push_back({printed_value(v.real()), printed_value(v.imag())});
  j["values"] = std::move(values);
  j["power"] = detail::number_array(record.power);
  nlohmann::json meta;
  meta["lambda"] = record.meta.lambda ? nlohmann::json(printed_value(*record.meta.lambda)) : nlohmann::json();
  meta["window"] = record.meta.window;
  meta["penalty"] = record.meta.penalty;
  meta["seed"] = record.meta.seed ? nlohmann::json(*record.meta.seed) : nlohmann::json();
  j["meta"] = std::move(meta);
  return j;
}

inline SpectrumRecord spectrum_from_json(const nlohmann::json& j) {
  try {
    SpectrumRecord record;
    record.grid = j.at("grid").get<RealVector>();
    for (const auto& v : j.at("values")) record.values.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    record.power = j.at("power").get<RealVector>();
    if (j.contains("meta")) {
      const auto& meta = j["meta"];
      if (meta.contains("lambda") && !meta["lambda"].is_null()) record.meta.lambda = meta["lambda"].get<double>();
      record.meta.window = meta.value("window", "");
      record.meta.penalty = meta.value("penalty", "");
      if (meta.contains("seed") && !meta["seed"].is_null()) record.meta.seed = meta["seed"].get<std::uint64_t>();
    }
    validate_record(record);
    return record;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_input, std::string("malformed spectrum JSON: ") + e.what());
  }
}

inline void write_spectrum_json(std::ostream& out, const SpectrumRecord& record) {
  out << spectrum_to_json(record).dump(2) << '\n';
}

inline SpectrumRecord read_spectrum_json(std::istream& in) {
  try {
    return spectrum_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::invalid_input, std::string("malformed spectrum JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Fit and experiment reports.

inline nlohmann::json fit_to_json(const FitReport& report, std::string_view window = {}) {
  nlohmann::json j;
  j["lambda"] = printed_value(report.hyperparams.lambda);
  j["r_a"] = printed_value(report.hyperparams.r_a);
  j["r_b"] = printed_value(report.hyperparams.r_b());
  j["cll"] = printed_value(report.cll_value);
  if (report.alpha0) j["alpha0"] = printed_value(*report.alpha0);
  if (report.alpha1) j["alpha1"] = printed_value(*report.alpha1);
  if (report.window_index) j["window_index"] = *report.window_index;
  if (!window.empty()) j["window"] = std::string(window);
  j["boundary_optimum"] = report.boundary_optimum;
  j["flat_objective"] = report.flat_objective;
  return j;
}

namespace detail {

inline nlohmann::json distance_object(const DistanceArray& values) {
  nlohmann::json j;
  for (std::size_t d = 0; d < kDistanceCount; ++d) j[std::string(kDistanceNames[d])] = printed_value(values[d]);
  return j;
}

inline std::string_view noise_name(NoiseKind kind) { return kind == NoiseKind::real ? "real" : "complex"; }

inline std::string_view scaling_name(SpectrumScaling scaling) {
  return scaling == SpectrumScaling::window_energy ? "window-energy" : "per-sample";
}

}  // namespace detail

inline nlohmann::json experiment_to_json(const ExperimentReport& report) {
  const auto& c = report.config;
  nlohmann::json j;
  j["config"] = {{"samples", c.samples},
                 {"taps", detail::number_array(c.taps)},
                 {"realizations", c.realizations},
                 {"seed", c.master_seed},
                 {"grid_size", c.spectrum_grid_size()},
                 {"alpha_points", c.alpha_points},
                 {"alpha_lo", printed_value(c.alpha_lo)},
                 {"alpha_hi", printed_value(c.alpha_hi)},
                 {"noise", std::string(detail::noise_name(c.noise))},
                 {"scaling", std::string(detail::scaling_name(c.scaling))}};
  j["median"] = {{"UP", detail::distance_object(report.median_usual)},
                 {"RLS+ML", detail::distance_object(report.median_rls)}};
  j["mean"] = {{"UP", detail::distance_object(report.mean_usual)},
               {"RLS+ML", detail::distance_object(report.mean_rls)}};
  j["gain"] = detail::distance_object(report.gain);
  j["mean_gain"] = detail::distance_object(report.mean_gain);
  nlohmann::json worse;
  for (std::size_t d = 0; d < kDistanceCount; ++d) worse[std::string(kDistanceNames[d])] = report.usual_worse[d];
  j["usual_worse_count"] = std::move(worse);
  j["smoothness_ordering_held"] = report.smoothness_ordering_held;
  j["ml_between_oracles"] = report.ml_between_oracles;
  auto rows = nlohmann::json::array();
  for (const auto& r : report.realizations) {
    nlohmann::json row;
    row["index"] = r.index;
    row["ml"] = {{"alpha0", printed_value(r.ml.alpha0)}, {"alpha1", printed_value(r.ml.alpha1)}};
    row["cll"] = printed_value(r.cll);
    row["boundary_optimum"] = r.boundary_optimum;
    row["UP"] = detail::distance_object(r.usual_distance);
    row["RLS+ML"] = detail::distance_object(r.rls_distance);
    nlohmann::json oracle;
    for (std::size_t d = 0; d < kDistanceCount; ++d)
      oracle[std::string(kDistanceNames[d])] = {{"alpha0", printed_value(r.oracle[d].alpha0)},
                                                {"alpha1", printed_value(r.oracle[d].alpha1)},
                                                {"distance", printed_value(r.oracle_distance[d])}};
    row["oracle"] = std::move(oracle);
    row["roughness"] = {{"truth", printed_value(r.roughness_truth)},
                        {"ml", printed_value(r.roughness_ml)},
                        {"l2_oracle", printed_value(r.roughness_l2_oracle)},
                        {"isd_oracle", printed_value(r.roughness_isd_oracle)}};
    rows.push_back(std::move(row));
  }
  j["realizations"] = std::move(rows);
  return j;
}

/// Rows UP, RLS+ML and Gain (in percent) over columns L1, L2, ISD, SIS.
inline void write_table_csv(std::ostream& out, const ExperimentReport& report) {
  out << "method";
  for (auto name : kDistanceNames) out << ',' << name;
  out << '\n';
  const auto row = [&](std::string_view label, const DistanceArray& values, double scale) {
    out << label;
    for (double v : values) out << ',' << format_number(v * scale);
    out << '\n';
  };
  row("UP", report.median_usual, 1.0);
  row("RLS+ML", report.median_rls, 1.0);
  row("Gain", report.gain, 100.0);
}

/// nu, truth and the four estimates of one realization, for plotting.
inline void write_realization_spectra_csv(std::ostream& out, const ExperimentReport& report, std::size_t k) {
  const auto& r = report.realizations.at(k);
  detail::require_arg(!r.spectra.usual.empty(), "spectra were not kept for this experiment");
  out << "nu,truth,UP,RLS+ML,L2-oracle,ISD-oracle\n";
  const std::size_t m_total = report.truth.size();
  for (std::size_t m = 0; m < m_total; ++m)
    out << format_number(static_cast<double>(m) / static_cast<double>(m_total)) << ','
        << format_number(report.truth[m]) << ',' << format_number(r.spectra.usual[m]) << ','
        << format_number(r.spectra.ml[m]) << ',' << format_number(r.spectra.l2_oracle[m]) << ','
        << format_number(r.spectra.isd_oracle[m]) << '\n';
}

}  // namespace regspec
