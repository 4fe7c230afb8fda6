#pragma once

// regspec command-line front end. run() is the whole program minus main(),
// so tests can drive it in-process with their own streams.
//
// Exit codes: 0 ok, 2 bad input data, 3 bad configuration, 4 degenerate
// data, 5 I/O failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "regspec/regspec.hpp"

namespace regspec::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kConfigError = 3, kDegenerate = 4, kIoError = 5 };

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_input: return kInputError;
    case ErrorCode::degenerate_data: return kDegenerate;
    case ErrorCode::io_failure: return kIoError;
    default: return kConfigError;
  }
}

inline std::size_t thread_count() {
  const char* env = std::getenv("REGSPEC_THREADS");
  const std::size_t hardware = std::max(1u, std::thread::hardware_concurrency());
  if (env == nullptr || *env == '\0') return hardware;
  std::size_t value = 0;
  const std::string_view text(env);
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  detail::require_arg(result.ec == std::errc{} && result.ptr == text.data() + text.size() && value >= 1,
                      "REGSPEC_THREADS must be a positive integer");
  return value;
}

inline RealVector parse_list(const std::string& text, std::string_view what) {
  RealVector values;
  for (auto field : detail::split_fields(text)) {
    field = detail::trim(field);
    double v = 0.0;
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    const auto result = std::from_chars(field.data(), field.data() + field.size(), v);
    detail::require_arg(!field.empty() && result.ec == std::errc{} && result.ptr == field.data() + field.size() &&
                            std::isfinite(v),
                        std::string(what) + ": bad number '" + std::string(field) + "'");
    values.push_back(v);
  }
  return values;
}

struct LogRange {
  double lo;
  double hi;
  std::size_t points;
};

/// "lo:hi:n"
inline LogRange parse_range(const std::string& text, std::string_view what) {
  std::vector<std::string> parts;
  std::stringstream stream(text);
  for (std::string part; std::getline(stream, part, ':');) parts.push_back(part);
  detail::require_arg(parts.size() == 3, std::string(what) + " must look like lo:hi:n");
  const auto lo = parse_list(parts[0], what);
  const auto hi = parse_list(parts[1], what);
  const auto n = parse_list(parts[2], what);
  detail::require_arg(lo.size() == 1 && hi.size() == 1 && n.size() == 1 && n[0] >= 1 && n[0] == std::floor(n[0]),
                      std::string(what) + " must look like lo:hi:n");
  detail::require_arg(lo[0] > 0.0 && hi[0] >= lo[0] && (n[0] == 1 || hi[0] > lo[0]),
                      std::string(what) + " needs 0 < lo < hi");
  return {lo[0], hi[0], static_cast<std::size_t>(n[0])};
}

/// "lo:hi:nxlo:hi:n" (alpha0 range, then alpha1 range); `×` also separates.
inline std::pair<LogRange, LogRange> parse_alpha_grid(std::string text) {
  const std::string times = "\xc3\x97";
  if (const auto pos = text.find(times); pos != std::string::npos) text.replace(pos, times.size(), "x");
  const auto split = text.find('x');
  detail::require_arg(split != std::string::npos, "--alpha-grid must look like lo:hi:nxlo:hi:n");
  return {parse_range(text.substr(0, split), "--alpha-grid"), parse_range(text.substr(split + 1), "--alpha-grid")};
}

/// Writes through `body` to `path`, or to `out` when the path is empty or "-".
template <class Body>
void emit(const std::string& path, std::ostream& out, Body&& body) {
  if (path.empty() || path == "-") {
    body(out);
    return;
  }
  auto file = detail::open_output(path);
  body(file);
  detail::finish_output(file, path);
}

// ---------------------------------------------------------------------------

struct PeriodogramOptions {
  std::string input;
  std::string out;
  std::string window;
  std::string alpha;
  std::string format;
  std::string normalization = "raw";
  double lambda = 0.0;
  std::size_t pad = 0;
  std::size_t grid = 0;
};

struct WindowChoice {
  RealVector evals;
  std::string name;
  std::string penalty;
};

inline WindowChoice choose_window(const std::string& window, const std::string& alpha, std::size_t samples,
                                  std::size_t grid_size) {
  detail::require_arg(window.empty() || alpha.empty(), "--window and --alpha are mutually exclusive");
  if (!alpha.empty()) {
    const auto alphas = parse_list(alpha, "--alpha");
    std::string text;
    for (std::size_t k = 0; k < alphas.size(); ++k) text += (k ? "," : "") + format_number(alphas[k]);
    return {sobolev_eigenvalues(alphas, samples), "sobolev", "sobolev:" + text};
  }
  const auto family = parse_window_family(window.empty() ? "usual" : window);
  std::string penalty(to_string(family));
  if (family == WindowFamily::inv_cosine) penalty += ":P=" + std::to_string(grid_size);
  return {named_window_eigenvalues(family, samples, grid_size), std::string(to_string(family)), penalty};
}

inline PowerNormalization parse_normalization(const std::string& name) {
  if (name == "raw") return PowerNormalization::raw;
  if (name == "per-sample" || name == "per_sample") return PowerNormalization::per_sample;
  throw Error(ErrorCode::invalid_argument, "unknown normalization '" + name + "'");
}

inline bool wants_json(const std::string& format, const std::string& path) {
  if (format == "json") return true;
  if (format == "csv") return false;
  detail::require_arg(format.empty(), "unknown format '" + format + "'");
  return std::filesystem::path(path).extension() == ".json";
}

inline SpectrumRecord compute_periodogram(const PeriodogramOptions& o) {
  detail::require_arg(o.pad == 0 || o.grid == 0, "--pad and --grid are mutually exclusive");
  const auto y = read_signal_csv(o.input);
  validate_lambda(o.lambda);
  const std::size_t grid_size = o.pad ? o.pad : (o.grid ? o.grid : kDefaultPadFactor * y.size());
  const auto choice = choose_window(o.window, o.alpha, y.size(), o.pad ? o.pad : kDefaultPadFactor * y.size());
  const auto normalization = parse_normalization(o.normalization);
  auto window = window_from_eigenvalues(choice.evals, o.lambda, y.size());

  SpectrumRecord record;
  if (o.pad) {
    detail::require_arg(o.pad >= y.size(), "--pad must be at least the number of samples");
    const auto estimate = windowed_transform_df(y, o.pad, std::move(window), o.lambda);
    for (std::size_t p = 0; p < o.pad; ++p) record.grid.push_back(estimate.spectrum.frequency(p));
    record.values = estimate.spectrum.amps;
    record.power = power_spectrum(estimate, normalization);
  } else {
    const auto grid = uniform_grid(grid_size);
    const auto estimate = windowed_transform_cf(y, grid, std::move(window), o.lambda, thread_count());
    record.grid = grid;
    record.values = estimate.spectrum.values;
    record.power = power_spectrum(estimate, normalization);
  }
  record.meta.lambda = o.lambda;
  record.meta.window = choice.name;
  record.meta.penalty = choice.penalty;
  return record;
}

inline void cmd_periodogram(const PeriodogramOptions& o, std::ostream& out) {
  const auto record = compute_periodogram(o);
  const bool json = wants_json(o.format, o.out);
  emit(o.out, out, [&](std::ostream& s) { json ? write_spectrum_json(s, record) : write_spectrum_csv(s, record); });
}

// ---------------------------------------------------------------------------

struct FitOptions {
  std::string input;
  std::string out;
  std::string window;
  std::string alpha_grid;
  std::string lambda_range;
  std::string surface;
};

inline constexpr const char* kDefaultAlphaGrid = "1e-10:1e10:100x1e-10:1e10:100";

inline nlohmann::json compute_fit(const FitOptions& o, std::optional<AlphaGridFit>* surface = nullptr) {
  detail::require_arg(o.window.empty() || o.alpha_grid.empty(), "--window and --alpha-grid are mutually exclusive");
  const auto y = read_signal_csv(o.input);
  if (!o.window.empty()) {
    LambdaSearch search;
    if (!o.lambda_range.empty()) {
      const auto range = parse_range(o.lambda_range, "--lambda-range");
      search.lo = range.lo;
      search.hi = range.hi;
      search.points = range.points;
    }
    std::vector<WindowFamily> families;
    for (auto name : detail::split_fields(o.window)) families.push_back(parse_window_family(detail::trim(name)));
    const auto bank = make_window_bank(families, y.size(), kDefaultPadFactor * y.size());
    const auto selection = select_window(y, bank, search);
    auto j = fit_to_json(selection.best, bank[*selection.best.window_index].name);
    if (bank.size() > 1) {
      auto candidates = nlohmann::json::array();
      for (const auto& c : selection.candidates) candidates.push_back(fit_to_json(c, bank[*c.window_index].name));
      j["candidates"] = std::move(candidates);
    }
    return j;
  }
  detail::require_arg(o.lambda_range.empty(), "--lambda-range applies to --window fits only");
  const auto [r0, r1] = parse_alpha_grid(o.alpha_grid.empty() ? kDefaultAlphaGrid : o.alpha_grid);
  const auto g0 = log_space(r0.lo, r0.hi, r0.points);
  const auto g1 = log_space(r1.lo, r1.hi, r1.points);
  auto fit = fit_alpha_grid(y, g0, g1, thread_count());
  auto j = fit_to_json(fit.report);
  if (surface) *surface = std::move(fit);
  return j;
}

inline void cmd_fit(const FitOptions& o, std::ostream& out) {
  std::optional<AlphaGridFit> surface;
  const auto j = compute_fit(o, &surface);
  if (!o.surface.empty()) {
    detail::require_arg(surface.has_value(), "--surface needs an alpha-grid fit");
    emit(o.surface, out, [&](std::ostream& s) { write_surface_csv(s, *surface, format_number); });
  }
  emit(o.out, out, [&](std::ostream& s) { s << j.dump(2) << '\n'; });
}

// ---------------------------------------------------------------------------

struct SimulateOptions {
  std::size_t n = 512;
  std::string taps = "1,-2,3,-2,1";
  std::size_t realizations = 100;
  std::uint64_t seed = 1;
  std::string out_dir;
  std::size_t alpha_points = 100;
  std::string alpha_range = "1e-10:1e10";
  std::size_t grid = 0;
  std::string noise = "complex";
  std::string scaling = "per-sample";
  bool window_selection = false;
};

inline SimConfig make_sim_config(const SimulateOptions& o) {
  SimConfig c;
  c.samples = o.n;
  c.taps = parse_list(o.taps, "--taps");
  c.realizations = o.realizations;
  c.master_seed = o.seed;
  c.grid_size = o.grid;
  c.alpha_points = o.alpha_points;
  const auto range = parse_range(o.alpha_range + ":" + std::to_string(o.alpha_points), "--alpha-range");
  c.alpha_lo = range.lo;
  c.alpha_hi = range.hi;
  if (o.noise == "complex") c.noise = NoiseKind::complex_circular;
  else if (o.noise == "real") c.noise = NoiseKind::real;
  else throw Error(ErrorCode::invalid_argument, "unknown noise kind '" + o.noise + "'");
  if (o.scaling == "per-sample") c.scaling = SpectrumScaling::per_sample;
  else if (o.scaling == "window-energy") c.scaling = SpectrumScaling::window_energy;
  else throw Error(ErrorCode::invalid_argument, "unknown scaling '" + o.scaling + "'");
  c.threads = thread_count();
  c.keep_spectra = true;
  c.validate();
  return c;
}

inline std::string realization_file(std::size_t k) {
  char name[32];
  std::snprintf(name, sizeof name, "realization_%04zu.csv", k);
  return name;
}

inline void cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  const auto config = make_sim_config(o);
  detail::require_arg(!o.out_dir.empty(), "--out-dir is required");
  const std::filesystem::path root(o.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(root / "spectra", ec);
  if (!ec) std::filesystem::create_directories(root / "signals", ec);
  detail::require(!ec, ErrorCode::io_failure, "cannot create '" + root.string() + "': " + ec.message());

  const auto report = run_experiment(config);
  const auto write = [](const std::filesystem::path& path, auto&& body) {
    auto file = detail::open_output(path);
    body(file);
    detail::finish_output(file, path);
  };
  write(root / "report.json", [&](std::ostream& s) { s << experiment_to_json(report).dump(2) << '\n'; });
  write(root / "table.csv", [&](std::ostream& s) { write_table_csv(s, report); });
  for (std::size_t k = 0; k < config.realizations; ++k) {
    write(root / "spectra" / realization_file(k),
          [&](std::ostream& s) { write_realization_spectra_csv(s, report, k); });
    write(root / "signals" / realization_file(k), [&](std::ostream& s) { write_signal_csv(s, gen_signal(config, k)); });
  }
  if (o.window_selection) {
    const auto study = run_window_selection(config);
    nlohmann::json j;
    j["bank"] = study.bank;
    j["counts"] = study.counts;
    j["selected"] = study.selected;
    j["lambdas"] = detail::number_array(study.lambdas);
    j["most_selected"] = study.bank[study.most_selected()];
    write(root / "window_selection.json", [&](std::ostream& s) { s << j.dump(2) << '\n'; });
  }
  write_table_csv(out, report);
}

// ---------------------------------------------------------------------------

struct WindowsOptions {
  std::string window;
  double lambda = 1.0;
  std::size_t n = 0;
  std::size_t pad = 0;
  std::string out;
};

inline void cmd_windows(const WindowsOptions& o, std::ostream& out) {
  const auto family = parse_window_family(o.window);
  detail::require_arg(o.n >= 1, "--n must be positive");
  const std::size_t grid_size = o.pad ? o.pad : kDefaultPadFactor * o.n;
  const auto window = window_from_eigenvalues(named_window_eigenvalues(family, o.n, grid_size), o.lambda, o.n);
  emit(o.out, out, [&](std::ostream& s) {
    s << "n,omega\n";
    for (std::size_t k = 0; k < o.n; ++k) s << k << ',' << format_number(window[k]) << '\n';
  });
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Regularized periodograms: estimation, hyperparameter fitting and benchmarks"};
  app.require_subcommand(1);

  PeriodogramOptions po;
  auto* periodogram = app.add_subcommand("periodogram", "Estimate a spectrum from a signal CSV");
  periodogram->add_option("--input", po.input, "Signal CSV (index,re[,im])")->required();
  periodogram->add_option("--lambda", po.lambda, "Regularization weight (default 0)");
  periodogram->add_option("--window", po.window, "usual, cauchy, inv-cosine, hamming, hanning, triangular");
  periodogram->add_option("--alpha", po.alpha, "Sobolev coefficients alpha0,alpha1,...");
  periodogram->add_option("--pad", po.pad, "Discrete-frequency output on P = pad points");
  periodogram->add_option("--grid", po.grid, "Continuous-frequency output on M uniform points (default 8N)");
  periodogram->add_option("--normalization", po.normalization, "Power column: raw or per-sample");
  periodogram->add_option("--format", po.format, "csv or json (default from --out extension)");
  periodogram->add_option("--out", po.out, "Output path (default stdout)");

  FitOptions fo;
  auto* fit = app.add_subcommand("fit", "Fit hyperparameters by maximum likelihood");
  fit->add_option("--input", fo.input, "Signal CSV")->required();
  fit->add_option("--window", fo.window, "Window name, or comma list to select among");
  fit->add_option("--alpha-grid", fo.alpha_grid, "lo:hi:nxlo:hi:n (default " + std::string(kDefaultAlphaGrid) + ")");
  fit->add_option("--lambda-range", fo.lambda_range, "lo:hi:n scan for --window fits");
  fit->add_option("--surface", fo.surface, "Write the alpha-grid CLL surface as CSV");
  fit->add_option("--out", fo.out, "Output JSON path (default stdout)");

  SimulateOptions so;
  auto* simulate = app.add_subcommand("simulate", "Run the filtered-noise benchmark");
  simulate->add_option("--n", so.n, "Samples per realization");
  simulate->add_option("--taps", so.taps, "FIR taps, comma separated");
  simulate->add_option("--realizations", so.realizations, "Number of realizations");
  simulate->add_option("--seed", so.seed, "Master seed");
  simulate->add_option("--out-dir", so.out_dir, "Output directory")->required();
  simulate->add_option("--alpha-points", so.alpha_points, "Points per alpha axis");
  simulate->add_option("--alpha-range", so.alpha_range, "lo:hi of both alpha axes");
  simulate->add_option("--grid", so.grid, "Spectrum grid size (default 4N)");
  simulate->add_option("--noise", so.noise, "complex or real");
  simulate->add_option("--scaling", so.scaling, "per-sample or window-energy");
  simulate->add_flag("--window-selection", so.window_selection, "Also run the window-selection study");

  WindowsOptions wo;
  auto* windows = app.add_subcommand("windows", "Tabulate a window");
  windows->add_option("--window", wo.window, "Window name")->required();
  windows->add_option("--lambda", wo.lambda, "Regularization weight (default 1)");
  windows->add_option("--n", wo.n, "Number of samples")->required();
  windows->add_option("--pad", wo.pad, "Grid size P for inv-cosine (default 8N)");
  windows->add_option("--out", wo.out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }

  try {
    if (periodogram->parsed()) cmd_periodogram(po, out);
    else if (fit->parsed()) cmd_fit(fo, out);
    else if (simulate->parsed()) cmd_simulate(so, out);
    else if (windows->parsed()) cmd_windows(wo, out);
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
}

}  // namespace regspec::cli
