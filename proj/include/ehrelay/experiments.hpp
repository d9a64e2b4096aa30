#pragma once

// Parameter sweeps, figure presets and CSV/JSON output.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ehrelay/optimize.hpp"
#include "ehrelay/parallel.hpp"
#include "ehrelay/throughput.hpp"

namespace ehrelay {

enum class SweptParameter {
  Fraction,
  AntennaNoiseVar,
  ConversionNoiseVar,
  DistSourceRelay,
  Rate,
  HarvestingEfficiency,
};

/// Coupled parameter rule. `RelayOnLine` keeps the relay on the unit-spaced
/// line between source and destination: d2 = 2 - d1.
enum class Coupling { None, RelayOnLine };

struct SweepSpec {
  std::string name = "sweep";
  SweptParameter swept_parameter = SweptParameter::Fraction;
  std::vector<double> values;
  std::vector<ProtocolKind> protocols;
  std::vector<TransmissionMode> modes;
  std::vector<Method> methods;
  /// Replace the fraction by its throughput-optimal value in every cell.
  bool optimize_fraction = false;
  /// Fraction used when neither swept nor optimized.
  double fraction = 0.5;
  Coupling coupling = Coupling::None;
};

struct SweepRow {
  std::string swept_param;
  double swept_value = 0.0;
  std::string protocol;
  std::optional<double> fraction;
  std::string mode;
  std::string method;
  std::optional<double> p_out;
  std::optional<double> capacity;
  std::optional<double> throughput;
  std::optional<double> std_error;
  std::string note;

  bool operator==(const SweepRow&) const = default;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  int failed_cells = 0;

  bool operator==(const SweepResult&) const = default;
};

// ---------------------------------------------------------------------------
// Names shared by the CLI, JSON config and output columns.

inline std::string_view to_string(SweptParameter p) {
  switch (p) {
    case SweptParameter::Fraction: return "fraction";
    case SweptParameter::AntennaNoiseVar: return "antenna_noise_var";
    case SweptParameter::ConversionNoiseVar: return "conversion_noise_var";
    case SweptParameter::DistSourceRelay: return "dist_source_relay";
    case SweptParameter::Rate: return "rate";
    case SweptParameter::HarvestingEfficiency: return "harvesting_efficiency";
  }
  return "?";
}

inline std::string_view to_string(Coupling c) { return c == Coupling::None ? "none" : "d2=2-d1"; }

namespace detail {

template <class E, std::size_t N>
E parse_enum(std::string_view text, const std::array<E, N>& options, std::string_view what) {
  for (E e : options) {
    if (to_string(e) == text) return e;
  }
  std::string msg = "unknown " + std::string(what) + " '" + std::string(text) + "' (expected one of:";
  for (E e : options) msg += " " + std::string(to_string(e));
  throw ParameterError(msg + ")");
}

}  // namespace detail

inline SweptParameter parse_swept_parameter(std::string_view s) {
  return detail::parse_enum(
      s,
      std::array{SweptParameter::Fraction, SweptParameter::AntennaNoiseVar,
                 SweptParameter::ConversionNoiseVar, SweptParameter::DistSourceRelay,
                 SweptParameter::Rate, SweptParameter::HarvestingEfficiency},
      "swept parameter");
}

inline ProtocolKind parse_protocol(std::string_view s) {
  if (s == "tsr") return ProtocolKind::TSR;
  if (s == "psr") return ProtocolKind::PSR;
  if (s == "ideal") return ProtocolKind::Ideal;
  return detail::parse_enum(s, std::array{ProtocolKind::TSR, ProtocolKind::PSR, ProtocolKind::Ideal},
                            "protocol");
}

inline TransmissionMode parse_mode(std::string_view s) {
  return detail::parse_enum(
      s, std::array{TransmissionMode::DelayLimited, TransmissionMode::DelayTolerant}, "mode");
}

inline Method parse_method(std::string_view s) {
  return detail::parse_enum(
      s, std::array{Method::Exact, Method::HighSnrApprox, Method::MonteCarlo}, "method");
}

inline Coupling parse_coupling(std::string_view s) {
  return detail::parse_enum(s, std::array{Coupling::None, Coupling::RelayOnLine}, "coupling");
}

// ---------------------------------------------------------------------------

/// Parameters with `value` substituted for the swept field (and any coupled
/// field). Fraction sweeps leave the parameters untouched.
inline SystemParams apply_sweep_value(const SweepSpec& spec, SystemParams params, double value) {
  switch (spec.swept_parameter) {
    case SweptParameter::Fraction: break;
    case SweptParameter::AntennaNoiseVar: params.antenna_noise_var = value; break;
    case SweptParameter::ConversionNoiseVar: params.conversion_noise_var = value; break;
    case SweptParameter::DistSourceRelay:
      params.dist_source_relay = value;
      if (spec.coupling == Coupling::RelayOnLine) params.dist_relay_dest = 2.0 - value;
      break;
    case SweptParameter::Rate: params.rate = value; break;
    case SweptParameter::HarvestingEfficiency: params.harvesting_efficiency = value; break;
  }
  return params;
}

inline void validate(const SweepSpec& spec, const SystemParams& base) {
  if (spec.values.empty()) throw ParameterError("sweep: values must not be empty");
  if (spec.protocols.empty()) throw ParameterError("sweep: protocols must not be empty");
  if (spec.modes.empty()) throw ParameterError("sweep: modes must not be empty");
  if (spec.methods.empty()) throw ParameterError("sweep: methods must not be empty");
  if (spec.coupling != Coupling::None && spec.swept_parameter != SweptParameter::DistSourceRelay) {
    throw ParameterError("sweep: coupling applies only to dist_source_relay");
  }
  if (spec.swept_parameter == SweptParameter::Fraction && spec.optimize_fraction) {
    throw ParameterError("sweep: cannot optimize the fraction while sweeping it");
  }
  if (!(spec.fraction >= 0.0 && spec.fraction <= 1.0)) {
    throw ParameterError("sweep: fraction must lie in [0, 1]");
  }
  validate(base);
  for (double v : spec.values) {
    if (spec.swept_parameter == SweptParameter::Fraction) {
      if (!(v >= 0.0 && v <= 1.0)) throw ParameterError("sweep: fraction values must lie in [0, 1]");
      continue;
    }
    try {
      validate(apply_sweep_value(spec, base, v));
    } catch (const ParameterError& e) {
      throw ParameterError("sweep value " + std::to_string(v) + " rejected: " + e.what());
    }
  }
}

/// Evaluates every (value, protocol, mode, method) cell. Rows follow that
/// nesting order. A cell whose evaluation throws keeps its row, with the
/// message in `note`, and is counted in `failed_cells`.
inline SweepResult run_sweep(const SweepSpec& spec, const SystemParams& base,
                             const EvalOptions& options = {}, unsigned threads = 0) {
  validate(spec, base);
  struct Cell {
    double value;
    ProtocolKind protocol;
    TransmissionMode mode;
    Method method;
  };
  std::vector<Cell> cells;
  for (double v : spec.values)
    for (ProtocolKind p : spec.protocols)
      for (TransmissionMode m : spec.modes)
        for (Method me : spec.methods) cells.push_back({v, p, m, me});

  // Cells run in parallel; everything inside a cell stays on one thread.
  EvalOptions inner = options;
  inner.monte_carlo.threads = 1;

  SweepResult result;
  result.rows.resize(cells.size());
  std::vector<char> failed(cells.size(), 0);
  parallel_for(
      cells.size(),
      [&](std::size_t i) {
        const Cell& cell = cells[i];
        SweepRow& row = result.rows[i];
        row.swept_param = std::string(to_string(spec.swept_parameter));
        row.swept_value = cell.value;
        row.protocol = std::string(to_string(cell.protocol));
        row.mode = std::string(to_string(cell.mode));
        row.method = std::string(to_string(cell.method));
        try {
          const SystemParams params = apply_sweep_value(spec, base, cell.value);
          ThroughputResult tr;
          if (cell.protocol == ProtocolKind::Ideal) {
            tr = throughput(params, Protocol::ideal(), cell.mode, cell.method, inner);
          } else if (spec.optimize_fraction) {
            const OptResult opt =
                optimize_fraction(params, cell.protocol, cell.mode, cell.method, inner, 1e-3, 1);
            row.fraction = opt.best_fraction;
            tr = opt.at_best;
            if (opt.flat) tr.note = "flat objective: every grid throughput is zero";
          } else {
            const double f =
                spec.swept_parameter == SweptParameter::Fraction ? cell.value : spec.fraction;
            row.fraction = f;
            tr = throughput(params, Protocol::of(cell.protocol, f), cell.mode, cell.method, inner);
          }
          if (cell.mode == TransmissionMode::DelayLimited) {
            row.p_out = tr.intermediate;
          } else {
            row.capacity = tr.intermediate;
          }
          row.throughput = tr.throughput;
          if (cell.method == Method::MonteCarlo) row.std_error = tr.std_error;
          row.note = tr.note;
          if (!tr.converged && row.note.empty()) row.note = "quadrature did not converge";
        } catch (const std::exception& e) {
          row.note = e.what();
          failed[i] = 1;
        }
      },
      threads);
  for (char f : failed) result.failed_cells += f;
  return result;
}

namespace detail {

inline std::vector<double> linspace_step(double start, double step, int count) {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(count));
  // Rounded to 12 decimals so 0.07 prints as 0.07, not 0.07000000000000001.
  for (int i = 0; i < count; ++i) v.push_back(std::round((start + i * step) * 1e12) / 1e12);
  return v;
}

}  // namespace detail

inline constexpr std::array<std::string_view, 7> kFigurePresets = {
    "fig3", "fig4", "fig5a", "fig5b", "fig6", "fig7", "fig8"};

/// Sweep definitions of the reference numerical study. Parameters not named
/// here keep the SystemParams defaults.
///   fig3  throughput vs fraction, TSR and PSR, all three methods
///   fig4  optimal fraction vs antenna noise, delay-limited
///   fig5a optimal throughput vs antenna noise (conversion noise 0.01), incl. Ideal
///   fig5b optimal throughput vs conversion noise (antenna noise 0.01), incl. Ideal
///   fig6  optimal throughput vs d1 with d2 = 2 - d1
///   fig7  optimal throughput vs rate, delay-limited
///   fig8  optimal throughput vs harvesting efficiency
inline SweepSpec figure_preset(std::string_view name) {
  using enum ProtocolKind;
  using enum TransmissionMode;
  const std::vector<double> noise_grid = detail::linspace_step(0.005, 0.005, 20);
  SweepSpec s;
  s.name = std::string(name);
  s.protocols = {TSR, PSR};
  s.modes = {DelayLimited, DelayTolerant};
  s.methods = {Method::Exact};
  s.optimize_fraction = true;
  if (name == "fig3") {
    s.swept_parameter = SweptParameter::Fraction;
    s.values = detail::linspace_step(0.01, 0.01, kGridPoints);
    s.methods = {Method::Exact, Method::HighSnrApprox, Method::MonteCarlo};
    s.optimize_fraction = false;
  } else if (name == "fig4") {
    s.swept_parameter = SweptParameter::AntennaNoiseVar;
    s.values = noise_grid;
    s.modes = {DelayLimited};
  } else if (name == "fig5a") {
    s.swept_parameter = SweptParameter::AntennaNoiseVar;
    s.values = noise_grid;
    s.protocols = {TSR, PSR, Ideal};
  } else if (name == "fig5b") {
    s.swept_parameter = SweptParameter::ConversionNoiseVar;
    s.values = noise_grid;
    s.protocols = {TSR, PSR, Ideal};
  } else if (name == "fig6") {
    s.swept_parameter = SweptParameter::DistSourceRelay;
    s.values = detail::linspace_step(0.5, 0.1, 11);
    s.coupling = Coupling::RelayOnLine;
  } else if (name == "fig7") {
    s.swept_parameter = SweptParameter::Rate;
    s.values = detail::linspace_step(1.0, 1.0, 8);
    s.modes = {DelayLimited};
  } else if (name == "fig8") {
    s.swept_parameter = SweptParameter::HarvestingEfficiency;
    s.values = detail::linspace_step(0.1, 0.1, 10);
  } else {
    throw ParameterError("unknown figure preset '" + std::string(name) +
                         "' (expected fig3, fig4, fig5a, fig5b, fig6, fig7 or fig8)");
  }
  return s;
}

// ---------------------------------------------------------------------------
// Output

enum class OutputFormat { Csv, Json };

inline constexpr std::array<std::string_view, 11> kCsvColumns = {
    "swept_param", "swept_value", "protocol", "fraction", "mode",    "method",
    "p_out",       "capacity",    "throughput", "stderr",  "note"};

namespace detail {

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string format_optional(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline std::optional<double> json_optional(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace detail

/// CSV: header row, then one row per result row; numbers with 10 significant
/// digits; unused cells empty.
inline void emit_csv(const SweepResult& result, std::ostream& out) {
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
    out << (i ? "," : "") << kCsvColumns[i];
  }
  out << '\n';
  using detail::format_optional;
  for (const SweepRow& r : result.rows) {
    out << detail::csv_escape(r.swept_param) << ',' << detail::format_number(r.swept_value) << ','
        << r.protocol << ',' << format_optional(r.fraction) << ',' << r.mode << ',' << r.method
        << ',' << format_optional(r.p_out) << ',' << format_optional(r.capacity) << ','
        << format_optional(r.throughput) << ',' << format_optional(r.std_error) << ','
        << detail::csv_escape(r.note) << '\n';
  }
}

inline nlohmann::json to_json(const SweepResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const SweepRow& r : result.rows) {
    rows.push_back({
        {"swept_param", r.swept_param},
        {"swept_value", r.swept_value},
        {"protocol", r.protocol},
        {"fraction", detail::optional_json(r.fraction)},
        {"mode", r.mode},
        {"method", r.method},
        {"p_out", detail::optional_json(r.p_out)},
        {"capacity", detail::optional_json(r.capacity)},
        {"throughput", detail::optional_json(r.throughput)},
        {"stderr", detail::optional_json(r.std_error)},
        {"note", r.note},
    });
  }
  return rows;
}

inline void emit(const SweepResult& result, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::Csv) {
    emit_csv(result, out);
  } else {
    out << to_json(result).dump(2) << '\n';
  }
  if (!out) throw std::runtime_error("emit: write failed");
}

/// Writes to `path`, creating parent directories.
inline void emit(const SweepResult& result, OutputFormat format, const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw std::runtime_error("emit: cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("emit: cannot open " + path.string() + " for writing");
  try {
    emit(result, format, file);
  } catch (const std::runtime_error&) {
    throw std::runtime_error("emit: write to " + path.string() + " failed");
  }
}

/// Parses the JSON produced by `emit`.
inline SweepResult sweep_from_json(const nlohmann::json& rows) {
  SweepResult result;
  for (const auto& j : rows) {
    SweepRow r;
    r.swept_param = j.at("swept_param").get<std::string>();
    r.swept_value = j.at("swept_value").get<double>();
    r.protocol = j.at("protocol").get<std::string>();
    r.fraction = detail::json_optional(j.at("fraction"));
    r.mode = j.at("mode").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.p_out = detail::json_optional(j.at("p_out"));
    r.capacity = detail::json_optional(j.at("capacity"));
    r.throughput = detail::json_optional(j.at("throughput"));
    r.std_error = detail::json_optional(j.at("stderr"));
    r.note = j.at("note").get<std::string>();
    result.rows.push_back(std::move(r));
  }
  return result;
}

namespace detail {

inline std::vector<std::string> split_csv_record(std::istream& in, bool& ok) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  ok = false;
  char c;
  while (in.get(c)) {
    ok = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          fields.back() += '"';
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c == '\n') {
      return fields;
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

inline std::optional<double> parse_optional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

}  // namespace detail

/// Parses the CSV produced by `emit`.
inline SweepResult sweep_from_csv(std::istream& in) {
  bool ok = false;
  const auto header = detail::split_csv_record(in, ok);
  if (!ok || header.size() != kCsvColumns.size() ||
      !std::equal(header.begin(), header.end(), kCsvColumns.begin())) {
    throw std::runtime_error("sweep_from_csv: unexpected header");
  }
  SweepResult result;
  while (true) {
    const auto f = detail::split_csv_record(in, ok);
    if (!ok) break;
    if (f.size() != kCsvColumns.size()) {
      throw std::runtime_error("sweep_from_csv: row with " + std::to_string(f.size()) + " fields");
    }
    SweepRow r;
    r.swept_param = f[0];
    r.swept_value = std::stod(f[1]);
    r.protocol = f[2];
    r.fraction = detail::parse_optional(f[3]);
    r.mode = f[4];
    r.method = f[5];
    r.p_out = detail::parse_optional(f[6]);
    r.capacity = detail::parse_optional(f[7]);
    r.throughput = detail::parse_optional(f[8]);
    r.std_error = detail::parse_optional(f[9]);
    r.note = f[10];
    result.rows.push_back(std::move(r));
  }
  return result;
}

// ---------------------------------------------------------------------------
// JSON configuration: SystemParams fields and SweepSpec fields, all optional.

inline SystemParams params_from_json(const nlohmann::json& j, SystemParams p = {}) {
  auto take = [&](const char* key, double& field) {
    if (j.contains(key)) field = j.at(key).get<double>();
  };
  take("source_power", p.source_power);
  take("harvesting_efficiency", p.harvesting_efficiency);
  take("dist_source_relay", p.dist_source_relay);
  take("dist_relay_dest", p.dist_relay_dest);
  take("path_loss_exponent", p.path_loss_exponent);
  take("antenna_noise_var", p.antenna_noise_var);
  take("conversion_noise_var", p.conversion_noise_var);
  take("fading_mean_sr", p.fading_mean_sr);
  take("fading_mean_rd", p.fading_mean_rd);
  take("rate", p.rate);
  take("block_time", p.block_time);
  return p;
}

inline SweepSpec spec_from_json(const nlohmann::json& j, SweepSpec s = {}) {
  if (j.contains("preset")) s = figure_preset(j.at("preset").get<std::string>());
  if (j.contains("name")) s.name = j.at("name").get<std::string>();
  if (j.contains("swept_parameter")) {
    s.swept_parameter = parse_swept_parameter(j.at("swept_parameter").get<std::string>());
  }
  if (j.contains("values")) s.values = j.at("values").get<std::vector<double>>();
  auto list = [&](const char* key, auto& out, auto parse) {
    if (!j.contains(key)) return;
    out.clear();
    for (const auto& e : j.at(key)) out.push_back(parse(e.template get<std::string>()));
  };
  list("protocols", s.protocols, parse_protocol);
  list("modes", s.modes, parse_mode);
  list("methods", s.methods, parse_method);
  if (j.contains("optimize_fraction")) s.optimize_fraction = j.at("optimize_fraction").get<bool>();
  if (j.contains("fraction")) s.fraction = j.at("fraction").get<double>();
  if (j.contains("coupling")) s.coupling = parse_coupling(j.at("coupling").get<std::string>());
  return s;
}

inline McSettings mc_from_json(const nlohmann::json& j, McSettings mc = {}) {
  if (j.contains("num_realizations")) mc.num_realizations = j.at("num_realizations").get<std::uint64_t>();
  if (j.contains("master_seed")) mc.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("antithetic")) mc.antithetic = j.at("antithetic").get<bool>();
  return mc;
}

}  // namespace ehrelay
