// Command-line front end: eval, optimize, sweep, figure.
//
// Flags mirror SystemParams field names; JSON config files use the same keys.
// Output goes to --output, else to $EHRELAY_OUTPUT_DIR/<name>.<ext> when that
// variable is set, else to standard output. Sweeps exit with the number of
// failed cells (capped at 125).

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ehrelay/ehrelay.hpp"

namespace {

using namespace ehrelay;

struct ParamFlags {
  std::map<std::string, std::optional<double>> values;
  std::optional<std::uint64_t> num_realizations;
  std::optional<std::uint64_t> master_seed;
  bool antithetic = false;

  void attach(CLI::App& app) {
    static const char* kFields[] = {
        "source_power",     "harvesting_efficiency", "dist_source_relay",    "dist_relay_dest",
        "path_loss_exponent", "antenna_noise_var",   "conversion_noise_var", "fading_mean_sr",
        "fading_mean_rd",   "rate",                  "block_time"};
    for (const char* f : kFields) {
      app.add_option(std::string("--") + f, values[f])->group("System parameters");
    }
    app.add_option("--num_realizations", num_realizations, "Monte-Carlo draws per estimate")
        ->group("Monte-Carlo");
    app.add_option("--master_seed", master_seed, "Monte-Carlo seed")->group("Monte-Carlo");
    app.add_flag("--antithetic", antithetic, "Antithetic pairs")->group("Monte-Carlo");
  }

  SystemParams apply(SystemParams p) const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : values) {
      if (v) j[k] = *v;
    }
    return validate(params_from_json(j, p));
  }

  McSettings apply(McSettings mc) const {
    if (num_realizations) mc.num_realizations = *num_realizations;
    if (master_seed) mc.master_seed = *master_seed;
    if (antithetic) mc.antithetic = true;
    return mc;
  }
};

struct OutputFlags {
  std::string format = "csv";
  std::string output;

  void attach(CLI::App& app) {
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--output,-o", output, "Output file (default: stdout or $EHRELAY_OUTPUT_DIR)");
  }

  void write(const SweepResult& result, const std::string& name) const {
    const OutputFormat f = format == "json" ? OutputFormat::Json : OutputFormat::Csv;
    if (!output.empty()) {
      emit(result, f, std::filesystem::path(output));
    } else if (const char* dir = std::getenv("EHRELAY_OUTPUT_DIR"); dir && *dir) {
      const auto path = std::filesystem::path(dir) / (name + "." + format);
      emit(result, f, path);
      std::cerr << "wrote " << path.string() << "\n";
    } else {
      emit(result, f, std::cout);
    }
  }
};

std::vector<double> parse_range(const std::string& text) {
  // start:stop:step, inclusive of stop within half a step
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(std::stod(item));
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
    throw ParameterError("--range expects start:stop:step with step > 0 and stop >= start");
  }
  const int count = static_cast<int>(std::floor((parts[1] - parts[0]) / parts[2] + 0.5)) + 1;
  return detail::linspace_step(parts[0], parts[2], count);
}

int exit_code(const SweepResult& r) { return std::min(r.failed_cells, 125); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Throughput analysis of energy-harvesting amplify-and-forward relay links"};
  app.require_subcommand(1);

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate throughput at a single operating point");
  ParamFlags eval_params;
  OutputFlags eval_out;
  std::string eval_protocol = "TSR", eval_mode = "delay-limited", eval_method = "exact";
  double eval_fraction = 0.5;
  eval->add_option("--protocol", eval_protocol, "TSR, PSR or Ideal");
  eval->add_option("--fraction", eval_fraction, "alpha (TSR) or rho (PSR)");
  eval->add_option("--mode", eval_mode, "delay-limited or delay-tolerant");
  eval->add_option("--method", eval_method, "exact, high-snr-approx or monte-carlo");
  eval_params.attach(*eval);
  eval_out.attach(*eval);

  // optimize
  auto* opt = app.add_subcommand("optimize", "Find the throughput-optimal fraction");
  ParamFlags opt_params;
  std::string opt_protocol = "TSR", opt_mode = "delay-limited", opt_method = "exact";
  double frac_tol = 1e-3;
  opt->add_option("--protocol", opt_protocol, "TSR or PSR");
  opt->add_option("--mode", opt_mode, "delay-limited or delay-tolerant");
  opt->add_option("--method", opt_method, "exact, high-snr-approx or monte-carlo");
  opt->add_option("--frac_tol", frac_tol, "Final bracket width");
  opt_params.attach(*opt);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep from flags or a JSON config");
  ParamFlags sweep_params;
  OutputFlags sweep_out;
  std::string config_path, swept, range, coupling;
  std::vector<double> values;
  std::vector<std::string> protocols, modes, methods;
  std::optional<double> sweep_fraction;
  bool optimize_flag = false;
  sweep->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  sweep->add_option("--swept_parameter", swept, "Parameter to sweep");
  sweep->add_option("--values", values, "Swept values")->delimiter(',');
  sweep->add_option("--range", range, "Swept values as start:stop:step");
  sweep->add_option("--protocols", protocols)->delimiter(',');
  sweep->add_option("--modes", modes)->delimiter(',');
  sweep->add_option("--methods", methods)->delimiter(',');
  sweep->add_flag("--optimize_fraction", optimize_flag);
  sweep->add_option("--fraction", sweep_fraction, "Fixed fraction when not swept or optimized");
  sweep->add_option("--coupling", coupling, "none or d2=2-d1");
  sweep_params.attach(*sweep);
  sweep_out.attach(*sweep);

  // figure
  auto* fig = app.add_subcommand("figure", "Run a figure preset");
  ParamFlags fig_params;
  OutputFlags fig_out;
  std::string fig_name;
  std::vector<std::string> fig_methods;
  fig->add_option("name", fig_name, "fig3, fig4, fig5a, fig5b, fig6, fig7 or fig8")->required();
  fig->add_option("--methods", fig_methods, "Override the preset's methods")->delimiter(',');
  fig_params.attach(*fig);
  fig_out.attach(*fig);

  CLI11_PARSE(app, argc, argv);

  try {
    if (eval->parsed()) {
      EvalOptions options;
      options.monte_carlo = eval_params.apply(options.monte_carlo);
      SweepSpec spec;
      spec.name = "eval";
      spec.swept_parameter = SweptParameter::Fraction;
      spec.values = {eval_fraction};
      spec.protocols = {parse_protocol(eval_protocol)};
      spec.modes = {parse_mode(eval_mode)};
      spec.methods = {parse_method(eval_method)};
      const SweepResult r = run_sweep(spec, eval_params.apply(SystemParams{}), options);
      eval_out.write(r, spec.name);
      return exit_code(r);
    }
    if (opt->parsed()) {
      EvalOptions options;
      options.monte_carlo = opt_params.apply(options.monte_carlo);
      const OptResult r =
          optimize_fraction(opt_params.apply(SystemParams{}), parse_protocol(opt_protocol),
                            parse_mode(opt_mode), parse_method(opt_method), options, frac_tol);
      nlohmann::json j = {{"protocol", opt_protocol},
                          {"mode", opt_mode},
                          {"method", opt_method},
                          {"best_fraction", r.best_fraction},
                          {"best_throughput", r.best_throughput},
                          {"evaluations", r.evaluations},
                          {"bracket_width", r.bracket_width},
                          {"flat", r.flat}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (sweep->parsed()) {
      nlohmann::json config = nlohmann::json::object();
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        config = nlohmann::json::parse(in);
      }
      SystemParams base = sweep_params.apply(params_from_json(config));
      EvalOptions options;
      options.monte_carlo = sweep_params.apply(mc_from_json(config));
      SweepSpec spec = spec_from_json(config);
      if (!config.contains("protocols") && !config.contains("preset")) {
        spec.protocols = {ProtocolKind::TSR, ProtocolKind::PSR};
      }
      if (!config.contains("modes") && !config.contains("preset")) {
        spec.modes = {TransmissionMode::DelayLimited, TransmissionMode::DelayTolerant};
      }
      if (!config.contains("methods") && !config.contains("preset")) spec.methods = {Method::Exact};
      if (!swept.empty()) spec.swept_parameter = parse_swept_parameter(swept);
      if (!values.empty()) spec.values = values;
      if (!range.empty()) spec.values = parse_range(range);
      if (!protocols.empty()) {
        spec.protocols.clear();
        for (const auto& p : protocols) spec.protocols.push_back(parse_protocol(p));
      }
      if (!modes.empty()) {
        spec.modes.clear();
        for (const auto& m : modes) spec.modes.push_back(parse_mode(m));
      }
      if (!methods.empty()) {
        spec.methods.clear();
        for (const auto& m : methods) spec.methods.push_back(parse_method(m));
      }
      if (optimize_flag) spec.optimize_fraction = true;
      if (sweep_fraction) spec.fraction = *sweep_fraction;
      if (!coupling.empty()) spec.coupling = parse_coupling(coupling);
      const SweepResult r = run_sweep(spec, base, options);
      sweep_out.write(r, spec.name);
      return exit_code(r);
    }
    if (fig->parsed()) {
      SweepSpec spec = figure_preset(fig_name);
      if (!fig_methods.empty()) {
        spec.methods.clear();
        for (const auto& m : fig_methods) spec.methods.push_back(parse_method(m));
      }
      EvalOptions options;
      options.monte_carlo = fig_params.apply(options.monte_carlo);
      const SweepResult r = run_sweep(spec, fig_params.apply(SystemParams{}), options);
      fig_out.write(r, spec.name);
      return exit_code(r);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
