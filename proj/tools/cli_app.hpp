#pragma once

// Command-line front end: fit, effects, test and oracle over a table file.
// Exit codes: 0 success, 1 input error, 2 fit failure, 3 verification failure.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cloglin/cloglin.hpp"

namespace cloglin::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kFitFailure = 2, kVerifyFailure = 3 };

inline constexpr double kVerifyTolerance = 1e-8;

struct CliConfig {
  std::string subcommand;
  std::string input;
  std::optional<TableFormat> format;
  bool saturated = false;
  std::string zero_cells = "error";
  Direction direction;
  bool json = false;
  bool verify = false;
};

class VerificationFailure : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline ContingencyTable load_table(const CliConfig& cfg) {
  std::ifstream in(cfg.input, std::ios::binary);
  if (!in) throw InputError("cannot open input '" + cfg.input + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const TableFormat fmt = cfg.format ? *cfg.format : format_from_path(cfg.input);
  return validate(parse_table(buf.str(), fmt), ZeroCellPolicy::parse(cfg.zero_cells));
}

inline ModelSpec model_of(const CliConfig& cfg) {
  return cfg.saturated ? ModelSpec::saturated() : ModelSpec::two_way();
}

inline std::string fmt4(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << v;
  return s.str();
}

inline void print_row(std::ostream& out, const std::string& name, const std::string& a, const std::string& b = "") {
  out << "  " << std::left << std::setw(14) << name << std::right << std::setw(12) << a;
  if (!b.empty()) out << std::setw(16) << b;
  out << '\n';
}

inline void print_effects(std::ostream& out, const EffectsReport& r, const std::string& title) {
  out << title << " (X: " << r.direction.from << " -> " << r.direction.to << ")\n";
  print_row(out, "TE", fmt4(r.te));
  print_row(out, "NDE", fmt4(r.nde));
  print_row(out, "IE", fmt4(r.ie));
  print_row(out, "IE_reverse", fmt4(r.ie_reverse));
  print_row(out, "LDE(Z=0)", fmt4(r.lde[0]));
  print_row(out, "LDE(Z=1)", fmt4(r.lde[1]));
  print_row(out, "cell(Z=0)", fmt4(r.cell[0]));
  print_row(out, "cell(Z=1)", fmt4(r.cell[1]));
  print_row(out, "additive int.", fmt4(r.additive_interaction));
  print_row(out, "mult. int. OR", fmt4(r.multiplicative_interaction));
  std::ostringstream res;
  res << std::scientific << std::setprecision(2) << r.decomposition_residual;
  print_row(out, "decomp. resid.", res.str());
}

inline void print_test(std::ostream& out, const TestResult& t) {
  out << "additive interaction test: " << t.combination << '\n';
  print_row(out, "beta_hat", fmt4(t.beta_hat));
  print_row(out, "se", fmt4(t.se));
  print_row(out, "z", fmt4(t.z));
  print_row(out, "p (two-sided)", fmt4(t.p_two_sided));
}

inline int cmd_fit(const CliConfig& cfg, std::ostream& out) {
  const ContingencyTable table = load_table(cfg);
  const FitResult fit = fit_poisson(table, model_of(cfg));
  const CausalParams cp = fit_causal(table, cfg.saturated);

  if (cfg.json) {
    out << Json{{"command", "fit"}, {"model", model_name(fit.spec)}, {"nocausal", to_json(fit)}, {"causal", to_json(cp)}}
               .dump(2)
        << '\n';
    return kOk;
  }
  out << "model: " << model_name(fit.spec) << " (converged in " << fit.iterations << " iterations, deviance "
      << fmt4(fit.deviance) << ")\n\n";
  out << "no-causal parameters\n";
  print_row(out, "term", "additive", "multiplicative");
  for (VarSet t : kTermOrder) {
    if (!t.empty() && !fit.spec.column(t)) continue;
    print_row(out, t.name(), fmt4(fit.params.lambda(t)), fmt4(fit.params.mu(t)));
  }
  out << "\ncausal parameters\n";
  print_row(out, "term", "additive", "multiplicative");
  const std::pair<const char*, double> rows[] = {{"Xc", cp.x_c}, {"Zc", cp.z_c}, {"XZc", cp.xz_c}, {"Y", cp.y},
                                                 {"XY", cp.xy},  {"ZY", cp.zy},  {"XZY", cp.xzy}};
  for (const auto& [name, v] : rows) {
    if (std::string(name) == "XZY" && !cp.with_interaction) continue;
    print_row(out, name, fmt4(std::log(v)), fmt4(v));
  }
  const NormalizationFactors f = eta_factors(cp);
  out << "\nnormalization factors\n";
  print_row(out, "Xc", fmt4(f.x_c));
  for (int x = 0; x < 2; ++x) print_row(out, "Z|X=" + std::to_string(x), fmt4(f.z_given_x[x]));
  for (int x = 0; x < 2; ++x)
    for (int z = 0; z < 2; ++z)
      print_row(out, "Y|X=" + std::to_string(x) + ",Z=" + std::to_string(z), fmt4(f.y_given_xz[x][z]));
  return kOk;
}

inline int cmd_effects(const CliConfig& cfg, std::ostream& out) {
  const ContingencyTable table = load_table(cfg);
  const CausalParams cp = fit_causal(table, cfg.saturated);
  const EffectsReport report = effects_report(cp, cfg.direction);

  std::optional<OracleReport> oracle;
  double discrepancy = 0.0;
  if (cfg.verify) {
    // The oracle sees only the model-implied joint (fitted counts).
    const FitResult fit = fit_poisson(table, model_of(cfg));
    double total = 0.0;
    for (double m : fit.fitted_counts) total += m;
    std::array<double, kCells> probs{};
    for (std::size_t i = 0; i < kCells; ++i) probs[i] = fit.fitted_counts[i] / total;
    oracle = oracle_effects(JointProbabilityTable(probs), cfg.direction);
    discrepancy = max_discrepancy(report, *oracle);
  }

  if (cfg.json) {
    Json doc{{"command", "effects"}, {"model", cfg.saturated ? "saturated" : "two-way"}, {"effects", to_json(report)}};
    if (oracle) {
      doc["oracle"] = to_json(*oracle);
      doc["max_discrepancy"] = discrepancy;
    }
    out << doc.dump(2) << '\n';
  } else {
    print_effects(out, report, "causal effects");
    if (oracle) {
      std::ostringstream d;
      d << std::scientific << std::setprecision(2) << discrepancy;
      out << "oracle max discrepancy: " << d.str() << '\n';
    }
  }
  if (oracle && !(discrepancy <= kVerifyTolerance)) {
    std::ostringstream d;
    d << std::scientific << discrepancy;
    throw VerificationFailure("oracle disagrees with closed-form effects (max discrepancy " + d.str() + ")");
  }
  return kOk;
}

inline int cmd_test(const CliConfig& cfg, std::ostream& out) {
  if (cfg.saturated) throw InputError("test defined for two-way model");
  const ContingencyTable table = load_table(cfg);
  const FitResult fit = fit_poisson(table, ModelSpec::two_way());
  const CausalParams cp = causal_from_nocausal(fit.params);
  const LinearityReport bonds = linearity_bonds(cp, &fit);

  if (cfg.json) {
    out << Json{{"command", "test"}, {"additive_zero_test", to_json(*bonds.bond1_test)}, {"linearity", to_json(bonds)}}
               .dump(2)
        << '\n';
    return kOk;
  }
  print_test(out, *bonds.bond1_test);
  out << "\nlinearity bonds (log scale)\n";
  print_row(out, "bond 1", fmt4(bonds.bond1_residual));
  print_row(out, "bond 2", fmt4(bonds.bond2_residual));
  return kOk;
}

inline int cmd_oracle(const CliConfig& cfg, std::ostream& out) {
  const ContingencyTable table = load_table(cfg);
  const OracleReport r = oracle_effects(joint_probabilities(table), cfg.direction);
  if (cfg.json) {
    out << Json{{"command", "oracle"}, {"effects", to_json(r)}}.dump(2) << '\n';
  } else {
    print_effects(out, r, "oracle effects from observed joint");
  }
  return kOk;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Causal loglinear models and odds-ratio effects for 2x2x2 tables", "cloglin"};
  app.require_subcommand(1);

  CliConfig cfg;
  std::string format, model = "two-way", output = "text";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "Table file (CSV or JSON)")->required();
    sub->add_option("--format", format, "csv|json (default: by extension)")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--zero-cells", cfg.zero_cells, "error|correct:C|allow")->capture_default_str();
    sub->add_option("--output", output, "text|json")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  };
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", model, "two-way|saturated")
        ->check(CLI::IsMember({"two-way", "saturated"}))
        ->capture_default_str();
  };
  auto add_direction = [&](CLI::App* sub) {
    sub->add_option("--from", cfg.direction.from, "Baseline level of X")->check(CLI::Range(0, 1));
    sub->add_option("--to", cfg.direction.to, "Contrast level of X")->check(CLI::Range(0, 1));
  };

  auto* fit = app.add_subcommand("fit", "Fit no-causal and causal parameters");
  add_common(fit);
  add_model(fit);
  auto* effects = app.add_subcommand("effects", "Causal effects from the fitted causal model");
  add_common(effects);
  add_model(effects);
  add_direction(effects);
  effects->add_flag("--verify", cfg.verify, "Cross-check against the probability-space oracle");
  auto* test = app.add_subcommand("test", "z-test for zero additive interaction and linearity bonds");
  add_common(test);
  add_model(test);
  auto* oracle = app.add_subcommand("oracle", "Effects computed directly from the observed joint");
  add_common(oracle);
  add_direction(oracle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInputError;
  }

  cfg.subcommand = app.get_subcommands().front()->get_name();
  if (!format.empty()) cfg.format = format == "csv" ? TableFormat::Csv : TableFormat::Json;
  cfg.saturated = model == "saturated";
  cfg.json = output == "json";

  try {
    cfg.direction.check();
    if (cfg.subcommand == "fit") return detail::cmd_fit(cfg, out);
    if (cfg.subcommand == "effects") return detail::cmd_effects(cfg, out);
    if (cfg.subcommand == "test") return detail::cmd_test(cfg, out);
    return detail::cmd_oracle(cfg, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const VerificationFailure& e) {
    err << "verification failed: " << e.what() << '\n';
    return kVerifyFailure;
  } catch (const DegenerateProbability& e) {
    err << "error: degenerate probability: " << e.what() << '\n';
    return kFitFailure;
  } catch (const FitError& e) {
    err << "fit failed: " << e.what() << '\n';
    return kFitFailure;
  }
}

}  // namespace cloglin::cli
