// Command-line front door: discriminant sweeps, spectra, actions, hierarchy
// values, flows, and the identity-verification suite. All I/O through files;
// numeric output round-trips at 17 significant digits.
#pragma once

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zslab/cli_report.hpp"
#include "zslab/json_io.hpp"
#include "zslab/verify.hpp"

namespace zslab::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitNumericalFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr double kMinTolerance = 1e-12;

struct RunConfig {
  std::string command;
  std::string input_path;
  std::string output_path;
  std::string config_path;
  std::string field = "mkdv_defocusing";
  int n_modes = 64;
  int n_spec = 6;
  std::vector<int> levels{1};
  double lambda_min = -10.0;
  double lambda_max = 10.0;
  int samples = 201;
  double t_end = 0.05;
  double dt = 1e-5;
  int record_every = 500;
  std::uint64_t seed = 20260810;
  int corpus_size = 20;
  std::map<std::string, double> tolerances;
};

namespace detail {

inline std::string format17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// --tol.<name> <value> and --tol.<name>=<value> are collected before CLI11
// sees the argument list.
inline int extract_tolerances(std::vector<std::string>& args,
                              std::map<std::string, double>& tol, std::ostream& err) {
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--tol.", 0) != 0) {
      rest.push_back(a);
      continue;
    }
    std::string name = a.substr(6);
    std::string value;
    const auto eq = name.find('=');
    if (eq != std::string::npos) {
      value = name.substr(eq + 1);
      name = name.substr(0, eq);
    } else if (i + 1 < args.size()) {
      value = args[++i];
    } else {
      err << "usage error: --tol." << name << " needs a value\n";
      return kExitUsage;
    }
    double v = 0.0;
    try {
      v = std::stod(value);
    } catch (...) {
      err << "usage error: bad tolerance value for " << name << ": " << value << "\n";
      return kExitUsage;
    }
    if (v < kMinTolerance) {
      err << "usage error: tolerance " << name << " = " << value
          << " is below the 1e-12 floor\n";
      return kExitUsage;
    }
    tol[name] = v;
  }
  args = std::move(rest);
  return kExitPass;
}

inline void apply_config_file(RunConfig& cfg, const json& j) {
  auto set_if = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  set_if("command", cfg.command);
  set_if("input", cfg.input_path);
  set_if("output", cfg.output_path);
  set_if("field", cfg.field);
  set_if("n_modes", cfg.n_modes);
  set_if("n_spec", cfg.n_spec);
  set_if("levels", cfg.levels);
  set_if("lambda_min", cfg.lambda_min);
  set_if("lambda_max", cfg.lambda_max);
  set_if("samples", cfg.samples);
  set_if("t_end", cfg.t_end);
  set_if("dt", cfg.dt);
  set_if("record_every", cfg.record_every);
  set_if("seed", cfg.seed);
  set_if("corpus_size", cfg.corpus_size);
  if (j.contains("tolerances")) {
    for (const auto& [name, value] : j.at("tolerances").items()) {
      const double v = value.get<double>();
      if (v < kMinTolerance)
        throw std::invalid_argument("tolerance " + name + " is below the 1e-12 floor");
      cfg.tolerances.emplace(name, v);  // flag overrides win over file values
    }
  }
}

inline void emit(const RunConfig& cfg, const std::string& body, std::ostream& out) {
  if (cfg.output_path.empty())
    out << body;
  else
    write_text_file(cfg.output_path, body);
}

inline int run_discriminant(const RunConfig& cfg, std::ostream& out) {
  const Potential phi = load_potential(cfg.input_path);
  const ZsSystem sys(phi);
  std::ostringstream csv;
  csv << "lambda,re_delta,im_delta,re_ddelta,im_ddelta\n";
  for (int i = 0; i < cfg.samples; ++i) {
    const double lam = cfg.lambda_min + (cfg.lambda_max - cfg.lambda_min) * double(i) /
                                            double(std::max(1, cfg.samples - 1));
    const auto s = zs_delta(sys, cplx{lam, 0.0});
    csv << format17(lam) << ',' << format17(s.value.real()) << ','
        << format17(s.value.imag()) << ',' << format17(s.dvalue.real()) << ','
        << format17(s.dvalue.imag()) << '\n';
  }
  emit(cfg, csv.str(), out);
  return kExitPass;
}

inline int run_spectrum(const RunConfig& cfg, std::ostream& out) {
  const Potential phi = load_potential(cfg.input_path);
  const ZsSystem sys(phi);
  const SpectrumTable table = zs_spectrum(sys, cfg.n_spec);
  const auto discs = isolating_discs(table);
  json j;
  j["kind"] = "ZS";
  j["entries"] = json::array();
  for (const auto& [n, e] : table.entries) {
    j["entries"].push_back({{"n", n},
                            {"lam_minus", e.lower},
                            {"lam_plus", e.upper},
                            {"gap", e.gap},
                            {"double_root", e.double_root}});
  }
  j["discs"] = json::array();
  for (const auto& [n, d] : discs)
    j["discs"].push_back({{"n", n}, {"center", d.center}, {"radius", d.radius}});
  emit(cfg, j.dump(2) + "\n", out);
  return kExitPass;
}

inline int run_actions(const RunConfig& cfg, std::ostream& out) {
  const Potential phi = load_potential(cfg.input_path);
  const ZsSystem sys(phi);
  const ZsAtlas atlas(sys, cfg.n_spec + 1);
  json report;
  report["levels"] = cfg.levels;
  report["actions"] = json::array();
  for (int n = -cfg.n_spec; n <= cfg.n_spec; ++n) {
    for (int k : cfg.levels) {
      const ActionRecord rec = action_i(atlas, n, k);
      report["actions"].push_back({{"kind", "I"},
                                   {"n", rec.n},
                                   {"k", rec.k},
                                   {"value", to_json(rec.value)},
                                   {"quad_error", rec.quad_error}});
    }
  }
  if (phi.class_tag == RealityClass::e_r) {
    const HillSystem hill = HillSystem::from_miura(phi.minus.real_part());
    const HillAtlas hatlas(hill, cfg.n_spec + 1);
    for (int n = 1; n <= cfg.n_spec; ++n) {
      for (int k : cfg.levels) {
        const ActionRecord rec = action_j(hatlas, n, k);
        report["actions"].push_back({{"kind", "J"},
                                     {"n", rec.n},
                                     {"k", rec.k},
                                     {"value", to_json(rec.value)},
                                     {"quad_error", rec.quad_error}});
      }
    }
  }
  emit(cfg, report.dump(2) + "\n", out);
  return kExitPass;
}

inline int run_hamiltonians(const RunConfig& cfg, std::ostream& out) {
  const Potential phi = load_potential(cfg.input_path);
  json j;
  j["closed_form"] = json::object();
  for (int k = 1; k <= 4; ++k)
    j["closed_form"]["S" + std::to_string(k)] = to_json(eval_s(k, phi));
  if (phi.class_tag == RealityClass::e_r) {
    const GridFunction u = phi.minus.real_part();
    for (int m = 1; m <= 2; ++m)
      j["closed_form"]["K" + std::to_string(m)] = to_json(eval_k(m, u));
  }
  if (phi.real_type()) {
    std::vector<double> samples;
    for (int n = 6; n <= 13; ++n) samples.push_back((double(n) + 0.5) * std::numbers::pi);
    const AsymptoticFit fit = asymptotic_hamiltonians(phi, 4, samples);
    j["asymptotic"] = json::object();
    for (std::size_t n = 0; n < fit.coefficients.size(); ++n)
      j["asymptotic"]["S" + std::to_string(n + 1)] = to_json(fit.coefficients[n]);
    j["asymptotic"]["condition_number"] = fit.condition;
  }
  emit(cfg, j.dump(2) + "\n", out);
  return kExitPass;
}

inline FlowField parse_field(const std::string& name) {
  if (name == "mkdv_defocusing") return FlowField::mkdv_defocusing;
  if (name == "mkdv_focusing") return FlowField::mkdv_focusing;
  if (name == "nls_system") return FlowField::nls_system;
  if (name == "s4_system") return FlowField::s4_system;
  throw std::invalid_argument("unknown flow field: " + name);
}

inline int run_flow(const RunConfig& cfg, std::ostream& out) {
  const Potential phi = load_potential(cfg.input_path);
  const FlowField field = parse_field(cfg.field);
  FlowSpec spec{field, cfg.t_end, cfg.dt, cfg.record_every};

  Trajectory traj;
  if (scalar_field(field)) {
    if (phi.class_tag != RealityClass::e_r && phi.class_tag != RealityClass::diagonal)
      throw std::invalid_argument("scalar flows need a diagonal potential as input");
    traj = evolve(phi.minus, spec);
  } else {
    traj = evolve(phi, spec);
  }

  std::ostringstream csv;
  csv << "t";
  const std::size_t width =
      traj.is_scalar() ? traj.scalar_states[0].size() : traj.pair_states[0].minus.size();
  for (std::size_t j = 0; j < width; ++j) csv << ",re_m" << j << ",im_m" << j;
  if (!traj.is_scalar())
    for (std::size_t j = 0; j < width; ++j) csv << ",re_p" << j << ",im_p" << j;
  csv << "\n";
  for (std::size_t r = 0; r < traj.records(); ++r) {
    csv << format17(traj.times[r]);
    auto dump = [&](const GridFunction& f) {
      for (std::size_t j = 0; j < f.size(); ++j)
        csv << ',' << format17(f[j].real()) << ',' << format17(f[j].imag());
    };
    if (traj.is_scalar()) {
      dump(traj.scalar_states[r]);
    } else {
      dump(traj.pair_states[r].minus);
      dump(traj.pair_states[r].plus);
    }
    csv << "\n";
  }
  emit(cfg, csv.str(), out);

  const std::vector<std::string> which =
      traj.is_scalar() ? std::vector<std::string>{"mean", "K1", "K2", "S1", "S3"}
                       : std::vector<std::string>{"S1", "S2", "S3", "S4"};
  const auto drift = conservation_report(traj, which);
  json summary;
  summary["field"] = to_string(field);
  summary["t_end"] = cfg.t_end;
  summary["dt"] = cfg.dt;
  summary["records"] = traj.records();
  summary["resolution_warning"] = traj.resolution_warning;
  summary["drift"] = json::object();
  for (const auto& [name, d] : drift) summary["drift"][name] = d;
  if (!cfg.output_path.empty())
    write_text_file(cfg.output_path + ".summary.json", summary.dump(2) + "\n");
  else
    out << summary.dump(2) << "\n";
  return kExitPass;
}

inline int run_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  verify::Options opt;
  opt.seed = cfg.seed;
  opt.corpus_size = cfg.corpus_size;
  opt.n_modes = cfg.n_modes;
  opt.n_spec = cfg.n_spec;
  opt.tolerance_overrides = cfg.tolerances;
  const verify::SuiteResult suite = verify::run_suite(opt);
  emit(cfg, suite_report_json(opt, suite).dump(2) + "\n", out);
  // progress lines go to the error stream so stdout stays valid JSON when
  // no output file is given
  for (const auto& c : suite.criteria) err << criterion_line(c) << "\n";
  err << (suite.pass ? "verification suite: PASS" : "verification suite: FAIL") << "\n";
  return suite.pass ? kExitPass : kExitNumericalFailure;
}

}  // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  const int tol_status = detail::extract_tolerances(args, cfg.tolerances, err);
  if (tol_status != kExitPass) return tol_status;

  CLI::App app{"periodic ZS/Hill spectral laboratory"};
  app.add_option("--command", cfg.command,
                 "one of: discriminant, spectrum, actions, verify, flow, hamiltonians");
  app.add_option("--config", cfg.config_path, "JSON config file (flags override it)");
  app.add_option("--input", cfg.input_path, "potential JSON file");
  app.add_option("--output", cfg.output_path, "output file (stdout when omitted)");
  app.add_option("--field", cfg.field, "flow field for --command flow");
  app.add_option("--n-modes", cfg.n_modes, "Fourier truncation for generated corpora");
  app.add_option("--n-spec", cfg.n_spec, "eigenvalue pair range");
  app.add_option("--levels", cfg.levels, "action levels k (comma separated)")
      ->delimiter(',');
  app.add_option("--lambda-min", cfg.lambda_min, "sweep start");
  app.add_option("--lambda-max", cfg.lambda_max, "sweep end");
  app.add_option("--samples", cfg.samples, "sweep sample count");
  app.add_option("--t-end", cfg.t_end, "flow horizon");
  app.add_option("--dt", cfg.dt, "flow time step");
  app.add_option("--record-every", cfg.record_every, "flow record stride");
  app.add_option("--seed", cfg.seed, "seed for corpus generation");
  app.add_option("--corpus-size", cfg.corpus_size, "verification corpus size");

  // remember which flags the user set so they win over the config file
  std::vector<std::string> raw(args);
  try {
    std::vector<const char*> argv;
    argv.push_back("zslab");
    for (const auto& a : args) argv.push_back(a.c_str());
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return kExitPass;
    }
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (!cfg.config_path.empty()) {
      RunConfig from_file;
      from_file.tolerances = cfg.tolerances;
      std::ifstream in(cfg.config_path);
      if (!in) throw std::invalid_argument("cannot open config file: " + cfg.config_path);
      json j;
      try {
        j = json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("malformed JSON in " + cfg.config_path + ": " + e.what());
      }
      detail::apply_config_file(from_file, j);
      // flags override file values: re-apply every explicitly passed option
      for (const auto* opt : app.get_options()) {
        if (opt->count() == 0) continue;
        const std::string name = opt->get_name();
        if (name == "--command") from_file.command = cfg.command;
        else if (name == "--input") from_file.input_path = cfg.input_path;
        else if (name == "--output") from_file.output_path = cfg.output_path;
        else if (name == "--field") from_file.field = cfg.field;
        else if (name == "--n-modes") from_file.n_modes = cfg.n_modes;
        else if (name == "--n-spec") from_file.n_spec = cfg.n_spec;
        else if (name == "--levels") from_file.levels = cfg.levels;
        else if (name == "--lambda-min") from_file.lambda_min = cfg.lambda_min;
        else if (name == "--lambda-max") from_file.lambda_max = cfg.lambda_max;
        else if (name == "--samples") from_file.samples = cfg.samples;
        else if (name == "--t-end") from_file.t_end = cfg.t_end;
        else if (name == "--dt") from_file.dt = cfg.dt;
        else if (name == "--record-every") from_file.record_every = cfg.record_every;
        else if (name == "--seed") from_file.seed = cfg.seed;
        else if (name == "--corpus-size") from_file.corpus_size = cfg.corpus_size;
      }
      from_file.config_path = cfg.config_path;
      cfg = std::move(from_file);
    }

    if (cfg.command.empty()) {
      err << "usage error: --command is required\n";
      return kExitUsage;
    }
    const bool needs_input = cfg.command != "verify";
    if (needs_input && cfg.input_path.empty()) {
      err << "usage error: --command " << cfg.command << " requires --input\n";
      return kExitUsage;
    }

    if (cfg.command == "discriminant") return detail::run_discriminant(cfg, out);
    if (cfg.command == "spectrum") return detail::run_spectrum(cfg, out);
    if (cfg.command == "actions") return detail::run_actions(cfg, out);
    if (cfg.command == "hamiltonians") return detail::run_hamiltonians(cfg, out);
    if (cfg.command == "flow") return detail::run_flow(cfg, out);
    if (cfg.command == "verify") return detail::run_verify(cfg, out, err);
    err << "usage error: unknown command " << cfg.command << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumericalFailure;
  }
}

}  // namespace zslab::cli
