#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ecp/cavity.hpp"
#include "ecp/json_io.hpp"
#include "ecp/protocol.hpp"
#include "ecp/stochastic.hpp"
#include "ecp/sweep.hpp"

namespace {

constexpr int kSchemaVersion = 1;
constexpr const char* kDescription =
    "Entanglement concentration for N-photon GHZ states via photonic "
    "Faraday rotation: exact simulation, closed-form probabilities and "
    "Monte Carlo detection modeling";

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream file(out_path);
  if (!file)
    ecp::fail(ecp::ErrorKind::IoError,
              "cannot open '" + out_path + "' for writing");
  file << text;
  if (!file)
    ecp::fail(ecp::ErrorKind::IoError, "failed writing '" + out_path + "'");
}

void emit_json(const std::string& out_path, nlohmann::json j) {
  j["schema_version"] = kSchemaVersion;
  emit(out_path, j.dump(2) + "\n");
}

double alpha_from_alpha2(double alpha2) {
  if (!(alpha2 > 0.0 && alpha2 < 1.0))
    ecp::fail(ecp::ErrorKind::InvalidArgument,
              "--alpha2 must lie strictly between 0 and 1");
  return std::sqrt(alpha2);
}

std::string phases_text(const ecp::FaradayPhases& phases) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "phi = %.15g\nphi0 = %.15g\nmag = %.15g\nmag0 = %.15g\n"
                "theta_minus = %.15g\ntheta_plus = %.15g\n",
                phases.phi, phases.phi0, phases.mag, phases.mag0,
                phases.theta_minus, phases.theta_plus);
  return buf;
}

struct EtaOptions {
  double eta_a = 0.8;
  double eta_p = 0.8;
  double eta_both = 0.8;
  CLI::Option* opt_a = nullptr;
  CLI::Option* opt_p = nullptr;
  CLI::Option* opt_both = nullptr;

  void attach(CLI::App* cmd) {
    opt_a = cmd->add_option("--eta-a", eta_a,
                            "Atom detection efficiency in [0,1]")
                ->capture_default_str();
    opt_p = cmd->add_option("--eta-p", eta_p,
                            "Photon detection efficiency in [0,1]")
                ->capture_default_str();
    opt_both = cmd->add_option(
        "--eta", eta_both,
        "Sets both efficiencies; --eta-a/--eta-p take precedence");
  }

  // --eta fills whichever specific efficiency was not given explicitly
  void resolve() {
    if (opt_both->count() > 0) {
      if (opt_a->count() == 0) eta_a = eta_both;
      if (opt_p->count() == 0) eta_p = eta_both;
    }
    if (!(eta_a >= 0.0 && eta_a <= 1.0 && eta_p >= 0.0 && eta_p <= 1.0))
      ecp::fail(ecp::ErrorKind::InvalidArgument,
                "--eta-a/--eta-p must lie in [0, 1]");
  }
};

struct Options {
  std::string config_path;

  // phases
  ecp::CavityParams cavity;
  double tol_mag = 0.1;
  bool phases_json = false;
  std::string phases_out;
  CLI::Option* omega0_opt = nullptr;

  // round
  double round_alpha2 = 0.0;
  int round_index = 1;
  int round_photons = 2;
  std::string round_out;

  // run
  double run_alpha2 = 0.0;
  int run_rounds = 5;
  int run_photons = 5;
  std::string run_model = "final";
  std::string run_out;
  EtaOptions run_eta;

  // sweep
  ecp::SweepSpec spec;
  std::string sweep_model = "final";
  std::string sweep_out = "-";
  EtaOptions sweep_eta;

  // compare
  double compare_alpha2 = 0.5;
  int compare_rounds = 5;
  int compare_photons = 5;
  std::string compare_model = "final";
  std::string compare_out;
  EtaOptions compare_eta;

  // mc
  double mc_alpha2 = 0.5;
  int mc_rounds = 5;
  int mc_photons = 5;
  std::string mc_model = "final";
  std::string mc_out;
  std::uint64_t mc_trials = 100000;
  std::uint64_t mc_seed = 0;
  EtaOptions mc_eta;
};

struct Subcommands {
  CLI::App* phases;
  CLI::App* round;
  CLI::App* run;
  CLI::App* sweep;
  CLI::App* compare;
  CLI::App* mc;
};

// One builder for both parse passes. The first pass runs with strict =
// false so that required flags may still arrive from a --config file; the
// second pass enforces them.
Subcommands build_app(CLI::App& app, Options& opt, bool strict) {
  app.require_subcommand(1);
  Subcommands subs{};

  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config_path,
                    "Flat key=value file of defaults; explicit flags override");
  };
  auto add_model = [&](CLI::App* cmd, std::string& target) {
    cmd->add_option("--detection-model", target,
                    "Detection accounting: final | per-round")
        ->check(CLI::IsMember({"final", "per-round"}))
        ->capture_default_str();
  };
  auto require_if_strict = [&](CLI::Option* option) {
    if (strict) option->required();
  };

  subs.phases =
      app.add_subcommand("phases", "Reflection phases and Faraday rotation angles");
  add_config(subs.phases);
  require_if_strict(
      subs.phases->add_option("--kappa", opt.cavity.kappa, "Cavity damping rate"));
  subs.phases->add_option("--gamma", opt.cavity.gamma, "Atomic decay rate")
      ->capture_default_str();
  require_if_strict(subs.phases->add_option("--omega-c", opt.cavity.omega_c,
                                            "Cavity field frequency"));
  opt.omega0_opt = subs.phases->add_option(
      "--omega-0", opt.cavity.omega_0,
      "Atomic transition frequency (default: omega-c)");
  require_if_strict(subs.phases->add_option("--omega-p", opt.cavity.omega_p,
                                            "Input photon frequency"));
  subs.phases->add_option("--g", opt.cavity.g, "Atom-cavity coupling strength")
      ->capture_default_str();
  subs.phases
      ->add_option("--tol-mag", opt.tol_mag,
                   "Accepted deviation of |r| from 1 before the pure-phase "
                   "treatment is rejected, in (0, 0.5]")
      ->capture_default_str();
  subs.phases->add_flag("--json", opt.phases_json, "Emit JSON instead of text");
  subs.phases->add_option("--out", opt.phases_out, "Output path ('-' = stdout)");

  subs.round = app.add_subcommand(
      "round", "Simulate one concentration round and its four branches");
  add_config(subs.round);
  require_if_strict(subs.round->add_option("--alpha2", opt.round_alpha2,
                                           "Initial |alpha|^2 in (0,1)"));
  subs.round
      ->add_option("--round-index", opt.round_index, "Concentration round k >= 1")
      ->capture_default_str();
  subs.round
      ->add_option("-N,--n-photons,--n", opt.round_photons,
                   "GHZ photon count N >= 2")
      ->capture_default_str();
  subs.round->add_option("--out", opt.round_out, "Output path ('-' = stdout)");

  subs.run = app.add_subcommand(
      "run", "Exact multi-round protocol run with closed-form cross-check");
  add_config(subs.run);
  require_if_strict(subs.run->add_option("--alpha2", opt.run_alpha2,
                                         "Initial |alpha|^2 in (0,1)"));
  subs.run->add_option("-K,--rounds", opt.run_rounds, "Concentration rounds K >= 1")
      ->capture_default_str();
  subs.run
      ->add_option("-N,--n-photons,--n", opt.run_photons,
                   "GHZ photon count N >= 2")
      ->capture_default_str();
  opt.run_eta.attach(subs.run);
  add_model(subs.run, opt.run_model);
  subs.run->add_option("--out", opt.run_out, "Output path ('-' = stdout)");

  subs.sweep =
      app.add_subcommand("sweep", "CSV of totals over a grid of real alpha values");
  add_config(subs.sweep);
  subs.sweep->add_option("--alpha-min", opt.spec.alpha_min, "Grid start, in (0,1)")
      ->capture_default_str();
  subs.sweep->add_option("--alpha-max", opt.spec.alpha_max, "Grid end, in (0,1)")
      ->capture_default_str();
  subs.sweep->add_option("--steps", opt.spec.steps, "Grid points >= 2")
      ->capture_default_str();
  subs.sweep
      ->add_option("-K,--rounds", opt.spec.rounds, "Concentration rounds K >= 1")
      ->capture_default_str();
  subs.sweep
      ->add_option("-N,--n-photons,--n", opt.spec.n_photons,
                   "Photon count used for the rival total")
      ->capture_default_str();
  opt.sweep_eta.attach(subs.sweep);
  add_model(subs.sweep, opt.sweep_model);
  subs.sweep->add_option("--out", opt.sweep_out, "CSV output path ('-' = stdout)")
      ->capture_default_str();

  subs.compare = app.add_subcommand(
      "compare", "Our total versus the two-copy protocol's total");
  add_config(subs.compare);
  subs.compare
      ->add_option("--alpha2", opt.compare_alpha2, "Initial |alpha|^2 in (0,1)")
      ->capture_default_str();
  subs.compare
      ->add_option("-K,--rounds", opt.compare_rounds,
                   "Concentration rounds K >= 1")
      ->capture_default_str();
  subs.compare
      ->add_option("-N,--n-photons,--n", opt.compare_photons,
                   "GHZ photon count N >= 2")
      ->capture_default_str();
  opt.compare_eta.attach(subs.compare);
  add_model(subs.compare, opt.compare_model);
  subs.compare->add_option("--out", opt.compare_out, "Output path ('-' = stdout)");

  subs.mc = app.add_subcommand(
      "mc", "Seeded Monte Carlo trials with imperfect detectors");
  add_config(subs.mc);
  subs.mc->add_option("--alpha2", opt.mc_alpha2, "Initial |alpha|^2 in (0,1)")
      ->capture_default_str();
  subs.mc->add_option("-K,--rounds", opt.mc_rounds, "Concentration rounds K >= 1")
      ->capture_default_str();
  subs.mc
      ->add_option("-N,--n-photons,--n", opt.mc_photons,
                   "GHZ photon count N >= 2")
      ->capture_default_str();
  opt.mc_eta.attach(subs.mc);
  add_model(subs.mc, opt.mc_model);
  subs.mc->add_option("--trials", opt.mc_trials, "Number of trials >= 1")
      ->capture_default_str();
  require_if_strict(
      subs.mc->add_option("--seed", opt.mc_seed, "64-bit generator seed"));
  subs.mc->add_option("--out", opt.mc_out, "Output path ('-' = stdout)");

  return subs;
}

std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::string& path) {
  std::ifstream file(path);
  if (!file)
    ecp::fail(ecp::ErrorKind::IoError, "cannot read config file '" + path + "'");
  auto trim = [](std::string s) {
    const auto from = s.find_first_not_of(" \t\r");
    const auto to = s.find_last_not_of(" \t\r");
    return from == std::string::npos ? std::string() : s.substr(from, to - from + 1);
  };
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      ecp::fail(ecp::ErrorKind::InvalidArgument,
                "config line " + std::to_string(line_no) +
                    " is not of the form key=value");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty())
      ecp::fail(ecp::ErrorKind::InvalidArgument,
                "config line " + std::to_string(line_no) + " has an empty key");
    entries.emplace_back(key, value);
  }
  return entries;
}

ecp::ProtocolConfig protocol_config(double alpha2, int n_photons, int rounds,
                                    const EtaOptions& eta) {
  ecp::ProtocolConfig config;
  config.alpha = alpha_from_alpha2(alpha2);
  config.beta = std::sqrt(1.0 - alpha2);
  config.n_photons = n_photons;
  config.max_rounds = rounds;
  config.eta_a = eta.eta_a;
  config.eta_p = eta.eta_p;
  return config;
}

int dispatch(const CLI::App& app, const Subcommands& subs, Options& opt) {
  if (app.got_subcommand(subs.phases)) {
    if (opt.omega0_opt->count() == 0) opt.cavity.omega_0 = opt.cavity.omega_c;
    const auto phases = ecp::faraday_phases(opt.cavity, opt.tol_mag);
    if (opt.phases_json) {
      emit_json(opt.phases_out, ecp::to_json(phases));
    } else {
      emit(opt.phases_out, phases_text(phases));
    }
  } else if (app.got_subcommand(subs.round)) {
    const double alpha = alpha_from_alpha2(opt.round_alpha2);
    const double beta = std::sqrt(1.0 - opt.round_alpha2);
    if (opt.round_index < 1)
      ecp::fail(ecp::ErrorKind::InvalidArgument,
                "--round-index must be at least 1");
    ecp::RoundCoefficients coeffs{alpha, beta, 1};
    for (int j = 1; j < opt.round_index; ++j)
      coeffs = ecp::coefficient_recurrence(coeffs);
    const auto entangled = ecp::build_initial_state(
        coeffs.alpha_k, coeffs.beta_k, opt.round_photons);
    const auto aux = ecp::build_auxiliary_photon(opt.round_index, alpha, beta);
    const auto outcomes = ecp::run_round(entangled, aux, coeffs);

    nlohmann::json outcome_list = nlohmann::json::array();
    for (const auto& outcome : outcomes)
      outcome_list.push_back(ecp::to_json(outcome));
    emit_json(opt.round_out,
              {{"k", opt.round_index},
               {"n_photons", opt.round_photons},
               {"alpha_k", {coeffs.alpha_k.real(), coeffs.alpha_k.imag()}},
               {"beta_k", {coeffs.beta_k.real(), coeffs.beta_k.imag()}},
               {"outcomes", outcome_list}});
  } else if (app.got_subcommand(subs.run)) {
    opt.run_eta.resolve();
    const auto config = protocol_config(opt.run_alpha2, opt.run_photons,
                                        opt.run_rounds, opt.run_eta);
    const auto result =
        ecp::run_protocol_exact(config, ecp::parse_detection_model(opt.run_model));
    emit_json(opt.run_out, ecp::to_json(result.report));
  } else if (app.got_subcommand(subs.sweep)) {
    opt.sweep_eta.resolve();
    opt.spec.eta_a = opt.sweep_eta.eta_a;
    opt.spec.eta_p = opt.sweep_eta.eta_p;
    opt.spec.detection_model = ecp::parse_detection_model(opt.sweep_model);
    const auto rows = ecp::compute_sweep(opt.spec);
    std::ostringstream csv;
    ecp::write_sweep_csv(rows, csv);
    emit(opt.sweep_out, csv.str());
  } else if (app.got_subcommand(subs.compare)) {
    opt.compare_eta.resolve();
    const auto config = protocol_config(opt.compare_alpha2, opt.compare_photons,
                                        opt.compare_rounds, opt.compare_eta);
    const auto report = ecp::total_success_probability(
        config, ecp::parse_detection_model(opt.compare_model));
    nlohmann::json j{{"config", ecp::to_json(config)},
                     {"detection_model", to_string(report.detection_model)},
                     {"p_total_ours", report.total_success},
                     {"p_total_rival", report.rival_success}};
    j["ratio"] = report.rival_success > 0.0
                     ? nlohmann::json(report.total_success / report.rival_success)
                     : nlohmann::json(nullptr);
    emit_json(opt.compare_out, std::move(j));
  } else if (app.got_subcommand(subs.mc)) {
    opt.mc_eta.resolve();
    const auto config = protocol_config(opt.mc_alpha2, opt.mc_photons,
                                        opt.mc_rounds, opt.mc_eta);
    const auto model = ecp::parse_detection_model(opt.mc_model);
    const auto report = ecp::sample_protocol(config, model, opt.mc_trials,
                                             opt.mc_seed);
    nlohmann::json j = ecp::to_json(report);
    j["convergence"] = ecp::to_json(ecp::convergence_check(report));
    emit_json(opt.mc_out, std::move(j));
  }
  return 0;
}

std::vector<std::string> reversed(std::vector<std::string> args) {
  std::reverse(args.begin(), args.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);

  try {
    // First pass: nothing required, just to learn which subcommand runs,
    // which flags were given explicitly and whether --config points at a
    // defaults file.
    Options probe_options;
    CLI::App probe_app{kDescription};
    const auto probe_subs = build_app(probe_app, probe_options, false);
    try {
      probe_app.parse(reversed(args));
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) {
        // help or version: regenerate from a strict app so REQUIRED
        // annotations show up
        Options help_options;
        CLI::App help_app{kDescription};
        build_app(help_app, help_options, true);
        try {
          help_app.parse(reversed(args));
        } catch (const CLI::ParseError& e2) {
          return help_app.exit(e2) == 0 ? 0 : 2;
        }
        return 0;
      }
      const int code = probe_app.exit(e);
      return code == 0 ? 0 : 2;
    }

    if (!probe_options.config_path.empty()) {
      const CLI::App* used = nullptr;
      for (const CLI::App* sub :
           {probe_subs.phases, probe_subs.round, probe_subs.run,
            probe_subs.sweep, probe_subs.compare, probe_subs.mc})
        if (probe_app.got_subcommand(sub)) used = sub;
      for (const auto& [key, value] : read_config_file(probe_options.config_path)) {
        const auto* option = used->get_option_no_throw("--" + key);
        if (option == nullptr)
          ecp::fail(ecp::ErrorKind::InvalidArgument,
                    "config key '" + key + "' is not a flag of subcommand '" +
                        used->get_name() + "'");
        // single-token form so flag-style options (e.g. json=true) work too
        if (option->count() == 0) args.push_back("--" + key + "=" + value);
      }
    }

    // Second pass: strict parse of the command line plus injected defaults.
    Options options;
    CLI::App app{kDescription};
    const auto subs = build_app(app, options, true);
    try {
      app.parse(reversed(args));
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e);
      return code == 0 ? 0 : 2;
    }
    return dispatch(app, subs, options);
  } catch (const ecp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ecp::ErrorKind::InternalCheckFailed ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
