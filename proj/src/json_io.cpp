#include "ecp/json_io.hpp"

namespace ecp {

namespace {

nlohmann::json complex_json(std::complex<double> z) {
  return nlohmann::json::array({z.real(), z.imag()});
}

}  // namespace

nlohmann::json to_json(const FaradayPhases& phases) {
  return {{"phi", phases.phi},
          {"phi0", phases.phi0},
          {"mag", phases.mag},
          {"mag0", phases.mag0},
          {"theta_minus", phases.theta_minus},
          {"theta_plus", phases.theta_plus}};
}

nlohmann::json to_json(const PureState& state) {
  nlohmann::json slots = nlohmann::json::array();
  for (std::size_t i = 0; i < state.num_slots(); ++i) {
    const auto& slot = state.layout().at(i);
    slots.push_back({{"name", slot.name},
                     {"role", to_string(slot.role)},
                     {"basis", to_string(state.slot_basis(i))}});
  }
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [key, amp] : state.terms()) {
    nlohmann::json symbols = nlohmann::json::array();
    for (auto s : key) symbols.push_back(to_string(s));
    terms.push_back({{"key", symbols}, {"amplitude", complex_json(amp)}});
  }
  return {{"slots", slots}, {"terms", terms}};
}

nlohmann::json to_json(const RoundOutcome& outcome) {
  return {{"label", to_string(outcome.label)},
          {"detector",
           {{"photon", to_string(outcome.detector_photon)},
            {"atom", to_string(outcome.detector_atom)}}},
          {"probability", outcome.probability},
          {"corrected", outcome.corrected},
          {"post_state", to_json(outcome.post_state)}};
}

nlohmann::json to_json(const ProtocolConfig& config) {
  return {{"alpha", complex_json(config.alpha)},
          {"beta", complex_json(config.beta)},
          {"n_photons", config.n_photons},
          {"max_rounds", config.max_rounds},
          {"eta_a", config.eta_a},
          {"eta_p", config.eta_p}};
}

nlohmann::json to_json(const ProtocolReport& report) {
  nlohmann::json per_round = nlohmann::json::array();
  for (const auto& entry : report.per_round)
    per_round.push_back({{"k", entry.k},
                         {"p_unconditional", entry.p_unconditional},
                         {"p_conditional", entry.p_conditional},
                         {"p_weighted", entry.p_weighted},
                         {"alpha_k", complex_json(entry.coeffs.alpha_k)},
                         {"beta_k", complex_json(entry.coeffs.beta_k)}});
  return {{"config", to_json(report.config)},
          {"detection_model", to_string(report.detection_model)},
          {"per_round", per_round},
          {"total_success", report.total_success},
          {"rival_success", report.rival_success}};
}

nlohmann::json to_json(const EmpiricalReport& report) {
  return {{"n_trials", report.n_trials},
          {"seed", report.seed},
          {"detection_model", to_string(report.detection_model)},
          {"per_round_success_frequency", report.per_round_success_frequency},
          {"total_success_frequency", report.total_success_frequency},
          {"max_abs_deviation", report.max_abs_deviation},
          {"analytic_reference", to_json(report.analytic_reference)}};
}

nlohmann::json to_json(const ConvergenceResult& result) {
  auto entry_json = [](const ZScoreEntry& entry) {
    return nlohmann::json{{"k", entry.k},
                          {"frequency", entry.frequency},
                          {"analytic", entry.analytic},
                          {"z", entry.z},
                          {"degenerate", entry.degenerate},
                          {"pass", entry.pass}};
  };
  nlohmann::json per_round = nlohmann::json::array();
  for (const auto& entry : result.per_round) per_round.push_back(entry_json(entry));
  return {{"pass", result.pass},
          {"per_round", per_round},
          {"total", entry_json(result.total)}};
}

}  // namespace ecp
