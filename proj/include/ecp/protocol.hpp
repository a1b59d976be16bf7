#pragma once

#include <complex>
#include <string>
#include <vector>

#include "ecp/state.hpp"

namespace ecp {

// How detector inefficiency enters the total success probability.
// FinalDetection charges eta_a * eta_p once per successful run, whatever
// round it succeeds in. PerRoundDetection charges it for every round on
// the path, i.e. (eta_a * eta_p)^k for success in round k.
enum class DetectionModel { FinalDetection, PerRoundDetection };

const char* to_string(DetectionModel m) noexcept;
DetectionModel parse_detection_model(std::string_view text);

struct ProtocolConfig {
  std::complex<double> alpha{kInvSqrt2, 0.0};
  std::complex<double> beta{kInvSqrt2, 0.0};
  int n_photons = 2;   // N >= 2
  int max_rounds = 1;  // K >= 1
  double eta_a = 1.0;  // atom detection efficiency
  double eta_p = 1.0;  // photon detection efficiency

  void validate() const;
};

// Entanglement coefficients of the shared state entering round k.
struct RoundCoefficients {
  std::complex<double> alpha_k{kInvSqrt2, 0.0};
  std::complex<double> beta_k{kInvSqrt2, 0.0};
  int round_index = 1;

  void validate() const;
};

enum class OutcomeLabel { SuccessPlus, SuccessMinus, FailPlus, FailMinus };

const char* to_string(OutcomeLabel label) noexcept;

constexpr bool is_success(OutcomeLabel label) noexcept {
  return label == OutcomeLabel::SuccessPlus || label == OutcomeLabel::SuccessMinus;
}

// One measurement branch of a concentration round, after classification
// and (for '-' branches) the phase-flip correction on Alice's photon.
struct RoundOutcome {
  OutcomeLabel label;
  BasisSymbol detector_photon;  // auxiliary photon detector, H or V
  BasisSymbol detector_atom;    // atom detector, gL or gR
  double probability;           // conditional on reaching this round
  PureState post_state;         // over the payload photons, corrected
  bool corrected;
};

struct PerRoundEntry {
  int k;
  double p_unconditional;  // success first happens in round k, at eta = 1
  double p_conditional;    // success given rounds 1..k-1 failed
  double p_weighted;       // p_unconditional times the detection weight
  RoundCoefficients coeffs;
};

struct ProtocolReport {
  ProtocolConfig config;
  DetectionModel detection_model = DetectionModel::FinalDetection;
  std::vector<PerRoundEntry> per_round;
  double total_success = 0.0;  // sum of weighted per-round probabilities
  double rival_success = 0.0;  // two-copy protocol total for the same config
};

struct ExactRound {
  int k;
  RoundCoefficients coeffs;
  std::vector<RoundOutcome> outcomes;  // SuccessPlus, SuccessMinus, FailPlus, FailMinus
};

struct ExactRunResult {
  ProtocolReport report;
  std::vector<ExactRound> rounds;
};

// Hadamard for the atom sublevels (laser pulse) and for the auxiliary
// photon (quarter-wave plate, circular -> linear): (1/sqrt2)[[1,1],[1,-1]].
Mat2 hadamard_matrix();

// diag(1, -1); converts a '-' branch into its '+' partner when applied to
// Alice's photon in the circular basis.
Mat2 phase_flip_matrix();

// alpha |L, R..R> + beta |R, L..L> over slots a1, b1..b(N-1).
PureState build_initial_state(std::complex<double> alpha,
                              std::complex<double> beta, int n_photons);

// Auxiliary photon for round k, proportional to
// (alpha^(2^(k-1)), beta^(2^(k-1))) and normalized; slot a2.
PureState build_auxiliary_photon(int k, std::complex<double> alpha,
                                 std::complex<double> beta);

// Runs one concentration round: composes the atom (|gL>+|gR>)/sqrt2 and the
// auxiliary photon onto the entangled state, reflects Alice's photon and the
// auxiliary photon off the cavity, applies both Hadamards, measures
// (auxiliary photon, atom), classifies the four branches against their
// target forms and corrects the '-' ones. Returns the outcomes ordered
// SuccessPlus, SuccessMinus, FailPlus, FailMinus.
std::vector<RoundOutcome> run_round(const PureState& entangled,
                                    const PureState& aux,
                                    const RoundCoefficients& coeffs);

// (alpha_k^2, beta_k^2) renormalized: the coefficients of the fail branch.
RoundCoefficients coefficient_recurrence(const RoundCoefficients& c);

// Unconditional probability that success first happens in round k, at
// perfect detection: P_1 = 2|ab|^2 and
// P_k = 2|ab|^(2^k) / prod_{j=2..k} (|a|^(2^j) + |b|^(2^j)).
double analytic_round_probability(int k, std::complex<double> alpha,
                                  std::complex<double> beta);

// Detection weight applied to round k's unconditional probability.
double detection_weight(DetectionModel model, int k, double eta_a, double eta_p);

// Closed-form report: per-round probabilities from the coefficient
// recurrence, total weighted by the detection model, rival total attached.
ProtocolReport total_success_probability(const ProtocolConfig& config,
                                         DetectionModel model);

// Total of the two-copy concentration protocol this one improves on:
// eta_p^N * eta_a * 2|ab|^2, which decays exponentially in N.
double peng_success_probability(std::complex<double> alpha,
                                std::complex<double> beta, int n_photons,
                                double eta_a, double eta_p);

// Chains run_round over the fail branch for max_rounds rounds, checks the
// simulated probabilities against analytic_round_probability and certifies
// success branches maximally entangled. The report matches
// total_success_probability's within 1e-10.
ExactRunResult run_protocol_exact(
    const ProtocolConfig& config,
    DetectionModel model = DetectionModel::FinalDetection);

}  // namespace ecp
