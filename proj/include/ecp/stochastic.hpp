#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ecp/protocol.hpp"
#include "ecp/rng.hpp"

namespace ecp {

enum class TrialTerminal { Success, ExhaustedRounds, DetectionLoss };

const char* to_string(TrialTerminal t) noexcept;

struct TrialRound {
  int k;
  OutcomeLabel label;
  bool photon_fired;
  bool atom_fired;
};

// Round-by-round trace of one Monte Carlo trial.
struct TrialRecord {
  std::uint64_t trial_id = 0;
  std::vector<TrialRound> rounds;
  TrialTerminal terminal = TrialTerminal::ExhaustedRounds;
  int success_round = 0;  // 0 when the trial did not succeed
};

// Conditional branch probabilities of one round, indexed by OutcomeLabel.
using BranchTable = std::array<double, 4>;

// One exact run_round per round of the chain; trials sample from these
// tables instead of re-simulating amplitudes.
std::vector<BranchTable> memoized_branch_tables(const ProtocolConfig& config);

// Samples one trial. Per executed round the generator is consumed in a
// fixed order: branch uniform, photon Bernoulli(eta_p), atom
// Bernoulli(eta_a). Detection loss ends the trial in both models; the
// models differ in which detections are required (success round only
// versus every round).
void run_single_trial(std::uint64_t trial_id, Xoshiro256StarStar& rng,
                      const std::vector<BranchTable>& tables,
                      DetectionModel model, double eta_a, double eta_p,
                      TrialRecord& out);

struct EmpiricalReport {
  std::uint64_t n_trials = 0;
  std::uint64_t seed = 0;
  DetectionModel detection_model = DetectionModel::FinalDetection;
  std::vector<double> per_round_success_frequency;  // index k-1
  double total_success_frequency = 0.0;
  ProtocolReport analytic_reference;
  double max_abs_deviation = 0.0;  // worst |frequency - weighted analytic|
};

// Deterministic given (seed, config, n_trials, model): trial i draws from
// the substream derive_substream_seed(seed, i).
EmpiricalReport sample_protocol(const ProtocolConfig& config,
                                DetectionModel model, std::uint64_t n_trials,
                                std::uint64_t seed);

struct ZScoreEntry {
  int k;  // 0 for the total row
  double frequency;
  double analytic;
  double z;         // 0 when degenerate
  bool degenerate;  // analytic is exactly 0 or 1; compared exactly
  bool pass;
};

struct ConvergenceResult {
  bool pass = false;
  std::vector<ZScoreEntry> per_round;
  ZScoreEntry total{};
};

// Binomial z-scores of the empirical frequencies against the weighted
// analytic probabilities; passes when every |z| <= 4. Degenerate entries
// (analytic 0 or 1) are compared exactly. Requires n_trials >= 100.
ConvergenceResult convergence_check(const EmpiricalReport& report);

}  // namespace ecp
