#include "ecp/stochastic.hpp"

#include <algorithm>
#include <cmath>

namespace ecp {

const char* to_string(TrialTerminal t) noexcept {
  switch (t) {
    case TrialTerminal::Success: return "success";
    case TrialTerminal::ExhaustedRounds: return "exhausted_rounds";
    case TrialTerminal::DetectionLoss: return "detection_loss";
  }
  return "?";
}

std::vector<BranchTable> memoized_branch_tables(const ProtocolConfig& config) {
  const auto exact = run_protocol_exact(config, DetectionModel::FinalDetection);
  std::vector<BranchTable> tables;
  tables.reserve(static_cast<std::size_t>(config.max_rounds));
  for (const auto& round : exact.rounds) {
    BranchTable table{};
    for (const auto& outcome : round.outcomes)
      table[static_cast<int>(outcome.label)] = outcome.probability;
    tables.push_back(table);
  }
  // Rounds past the double-precision degeneracy wall never succeed; the
  // fail split is bookkeeping only.
  while (tables.size() < static_cast<std::size_t>(config.max_rounds))
    tables.push_back({0.0, 0.0, 0.5, 0.5});
  return tables;
}

namespace {

OutcomeLabel sample_branch(Xoshiro256StarStar& rng, const BranchTable& table) {
  const double u = rng.uniform01();
  double cumulative = 0.0;
  for (int i = 0; i < 3; ++i) {
    cumulative += table[i];
    if (u < cumulative) return static_cast<OutcomeLabel>(i);
  }
  return OutcomeLabel::FailMinus;
}

}  // namespace

void run_single_trial(std::uint64_t trial_id, Xoshiro256StarStar& rng,
                      const std::vector<BranchTable>& tables,
                      DetectionModel model, double eta_a, double eta_p,
                      TrialRecord& out) {
  out.trial_id = trial_id;
  out.rounds.clear();
  out.terminal = TrialTerminal::ExhaustedRounds;
  out.success_round = 0;

  for (std::size_t i = 0; i < tables.size(); ++i) {
    const int k = static_cast<int>(i) + 1;
    const OutcomeLabel label = sample_branch(rng, tables[i]);
    const bool photon_fired = rng.bernoulli(eta_p);
    const bool atom_fired = rng.bernoulli(eta_a);
    out.rounds.push_back({k, label, photon_fired, atom_fired});

    const bool detected = photon_fired && atom_fired;
    if (model == DetectionModel::PerRoundDetection && !detected) {
      out.terminal = TrialTerminal::DetectionLoss;
      return;
    }
    if (is_success(label)) {
      if (detected) {
        out.terminal = TrialTerminal::Success;
        out.success_round = k;
      } else {
        out.terminal = TrialTerminal::DetectionLoss;
      }
      return;
    }
  }
}

EmpiricalReport sample_protocol(const ProtocolConfig& config,
                                DetectionModel model, std::uint64_t n_trials,
                                std::uint64_t seed) {
  config.validate();
  if (n_trials < 1)
    fail(ErrorKind::InvalidArgument, "n_trials must be at least 1");

  EmpiricalReport report;
  report.n_trials = n_trials;
  report.seed = seed;
  report.detection_model = model;
  report.analytic_reference = total_success_probability(config, model);

  const auto tables = memoized_branch_tables(config);
  std::vector<std::uint64_t> success_counts(tables.size(), 0);
  std::uint64_t total_count = 0;

  TrialRecord scratch;
  scratch.rounds.reserve(tables.size());
  for (std::uint64_t trial = 0; trial < n_trials; ++trial) {
    Xoshiro256StarStar rng(derive_substream_seed(seed, trial));
    run_single_trial(trial, rng, tables, model, config.eta_a, config.eta_p,
                     scratch);
    if (scratch.terminal == TrialTerminal::Success) {
      ++success_counts[scratch.success_round - 1];
      ++total_count;
    }
  }

  const double inv_n = 1.0 / static_cast<double>(n_trials);
  report.per_round_success_frequency.resize(tables.size());
  double max_dev = 0.0;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const double freq = static_cast<double>(success_counts[i]) * inv_n;
    report.per_round_success_frequency[i] = freq;
    max_dev = std::max(
        max_dev,
        std::abs(freq - report.analytic_reference.per_round[i].p_weighted));
  }
  report.total_success_frequency = static_cast<double>(total_count) * inv_n;
  max_dev = std::max(max_dev,
                     std::abs(report.total_success_frequency -
                              report.analytic_reference.total_success));
  report.max_abs_deviation = max_dev;
  return report;
}

namespace {

ZScoreEntry score_entry(int k, double frequency, double analytic,
                        std::uint64_t n) {
  ZScoreEntry entry{k, frequency, analytic, 0.0, false, false};
  if (analytic == 0.0 || analytic == 1.0) {
    entry.degenerate = true;
    entry.pass = frequency == analytic;
    return entry;
  }
  const double sigma =
      std::sqrt(analytic * (1.0 - analytic) / static_cast<double>(n));
  entry.z = (frequency - analytic) / sigma;
  entry.pass = std::abs(entry.z) <= 4.0;
  return entry;
}

}  // namespace

ConvergenceResult convergence_check(const EmpiricalReport& report) {
  if (report.n_trials < 100)
    fail(ErrorKind::InvalidArgument,
         "convergence check needs at least 100 trials");
  if (report.per_round_success_frequency.size() !=
      report.analytic_reference.per_round.size())
    fail(ErrorKind::InvalidArgument,
         "report and analytic reference cover different round counts");

  ConvergenceResult result;
  result.pass = true;
  for (std::size_t i = 0; i < report.per_round_success_frequency.size(); ++i) {
    auto entry = score_entry(static_cast<int>(i) + 1,
                             report.per_round_success_frequency[i],
                             report.analytic_reference.per_round[i].p_weighted,
                             report.n_trials);
    result.pass = result.pass && entry.pass;
    result.per_round.push_back(entry);
  }
  result.total =
      score_entry(0, report.total_success_frequency,
                  report.analytic_reference.total_success, report.n_trials);
  result.pass = result.pass && result.total.pass;
  return result;
}

}  // namespace ecp
