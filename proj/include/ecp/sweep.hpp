#pragma once

#include <iosfwd>
#include <vector>

#include "ecp/protocol.hpp"

namespace ecp {

// Sweep over a real coefficient grid alpha in (0, 1), beta = sqrt(1 - alpha^2).
struct SweepSpec {
  double alpha_min = 0.01;
  double alpha_max = 0.99;
  int steps = 99;  // >= 2, endpoints included
  int rounds = 5;
  int n_photons = 5;
  double eta_a = 0.8;
  double eta_p = 0.8;
  DetectionModel detection_model = DetectionModel::FinalDetection;

  void validate() const;
};

struct SweepRow {
  double alpha;
  double alpha_sq;
  double p_total_ours;
  double p_total_rival;
  std::vector<double> per_round;  // weighted round probabilities; sums to ours
};

// Rows are computed in parallel and returned in grid order.
std::vector<SweepRow> compute_sweep(const SweepSpec& spec);

// Columns: alpha,alpha_sq,p_total_ours,p_total_rival,per_round_p1..pK,
// all values at 12 significant digits.
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

std::vector<SweepRow> parse_sweep_csv(std::istream& in);

}  // namespace ecp
