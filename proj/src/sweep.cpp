#include "ecp/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

namespace ecp {

void SweepSpec::validate() const {
  if (!(alpha_min > 0.0 && alpha_max < 1.0 && alpha_min < alpha_max))
    fail(ErrorKind::InvalidArgument,
         "need 0 < alpha_min < alpha_max < 1");
  if (steps < 2) fail(ErrorKind::InvalidArgument, "steps must be at least 2");
  if (rounds < 1) fail(ErrorKind::InvalidArgument, "rounds must be at least 1");
  if (n_photons < 2)
    fail(ErrorKind::InvalidArgument, "n_photons must be at least 2");
  if (!(eta_a >= 0.0 && eta_a <= 1.0 && eta_p >= 0.0 && eta_p <= 1.0))
    fail(ErrorKind::InvalidArgument, "detection efficiencies must lie in [0, 1]");
}

namespace {

SweepRow compute_row(const SweepSpec& spec, double alpha) {
  const double alpha_sq = alpha * alpha;
  ProtocolConfig config;
  config.alpha = alpha;
  config.beta = std::sqrt(1.0 - alpha_sq);
  config.n_photons = spec.n_photons;
  config.max_rounds = spec.rounds;
  config.eta_a = spec.eta_a;
  config.eta_p = spec.eta_p;
  const auto report = total_success_probability(config, spec.detection_model);

  SweepRow row{alpha, alpha_sq, report.total_success, report.rival_success, {}};
  row.per_round.reserve(report.per_round.size());
  for (const auto& entry : report.per_round)
    row.per_round.push_back(entry.p_weighted);
  return row;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

std::vector<SweepRow> compute_sweep(const SweepSpec& spec) {
  spec.validate();
  const int n = spec.steps;
  const double step = (spec.alpha_max - spec.alpha_min) / (n - 1);

  std::vector<SweepRow> rows(static_cast<std::size_t>(n));
  unsigned workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(n));

  // Each worker fills a disjoint stripe of the pre-sized vector; output
  // order is the grid order regardless of scheduling.
  auto fill = [&](unsigned worker) {
    for (int i = static_cast<int>(worker); i < n;
         i += static_cast<int>(workers)) {
      const double alpha =
          (i == n - 1) ? spec.alpha_max : spec.alpha_min + i * step;
      rows[static_cast<std::size_t>(i)] = compute_row(spec, alpha);
    }
  };

  if (workers == 1) {
    fill(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(fill, w);
    for (auto& t : pool) t.join();
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  if (rows.empty()) fail(ErrorKind::InvalidArgument, "no sweep rows to write");
  out << "alpha,alpha_sq,p_total_ours,p_total_rival";
  for (std::size_t k = 1; k <= rows.front().per_round.size(); ++k)
    out << ",per_round_p" << k;
  out << "\n";
  for (const auto& row : rows) {
    out << format_value(row.alpha) << ',' << format_value(row.alpha_sq) << ','
        << format_value(row.p_total_ours) << ','
        << format_value(row.p_total_rival);
    for (double p : row.per_round) out << ',' << format_value(p);
    out << "\n";
  }
  if (!out) fail(ErrorKind::IoError, "failed writing sweep CSV");
}

std::vector<SweepRow> parse_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    fail(ErrorKind::IoError, "sweep CSV is empty");

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) header.push_back(field);
  }
  const std::vector<std::string> fixed = {"alpha", "alpha_sq", "p_total_ours",
                                          "p_total_rival"};
  if (header.size() < fixed.size() + 1)
    fail(ErrorKind::IoError, "sweep CSV header is too short");
  for (std::size_t i = 0; i < fixed.size(); ++i)
    if (header[i] != fixed[i])
      fail(ErrorKind::IoError, "unexpected sweep CSV column '" + header[i] + "'");
  const std::size_t n_rounds = header.size() - fixed.size();
  for (std::size_t k = 0; k < n_rounds; ++k)
    if (header[fixed.size() + k] != "per_round_p" + std::to_string(k + 1))
      fail(ErrorKind::IoError, "unexpected per-round column name");

  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<double> values;
    while (std::getline(ss, field, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(field, &used);
      } catch (const std::exception&) {
        fail(ErrorKind::IoError, "non-numeric sweep CSV field '" + field + "'");
      }
      if (used != field.size())
        fail(ErrorKind::IoError, "non-numeric sweep CSV field '" + field + "'");
      values.push_back(v);
    }
    if (values.size() != header.size())
      fail(ErrorKind::IoError, "sweep CSV row has wrong field count");
    SweepRow row{values[0], values[1], values[2], values[3], {}};
    row.per_round.assign(values.begin() + 4, values.end());
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorKind::IoError, "sweep CSV has no data rows");
  return rows;
}

}  // namespace ecp
