#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>
#include <string>
#include <vector>

#include "ecp/rng.hpp"
#include "ecp/state.hpp"

#include "oracle_dense.hpp"

namespace testutil {

using ecp::Amplitude;
using ecp::Basis;
using ecp::BasisKey;
using ecp::BasisSymbol;
using ecp::PureState;

struct Rng {
  explicit Rng(std::uint64_t seed) : gen(seed) {}

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * gen.uniform01();
  }
  int pick(int n) { return static_cast<int>(gen.next() % n); }
  Amplitude unit_phase() {
    return std::polar(1.0, uniform(-3.141592653589793, 3.141592653589793));
  }
  // alpha real in (0.05, 0.95) by squared value, beta = sqrt(1 - alpha^2)
  std::pair<double, double> coefficient_pair() {
    const double a2 = uniform(0.05, 0.95);
    return {std::sqrt(a2), std::sqrt(1.0 - a2)};
  }

  ecp::Xoshiro256StarStar gen;
};

// Haar-ish random 2x2 unitary from its Euler-angle parametrization;
// exactly unitary up to rounding.
inline ecp::Mat2 random_unitary(Rng& rng) {
  const double theta = rng.uniform(0.0, 1.5707963267948966);
  const Amplitude p1 = rng.unit_phase();
  const Amplitude p2 = rng.unit_phase();
  const Amplitude global = rng.unit_phase();
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {{{global * p1 * c, global * p2 * s},
           {-global * std::conj(p2) * s, global * std::conj(p1) * c}}};
}

// Random layout + random sparse terms, honoring per-slot basis discipline.
inline PureState random_state(Rng& rng, int max_slots = 4, int max_terms = 6) {
  const int n = 1 + rng.pick(max_slots);
  std::vector<ecp::Slot> slots;
  std::vector<Basis> bases;
  const int atom_at = rng.pick(n + 1);  // n means "no atom"
  for (int i = 0; i < n; ++i) {
    if (i == atom_at) {
      slots.push_back({ecp::SlotRole::Atom, "s" + std::to_string(i)});
      bases.push_back(Basis::AtomGround);
    } else {
      slots.push_back({ecp::SlotRole::Photon, "s" + std::to_string(i)});
      bases.push_back(rng.pick(2) == 0 ? Basis::Circular : Basis::Linear);
    }
  }

  const int want = 1 + rng.pick(max_terms);
  std::set<BasisKey> keys;
  for (int t = 0; t < want; ++t) {
    BasisKey key(n);
    for (int i = 0; i < n; ++i) key[i] = ecp::basis_symbol(bases[i], rng.pick(2));
    keys.insert(key);
  }
  std::vector<std::pair<BasisKey, Amplitude>> terms;
  for (const auto& key : keys)
    terms.emplace_back(key, Amplitude(rng.uniform(-1.0, 1.0),
                                      rng.uniform(-1.0, 1.0)));
  // guard against an all-tiny draw
  terms.front().second += Amplitude(1.0, 0.0);
  return make_state(ecp::SlotLayout{slots}, terms);
}

// Largest per-term amplitude difference over the union of keys.
inline double max_term_delta(const PureState& a, const PureState& b) {
  double delta = 0.0;
  for (const auto& [key, amp] : a.terms())
    delta = std::max(delta, std::abs(amp - b.amplitude(key)));
  for (const auto& [key, amp] : b.terms())
    delta = std::max(delta, std::abs(amp - a.amplitude(key)));
  return delta;
}

// Sparse state -> dense oracle vector (slot order preserved).
inline oracle::Dense to_dense(const PureState& state) {
  oracle::Dense d = oracle::zeros(static_cast<int>(state.num_slots()));
  for (const auto& [key, amp] : state.terms()) {
    std::vector<int> bits;
    bits.reserve(key.size());
    for (auto s : key) bits.push_back(ecp::symbol_index(s));
    d.amp[oracle::index_of(d.n, bits)] = amp;
  }
  return d;
}

}  // namespace testutil
