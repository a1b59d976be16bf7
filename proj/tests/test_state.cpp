#include <doctest.h>

#include <cmath>
#include <complex>

#include "ecp/cavity.hpp"
#include "ecp/protocol.hpp"
#include "ecp/state.hpp"

#include "test_helpers.hpp"

using namespace ecp;
using testutil::Rng;

namespace {

const BasisSymbol L = BasisSymbol::L;
const BasisSymbol R = BasisSymbol::R;
const BasisSymbol H = BasisSymbol::H;
const BasisSymbol V = BasisSymbol::V;
const BasisSymbol gL = BasisSymbol::GroundL;
const BasisSymbol gR = BasisSymbol::GroundR;

SlotLayout photon_layout(int n) {
  std::vector<Slot> slots;
  for (int i = 0; i < n; ++i)
    slots.push_back({SlotRole::Photon, "p" + std::to_string(i)});
  return SlotLayout{slots};
}

}  // namespace

TEST_CASE("make_state normalizes equal weights") {
  const auto state = make_state(photon_layout(1), {{{L}, 1.0}, {{R}, 1.0}});
  CHECK(state.amplitude({L}).real() == doctest::Approx(kInvSqrt2).epsilon(1e-14));
  CHECK(state.amplitude({R}).real() == doctest::Approx(kInvSqrt2).epsilon(1e-14));
  CHECK(state.norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("make_state keeps an already normalized two-photon state") {
  const double alpha = std::sqrt(0.8), beta = std::sqrt(0.2);
  const auto state =
      make_state(photon_layout(2), {{{L, R}, alpha}, {{R, L}, beta}});
  CHECK(std::abs(state.amplitude({L, R}) - Amplitude(alpha)) < 1e-14);
  CHECK(std::abs(state.amplitude({R, L}) - Amplitude(beta)) < 1e-14);
}

TEST_CASE("make_state rejects degenerate and malformed inputs") {
  CHECK_THROWS_WITH_AS(make_state(photon_layout(1), {{{L}, 0.0}, {{R}, 0.0}}),
                       doctest::Contains("EmptyState"), Error);
  CHECK_THROWS_WITH_AS(make_state(photon_layout(2), {{{L, R}, 1.0}, {{L, H}, 1.0}}),
                       doctest::Contains("BasisMismatch"), Error);
  CHECK_THROWS_WITH_AS(make_state(photon_layout(2), {{{L}, 1.0}}),
                       doctest::Contains("ArityMismatch"), Error);
  // an atom slot cannot carry photon polarization
  const SlotLayout mixed{{{SlotRole::Photon, "p"}, {SlotRole::Atom, "c"}}};
  CHECK_THROWS_WITH_AS(make_state(mixed, {{{L, R}, 1.0}}),
                       doctest::Contains("BasisMismatch"), Error);
}

TEST_CASE("layout rejects duplicate names and multiple atoms") {
  CHECK_THROWS_AS(SlotLayout({{SlotRole::Photon, "p"}, {SlotRole::Photon, "p"}}),
                  Error);
  CHECK_THROWS_AS(SlotLayout({{SlotRole::Atom, "c"}, {SlotRole::Atom, "d"}}),
                  Error);
}

TEST_CASE("quarter-wave plate maps |L> to (|H>+|V>)/sqrt2") {
  const auto state = make_state(photon_layout(1), {{{L}, 1.0}});
  const auto rotated =
      apply_1slot_gate(state, "p0", hadamard_matrix(), Basis::Linear);
  CHECK(std::abs(rotated.amplitude({H}) - Amplitude(kInvSqrt2)) < 1e-14);
  CHECK(std::abs(rotated.amplitude({V}) - Amplitude(kInvSqrt2)) < 1e-14);
  CHECK(rotated.slot_basis(0) == Basis::Linear);
}

TEST_CASE("atom Hadamard is an involution") {
  const SlotLayout layout{{{SlotRole::Atom, "c"}}};
  const auto state = make_state(layout, {{{gL}, 1.0}});
  auto once = apply_1slot_gate(state, "c", hadamard_matrix(), Basis::AtomGround);
  auto twice = apply_1slot_gate(once, "c", hadamard_matrix(), Basis::AtomGround);
  CHECK(fidelity(twice, state) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("phase flip turns the '-' superposition into the '+' one") {
  const auto minus = make_state(photon_layout(1), {{{L}, 1.0}, {{R}, -1.0}});
  const auto plus = make_state(photon_layout(1), {{{L}, 1.0}, {{R}, 1.0}});
  const auto flipped =
      apply_1slot_gate(minus, "p0", phase_flip_matrix(), Basis::Circular);
  CHECK(fidelity(flipped, plus) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gate errors: non-unitary matrix and unknown slot") {
  const auto state = make_state(photon_layout(1), {{{L}, 1.0}});
  Mat2 squash = {{{Amplitude(1.0), Amplitude(0.0)},
                  {Amplitude(0.0), Amplitude(0.5)}}};
  CHECK_THROWS_WITH_AS(apply_1slot_gate(state, "p0", squash, Basis::Circular),
                       doctest::Contains("NonUnitaryGate"), Error);
  CHECK_THROWS_WITH_AS(
      apply_1slot_gate(state, "nope", hadamard_matrix(), Basis::Circular),
      doctest::Contains("UnknownSlot"), Error);
  CHECK_THROWS_WITH_AS(
      apply_1slot_gate(state, "p0", hadamard_matrix(), Basis::AtomGround),
      doctest::Contains("BasisMismatch"), Error);
}

TEST_CASE("joint phase table applies the reflection rules") {
  const SlotLayout layout{{{SlotRole::Photon, "p"}, {SlotRole::Atom, "c"}}};
  const auto state = make_state(
      layout, {{{L, gL}, 0.5}, {{R, gL}, 0.5}, {{L, gR}, 0.5}, {{R, gR}, 0.5}});
  const auto out = apply_joint_phase_gate(state, {"p", "c"},
                                          ideal_interaction_gate());
  CHECK(std::abs(out.amplitude({L, gL}) - Amplitude(-0.5)) < 1e-14);
  CHECK(std::abs(out.amplitude({R, gL}) - Amplitude(0.0, 0.5)) < 1e-14);
  CHECK(std::abs(out.amplitude({L, gR}) - Amplitude(0.0, 0.5)) < 1e-14);
  CHECK(std::abs(out.amplitude({R, gR}) - Amplitude(-0.5)) < 1e-14);
}

TEST_CASE("all-ones phase table is the identity") {
  const SlotLayout layout{{{SlotRole::Photon, "p"}, {SlotRole::Atom, "c"}}};
  const auto state = make_state(layout, {{{L, gL}, 0.6}, {{R, gR}, 0.8}});
  JointPhaseTable ones;
  ones[{L, gL}] = ones[{R, gL}] = ones[{L, gR}] = ones[{R, gR}] = 1.0;
  const auto out = apply_joint_phase_gate(state, {"p", "c"}, ones);
  CHECK(testutil::max_term_delta(state, out) < 1e-14);
}

TEST_CASE("joint phase table errors") {
  const SlotLayout layout{{{SlotRole::Photon, "p"}, {SlotRole::Atom, "c"}}};
  const auto state = make_state(layout, {{{L, gL}, 1.0}});
  JointPhaseTable missing;
  missing[{L, gL}] = 1.0;
  CHECK_THROWS_WITH_AS(apply_joint_phase_gate(state, {"p", "c"}, missing),
                       doctest::Contains("IncompleteTable"), Error);
  JointPhaseTable shrunk;
  shrunk[{L, gL}] = shrunk[{R, gL}] = shrunk[{L, gR}] = 1.0;
  shrunk[{R, gR}] = 0.3;
  CHECK_THROWS_WITH_AS(apply_joint_phase_gate(state, {"p", "c"}, shrunk),
                       doctest::Contains("NonUnitPhase"), Error);
}

TEST_CASE("measuring the atom of a Bell-type pair gives two even branches") {
  const SlotLayout layout{{{SlotRole::Photon, "p"}, {SlotRole::Atom, "c"}}};
  const auto state = make_state(layout, {{{L, gL}, 1.0}, {{R, gR}, 1.0}});
  const auto branches = measure(state, {"c"});
  REQUIRE(branches.size() == 2);
  CHECK(branches[0].outcome == BasisKey{gL});
  CHECK(branches[0].probability == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(std::abs(branches[0].collapsed.amplitude({L}) - Amplitude(1.0)) < 1e-14);
  CHECK(branches[1].outcome == BasisKey{gR});
  CHECK(branches[1].probability == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(std::abs(branches[1].collapsed.amplitude({R}) - Amplitude(1.0)) < 1e-14);
}

TEST_CASE("post-Hadamard round state: (H,gL) branch carries |alpha beta|^2") {
  // Frozen from the dense oracle at |alpha|^2 = 0.8: the (H,gL) outcome of
  // the measured (auxiliary photon, atom) pair has probability 0.16.
  const double alpha = std::sqrt(0.8), beta = std::sqrt(0.2);
  const auto oracle_result = oracle::oracle_round(alpha, beta, alpha, beta, 2);
  CHECK(oracle_result.branches[0].photon_bit == 0);
  CHECK(oracle_result.branches[0].atom_bit == 0);
  CHECK(oracle_result.branches[0].probability ==
        doctest::Approx(0.16).epsilon(1e-12));

  // Same number through the sparse implementation.
  const auto entangled = build_initial_state(alpha, beta, 2);
  const auto aux = build_auxiliary_photon(1, alpha, beta);
  const auto atom = make_state(SlotLayout{{{SlotRole::Atom, "c"}}},
                               {{{gL}, 1.0}, {{gR}, 1.0}});
  auto full = tensor(tensor(entangled, aux), atom);
  full = apply_joint_phase_gate(full, {"a1", "c"}, ideal_interaction_gate());
  full = apply_joint_phase_gate(full, {"a2", "c"}, ideal_interaction_gate());
  full = apply_1slot_gate(full, "c", hadamard_matrix(), Basis::AtomGround);
  full = apply_1slot_gate(full, "a2", hadamard_matrix(), Basis::Linear);
  const auto branches = measure(full, {"a2", "c"});
  REQUIRE(branches.size() == 4);
  bool seen = false;
  for (const auto& branch : branches)
    if (branch.outcome == BasisKey{H, gL}) {
      seen = true;
      CHECK(branch.probability == doctest::Approx(0.16).epsilon(1e-12));
    }
  CHECK(seen);
}

TEST_CASE("branch probabilities always sum to one") {
  Rng rng(0x51a7e5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto state = testutil::random_state(rng);
    const int idx = rng.pick(static_cast<int>(state.num_slots()));
    const auto branches = measure(state, {state.layout().at(idx).name});
    double total = 0.0;
    for (const auto& branch : branches) total += branch.probability;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("re-measuring a collapsed outcome is certain") {
  Rng rng(0xc0117a);
  for (int trial = 0; trial < 25; ++trial) {
    auto state = testutil::random_state(rng, 3, 6);
    if (state.num_slots() < 2) continue;
    const std::string slot = state.layout().at(0).name;
    const auto branches = measure(state, {slot});
    for (const auto& branch : branches) {
      // re-attach the measured outcome as a product factor and measure again
      const auto outcome_state =
          make_state(SlotLayout{{state.layout().at(0)}},
                     {{{branch.outcome[0]}, 1.0}});
      const auto extended = tensor(outcome_state, branch.collapsed);
      const auto again = measure(extended, {slot});
      REQUIRE(again.size() == 1);
      CHECK(again[0].outcome == branch.outcome);
      CHECK(again[0].probability == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("gates preserve the norm") {
  Rng rng(0x9a7e5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto state = testutil::random_state(rng);
    const int idx = rng.pick(static_cast<int>(state.num_slots()));
    const auto& slot = state.layout().at(idx);
    const Basis out_basis = slot.role == SlotRole::Atom
                                ? Basis::AtomGround
                                : (rng.pick(2) == 0 ? Basis::Circular
                                                    : Basis::Linear);
    const auto gate = testutil::random_unitary(rng);
    const auto rotated = apply_1slot_gate(state, slot.name, gate, out_basis);
    CHECK(rotated.norm() == doctest::Approx(1.0).epsilon(1e-12));
    // raw, unnormalized map must already have norm 1 for a unitary gate
    const auto raw = detail::apply_gate_to_terms(state.terms(), idx, gate,
                                                 out_basis);
    double raw_norm = 0.0;
    for (const auto& [key, amp] : raw) raw_norm += std::norm(amp);
    CHECK(raw_norm == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("gate action is linear on the unnormalized representation") {
  Rng rng(0x11e4);
  const SlotLayout layout = photon_layout(2);
  for (int trial = 0; trial < 50; ++trial) {
    TermMap psi1, psi2;
    for (auto s1 : {L, R})
      for (auto s2 : {L, R}) {
        psi1[{s1, s2}] = Amplitude(rng.uniform(-1, 1), rng.uniform(-1, 1));
        psi2[{s1, s2}] = Amplitude(rng.uniform(-1, 1), rng.uniform(-1, 1));
      }
    const Amplitude a(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Amplitude b(rng.uniform(-1, 1), rng.uniform(-1, 1));
    TermMap combined;
    for (const auto& [key, amp] : psi1) combined[key] += a * amp;
    for (const auto& [key, amp] : psi2) combined[key] += b * amp;

    const auto gate = testutil::random_unitary(rng);
    const auto lhs = detail::apply_gate_to_terms(combined, 0, gate,
                                                 Basis::Circular);
    const auto g1 = detail::apply_gate_to_terms(psi1, 0, gate, Basis::Circular);
    const auto g2 = detail::apply_gate_to_terms(psi2, 0, gate, Basis::Circular);
    for (const auto& [key, amp] : lhs) {
      const Amplitude rhs = a * (g1.count(key) ? g1.at(key) : Amplitude(0)) +
                            b * (g2.count(key) ? g2.at(key) : Amplitude(0));
      CHECK(std::abs(amp - rhs) < 1e-12);
    }
  }
}

TEST_CASE("largest Schmidt coefficient: known values") {
  // maximally entangled pair
  const auto bell = make_state(photon_layout(2), {{{L, R}, 1.0}, {{R, L}, 1.0}});
  CHECK(largest_schmidt_coefficient(bell, {"p0"}) ==
        doctest::Approx(kInvSqrt2).epsilon(1e-12));
  // product state
  const auto product = make_state(photon_layout(2), {{{L, R}, 1.0}});
  CHECK(largest_schmidt_coefficient(product, {"p0"}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // (0.8 |LR> + 0.2 |RL>) normalized; closed-form SVD of diag(0.8, 0.2)
  const auto skew = make_state(photon_layout(2), {{{L, R}, 0.8}, {{R, L}, 0.2}});
  CHECK(largest_schmidt_coefficient(skew, {"p0"}) ==
        doctest::Approx(0.9701425001453319).epsilon(1e-12));
}

TEST_CASE("largest Schmidt coefficient of diagonal amplitude matrices") {
  // For two-term states the amplitude matrix is diagonal, so the singular
  // values are just the amplitude moduli; phases must not matter.
  Rng rng(0x5c4a1d);
  for (int trial = 0; trial < 10; ++trial) {
    const auto [alpha, beta] = rng.coefficient_pair();
    const auto state =
        make_state(photon_layout(2),
                   {{{L, R}, Amplitude(alpha) * rng.unit_phase()},
                    {{R, L}, Amplitude(beta) * rng.unit_phase()}});
    const double reported = largest_schmidt_coefficient(state, {"p0"});
    CHECK(reported == doctest::Approx(std::max(alpha, beta)).epsilon(1e-10));
  }
}

TEST_CASE("largest Schmidt coefficient matches the closed-form 2x2 SVD") {
  // Random dense two-photon states; the amplitude matrix is a full 2x2
  // complex matrix whose largest singular value follows from
  // sigma^2 = (T + sqrt(T^2 - 4D)) / 2 with T = tr(M M^H), D = |det M|^2.
  Rng rng(0x51d22);
  for (int trial = 0; trial < 40; ++trial) {
    std::array<Amplitude, 4> m;
    for (auto& entry : m)
      entry = Amplitude(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const double norm = std::sqrt(std::norm(m[0]) + std::norm(m[1]) +
                                  std::norm(m[2]) + std::norm(m[3]));
    for (auto& entry : m) entry /= norm;

    const auto state = make_state(photon_layout(2), {{{L, L}, m[0]},
                                                     {{L, R}, m[1]},
                                                     {{R, L}, m[2]},
                                                     {{R, R}, m[3]}});
    const double trace = 1.0;  // normalized
    const double det_sq = std::norm(m[0] * m[3] - m[1] * m[2]);
    const double expected = std::sqrt(
        0.5 * (trace + std::sqrt(std::max(trace * trace - 4.0 * det_sq, 0.0))));
    CHECK(largest_schmidt_coefficient(state, {"p0"}) ==
          doctest::Approx(expected).epsilon(1e-11));
    // both partitions share the singular values
    CHECK(largest_schmidt_coefficient(state, {"p1"}) ==
          doctest::Approx(expected).epsilon(1e-11));
  }
}

TEST_CASE("Schmidt partition validation") {
  const auto bell = make_state(photon_layout(2), {{{L, R}, 1.0}, {{R, L}, 1.0}});
  CHECK_THROWS_WITH_AS(largest_schmidt_coefficient(bell, {}),
                       doctest::Contains("BadPartition"), Error);
  CHECK_THROWS_WITH_AS(largest_schmidt_coefficient(bell, {"p0", "p1"}),
                       doctest::Contains("BadPartition"), Error);
  CHECK_THROWS_WITH_AS(largest_schmidt_coefficient(bell, {"zz"}),
                       doctest::Contains("BadPartition"), Error);
}

TEST_CASE("fidelity: self, orthogonal, corrected") {
  const auto plus = make_state(photon_layout(2), {{{L, R}, 1.0}, {{R, L}, 1.0}});
  const auto minus = make_state(photon_layout(2), {{{L, R}, 1.0}, {{R, L}, -1.0}});
  CHECK(fidelity(plus, plus) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(fidelity(minus, plus) == doctest::Approx(0.0).epsilon(1e-13));
  const auto corrected =
      apply_1slot_gate(minus, "p0", phase_flip_matrix(), Basis::Circular);
  CHECK(fidelity(corrected, plus) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("fidelity rejects mismatched layouts") {
  const auto a = make_state(photon_layout(2), {{{L, R}, 1.0}});
  const auto b = make_state(photon_layout(1), {{{L}, 1.0}});
  CHECK_THROWS_WITH_AS(fidelity(a, b), doctest::Contains("LayoutMismatch"),
                       Error);
  const auto linear =
      apply_1slot_gate(a, "p0", hadamard_matrix(), Basis::Linear);
  CHECK_THROWS_WITH_AS(fidelity(a, linear), doctest::Contains("LayoutMismatch"),
                       Error);
}

TEST_CASE("tensor rejects duplicate slot names") {
  const auto a = make_state(photon_layout(1), {{{L}, 1.0}});
  CHECK_THROWS_AS(tensor(a, a), Error);
}
