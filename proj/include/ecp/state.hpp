#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ecp/errors.hpp"

namespace ecp {

using Amplitude = std::complex<double>;

inline constexpr double kPruneTol = 1e-15;    // amplitudes below this are dropped
inline constexpr double kNormTol = 1e-12;     // norm / probability comparisons
inline constexpr double kUnitaryTol = 1e-10;  // gate unitarity and unit-phase checks
inline constexpr double kInvSqrt2 = 0.7071067811865475244;

// Single-slot labels: circular / linear photon polarization and the two
// atomic Zeeman ground sublevels.
enum class BasisSymbol : unsigned char { L, R, H, V, GroundL, GroundR };

enum class Basis : unsigned char { Circular, Linear, AtomGround };

enum class SlotRole : unsigned char { Photon, Atom };

Basis basis_of(BasisSymbol s) noexcept;
BasisSymbol basis_symbol(Basis b, int index);
int symbol_index(BasisSymbol s) noexcept;  // 0 or 1 within its basis
bool role_allows(SlotRole role, Basis b) noexcept;

const char* to_string(BasisSymbol s) noexcept;
const char* to_string(Basis b) noexcept;
const char* to_string(SlotRole r) noexcept;
BasisSymbol parse_basis_symbol(std::string_view text);

struct Slot {
  SlotRole role;
  std::string name;

  friend bool operator==(const Slot&, const Slot&) = default;
};

// Ordered list of subsystem slots. Names are unique; at most one slot is
// an atom.
class SlotLayout {
 public:
  SlotLayout() = default;
  explicit SlotLayout(std::vector<Slot> slots);

  std::size_t size() const noexcept { return slots_.size(); }
  const Slot& at(std::size_t i) const { return slots_.at(i); }
  const std::vector<Slot>& slots() const noexcept { return slots_; }
  std::size_t index_of(std::string_view name) const;  // UnknownSlot
  bool has(std::string_view name) const noexcept;

  friend bool operator==(const SlotLayout&, const SlotLayout&) = default;

 private:
  std::vector<Slot> slots_;
};

// One basis symbol per slot, in layout order.
using BasisKey = std::vector<BasisSymbol>;
using TermMap = std::map<BasisKey, Amplitude>;

// 2x2 gate matrix, row-major mat[out][in], over the ordered basis vectors
// {L,R}, {H,V} or {gL,gR}.
using Mat2 = std::array<std::array<Amplitude, 2>, 2>;

// Diagonal joint gate: unit-modulus phase per joint outcome of the slots
// it acts on.
using JointPhaseTable = std::map<BasisKey, Amplitude>;

class PureState;

namespace detail {

// Prunes, normalizes and validates; the only way to mint a PureState.
PureState assemble(SlotLayout layout, std::vector<Basis> slot_bases,
                   TermMap terms);

// Raw linear gate action on a term map, no pruning or normalization.
// Exposed so linearity can be checked on the unnormalized representation.
TermMap apply_gate_to_terms(const TermMap& terms, std::size_t slot,
                            const Mat2& gate, Basis output_basis);

}  // namespace detail

// Normalized sparse pure state over the layout's slots. Immutable value
// type: every operation returns a new state, so states can be shared and
// sent across threads freely.
class PureState {
 public:
  const SlotLayout& layout() const noexcept { return layout_; }
  const TermMap& terms() const noexcept { return terms_; }
  const std::vector<Basis>& slot_bases() const noexcept { return slot_bases_; }
  Basis slot_basis(std::size_t i) const { return slot_bases_.at(i); }
  std::size_t num_slots() const noexcept { return layout_.size(); }

  double norm() const;
  Amplitude amplitude(const BasisKey& key) const;  // 0 for absent terms

 private:
  PureState(SlotLayout layout, std::vector<Basis> slot_bases, TermMap terms)
      : layout_(std::move(layout)),
        slot_bases_(std::move(slot_bases)),
        terms_(std::move(terms)) {}

  friend PureState detail::assemble(SlotLayout, std::vector<Basis>, TermMap);

  SlotLayout layout_;
  std::vector<Basis> slot_bases_;
  TermMap terms_;
};

struct MeasurementBranch {
  BasisKey outcome;      // symbols of the measured slots, in request order
  double probability;    // squared norm of the projected component
  PureState collapsed;   // renormalized state over the remaining slots
};

// Builds a normalized state; slot bases are inferred from the terms.
PureState make_state(SlotLayout layout,
                     const std::vector<std::pair<BasisKey, Amplitude>>& terms);

PureState apply_1slot_gate(const PureState& state, std::string_view slot,
                           const Mat2& gate, Basis output_basis);

PureState apply_joint_phase_gate(const PureState& state,
                                 const std::vector<std::string>& slots,
                                 const JointPhaseTable& table);

// Projective measurement of the listed slots in their current bases.
// Returns one branch per outcome with nonzero probability, sorted by
// outcome key.
std::vector<MeasurementBranch> measure(const PureState& state,
                                       const std::vector<std::string>& slots);

// Largest singular value of the bipartite amplitude matrix for
// (partition | rest). 1/sqrt(2) certifies a maximally entangled two-term
// state; 1 a product state.
double largest_schmidt_coefficient(const PureState& state,
                                   const std::vector<std::string>& partition);

// |<target|state>|^2. Layouts and per-slot bases must match.
double fidelity(const PureState& state, const PureState& target);

// Kronecker composition; slot names must stay unique.
PureState tensor(const PureState& a, const PureState& b);

}  // namespace ecp
