#include "ecp/state.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <utility>

namespace ecp {

Basis basis_of(BasisSymbol s) noexcept {
  switch (s) {
    case BasisSymbol::L:
    case BasisSymbol::R: return Basis::Circular;
    case BasisSymbol::H:
    case BasisSymbol::V: return Basis::Linear;
    case BasisSymbol::GroundL:
    case BasisSymbol::GroundR: return Basis::AtomGround;
  }
  return Basis::Circular;
}

BasisSymbol basis_symbol(Basis b, int index) {
  if (index != 0 && index != 1)
    fail(ErrorKind::InvalidArgument, "basis index must be 0 or 1");
  switch (b) {
    case Basis::Circular:
      return index == 0 ? BasisSymbol::L : BasisSymbol::R;
    case Basis::Linear:
      return index == 0 ? BasisSymbol::H : BasisSymbol::V;
    case Basis::AtomGround:
      return index == 0 ? BasisSymbol::GroundL : BasisSymbol::GroundR;
  }
  fail(ErrorKind::InvalidArgument, "unknown basis");
}

int symbol_index(BasisSymbol s) noexcept {
  switch (s) {
    case BasisSymbol::L:
    case BasisSymbol::H:
    case BasisSymbol::GroundL: return 0;
    case BasisSymbol::R:
    case BasisSymbol::V:
    case BasisSymbol::GroundR: return 1;
  }
  return 0;
}

bool role_allows(SlotRole role, Basis b) noexcept {
  if (role == SlotRole::Atom) return b == Basis::AtomGround;
  return b == Basis::Circular || b == Basis::Linear;
}

const char* to_string(BasisSymbol s) noexcept {
  switch (s) {
    case BasisSymbol::L: return "L";
    case BasisSymbol::R: return "R";
    case BasisSymbol::H: return "H";
    case BasisSymbol::V: return "V";
    case BasisSymbol::GroundL: return "gL";
    case BasisSymbol::GroundR: return "gR";
  }
  return "?";
}

const char* to_string(Basis b) noexcept {
  switch (b) {
    case Basis::Circular: return "circular";
    case Basis::Linear: return "linear";
    case Basis::AtomGround: return "ground";
  }
  return "?";
}

const char* to_string(SlotRole r) noexcept {
  return r == SlotRole::Photon ? "photon" : "atom";
}

BasisSymbol parse_basis_symbol(std::string_view text) {
  if (text == "L") return BasisSymbol::L;
  if (text == "R") return BasisSymbol::R;
  if (text == "H") return BasisSymbol::H;
  if (text == "V") return BasisSymbol::V;
  if (text == "gL") return BasisSymbol::GroundL;
  if (text == "gR") return BasisSymbol::GroundR;
  fail(ErrorKind::InvalidArgument,
       "unknown basis symbol '" + std::string(text) + "'");
}

namespace {

std::string key_to_string(const BasisKey& key) {
  std::string out = "(";
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (i > 0) out += ",";
    out += to_string(key[i]);
  }
  return out + ")";
}

}  // namespace

SlotLayout::SlotLayout(std::vector<Slot> slots) : slots_(std::move(slots)) {
  std::set<std::string> names;
  int atoms = 0;
  for (const auto& slot : slots_) {
    if (slot.name.empty())
      fail(ErrorKind::InvalidArgument, "slot name must not be empty");
    if (!names.insert(slot.name).second)
      fail(ErrorKind::InvalidArgument, "duplicate slot name '" + slot.name + "'");
    if (slot.role == SlotRole::Atom) ++atoms;
  }
  if (atoms > 1)
    fail(ErrorKind::InvalidArgument, "at most one atom slot per layout");
}

std::size_t SlotLayout::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < slots_.size(); ++i)
    if (slots_[i].name == name) return i;
  fail(ErrorKind::UnknownSlot, "no slot named '" + std::string(name) + "'");
}

bool SlotLayout::has(std::string_view name) const noexcept {
  for (const auto& slot : slots_)
    if (slot.name == name) return true;
  return false;
}

double PureState::norm() const {
  double sum = 0.0;
  for (const auto& [key, amp] : terms_) sum += std::norm(amp);
  return std::sqrt(sum);
}

Amplitude PureState::amplitude(const BasisKey& key) const {
  auto it = terms_.find(key);
  return it == terms_.end() ? Amplitude(0.0) : it->second;
}

namespace detail {

PureState assemble(SlotLayout layout, std::vector<Basis> slot_bases,
                   TermMap terms) {
  const std::size_t n = layout.size();
  if (slot_bases.size() != n)
    fail(ErrorKind::InternalCheckFailed, "basis tags do not match layout size");
  for (std::size_t i = 0; i < n; ++i)
    if (!role_allows(layout.at(i).role, slot_bases[i]))
      fail(ErrorKind::BasisMismatch,
           "slot '" + layout.at(i).name + "' cannot carry a " +
               std::string(to_string(slot_bases[i])) + " basis");

  double sum = 0.0;
  for (auto it = terms.begin(); it != terms.end();) {
    const auto& [key, amp] = *it;
    if (key.size() != n)
      fail(ErrorKind::ArityMismatch,
           "term " + key_to_string(key) + " has arity " +
               std::to_string(key.size()) + ", layout has " + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i)
      if (basis_of(key[i]) != slot_bases[i])
        fail(ErrorKind::BasisMismatch,
             "symbol " + std::string(to_string(key[i])) + " in term " +
                 key_to_string(key) + " conflicts with the " +
                 std::string(to_string(slot_bases[i])) + " basis of slot '" +
                 layout.at(i).name + "'");
    if (std::abs(amp) < kPruneTol) {
      it = terms.erase(it);
    } else {
      sum += std::norm(amp);
      ++it;
    }
  }

  const double norm = std::sqrt(sum);
  if (!(norm > kPruneTol))
    fail(ErrorKind::EmptyState, "all amplitudes vanish");
  if (std::abs(norm - 1.0) > 0.0)
    for (auto& [key, amp] : terms) amp /= norm;

  return PureState(std::move(layout), std::move(slot_bases), std::move(terms));
}

TermMap apply_gate_to_terms(const TermMap& terms, std::size_t slot,
                            const Mat2& gate, Basis output_basis) {
  TermMap out;
  for (const auto& [key, amp] : terms) {
    const int in = symbol_index(key[slot]);
    for (int row = 0; row < 2; ++row) {
      const Amplitude coeff = gate[row][in];
      if (coeff == Amplitude(0.0)) continue;
      BasisKey new_key = key;
      new_key[slot] = basis_symbol(output_basis, row);
      out[new_key] += coeff * amp;
    }
  }
  return out;
}

}  // namespace detail

namespace {

std::vector<Basis> infer_bases(const SlotLayout& layout,
                               const std::vector<std::pair<BasisKey, Amplitude>>& terms) {
  const std::size_t n = layout.size();
  for (const auto& [key, amp] : terms)
    if (key.size() != n)
      fail(ErrorKind::ArityMismatch,
           "term " + key_to_string(key) + " has arity " +
               std::to_string(key.size()) + ", layout has " + std::to_string(n));
  if (terms.empty()) fail(ErrorKind::EmptyState, "no terms given");
  std::vector<Basis> bases(n);
  for (std::size_t i = 0; i < n; ++i) bases[i] = basis_of(terms.front().first[i]);
  return bases;
}

std::vector<std::size_t> resolve_slots(const PureState& state,
                                       const std::vector<std::string>& names) {
  std::vector<std::size_t> indices;
  indices.reserve(names.size());
  std::set<std::size_t> seen;
  for (const auto& name : names) {
    const std::size_t idx = state.layout().index_of(name);
    if (!seen.insert(idx).second)
      fail(ErrorKind::InvalidArgument, "slot '" + name + "' listed twice");
    indices.push_back(idx);
  }
  return indices;
}

void check_unitary(const Mat2& m) {
  // UhU == I
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Amplitude dot = 0.0;
      for (int k = 0; k < 2; ++k) dot += std::conj(m[k][i]) * m[k][j];
      const Amplitude expect = (i == j) ? Amplitude(1.0) : Amplitude(0.0);
      if (std::abs(dot - expect) > kUnitaryTol)
        fail(ErrorKind::NonUnitaryGate, "gate matrix is not unitary");
    }
}

BasisKey project_key(const BasisKey& key, const std::vector<std::size_t>& idx) {
  BasisKey out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(key[i]);
  return out;
}

}  // namespace

PureState make_state(SlotLayout layout,
                     const std::vector<std::pair<BasisKey, Amplitude>>& terms) {
  auto bases = infer_bases(layout, terms);
  TermMap map;
  for (const auto& [key, amp] : terms) map[key] += amp;
  return detail::assemble(std::move(layout), std::move(bases), std::move(map));
}

PureState apply_1slot_gate(const PureState& state, std::string_view slot,
                           const Mat2& gate, Basis output_basis) {
  const std::size_t idx = state.layout().index_of(slot);
  check_unitary(gate);
  if (!role_allows(state.layout().at(idx).role, output_basis))
    fail(ErrorKind::BasisMismatch,
         "output basis " + std::string(to_string(output_basis)) +
             " is incompatible with a " +
             std::string(to_string(state.layout().at(idx).role)) + " slot");
  auto terms = detail::apply_gate_to_terms(state.terms(), idx, gate, output_basis);
  auto bases = state.slot_bases();
  bases[idx] = output_basis;
  return detail::assemble(state.layout(), std::move(bases), std::move(terms));
}

PureState apply_joint_phase_gate(const PureState& state,
                                 const std::vector<std::string>& slots,
                                 const JointPhaseTable& table) {
  if (slots.empty())
    fail(ErrorKind::InvalidArgument, "joint phase gate needs at least one slot");
  const auto indices = resolve_slots(state, slots);

  // Every joint outcome of the listed slots must carry a unit phase.
  const std::size_t m = indices.size();
  for (std::size_t combo = 0; combo < (std::size_t{1} << m); ++combo) {
    BasisKey outcome(m);
    for (std::size_t i = 0; i < m; ++i)
      outcome[i] = basis_symbol(state.slot_basis(indices[i]), (combo >> i) & 1);
    auto it = table.find(outcome);
    if (it == table.end())
      fail(ErrorKind::IncompleteTable,
           "phase table is missing outcome " + key_to_string(outcome));
    if (std::abs(std::abs(it->second) - 1.0) > kUnitaryTol)
      fail(ErrorKind::NonUnitPhase,
           "phase for outcome " + key_to_string(outcome) + " is not unit modulus");
  }

  TermMap terms = state.terms();
  for (auto& [key, amp] : terms) amp *= table.at(project_key(key, indices));
  return detail::assemble(state.layout(), state.slot_bases(), std::move(terms));
}

std::vector<MeasurementBranch> measure(const PureState& state,
                                       const std::vector<std::string>& slots) {
  const auto measured = resolve_slots(state, slots);
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < state.num_slots(); ++i)
    if (std::find(measured.begin(), measured.end(), i) == measured.end())
      kept.push_back(i);

  std::vector<Slot> kept_slots;
  std::vector<Basis> kept_bases;
  for (auto i : kept) {
    kept_slots.push_back(state.layout().at(i));
    kept_bases.push_back(state.slot_basis(i));
  }
  const SlotLayout kept_layout{kept_slots};

  std::map<BasisKey, TermMap> groups;
  for (const auto& [key, amp] : state.terms())
    groups[project_key(key, measured)][project_key(key, kept)] += amp;

  std::vector<MeasurementBranch> branches;
  double total = 0.0;
  for (auto& [outcome, terms] : groups) {
    double p = 0.0;
    for (const auto& [key, amp] : terms) p += std::norm(amp);
    total += p;
    if (p <= kPruneTol * kPruneTol) continue;
    const double scale = 1.0 / std::sqrt(p);
    for (auto& [key, amp] : terms) amp *= scale;
    branches.push_back(
        {outcome, p, detail::assemble(kept_layout, kept_bases, std::move(terms))});
  }
  if (std::abs(total - 1.0) > kNormTol)
    fail(ErrorKind::InternalCheckFailed,
         "measurement branch probabilities do not sum to 1");
  return branches;
}

namespace {

// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
std::vector<double> symmetric_eigenvalues(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a[i][i];
  return eig;
}

}  // namespace

double largest_schmidt_coefficient(const PureState& state,
                                   const std::vector<std::string>& partition) {
  if (partition.empty())
    fail(ErrorKind::BadPartition, "partition must not be empty");
  std::vector<std::size_t> part;
  std::set<std::size_t> seen;
  for (const auto& name : partition) {
    if (!state.layout().has(name))
      fail(ErrorKind::BadPartition, "no slot named '" + name + "'");
    const std::size_t idx = state.layout().index_of(name);
    if (!seen.insert(idx).second)
      fail(ErrorKind::BadPartition, "slot '" + name + "' listed twice");
    part.push_back(idx);
  }
  if (part.size() >= state.num_slots())
    fail(ErrorKind::BadPartition, "partition must be a proper subset of slots");

  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < state.num_slots(); ++i)
    if (!seen.count(i)) rest.push_back(i);

  std::map<BasisKey, std::size_t> rows, cols;
  for (const auto& [key, amp] : state.terms()) {
    rows.emplace(project_key(key, part), rows.size());
    cols.emplace(project_key(key, rest), cols.size());
  }
  const std::size_t nr = rows.size(), nc = cols.size();
  std::vector<std::vector<Amplitude>> m(nr, std::vector<Amplitude>(nc, 0.0));
  for (const auto& [key, amp] : state.terms())
    m[rows[project_key(key, part)]][cols[project_key(key, rest)]] = amp;

  // Hermitian Gram matrix on the smaller side.
  const bool by_rows = nr <= nc;
  const std::size_t n = by_rows ? nr : nc;
  std::vector<std::vector<Amplitude>> gram(n, std::vector<Amplitude>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Amplitude sum = 0.0;
      const std::size_t span = by_rows ? nc : nr;
      for (std::size_t k = 0; k < span; ++k)
        sum += by_rows ? m[i][k] * std::conj(m[j][k])
                       : m[k][i] * std::conj(m[k][j]);
      gram[i][j] = sum;
    }

  // Real symmetric embedding [[Re, -Im], [Im, Re]] shares the eigenvalues.
  std::vector<std::vector<double>> s(2 * n, std::vector<double>(2 * n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      s[i][j] = gram[i][j].real();
      s[i][j + n] = -gram[i][j].imag();
      s[i + n][j] = gram[i][j].imag();
      s[i + n][j + n] = gram[i][j].real();
    }
  const auto eig = symmetric_eigenvalues(std::move(s));
  double best = 0.0;
  for (double e : eig) best = std::max(best, e);
  return std::sqrt(best);
}

double fidelity(const PureState& state, const PureState& target) {
  if (state.layout() != target.layout() ||
      state.slot_bases() != target.slot_bases())
    fail(ErrorKind::LayoutMismatch,
         "states live on different layouts or slot bases");
  Amplitude overlap = 0.0;
  for (const auto& [key, amp] : state.terms())
    overlap += std::conj(target.amplitude(key)) * amp;
  return std::min(std::norm(overlap), 1.0);
}

PureState tensor(const PureState& a, const PureState& b) {
  std::vector<Slot> slots = a.layout().slots();
  for (const auto& slot : b.layout().slots()) {
    if (a.layout().has(slot.name))
      fail(ErrorKind::InvalidArgument,
           "slot name '" + slot.name + "' appears in both factors");
    slots.push_back(slot);
  }
  std::vector<Basis> bases = a.slot_bases();
  bases.insert(bases.end(), b.slot_bases().begin(), b.slot_bases().end());

  TermMap terms;
  for (const auto& [ka, va] : a.terms())
    for (const auto& [kb, vb] : b.terms()) {
      BasisKey key = ka;
      key.insert(key.end(), kb.begin(), kb.end());
      terms[key] = va * vb;
    }
  return detail::assemble(SlotLayout{std::move(slots)}, std::move(bases),
                          std::move(terms));
}

}  // namespace ecp
