#pragma once

#include <functional>

#include "ltbsm/codes.hpp"
#include "ltbsm/erasure.hpp"

namespace ltbsm::decodability {

enum class Logical { X, Z };

// True iff some representative op * S (S in the stabilizer group) is
// supported entirely on the surviving set. Throws std::invalid_argument when
// op anticommutes with a stabilizer.
bool measurable(const codes::StabilizerCode& code, const gf2::PauliOperator& op,
                const erasure::LossPattern& r);

// Logical X/Z query; tree codes take the structural fast path (equivalence
// with the generic solver is covered by tests).
bool measurable(const codes::StabilizerCode& code, Logical which,
                const erasure::LossPattern& r);

// generic GF(2) route, bypassing any structural fast path
bool measurable_generic(const codes::StabilizerCode& code, const gf2::PauliOperator& op,
                        const erasure::LossPattern& r);

// True iff erasing the lost set is correctable: every Pauli supported on the
// lost set that commutes with all stabilizers is itself a stabilizer.
bool decodable(const codes::StabilizerCode& code, const erasure::LossPattern& r);
bool decodable_joint(const codes::JointBellCode& code, const erasure::LossPattern& r);

struct Predicate {
    enum Kind { kDecodable, kMeasurableX, kMeasurableZ } kind;
};

// sum of subset probabilities over all patterns satisfying the predicate;
// throws erasure::CapacityError above the enumeration cap
double exact_probability(const codes::StabilizerCode& code, double eta, Predicate pred);

// tree fast path on an arbitrary survival lookup; exposed for the protocol
// layer (fused sampling) and for equivalence tests
bool tree_measurable(const codes::TreeMeta& tree, Logical which,
                     const std::function<bool(uint32_t)>& survives);

}  // namespace ltbsm::decodability
