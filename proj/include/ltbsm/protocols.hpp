#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ltbsm/codes.hpp"
#include "ltbsm/decodability.hpp"
#include "ltbsm/erasure.hpp"
#include "ltbsm/lobsm.hpp"
#include "ltbsm/rng.hpp"

namespace ltbsm::protocols {

enum class ProtocolId { Static, AdaptiveBsm, AdaptiveQpcSqm, Teleport };

ProtocolId parse_protocol(const std::string& name);
std::string protocol_name(ProtocolId id);

struct ProtocolViolation : std::logic_error {
    using std::logic_error::logic_error;
};

struct ProtocolRun {
    std::string protocol;
    bool xx_recovered = false;
    bool zz_recovered = false;
    bool success = false;  // always xx_recovered && zz_recovered

    std::vector<lobsm::Outcome> outcomes;  // per pair, in pair order
    std::vector<uint8_t> block_is_x;       // qpc protocol only
    std::vector<uint8_t> sqm_ok_a;
    std::vector<uint8_t> sqm_ok_b;

    bool operator==(const ProtocolRun&) const = default;
};

struct RunOptions {
    bool use_partial_zz = false;           // reuse ZZ info from failed pair BSMs
    ProtocolId teleport_via = ProtocolId::AdaptiveQpcSqm;
};

// transverse logical measurement: every surviving qubit measured in the
// basis dictated by the best representative; succeeds iff the oracle finds
// a representative inside the surviving set
bool sqm_logical_measure(const codes::StabilizerCode& code, decodability::Logical basis,
                         const erasure::LossPattern& loss);

// ---------------------------------------------------------------------------
// static logical BSM on two identical locally-encoded codes, pair i = qubit i
// of each side
ProtocolRun run_static_bsm(const codes::StabilizerCode& code, const lobsm::ModelSpec& model,
                           const erasure::LossPattern& loss_a,
                           const erasure::LossPattern& loss_b, rng::Key key);

// joint (non-local) code variant: per-side patterns are indexed by pair
ProtocolRun run_static_bsm_joint(const codes::JointBellCode& code,
                                 const lobsm::ModelSpec& model,
                                 const erasure::LossPattern& loss_a,
                                 const erasure::LossPattern& loss_b, rng::Key key);

// recovery rule for the Bell-repetition joint code; the generic rank route
// is kept alongside for equivalence tests
bool joint_recovered_fast(size_t n_pairs, uint64_t s_xx_mask, uint64_t s_zz_mask,
                          bool want_xx);
bool joint_recovered_generic(const codes::JointBellCode& code, uint64_t s_xx_mask,
                             uint64_t s_zz_mask, bool want_xx);

// ---------------------------------------------------------------------------
// adaptive BSM-only protocol
struct StrategyState {
    size_t n_pairs = 0;
    const erasure::LossPattern* s_xx = nullptr;  // pairs with XX recovered
    const erasure::LossPattern* s_zz = nullptr;
    std::vector<uint8_t> measured;
    size_t steps = 0;
    bool xx_recovered = false;
    bool zz_recovered = false;
};

struct Action {
    enum Kind { kLobsm, kSqm, kStop } kind = kStop;
    size_t pair = 0;
    bool mirrored = false;  // swap the model's XX/ZZ roles for this pair
    size_t qubit = 0;
    decodability::Logical sqm_basis = decodability::Logical::Z;
};

class AdaptiveStrategy {
  public:
    virtual ~AdaptiveStrategy() = default;
    virtual Action next(const StrategyState& state) const = 0;
};

// Reference strategy: pairs in index order; the deterministic basis points
// at whichever logical operator currently looks closer to completion (the
// recovered one is never re-targeted).
class GreedyBsmStrategy : public AdaptiveStrategy {
  public:
    explicit GreedyBsmStrategy(lobsm::LobsmModel base) : base_(base) {}
    Action next(const StrategyState& state) const override;

  private:
    lobsm::LobsmModel base_;
};

ProtocolRun run_adaptive_bsm_only(const codes::StabilizerCode& code,
                                  const lobsm::LobsmModel& model,
                                  const AdaptiveStrategy& strategy,
                                  const erasure::LossPattern& loss_a,
                                  const erasure::LossPattern& loss_b, rng::Key key);

// ---------------------------------------------------------------------------
// adaptive QPC(n,2)-variant protocol: one physical LOBSM per block on the
// bare qubits; the inner codes are measured transversally in X when the BSM
// fully succeeded, in Z otherwise
ProtocolRun run_adaptive_qpc_sqm(const codes::QpcVariantCode& variant,
                                 const lobsm::LobsmModel& model,
                                 const erasure::LossPattern& loss_a,
                                 const erasure::LossPattern& loss_b, rng::Key key,
                                 bool use_partial_zz = false);

// ---------------------------------------------------------------------------
// teleportation decoder: succeeds iff the underlying logical BSM run does
ProtocolRun run_teleport_decode(ProtocolId via, const codes::CodeVariant& code,
                                const lobsm::ModelSpec& model,
                                const erasure::LossPattern& loss_a,
                                const erasure::LossPattern& loss_b, rng::Key key,
                                const RunOptions& opts = {});

// dispatch over protocol id and code kind; loss patterns are per side
// (flattened length for qpc2var, pair count for bellrep)
ProtocolRun run_protocol(ProtocolId id, const codes::CodeVariant& code,
                         const lobsm::ModelSpec& model, const erasure::LossPattern& loss_a,
                         const erasure::LossPattern& loss_b, rng::Key key,
                         const RunOptions& opts = {});

}  // namespace ltbsm::protocols
