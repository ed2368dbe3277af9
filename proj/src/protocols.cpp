#include "ltbsm/protocols.hpp"

namespace ltbsm::protocols {

using codes::JointBellCode;
using codes::QpcVariantCode;
using codes::StabilizerCode;
using decodability::Logical;
using erasure::LossPattern;
using gf2::BitVec;
using gf2::Matrix;
using gf2::PauliOperator;
using lobsm::Outcome;

ProtocolId parse_protocol(const std::string& name) {
    if (name == "static") return ProtocolId::Static;
    if (name == "adaptive-bsm") return ProtocolId::AdaptiveBsm;
    if (name == "adaptive-qpc-sqm") return ProtocolId::AdaptiveQpcSqm;
    if (name == "teleport") return ProtocolId::Teleport;
    throw std::invalid_argument("unknown protocol: '" + name + "'");
}

std::string protocol_name(ProtocolId id) {
    switch (id) {
        case ProtocolId::Static: return "static";
        case ProtocolId::AdaptiveBsm: return "adaptive-bsm";
        case ProtocolId::AdaptiveQpcSqm: return "adaptive-qpc-sqm";
        default: return "teleport";
    }
}

bool sqm_logical_measure(const StabilizerCode& code, Logical basis, const LossPattern& loss) {
    return decodability::measurable(code, basis, loss);
}

// ---------------------------------------------------------------------------
ProtocolRun run_static_bsm(const StabilizerCode& code, const lobsm::ModelSpec& model,
                           const LossPattern& loss_a, const LossPattern& loss_b,
                           rng::Key key) {
    if (loss_a.n != code.n || loss_b.n != code.n)
        throw std::invalid_argument("static: loss pattern size mismatch");
    if (model.is_vector && model.vec.per_pair.size() != code.n)
        throw std::invalid_argument("static: vector model length must equal qubit count");

    ProtocolRun run;
    run.protocol = "static";
    run.outcomes.resize(code.n);
    LossPattern s_xx(code.n), s_zz(code.n);
    for (size_t i = 0; i < code.n; ++i) {
        double u = key.derive(rng::kOutcome, i).unit(0);
        Outcome o = lobsm::sample_outcome(model.pair_model(i), loss_a.survives(i),
                                          loss_b.survives(i), u);
        run.outcomes[i] = o;
        if (lobsm::includes_xx(o)) s_xx.surviving.set(i);
        if (lobsm::includes_zz(o)) s_zz.surviving.set(i);
    }
    run.xx_recovered = decodability::measurable(code, Logical::X, s_xx);
    run.zz_recovered = decodability::measurable(code, Logical::Z, s_zz);
    run.success = run.xx_recovered && run.zz_recovered;
    return run;
}

// ---------------------------------------------------------------------------
bool joint_recovered_fast(size_t, uint64_t s_xx_mask, uint64_t s_zz_mask, bool want_xx) {
    // one recovered pair operator of the right type reaches the logical
    // through the pairwise stabilizer chain
    return want_xx ? s_xx_mask != 0 : s_zz_mask != 0;
}

bool joint_recovered_generic(const JointBellCode& code, uint64_t s_xx_mask,
                             uint64_t s_zz_mask, bool want_xx) {
    size_t nq = 2 * code.n_pairs;
    Matrix basis(0, 2 * nq);
    auto push = [&](const PauliOperator& p) {
        BitVec row(2 * nq);
        for (size_t q = 0; q < nq; ++q) {
            if (p.x.get(q)) row.set(q);
            if (p.z.get(q)) row.set(nq + q);
        }
        basis.append_row(row);
    };
    for (const auto& s : code.stabilizers) push(s);
    for (size_t i = 0; i < code.n_pairs; ++i) {
        if ((s_xx_mask >> i) & 1u) {
            PauliOperator p(nq);
            p.x.set(2 * i);
            p.x.set(2 * i + 1);
            push(p);
        }
        if ((s_zz_mask >> i) & 1u) {
            PauliOperator p(nq);
            p.z.set(2 * i);
            p.z.set(2 * i + 1);
            push(p);
        }
    }
    const PauliOperator& target = want_xx ? code.logical_xx : code.logical_zz;
    BitVec t(2 * nq);
    for (size_t q = 0; q < nq; ++q) {
        if (target.x.get(q)) t.set(q);
        if (target.z.get(q)) t.set(nq + q);
    }
    return gf2::in_row_span(t, basis).has_value();
}

ProtocolRun run_static_bsm_joint(const JointBellCode& code, const lobsm::ModelSpec& model,
                                 const LossPattern& loss_a, const LossPattern& loss_b,
                                 rng::Key key) {
    if (loss_a.n != code.n_pairs || loss_b.n != code.n_pairs)
        throw std::invalid_argument("static joint: per-side pattern must have one bit per pair");
    ProtocolRun run;
    run.protocol = "static";
    run.outcomes.resize(code.n_pairs);
    bool any_xx = false, any_zz = false;
    for (size_t i = 0; i < code.n_pairs; ++i) {
        double u = key.derive(rng::kOutcome, i).unit(0);
        Outcome o = lobsm::sample_outcome(model.pair_model(i), loss_a.survives(i),
                                          loss_b.survives(i), u);
        run.outcomes[i] = o;
        any_xx |= lobsm::includes_xx(o);
        any_zz |= lobsm::includes_zz(o);
    }
    run.xx_recovered = any_xx;
    run.zz_recovered = any_zz;
    run.success = run.xx_recovered && run.zz_recovered;
    return run;
}

// ---------------------------------------------------------------------------
Action GreedyBsmStrategy::next(const StrategyState& state) const {
    if (state.xx_recovered && state.zz_recovered) return Action{Action::kStop};
    size_t pair = state.n_pairs;
    for (size_t i = 0; i < state.n_pairs; ++i)
        if (!state.measured[i]) {
            pair = i;
            break;
        }
    if (pair == state.n_pairs) return Action{Action::kStop};

    bool favour_xx;
    if (state.xx_recovered)
        favour_xx = false;
    else if (state.zz_recovered)
        favour_xx = true;
    else
        favour_xx = state.s_xx->surviving_count() > state.s_zz->surviving_count();
    // orientation whose deterministic side matches the favoured operator
    bool mirrored = favour_xx ? (base_.p_xx < base_.p_zz) : (base_.p_zz < base_.p_xx);
    return Action{Action::kLobsm, pair, mirrored};
}

ProtocolRun run_adaptive_bsm_only(const StabilizerCode& code, const lobsm::LobsmModel& model,
                                  const AdaptiveStrategy& strategy,
                                  const LossPattern& loss_a, const LossPattern& loss_b,
                                  rng::Key key) {
    if (loss_a.n != code.n || loss_b.n != code.n)
        throw std::invalid_argument("adaptive-bsm: loss pattern size mismatch");
    ProtocolRun run;
    run.protocol = "adaptive-bsm";
    run.outcomes.assign(code.n, Outcome::PhotonLost);

    LossPattern s_xx(code.n), s_zz(code.n);
    StrategyState state;
    state.n_pairs = code.n;
    state.s_xx = &s_xx;
    state.s_zz = &s_zz;
    state.measured.assign(code.n, 0);

    for (size_t step = 0; step < code.n; ++step) {
        Action act = strategy.next(state);
        if (act.kind == Action::kStop) break;
        if (act.kind == Action::kSqm)
            throw ProtocolViolation("BSM-only strategy issued a single-qubit measurement");
        size_t i = act.pair;
        if (i >= code.n || state.measured[i])
            throw ProtocolViolation("strategy measured an invalid pair");
        state.measured[i] = 1;
        ++state.steps;
        lobsm::LobsmModel m = act.mirrored ? model.mirrored() : model;
        double u = key.derive(rng::kOutcome, i).unit(0);
        Outcome o = lobsm::sample_outcome(m, loss_a.survives(i), loss_b.survives(i), u);
        run.outcomes[i] = o;
        bool updated = false;
        if (lobsm::includes_xx(o)) {
            s_xx.surviving.set(i);
            updated = true;
        }
        if (lobsm::includes_zz(o)) {
            s_zz.surviving.set(i);
            updated = true;
        }
        if (updated) {
            if (!state.xx_recovered)
                state.xx_recovered = decodability::measurable(code, Logical::X, s_xx);
            if (!state.zz_recovered)
                state.zz_recovered = decodability::measurable(code, Logical::Z, s_zz);
        }
        if (state.xx_recovered && state.zz_recovered) break;
    }
    run.xx_recovered = state.xx_recovered;
    run.zz_recovered = state.zz_recovered;
    run.success = run.xx_recovered && run.zz_recovered;
    return run;
}

// ---------------------------------------------------------------------------
namespace {

bool inner_sqm_ok(const StabilizerCode& inner, Logical basis, const LossPattern& loss,
                  size_t offset) {
    if (inner.tree) {
        return decodability::tree_measurable(
            *inner.tree, basis,
            [&](uint32_t q) { return loss.surviving.get(offset + q); });
    }
    LossPattern local(inner.n);
    for (size_t q = 0; q < inner.n; ++q)
        if (loss.surviving.get(offset + q)) local.surviving.set(q);
    return decodability::measurable(inner, basis, local);
}

}  // namespace

ProtocolRun run_adaptive_qpc_sqm(const QpcVariantCode& variant, const lobsm::LobsmModel& model,
                                 const LossPattern& loss_a, const LossPattern& loss_b,
                                 rng::Key key, bool use_partial_zz) {
    if (loss_a.n != variant.flattened_n() || loss_b.n != variant.flattened_n())
        throw std::invalid_argument("qpc: loss patterns must cover the flattened code");
    size_t nb = variant.n_blocks;
    ProtocolRun run;
    run.protocol = "adaptive-qpc-sqm";
    run.outcomes.resize(nb);
    run.block_is_x.resize(nb);
    run.sqm_ok_a.resize(nb);
    run.sqm_ok_b.resize(nb);

    for (size_t i = 0; i < nb; ++i) {
        size_t q1 = variant.q1_index(i);
        double u = key.derive(rng::kOutcome, i).unit(0);
        Outcome o =
            lobsm::sample_outcome(model, loss_a.survives(q1), loss_b.survives(q1), u);
        run.outcomes[i] = o;
        bool full = o == Outcome::Both;
        run.block_is_x[i] = full;
        Logical basis = full ? Logical::X : Logical::Z;
        run.sqm_ok_a[i] = inner_sqm_ok(variant.inner, basis, loss_a, variant.inner_offset(i));
        run.sqm_ok_b[i] = inner_sqm_ok(variant.inner, basis, loss_b, variant.inner_offset(i));
    }

    if (!use_partial_zz) {
        bool any_x = false, all_sqm = true;
        for (size_t i = 0; i < nb; ++i) {
            any_x |= static_cast<bool>(run.block_is_x[i]);
            all_sqm &= static_cast<bool>(run.sqm_ok_a[i]) && static_cast<bool>(run.sqm_ok_b[i]);
        }
        bool x_sqm_ok = true, z_sqm_ok = true;
        for (size_t i = 0; i < nb; ++i) {
            bool ok = run.sqm_ok_a[i] && run.sqm_ok_b[i];
            if (run.block_is_x[i])
                x_sqm_ok &= ok;
            else
                z_sqm_ok &= ok;
        }
        run.xx_recovered = any_x && x_sqm_ok;
        run.zz_recovered = z_sqm_ok;
        run.success = run.xx_recovered && run.zz_recovered;
        return run;
    }

    // optional mode: a failed pair BSM that still produced the ZZ outcome
    // covers its block's Z, and X-failures on spare X-blocks are forgiven
    bool any_good_x = false, all_zz_covered = true;
    for (size_t i = 0; i < nb; ++i) {
        bool sqm_both = run.sqm_ok_a[i] && run.sqm_ok_b[i];
        if (run.block_is_x[i]) {
            any_good_x |= sqm_both;
        } else {
            bool covered = sqm_both || lobsm::includes_zz(run.outcomes[i]);
            all_zz_covered &= covered;
        }
    }
    run.xx_recovered = any_good_x;
    run.zz_recovered = all_zz_covered;
    run.success = run.xx_recovered && run.zz_recovered;
    return run;
}

// ---------------------------------------------------------------------------
ProtocolRun run_teleport_decode(ProtocolId via, const codes::CodeVariant& code,
                                const lobsm::ModelSpec& model, const LossPattern& loss_a,
                                const LossPattern& loss_b, rng::Key key,
                                const RunOptions& opts) {
    if (via == ProtocolId::Teleport)
        throw std::invalid_argument("teleport must wrap a concrete BSM protocol");
    ProtocolRun run = run_protocol(via, code, model, loss_a, loss_b, key, opts);
    run.protocol = "teleport";
    return run;
}

ProtocolRun run_protocol(ProtocolId id, const codes::CodeVariant& code,
                         const lobsm::ModelSpec& model, const LossPattern& loss_a,
                         const LossPattern& loss_b, rng::Key key, const RunOptions& opts) {
    switch (id) {
        case ProtocolId::Static:
            if (auto* sc = std::get_if<StabilizerCode>(&code))
                return run_static_bsm(*sc, model, loss_a, loss_b, key);
            if (auto* jc = std::get_if<JointBellCode>(&code))
                return run_static_bsm_joint(*jc, model, loss_a, loss_b, key);
            throw std::invalid_argument("static protocol needs a plain or joint code");
        case ProtocolId::AdaptiveBsm: {
            auto* sc = std::get_if<StabilizerCode>(&code);
            if (!sc) throw std::invalid_argument("adaptive-bsm needs a plain stabilizer code");
            if (model.is_vector)
                throw std::invalid_argument("adaptive-bsm uses a scalar model");
            GreedyBsmStrategy strategy(model.scalar);
            return run_adaptive_bsm_only(*sc, model.scalar, strategy, loss_a, loss_b, key);
        }
        case ProtocolId::AdaptiveQpcSqm: {
            auto* qc = std::get_if<QpcVariantCode>(&code);
            if (!qc) throw std::invalid_argument("adaptive-qpc-sqm needs a qpc2var code");
            if (model.is_vector)
                throw std::invalid_argument("adaptive-qpc-sqm uses a scalar model");
            return run_adaptive_qpc_sqm(*qc, model.scalar, loss_a, loss_b, key,
                                        opts.use_partial_zz);
        }
        default:
            return run_teleport_decode(opts.teleport_via, code, model, loss_a, loss_b, key,
                                       opts);
    }
}

}  // namespace ltbsm::protocols
