#include "ltbsm/decodability.hpp"

#include <stdexcept>

namespace ltbsm::decodability {

using codes::StabilizerCode;
using codes::TreeMeta;
using erasure::LossPattern;
using gf2::BitVec;
using gf2::Matrix;
using gf2::PauliOperator;

namespace {

// pack the restriction of p to the given qubit indices as [x-part | z-part]
BitVec restrict_to(const PauliOperator& p, const std::vector<size_t>& idx) {
    BitVec out(2 * idx.size());
    for (size_t j = 0; j < idx.size(); ++j) {
        if (p.x.get(idx[j])) out.set(j);
        if (p.z.get(idx[j])) out.set(idx.size() + j);
    }
    return out;
}

// elimination-based span membership without coefficient tracking
bool in_span(BitVec target, Matrix rows) {
    const auto& k = gf2::active_kernels();
    size_t r = 0;
    for (size_t c = 0; c < rows.cols() && r < rows.rows(); ++c) {
        size_t piv = r;
        while (piv < rows.rows() && !rows.get(piv, c)) ++piv;
        if (piv == rows.rows()) continue;
        rows.swap_rows(r, piv);
        for (size_t i = r + 1; i < rows.rows(); ++i)
            if (rows.get(i, c)) k.xor_into(rows.row(i), rows.row(r), rows.row_words());
        if (target.get(c)) k.xor_into(target.data(), rows.row(r), target.words());
        ++r;
    }
    return !target.any();
}

void check_commutes(const StabilizerCode& code, const PauliOperator& op) {
    for (const auto& s : code.stabilizers)
        if (gf2::symplectic_product(op, s) != 0)
            throw std::invalid_argument("operator anticommutes with a stabilizer");
}

}  // namespace

bool measurable_generic(const StabilizerCode& code, const PauliOperator& op,
                        const LossPattern& r) {
    if (op.n != code.n || r.n != code.n)
        throw std::invalid_argument("measurable: size mismatch");
    auto lost = r.lost_indices();
    if (lost.empty()) return true;
    Matrix basis(code.stabilizers.size(), 2 * lost.size());
    for (size_t s = 0; s < code.stabilizers.size(); ++s) {
        const auto& st = code.stabilizers[s];
        for (size_t j = 0; j < lost.size(); ++j) {
            if (st.x.get(lost[j])) basis.set(s, j);
            if (st.z.get(lost[j])) basis.set(s, lost.size() + j);
        }
    }
    return in_span(restrict_to(op, lost), basis);
}

bool measurable(const StabilizerCode& code, const PauliOperator& op, const LossPattern& r) {
    check_commutes(code, op);
    return measurable_generic(code, op, r);
}

bool tree_measurable(const TreeMeta& tree, Logical which,
                     const std::function<bool(uint32_t)>& survives) {
    // D(v): the Z outcome of v is reconstructable from v's subtree, either
    // directly or through a surviving child whose own children are all
    // Z-reconstructable
    auto obtain_z = [&](auto&& self, uint32_t v) -> bool {
        if (survives(v)) return true;
        for (uint32_t c = tree.child_begin[v]; c < tree.child_end[v]; ++c) {
            if (!survives(c)) continue;
            bool ok = true;
            for (uint32_t g = tree.child_begin[c]; g < tree.child_end[c]; ++g)
                if (!self(self, g)) {
                    ok = false;
                    break;
                }
            if (ok) return true;
        }
        return false;
    };
    if (which == Logical::X) {
        for (uint32_t rc : tree.root_children)
            if (!obtain_z(obtain_z, rc)) return false;
        return true;
    }
    for (uint32_t rc : tree.root_children) {
        if (!survives(rc)) continue;
        bool ok = true;
        for (uint32_t g = tree.child_begin[rc]; g < tree.child_end[rc]; ++g)
            if (!obtain_z(obtain_z, g)) {
                ok = false;
                break;
            }
        if (ok) return true;
    }
    return false;
}

bool measurable(const StabilizerCode& code, Logical which, const LossPattern& r) {
    if (code.tree) {
        return tree_measurable(*code.tree, which,
                               [&](uint32_t q) { return r.surviving.get(q); });
    }
    return measurable_generic(code, which == Logical::X ? code.logical_x : code.logical_z, r);
}

namespace {

bool decodable_impl(const std::vector<PauliOperator>& stabs, const LossPattern& r) {
    auto lost = r.lost_indices();
    if (lost.empty()) return true;
    size_t c = lost.size();
    auto surv = r.surviving_indices();

    // A: commutation constraints on Paulis supported on the lost set; the
    // unknown is [x | z], so each stabilizer contributes [z | x] restricted
    Matrix a(stabs.size(), 2 * c);
    Matrix b(stabs.size(), 2 * surv.size());
    for (size_t s = 0; s < stabs.size(); ++s) {
        for (size_t j = 0; j < c; ++j) {
            if (stabs[s].z.get(lost[j])) a.set(s, j);
            if (stabs[s].x.get(lost[j])) a.set(s, c + j);
        }
        for (size_t j = 0; j < surv.size(); ++j) {
            if (stabs[s].x.get(surv[j])) b.set(s, j);
            if (stabs[s].z.get(surv[j])) b.set(s, surv.size() + j);
        }
    }
    // commuting Paulis on the lost set: 2c - rank(A) of them (as a GF(2)
    // space); stabilizers supported on the lost set: s_rank - rank(B).
    // Correctable iff the two spaces coincide. Generators are independent by
    // construction, so s_rank is the generator count.
    size_t dim_commuting = 2 * c - gf2::rank(a);
    size_t dim_stab_on_lost = stabs.size() - gf2::rank(b);
    return dim_commuting == dim_stab_on_lost;
}

}  // namespace

bool decodable(const StabilizerCode& code, const LossPattern& r) {
    if (r.n != code.n) throw std::invalid_argument("decodable: size mismatch");
    return decodable_impl(code.stabilizers, r);
}

bool decodable_joint(const codes::JointBellCode& code, const LossPattern& r) {
    if (r.n != 2 * code.n_pairs) throw std::invalid_argument("decodable: size mismatch");
    return decodable_impl(code.stabilizers, r);
}

double exact_probability(const StabilizerCode& code, double eta, Predicate pred) {
    double total = 0.0;
    erasure::enumerate_patterns(code.n, [&](const LossPattern& r) {
        bool ok;
        switch (pred.kind) {
            case Predicate::kDecodable: ok = decodable(code, r); break;
            case Predicate::kMeasurableX: ok = measurable(code, Logical::X, r); break;
            default: ok = measurable(code, Logical::Z, r); break;
        }
        if (ok) total += erasure::subset_probability(code.n, r, eta);
    });
    return total;
}

}  // namespace ltbsm::decodability
