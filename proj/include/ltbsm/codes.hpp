#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "ltbsm/gf2.hpp"

namespace ltbsm::codes {

// Tree layout in BFS order: depth-1 vertices first, children of a vertex
// contiguous. The (virtual) root is not a physical qubit; it is consumed by
// the encoding step, which is what makes both logical operators reachable by
// single-qubit measurements deep in the tree.
struct TreeMeta {
    std::vector<size_t> branching;
    size_t n = 0;
    std::vector<uint32_t> child_begin;
    std::vector<uint32_t> child_end;
    std::vector<uint32_t> root_children;

    size_t num_children(size_t v) const { return child_end[v] - child_begin[v]; }
};

// closed-form P(logical X measurable | eta), P(logical Z measurable | eta)
// for a tree code; exact for the independent per-qubit loss channel
struct TreeProbs {
    double px;
    double pz;
};
TreeProbs tree_measure_probabilities(const TreeMeta& tree, double eta);

struct StabilizerCode {
    size_t n = 0;
    std::vector<gf2::PauliOperator> stabilizers;
    gf2::PauliOperator logical_x;
    gf2::PauliOperator logical_z;
    std::string label;
    std::shared_ptr<const TreeMeta> tree;  // non-null for tree codes

    // throws std::invalid_argument when any stabilizer-code invariant fails;
    // codes above kFullValidationCap qubits get the cheaper overlap-pair check
    void validate() const;
};

inline constexpr size_t kFullValidationCap = 600;

StabilizerCode build_repetition(size_t n);
StabilizerCode build_qpc(size_t n, size_t m);
StabilizerCode build_tree_code(const std::vector<size_t>& branching);
StabilizerCode build_rotated_surface(size_t d);

// 2n-qubit joint code whose logical Bell states are n-fold physical Bell
// pairs; qubit 2i is side a of pair i, qubit 2i+1 side b
struct JointBellCode {
    size_t n_pairs = 0;
    std::vector<gf2::PauliOperator> stabilizers;
    gf2::PauliOperator logical_xx;
    gf2::PauliOperator logical_zz;
    std::string label;

    void validate() const;
};
JointBellCode build_bell_repetition(size_t n);

// QPC(n,2) variant: per block, a bare qubit q1 plus an inner-encoded q2
struct QpcVariantCode {
    size_t n_blocks = 0;
    StabilizerCode inner;
    std::string label;

    size_t block_stride() const { return 1 + inner.n; }
    size_t flattened_n() const { return n_blocks * block_stride(); }
    size_t q1_index(size_t block) const { return block * block_stride(); }
    size_t inner_offset(size_t block) const { return block * block_stride() + 1; }

    // full concatenated code; materialized on demand (large variants are
    // only ever used through the block map)
    StabilizerCode flattened() const;
};
QpcVariantCode build_qpc2_variant(size_t n_blocks, StabilizerCode inner);

using CodeVariant = std::variant<StabilizerCode, JointBellCode, QpcVariantCode>;

// spec strings: rep:n | qpc:n,m | tree:b1-b2-... | surface:d | bellrep:n |
// qpc2var:n/inner=<spec>
CodeVariant parse_code_spec(const std::string& spec);

size_t code_physical_qubits(const CodeVariant& code);
const std::string& code_label(const CodeVariant& code);

}  // namespace ltbsm::codes
